#include "taut/connection.hpp"

#include <algorithm>
#include <numeric>

namespace taut {

ChristoffelTable christoffel(const StructureTable& c) {
  const std::size_t n = c.dim();
  ChristoffelTable g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) g(i, j, k) = 0.5 * (c(i, j, k) + c(k, i, j) + c(k, j, i));
  return g;
}

ChristoffelTable christoffel(const FrameModel& m, const Point& p) { return christoffel(structure_functions(m, p)); }

std::vector<double> covariant_derivative(const FrameModel& m, const LocalFrame& f, const ChristoffelTable& gamma,
                                         const VectorFieldSpec& v, std::size_t i) {
  const std::size_t n = m.dim();
  const std::vector<double> vj = v.values(f.env);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = directional_derivative(m, f, v, k, i);
    for (std::size_t j = 0; j < n; ++j) s += vj[j] * gamma(i, j, k);
    out[k] = s;
  }
  return out;
}

std::vector<double> covariant_derivative(const FrameModel& m, const VectorFieldSpec& v, std::size_t i,
                                         const Point& p) {
  v.bind(m);
  const LocalFrame f = local_frame(m, p);
  return covariant_derivative(m, f, christoffel(f.structure), v, i);
}

double divergence_sub(const FrameModel& m, const LocalFrame& f, const ChristoffelTable& gamma,
                      const std::vector<std::size_t>& indices, const VectorFieldSpec& v) {
  const std::vector<double> vj = v.values(f.env);
  double sum = 0.0;
  for (std::size_t i : indices) {
    double s = directional_derivative(m, f, v, i, i);
    for (std::size_t j = 0; j < m.dim(); ++j) s += vj[j] * gamma(i, j, i);
    sum += s;
  }
  return sum;
}

double divergence_sub(const FrameModel& m, const std::vector<std::size_t>& indices, const VectorFieldSpec& v,
                      const Point& p) {
  if (indices.empty()) throw ValidationError("divergence over an empty index set");
  for (auto i : indices)
    if (i >= m.dim()) throw ValidationError("frame index out of range");
  v.bind(m);
  const LocalFrame f = local_frame(m, p);
  return divergence_sub(m, f, christoffel(f.structure), indices, v);
}

double divergence(const FrameModel& m, const VectorFieldSpec& v, const Point& p) {
  std::vector<std::size_t> all(m.dim());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return divergence_sub(m, all, v, p);
}

double transverse_divergence(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                             const Point& p) {
  return divergence_sub(m, split.transverse(), v, p);
}

MeanCurvatureVector mean_curvature(const ChristoffelTable& gamma, const std::vector<std::size_t>& indices) {
  const std::size_t n = gamma.dim();
  if (indices.empty() || indices.size() >= n)
    throw ValidationError("mean curvature needs a nonempty proper subset of frame indices");
  MeanCurvatureVector kappa{std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    if (std::find(indices.begin(), indices.end(), k) != indices.end()) continue;
    double s = 0.0;
    for (std::size_t a : indices) s += gamma(a, a, k);
    kappa.components[k] = s;
  }
  return kappa;
}

MeanCurvatureVector mean_curvature(const FrameModel& m, const std::vector<std::size_t>& indices, const Point& p) {
  for (auto i : indices)
    if (i >= m.dim()) throw ValidationError("frame index out of range");
  return mean_curvature(christoffel(m, p), indices);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace taut
