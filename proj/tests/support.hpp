#pragma once

// Shared helpers for the test binaries: random models and fields, and
// finite-difference oracles that do not go through the library's symbolic
// derivatives.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "taut/connection.hpp"
#include "taut/model.hpp"

namespace taut::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct RandomModel {
  FrameModel model;
  FoliationSplit split;
};

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// c0 + a sin(2 pi (k . x)) + b cos(2 pi (l . x)) with integer wave vectors,
/// so it is periodic on the unit box.
inline Expr random_periodic(std::mt19937& rng, std::size_t dim, double amplitude) {
  auto wave = [&]() {
    Expr arg = Expr::number(0.0);
    for (std::size_t m = 0; m < dim; ++m) {
      const auto k = static_cast<double>(static_cast<int>(pick(rng, 3)) - 1);
      if (k != 0.0) arg = arg + Expr::number(k) * Expr::variable(coordinate_name(m));
    }
    return Expr::number(kTwoPi) * arg;
  };
  return Expr::number(uniform(rng, -amplitude, amplitude)) +
         Expr::number(uniform(rng, -amplitude, amplitude)) * Expr::call(Function::Sin, wave()) +
         Expr::number(uniform(rng, -amplitude, amplitude)) * Expr::call(Function::Cos, wave());
}

inline std::vector<std::size_t> random_leaf_set(std::mt19937& rng, std::size_t dim) {
  std::vector<std::size_t> leaf;
  while (leaf.empty() || leaf.size() == dim) {
    leaf.clear();
    for (std::size_t i = 0; i < dim; ++i)
      if (pick(rng, 2) == 0) leaf.push_back(i);
  }
  return leaf;
}

/// Chart frame diag(e^{g_i}) R(theta) [R'(psi)] on the unit torus of dimension
/// 2 or 3. Always invertible with det = e^{sum g_i}.
inline RandomModel random_chart_model(std::mt19937& rng, std::size_t dim) {
  std::vector<Expr> scale(dim);
  for (auto& g : scale) g = Expr::call(Function::Exp, random_periodic(rng, dim, 0.3));
  std::vector<Expr> rot(dim * dim, Expr::number(0.0));
  for (std::size_t i = 0; i < dim; ++i) rot[i * dim + i] = Expr::number(1.0);
  auto rotate = [&](std::size_t a, std::size_t b) {
    const Expr t = random_periodic(rng, dim, 0.8);
    std::vector<Expr> r(dim * dim, Expr::number(0.0));
    for (std::size_t i = 0; i < dim; ++i) r[i * dim + i] = Expr::number(1.0);
    r[a * dim + a] = Expr::call(Function::Cos, t);
    r[a * dim + b] = Expr::call(Function::Sin, t);
    r[b * dim + a] = -Expr::call(Function::Sin, t);
    r[b * dim + b] = Expr::call(Function::Cos, t);
    std::vector<Expr> out(dim * dim, Expr::number(0.0));
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t k = 0; k < dim; ++k) out[i * dim + j] = out[i * dim + j] + rot[i * dim + k] * r[k * dim + j];
    rot = out;
  };
  rotate(0, 1);
  if (dim == 3) rotate(1, 2);
  std::vector<Expr> frame(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) frame[i * dim + j] = scale[i] * rot[i * dim + j];
  auto model = FrameModel::chart("random-chart", {}, std::vector<double>(dim, 1.0), frame);
  auto split = FoliationSplit::from_leaf_indices(dim, random_leaf_set(rng, dim));
  return {std::move(model), std::move(split)};
}

/// Constant-structure models from Lie algebras with known brackets: random
/// diagonal suspensions, scaled Heisenberg, scaled so(3), and a solvable
/// algebra with a nilpotent part.
inline RandomModel random_constant_model(std::mt19937& rng) {
  std::vector<StructureConstant> entries;
  std::size_t dim = 0;
  auto c = [](double v) { return Expr::number(v); };
  switch (pick(rng, 4)) {
    case 0: {
      dim = 2 + pick(rng, 3);
      std::vector<double> logs(dim - 1);
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < logs.size(); ++i) sum += logs[i] = uniform(rng, -1.5, 1.5);
      logs.back() = -sum;
      for (std::size_t i = 1; i < dim; ++i) entries.push_back({0, i, i, c(logs[i - 1])});
      break;
    }
    case 1: {
      dim = 3;
      entries.push_back({0, 1, 2, c(uniform(rng, 0.2, 2.0))});
      break;
    }
    case 2: {
      dim = 3;
      const double s = uniform(rng, 0.2, 2.0);
      entries = {{0, 1, 2, c(s)}, {1, 2, 0, c(s)}, {0, 2, 1, c(-s)}};
      break;
    }
    default: {
      // [E0, E1] = a E1 + b E2, [E0, E2] = a E2, others zero.
      dim = 3;
      const double a = uniform(rng, -1.0, 1.0);
      entries = {{0, 1, 1, c(a)}, {0, 1, 2, c(uniform(rng, -1.0, 1.0))}, {0, 2, 2, c(a)}};
      break;
    }
  }
  auto model = FrameModel::constant_structure("random-constant", dim, {}, entries);
  auto split = FoliationSplit::from_leaf_indices(dim, random_leaf_set(rng, dim));
  return {std::move(model), std::move(split)};
}

/// Random field; `support` restricts the nonzero components.
inline VectorFieldSpec random_field(std::mt19937& rng, const FrameModel& m, const std::vector<std::size_t>& support) {
  std::vector<Expr> comps(m.dim(), Expr::number(0.0));
  for (std::size_t k : support)
    comps[k] = m.is_chart() ? random_periodic(rng, m.dim(), 1.0) : Expr::number(uniform(rng, -2.0, 2.0));
  return VectorFieldSpec(comps);
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

inline Point random_point(std::mt19937& rng, const FrameModel& m) {
  if (!m.is_chart()) return {};
  Point p(m.dim());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = uniform(rng, 0.0, m.chart_data().periods[i]);
  return p;
}

/// Frame matrix evaluated entrywise, no derivatives involved.
inline Eigen::MatrixXd frame_matrix(const FrameModel& m, const Point& p) {
  const std::size_t n = m.dim();
  const Env env = m.environment(p);
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = eval(m.chart_data().frame[i * n + j], env);
  return a;
}

/// Structure functions from central differences of the frame matrix (step h):
/// [E_i, E_j]^m = sum_l (a_i^l d_l a_j^m - a_j^l d_l a_i^m), solved back into the frame.
inline StructureTable fd_structure(const FrameModel& m, const Point& p, double h = 1e-5) {
  const std::size_t n = m.dim();
  const Eigen::MatrixXd a = frame_matrix(m, p);
  std::vector<Eigen::MatrixXd> da(n);
  for (std::size_t l = 0; l < n; ++l) {
    Point up = p;
    Point down = p;
    up[l] += h;
    down[l] -= h;
    da[l] = (frame_matrix(m, up) - frame_matrix(m, down)) / (2.0 * h);
  }
  StructureTable c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Eigen::VectorXd coord = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t mm = 0; mm < n; ++mm)
        for (std::size_t l = 0; l < n; ++l) {
          const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
          const auto M = static_cast<Eigen::Index>(mm), L = static_cast<Eigen::Index>(l);
          coord(M) += a(I, L) * da[l](J, M) - a(J, L) * da[l](I, M);
        }
      // coord = sum_k C_ij^k a_k, i.e. a^T c = coord.
      const Eigen::VectorXd sol = a.transpose().fullPivLu().solve(coord);
      for (std::size_t k = 0; k < n; ++k) c(i, j, k) = sol(static_cast<Eigen::Index>(k));
    }
  return c;
}

// Random expressions in x1, x2, x3 that stay finite on [-1, 1]^3: every ln,
// sqrt and division is guarded by a positive shift.
class ExprGenerator {
 public:
  explicit ExprGenerator(unsigned seed) : rng_(seed) {}

  Expr operator()(int depth) {
    if (depth == 0 || pick(5) == 0) return leaf();
    switch (pick(10)) {
      case 0: return grow(depth) + grow(depth);
      case 1: return grow(depth) - grow(depth);
      case 2: return grow(depth) * grow(depth);
      case 3: return grow(depth) / (Expr::number(2.5) + Expr::call(Function::Sin, grow(depth)));
      case 4: return Expr::negate(grow(depth));
      case 5: return Expr::binary(ExprKind::Pow, Expr::call(Function::Cos, grow(depth)), Expr::number(pick(4)));
      case 6: return Expr::call(Function::Sin, grow(depth));
      case 7: return Expr::call(Function::Exp, Expr::call(Function::Cos, grow(depth)));
      case 8:
        return Expr::call(Function::Ln, Expr::number(1.5) + Expr::call(Function::Sin, grow(depth)));
      default: {
        const Expr g = grow(depth);
        return Expr::call(Function::Sqrt, Expr::number(1.0) + g * g);
      }
    }
  }

  Env environment() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {{"x1", u(rng_)}, {"x2", u(rng_)}, {"x3", u(rng_)}};
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  Expr grow(int depth) { return (*this)(depth - 1); }

  Expr leaf() {
    switch (pick(4)) {
      case 0: return Expr::variable(coordinate_name(static_cast<std::size_t>(pick(3))));
      case 1: return Expr::constant(pick(2) == 0 ? NamedConstant::Pi : NamedConstant::E);
      case 2: return Expr::number(std::uniform_real_distribution<double>(-3.0, 3.0)(rng_));
      default: return Expr::number(pick(5));
    }
  }

  std::mt19937 rng_;
};

}  // namespace taut::testing
