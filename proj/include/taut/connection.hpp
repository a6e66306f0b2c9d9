#pragma once

// Levi-Civita data in an orthonormal frame.

#include <cstddef>
#include <vector>

#include "taut/model.hpp"

namespace taut {

/// Gamma_ij^k = g(nabla_{E_i} E_j, E_k).
using ChristoffelTable = FrameTensor3<struct ChristoffelTag>;

/// Frame components of a mean curvature vector; zero on the indices of the
/// distribution it belongs to. Orthonormality makes the musical isomorphisms
/// the identity on components, so the same values describe the 1-form.
struct MeanCurvatureVector {
  std::vector<double> components;
};

/// Koszul formula in an orthonormal frame:
/// Gamma_ij^k = 1/2 (C_ij^k + C_ki^j + C_kj^i).
ChristoffelTable christoffel(const StructureTable& c);
ChristoffelTable christoffel(const FrameModel& m, const Point& p);

/// Components of nabla_{E_i} v: E_i(v^k) + sum_j v^j Gamma_ij^k.
std::vector<double> covariant_derivative(const FrameModel& m, const LocalFrame& f, const ChristoffelTable& gamma,
                                         const VectorFieldSpec& v, std::size_t i);
std::vector<double> covariant_derivative(const FrameModel& m, const VectorFieldSpec& v, std::size_t i,
                                         const Point& p);

/// div^D v = sum_{i in D} g(nabla_{E_i} v, E_i).
double divergence_sub(const FrameModel& m, const LocalFrame& f, const ChristoffelTable& gamma,
                      const std::vector<std::size_t>& indices, const VectorFieldSpec& v);
double divergence_sub(const FrameModel& m, const std::vector<std::size_t>& indices, const VectorFieldSpec& v,
                      const Point& p);

/// Divergence over the whole frame.
double divergence(const FrameModel& m, const VectorFieldSpec& v, const Point& p);

/// Transverse divergence div^Q v.
double transverse_divergence(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                             const Point& p);

/// kappa_D^# = pi_{D-perp}(sum_{a in D} nabla_{E_a} E_a); component k (k not in
/// D) is sum_{a in D} Gamma_aa^k. Throws ValidationError unless D is a nonempty
/// proper subset.
MeanCurvatureVector mean_curvature(const ChristoffelTable& gamma, const std::vector<std::size_t>& indices);
MeanCurvatureVector mean_curvature(const FrameModel& m, const std::vector<std::size_t>& indices, const Point& p);

double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace taut
