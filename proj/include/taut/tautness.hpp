#pragma once

// Divergence-based tautness test for Riemannian foliations.
//
// A foliation on a closed manifold is non-taut exactly when some basic field v
// has div^Q v >= 0 everywhere and > 0 somewhere. Every routine here samples a
// finite grid, so a witness verdict is evidence, not proof, and a zero or
// mixed-sign verdict only speaks for the candidate field that was tried.

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "taut/connection.hpp"
#include "taut/model.hpp"

namespace taut {

enum class VerdictClass { IdenticallyZero, MixedSign, NonTautWitness, NegatedNonTautWitness, Inconclusive };

std::string_view to_string(VerdictClass v);
/// What the verdict does and does not establish.
std::string_view epistemic_status(VerdictClass v);

inline constexpr double kDefaultTautTolerance = 1e-9;

struct TautnessVerdict {
  VerdictClass verdict = VerdictClass::Inconclusive;
  double min = 0.0;
  double max = 0.0;
  Point argmin;
  Point argmax;
  double tolerance = kDefaultTautTolerance;
  std::size_t samples = 0;
};

/// Applies the sign rules to sampled values (ties within +-tol count as zero).
TautnessVerdict classify_values(const std::vector<double>& values, const std::vector<Point>& points, double tol);

/// div^Q v at every grid point, in grid order. `threads` > 1 splits the grid
/// across worker threads; results are stored by index, so the output is
/// identical to the serial run.
std::vector<double> transverse_divergence_on_grid(const FrameModel& m, const FoliationSplit& split,
                                                  const VectorFieldSpec& v, const Grid& grid, unsigned threads = 1);

/// Refuses non-basic fields (NonBasicField carrying the worst residual).
TautnessVerdict classify_divergence(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                                    const Grid& grid, double tol = kDefaultTautTolerance, unsigned threads = 1);

/// kappa^# of the leaves as a field, for models whose mean curvature is
/// already basic. Chart models get exact symbolic components.
VectorFieldSpec alvarez_candidate(const FrameModel& m, const FoliationSplit& split);

struct QuadratureReport {
  double lhs = 0.0;  ///< integral of div^Q v
  double rhs = 0.0;  ///< integral of <v, kappa^#>
  double abs_error = 0.0;
  std::vector<std::size_t> resolution;
  std::string density;
};

/// Transverse Green formula on a chart model with cell-centred Riemann sums
/// weighted by the Riemannian density 1/|det(frame)|.
QuadratureReport green_check(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                             const std::vector<std::size_t>& resolution);

struct VolumeReport {
  bool preserved = false;
  bool dense_leaves_asserted = false;
  TautnessVerdict verdict;
  std::string explanation;
};

/// L_v nu_Q = div^Q v nu_Q, so the transverse volume is preserved exactly when
/// div^Q v vanishes identically.
VolumeReport volume_preservation_check(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                                       const Grid& grid, double tol = kDefaultTautTolerance);

struct CoverLift {
  FrameModel model;
  FoliationSplit split;
  VectorFieldSpec field;
  std::size_t coord = 0;  ///< zero-based
  std::size_t fold = 1;
  double base_period = 0.0;
};

/// k-fold cover unrolling coordinate `coord` (zero-based): the period becomes
/// k L, expressions are unchanged and read coordinates modulo L.
CoverLift lift_to_cover(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v, std::size_t coord,
                        std::size_t k);

/// Covering projection: reduces coordinate `coord` modulo the base period.
Point project_to_base(const CoverLift& lift, const Point& p);

/// Averages a field on the cover over the k deck translations and returns the
/// result as a field on the base model.
VectorFieldSpec deck_average(const CoverLift& lift, const VectorFieldSpec& cover_field);

}  // namespace taut
