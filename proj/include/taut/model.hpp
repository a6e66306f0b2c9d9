#pragma once

// Foliated manifold models described by a global orthonormal frame.
//
// The metric is never stored: g(E_i, E_j) = delta_ij defines it. Two flavours
// exist. A constant-structure model carries the structure constants C_ij^k of
// [E_i, E_j] = C_ij^k E_k directly (a left-invariant frame on a compact
// quotient, where nothing depends on position). A chart model lives on a
// periodic box and carries the frame as coordinate coefficients
// E_i = sum_m a_i^m d/dx_m, each one an Expr.
//
// Frame indices are zero-based here; user-facing formats are one-based.

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "taut/expr.hpp"

namespace taut {

using Point = std::vector<double>;
using Parameters = std::map<std::string, double, std::less<>>;

/// Dense n x n x n table indexed (i, j, k). The tag keeps structure functions
/// and connection coefficients from being mixed up.
template <class Tag>
class FrameTensor3 {
 public:
  FrameTensor3() = default;
  explicit FrameTensor3(std::size_t n) : n_(n), data_(n * n * n, 0.0) {}

  std::size_t dim() const { return n_; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * n_ + j) * n_ + k]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * n_ + j) * n_ + k];
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// C_ij^k with [E_i, E_j] = sum_k C_ij^k E_k.
using StructureTable = FrameTensor3<struct StructureTag>;

enum class ModelKind { ConstantStructure, Chart };

struct StructureConstant {
  std::size_t i = 0;  ///< i < j
  std::size_t j = 0;
  std::size_t k = 0;
  Expr value;  ///< over parameters only
};

struct ConstantStructureData {
  std::vector<StructureConstant> entries;
  StructureTable table;  ///< antisymmetric completion of `entries`
};

struct ChartData {
  std::vector<double> periods;
  /// Row-major n x n; row i holds the coordinate coefficients of E_i.
  std::vector<Expr> frame;
  /// partials[(i * n + m) * n + l] = d a_i^m / d x_l
  std::vector<Expr> partials;
  /// Per coordinate: 0 for none, otherwise coordinates are reduced modulo this
  /// value before evaluation (used by finite covers).
  std::vector<double> reduce_periods;
};

class FrameModel {
 public:
  FrameModel(std::string name, Parameters parameters, ConstantStructureData data, std::size_t dim);
  FrameModel(std::string name, Parameters parameters, ChartData data);

  /// Builds a constant-structure model from sparse entries (i < j), checking
  /// indices and binding the value expressions to `parameters`.
  static FrameModel constant_structure(std::string name, std::size_t dim, Parameters parameters,
                                       std::vector<StructureConstant> entries);
  /// Builds a chart model, checking shapes and variable bindings and
  /// precomputing the frame's partial derivatives.
  static FrameModel chart(std::string name, Parameters parameters, std::vector<double> periods,
                          std::vector<Expr> frame);

  ModelKind kind() const {
    return std::holds_alternative<ChartData>(payload_) ? ModelKind::Chart : ModelKind::ConstantStructure;
  }
  bool is_chart() const { return kind() == ModelKind::Chart; }
  std::size_t dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const Parameters& parameters() const { return parameters_; }
  const ChartData& chart_data() const;
  const ConstantStructureData& constant_data() const;

  bool dense_leaves = false;
  /// Free-form modelling assumptions (e.g. compactness of a quotient).
  std::string notes;

  /// Parameters plus coordinates (reduced modulo cover periods) at `p`.
  Env environment(const Point& p) const;

  /// Throws BindError if `e` references anything but parameters (and
  /// coordinates, when `allow_coordinates`).
  void check_binding(const Expr& e, bool allow_coordinates, const std::string& where) const;

  void set_name(std::string name) { name_ = std::move(name); }

 private:
  std::string name_;
  std::size_t dim_ = 0;
  Parameters parameters_;
  std::variant<ConstantStructureData, ChartData> payload_;
};

/// Partition of frame indices into leafwise (tangent to the foliation) and
/// transverse directions.
class FoliationSplit {
 public:
  /// Throws ValidationError on empty leaf set, full leaf set, duplicates or
  /// out-of-range indices. Indices are zero-based.
  static FoliationSplit from_leaf_indices(std::size_t dim, std::vector<std::size_t> leaf);

  const std::vector<std::size_t>& leaf() const { return leaf_; }
  const std::vector<std::size_t>& transverse() const { return transverse_; }
  std::size_t dim() const { return leaf_.size() + transverse_.size(); }
  bool is_leaf(std::size_t index) const;

 private:
  std::vector<std::size_t> leaf_;
  std::vector<std::size_t> transverse_;
};

/// v = sum_k v^k E_k with expression-valued frame components. Coordinate
/// partials of the components are computed once at construction.
class VectorFieldSpec {
 public:
  VectorFieldSpec() = default;
  explicit VectorFieldSpec(std::vector<Expr> components);

  static VectorFieldSpec constant(const std::vector<double>& values);
  static VectorFieldSpec zero(std::size_t dim);

  std::size_t dim() const { return components_.size(); }
  const std::vector<Expr>& components() const { return components_; }
  const Expr& component(std::size_t k) const { return components_[k]; }
  /// d v^k / d x_l
  const Expr& partial(std::size_t k, std::size_t l) const { return partials_[k * dim() + l]; }

  std::vector<double> values(const Env& env) const;

  /// Checks component count and bindings against `model`. Constant-structure
  /// models only accept parameter-valued components.
  void bind(const FrameModel& model) const;

 private:
  std::vector<Expr> components_;
  std::vector<Expr> partials_;
};

VectorFieldSpec scale(const VectorFieldSpec& v, double factor);
VectorFieldSpec add(const VectorFieldSpec& a, const VectorFieldSpec& b);

struct Grid {
  std::vector<std::size_t> resolution;  ///< empty for constant-structure models
  std::vector<Point> points;            ///< one empty point for constant-structure models
};

/// Cell-centred uniform lattice (j + 1/2) L_m / N_m for chart models, the
/// single abstract point for constant-structure models. A single resolution
/// value is broadcast to every coordinate.
Grid sample_grid(const FrameModel& m, const std::vector<std::size_t>& resolution);

/// Frame data evaluated at one point. Building it once per point lets the
/// connection routines share the frame solve.
struct LocalFrame {
  Point point;
  Env env;
  Eigen::MatrixXd frame;     ///< rows are E_i in coordinates (chart only)
  double determinant = 1.0;  ///< det(frame); 1 for constant-structure models
  StructureTable structure;
};

/// Evaluates the frame, its determinant and the structure functions at `p`.
/// Chart models: [E_i, E_j] = sum_m (E_i(a_j^m) - E_j(a_i^m)) d_m, expressed
/// back in the frame by a linear solve. Throws SingularFrame when |det| < 1e-10.
LocalFrame local_frame(const FrameModel& m, const Point& p);

StructureTable structure_functions(const FrameModel& m, const Point& p);

/// E_i(h) = sum_m a_i^m d_m h for a field component, 0 on constant-structure models.
double directional_derivative(const FrameModel& m, const LocalFrame& f, const VectorFieldSpec& v,
                              std::size_t component, std::size_t direction);

inline constexpr double kSingularFrameThreshold = 1e-10;

struct CheckResult {
  std::string name;
  bool passed = true;
  double worst_value = 0.0;
  Point worst_point;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Structural diagnostics: frame invertibility (cell centres and lattice
/// vertices) and periodicity for charts, antisymmetry of C, and the Jacobi
/// identity for constant-structure models (tolerance 1e-12).
ValidationReport validate_model(const FrameModel& m, const Grid& g);

struct BasicCheck {
  bool basic = true;
  double worst_residual = 0.0;
  Point worst_point;
  std::size_t worst_leaf_index = 0;
};

inline constexpr double kDefaultBasicTolerance = 1e-9;

/// Basic-field test: for every leafwise F_a the transverse part of [F_a, v],
/// sum_{k in Q} (F_a(v^k) + sum_j v^j C_aj^k) E_k, must vanish on the grid.
BasicCheck check_basic(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                       const Grid& g, double tol = kDefaultBasicTolerance);

}  // namespace taut
