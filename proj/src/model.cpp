#include "taut/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace taut {

FrameModel::FrameModel(std::string name, Parameters parameters, ConstantStructureData data,
                       std::size_t dim)
    : name_(std::move(name)), dim_(dim), parameters_(std::move(parameters)), payload_(std::move(data)) {}

FrameModel::FrameModel(std::string name, Parameters parameters, ChartData data)
    : name_(std::move(name)),
      dim_(data.periods.size()),
      parameters_(std::move(parameters)),
      payload_(std::move(data)) {}

namespace {

void check_parameter_names(const Parameters& parameters) {
  for (const auto& [name, value] : parameters) {
    if (is_reserved_identifier(name))
      throw SchemaError("parameter name '" + name + "' is reserved");
    if (name.size() > 1 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw SchemaError("parameter name '" + name + "' collides with a coordinate name");
    if (!std::isfinite(value)) throw SchemaError("parameter '" + name + "' is not finite");
  }
}

}  // namespace

FrameModel FrameModel::constant_structure(std::string name, std::size_t dim, Parameters parameters,
                                          std::vector<StructureConstant> entries) {
  if (dim == 0) throw SchemaError("model dimension must be positive");
  check_parameter_names(parameters);
  ConstantStructureData data;
  data.table = StructureTable(dim);
  Env env(parameters.begin(), parameters.end());
  for (const auto& c : entries) {
    if (c.i >= dim || c.j >= dim || c.k >= dim)
      throw SchemaError("structure constant index out of range");
    if (c.i >= c.j) throw SchemaError("structure constants must be given with i < j");
    for (const auto& v : free_variables(c.value))
      if (!env.contains(v)) throw BindError("structure constant references unknown parameter '" + v + "'");
    const double value = eval(c.value, env);
    data.table(c.i, c.j, c.k) += value;
    data.table(c.j, c.i, c.k) -= value;
  }
  data.entries = std::move(entries);
  return FrameModel(std::move(name), std::move(parameters), std::move(data), dim);
}

FrameModel FrameModel::chart(std::string name, Parameters parameters, std::vector<double> periods,
                             std::vector<Expr> frame) {
  const std::size_t n = periods.size();
  if (n == 0) throw SchemaError("model dimension must be positive");
  if (frame.size() != n * n)
    throw SchemaError("frame must hold dim*dim = " + std::to_string(n * n) + " entries, got " +
                      std::to_string(frame.size()));
  for (double L : periods)
    if (!(L > 0.0) || !std::isfinite(L)) throw SchemaError("periods must be positive");
  check_parameter_names(parameters);

  ChartData data;
  data.periods = std::move(periods);
  data.reduce_periods.assign(n, 0.0);
  data.partials.reserve(n * n * n);
  for (const auto& a : frame)
    for (std::size_t l = 0; l < n; ++l) data.partials.push_back(differentiate(a, coordinate_name(l)));
  data.frame = std::move(frame);

  FrameModel m(std::move(name), std::move(parameters), std::move(data));
  for (std::size_t idx = 0; idx < n * n; ++idx) {
    m.check_binding(m.chart_data().frame[idx], true,
                    "frame entry (" + std::to_string(idx / n + 1) + ", " + std::to_string(idx % n + 1) + ")");
  }
  return m;
}

const ChartData& FrameModel::chart_data() const {
  if (const auto* c = std::get_if<ChartData>(&payload_)) return *c;
  throw ValidationError("model '" + name_ + "' is not a chart model");
}

const ConstantStructureData& FrameModel::constant_data() const {
  if (const auto* c = std::get_if<ConstantStructureData>(&payload_)) return *c;
  throw ValidationError("model '" + name_ + "' is not a constant-structure model");
}

Env FrameModel::environment(const Point& p) const {
  Env env(parameters_.begin(), parameters_.end());
  if (const auto* c = std::get_if<ChartData>(&payload_)) {
    if (p.size() != dim_)
      throw ValidationError("point has " + std::to_string(p.size()) + " coordinates, model dimension is " +
                            std::to_string(dim_));
    for (std::size_t m = 0; m < dim_; ++m) {
      double x = p[m];
      const double r = c->reduce_periods[m];
      if (r > 0.0) x -= r * std::floor(x / r);
      env[coordinate_name(m)] = x;
    }
  }
  return env;
}

void FrameModel::check_binding(const Expr& e, bool allow_coordinates, const std::string& where) const {
  for (const auto& v : free_variables(e)) {
    if (parameters_.contains(v)) continue;
    bool is_coordinate = false;
    for (std::size_t m = 0; m < dim_ && !is_coordinate; ++m) is_coordinate = coordinate_name(m) == v;
    if (is_coordinate && allow_coordinates) continue;
    if (is_coordinate) throw BindError(where + " references coordinate '" + v + "' on a model without a chart");
    throw BindError(where + " references unknown variable '" + v + "'");
  }
}

// ---------------------------------------------------------------------------

FoliationSplit FoliationSplit::from_leaf_indices(std::size_t dim, std::vector<std::size_t> leaf) {
  if (leaf.empty()) throw ValidationError("empty leaf set");
  std::sort(leaf.begin(), leaf.end());
  if (std::adjacent_find(leaf.begin(), leaf.end()) != leaf.end())
    throw ValidationError("duplicate leaf index");
  if (leaf.back() >= dim) throw ValidationError("leaf index out of range");
  if (leaf.size() == dim) throw ValidationError("empty transverse set");
  FoliationSplit s;
  s.leaf_ = std::move(leaf);
  for (std::size_t i = 0; i < dim; ++i)
    if (!std::binary_search(s.leaf_.begin(), s.leaf_.end(), i)) s.transverse_.push_back(i);
  return s;
}

bool FoliationSplit::is_leaf(std::size_t index) const {
  return std::binary_search(leaf_.begin(), leaf_.end(), index);
}

// ---------------------------------------------------------------------------

VectorFieldSpec::VectorFieldSpec(std::vector<Expr> components) : components_(std::move(components)) {
  const std::size_t n = components_.size();
  partials_.reserve(n * n);
  for (const auto& c : components_)
    for (std::size_t l = 0; l < n; ++l) partials_.push_back(differentiate(c, coordinate_name(l)));
}

VectorFieldSpec VectorFieldSpec::constant(const std::vector<double>& values) {
  std::vector<Expr> c;
  c.reserve(values.size());
  for (double v : values) c.push_back(Expr::number(v));
  return VectorFieldSpec(std::move(c));
}

VectorFieldSpec VectorFieldSpec::zero(std::size_t dim) { return constant(std::vector<double>(dim, 0.0)); }

std::vector<double> VectorFieldSpec::values(const Env& env) const {
  std::vector<double> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(eval(c, env));
  return out;
}

void VectorFieldSpec::bind(const FrameModel& model) const {
  if (dim() != model.dim())
    throw SchemaError("field has " + std::to_string(dim()) + " components, model '" + model.name() +
                      "' has dimension " + std::to_string(model.dim()));
  for (std::size_t k = 0; k < dim(); ++k)
    model.check_binding(components_[k], model.is_chart(), "field component " + std::to_string(k + 1));
}

VectorFieldSpec scale(const VectorFieldSpec& v, double factor) {
  std::vector<Expr> c;
  for (const auto& e : v.components()) c.push_back(Expr::number(factor) * e);
  return VectorFieldSpec(std::move(c));
}

VectorFieldSpec add(const VectorFieldSpec& a, const VectorFieldSpec& b) {
  if (a.dim() != b.dim()) throw SchemaError("cannot add fields of different dimension");
  std::vector<Expr> c;
  for (std::size_t k = 0; k < a.dim(); ++k) c.push_back(a.component(k) + b.component(k));
  return VectorFieldSpec(std::move(c));
}

// ---------------------------------------------------------------------------

Grid sample_grid(const FrameModel& m, const std::vector<std::size_t>& resolution) {
  Grid g;
  if (!m.is_chart()) {
    g.points.emplace_back();
    return g;
  }
  const auto& periods = m.chart_data().periods;
  const std::size_t n = m.dim();
  if (resolution.size() == 1) {
    g.resolution.assign(n, resolution.front());
  } else if (resolution.size() == n) {
    g.resolution = resolution;
  } else {
    throw SchemaError("grid resolution needs 1 or " + std::to_string(n) + " entries");
  }
  for (auto r : g.resolution)
    if (r == 0) throw SchemaError("grid resolution entries must be >= 1");

  const std::size_t total =
      std::accumulate(g.resolution.begin(), g.resolution.end(), std::size_t{1}, std::multiplies<>());
  g.points.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t count = 0; count < total; ++count) {
    Point p(n);
    for (std::size_t c = 0; c < n; ++c)
      p[c] = (static_cast<double>(idx[c]) + 0.5) * periods[c] / static_cast<double>(g.resolution[c]);
    g.points.push_back(std::move(p));
    // Last coordinate varies fastest.
    for (std::size_t c = n; c-- > 0;) {
      if (++idx[c] < g.resolution[c]) break;
      idx[c] = 0;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

LocalFrame local_frame(const FrameModel& m, const Point& p) {
  LocalFrame f;
  f.point = p;
  f.env = m.environment(p);
  const std::size_t n = m.dim();
  if (!m.is_chart()) {
    f.structure = m.constant_data().table;
    return f;
  }
  const auto& chart = m.chart_data();
  f.frame.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n; ++c) f.frame(i, c) = eval(chart.frame[i * n + c], f.env);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(f.frame.transpose());
  f.determinant = lu.determinant();
  if (!(std::abs(f.determinant) >= kSingularFrameThreshold)) {
    throw SingularFrame("frame matrix is singular (|det| = " + std::to_string(std::abs(f.determinant)) +
                        ") in model '" + m.name() + "'");
  }

  std::vector<double> partial(n * n * n);
  for (std::size_t idx = 0; idx < partial.size(); ++idx) partial[idx] = eval(chart.partials[idx], f.env);
  const auto d = [&](std::size_t i, std::size_t c, std::size_t l) { return partial[(i * n + c) * n + l]; };

  f.structure = StructureTable(n);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t c = 0; c < n; ++c) {
        double b = 0.0;
        for (std::size_t l = 0; l < n; ++l) b += f.frame(i, l) * d(j, c, l) - f.frame(j, l) * d(i, c, l);
        rhs(c) = b;
      }
      // sum_k C_ij^k a_k^c = b^c
      const Eigen::VectorXd coeff = lu.solve(rhs);
      for (std::size_t k = 0; k < n; ++k) {
        f.structure(i, j, k) = coeff(k);
        f.structure(j, i, k) = -coeff(k);
      }
    }
  }
  return f;
}

StructureTable structure_functions(const FrameModel& m, const Point& p) { return local_frame(m, p).structure; }

double directional_derivative(const FrameModel& m, const LocalFrame& f, const VectorFieldSpec& v,
                              std::size_t component, std::size_t direction) {
  if (!m.is_chart()) return 0.0;
  double sum = 0.0;
  for (std::size_t l = 0; l < m.dim(); ++l) {
    const double a = f.frame(direction, l);
    if (a != 0.0) sum += a * eval(v.partial(component, l), f.env);
  }
  return sum;
}

// ---------------------------------------------------------------------------

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

constexpr double kStructureTolerance = 1e-12;

Eigen::MatrixXd frame_values(const FrameModel& m, const Point& p) {
  const auto& chart = m.chart_data();
  const std::size_t n = m.dim();
  const Env env = m.environment(p);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n; ++c) a(i, c) = eval(chart.frame[i * n + c], env);
  return a;
}

std::vector<Point> vertex_lattice(const FrameModel& m, const Grid& g) {
  const auto& periods = m.chart_data().periods;
  std::vector<Point> out;
  out.reserve(g.points.size());
  for (Point p : g.points) {
    for (std::size_t c = 0; c < p.size(); ++c) p[c] -= 0.5 * periods[c] / static_cast<double>(g.resolution[c]);
    out.push_back(std::move(p));
  }
  return out;
}

CheckResult check_invertibility(const FrameModel& m, const Grid& g) {
  CheckResult r{"frame invertible", true, std::numeric_limits<double>::infinity(), {}, {}};
  auto visit = [&](const Point& p) {
    double det = 0.0;
    try {
      det = std::abs(frame_values(m, p).determinant());
    } catch (const DomainError& e) {
      det = 0.0;
      if (r.detail.empty()) r.detail = e.what();
    }
    if (det < r.worst_value) {
      r.worst_value = det;
      r.worst_point = p;
    }
  };
  for (const auto& p : g.points) visit(p);
  for (const auto& p : vertex_lattice(m, g)) visit(p);
  r.passed = r.worst_value >= kSingularFrameThreshold;
  if (r.detail.empty()) r.detail = "min |det(frame)| over cell centres and lattice vertices";
  return r;
}

CheckResult check_periodicity(const FrameModel& m, const Grid& g) {
  CheckResult r{"frame periodic", true, 0.0, {}, "max |a(x + L e_m) - a(x)| on the vertex lattice"};
  const auto& periods = m.chart_data().periods;
  for (const auto& p : vertex_lattice(m, g)) {
    for (std::size_t c = 0; c < p.size(); ++c) {
      Point q = p;
      q[c] += periods[c];
      double diff = 0.0;
      try {
        const Eigen::MatrixXd a = frame_values(m, p);
        const Eigen::MatrixXd b = frame_values(m, q);
        diff = (a - b).cwiseAbs().maxCoeff() / (1.0 + a.cwiseAbs().maxCoeff());
      } catch (const DomainError&) {
        diff = std::numeric_limits<double>::infinity();
      }
      if (diff > r.worst_value) {
        r.worst_value = diff;
        r.worst_point = p;
      }
    }
  }
  r.passed = r.worst_value <= 1e-9;
  return r;
}

template <class Table>
double antisymmetry_defect(const Table& c) {
  double worst = 0.0;
  const std::size_t n = c.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(c(i, j, k) + c(j, i, k)));
  return worst;
}

double jacobi_defect(const StructureTable& c) {
  const std::size_t n = c.dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double s = 0.0;
          for (std::size_t m = 0; m < n; ++m)
            s += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

}  // namespace

ValidationReport validate_model(const FrameModel& m, const Grid& g) {
  ValidationReport report;
  if (!m.is_chart()) {
    const auto& table = m.constant_data().table;
    const double anti = antisymmetry_defect(table);
    report.checks.push_back({"antisymmetry", anti <= kStructureTolerance, anti, {}, "max |C_ij^k + C_ji^k|"});
    const double jac = jacobi_defect(table);
    report.checks.push_back(
        {"jacobi", jac <= kStructureTolerance, jac, {}, "max |sum_cyclic sum_m C_ij^m C_mk^l|"});
    return report;
  }

  const auto inv = check_invertibility(m, g);
  report.checks.push_back(inv);
  report.checks.push_back(check_periodicity(m, g));

  CheckResult anti{"antisymmetry", true, 0.0, {}, "max |C_ij^k + C_ji^k| at cell centres"};
  for (const auto& p : g.points) {
    try {
      const double d = antisymmetry_defect(structure_functions(m, p));
      if (d > anti.worst_value) {
        anti.worst_value = d;
        anti.worst_point = p;
      }
    } catch (const Error& e) {
      anti.passed = false;
      anti.worst_point = p;
      anti.detail = e.what();
      break;
    }
  }
  anti.passed = anti.passed && anti.worst_value <= kStructureTolerance;
  report.checks.push_back(anti);
  return report;
}

BasicCheck check_basic(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                       const Grid& g, double tol) {
  v.bind(m);
  BasicCheck result;
  bool first = true;
  for (const auto& p : g.points) {
    const LocalFrame f = local_frame(m, p);
    const std::vector<double> vk = v.values(f.env);
    for (std::size_t a : split.leaf()) {
      double norm2 = 0.0;
      for (std::size_t k : split.transverse()) {
        double t = directional_derivative(m, f, v, k, a);
        for (std::size_t j = 0; j < m.dim(); ++j) t += vk[j] * f.structure(a, j, k);
        norm2 += t * t;
      }
      const double residual = std::sqrt(norm2);
      if (first || residual > result.worst_residual) {
        first = false;
        result.worst_residual = residual;
        result.worst_point = p;
        result.worst_leaf_index = a;
      }
    }
  }
  result.basic = result.worst_residual <= tol;
  return result;
}

}  // namespace taut
