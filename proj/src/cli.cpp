#include "taut/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "taut/builtins.hpp"
#include "taut/connection.hpp"
#include "taut/model_io.hpp"
#include "taut/spectral.hpp"
#include "taut/tautness.hpp"

namespace taut::cli {

using nlohmann::json;

namespace {

constexpr const char* kTransverseDivergence = "div^Q v = sum_{i in Q} g(nabla_{E_i} v, E_i)";
constexpr const char* kGreenFormula = "integral div^Q v dmu = integral g(v, kappa^#) dmu";
constexpr const char* kKoszulFormula = "Gamma_ij^k = 1/2 (C_ij^k + C_ki^j + C_kj^i)";
constexpr const char* kVolumeIdentity = "L_v nu_Q = div^Q v * nu_Q";

struct Options {
  std::string format = "text";
  std::string output;
  std::string model;
  std::optional<std::string> builtin_matrix;
  std::optional<std::string> warp;
  std::string field;
  std::vector<std::size_t> grid;
  double tol = kDefaultTautTolerance;
  unsigned threads = 1;
  std::string matrix;
  std::size_t leaf = 0;
  std::size_t coord = 0;
  std::size_t fold = 1;
  std::vector<double> point;
  std::string name;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string fmt_point(const Point& p) {
  if (p.empty()) return "(position independent)";
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + fmt(p[i]);
  return s + ")";
}

std::string fmt_indices(const std::vector<std::size_t>& idx) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i] + 1);
  return s + "}";
}

json one_based(const std::vector<std::size_t>& idx) {
  json a = json::array();
  for (auto i : idx) a.push_back(i + 1);
  return a;
}

std::string kind_name(const FrameModel& m) { return m.is_chart() ? "chart" : "constant_structure"; }

struct Report {
  json data;
  std::string text;
  int exit_code = kSuccess;
};

LoadedModel load(const Options& o) {
  BuiltinOptions b;
  b.matrix = o.builtin_matrix;
  b.warp = o.warp;
  return resolve_model(o.model, b);
}

VectorFieldSpec load_field_source(const Options& o, const LoadedModel& lm) {
  if (o.field.empty()) throw SchemaError("--field is required");
  if (o.field == "alvarez") return alvarez_candidate(lm.model, lm.split);
  return load_field_file(o.field, lm.model);
}

std::vector<std::size_t> grid_or_default(const Options& o, std::size_t fallback) {
  if (o.grid.empty()) return {fallback};
  return o.grid;
}

json verdict_json(const TautnessVerdict& v) {
  return {{"verdict", std::string(to_string(v.verdict))},
          {"min", v.min},
          {"max", v.max},
          {"argmin", v.argmin},
          {"argmax", v.argmax},
          {"tolerance", v.tolerance},
          {"samples", v.samples},
          {"epistemic_status", std::string(epistemic_status(v.verdict))}};
}

std::string verdict_line(const TautnessVerdict& v, const std::string& field_symbol) {
  std::string s = "verdict: " + std::string(to_string(v.verdict));
  switch (v.verdict) {
    case VerdictClass::NonTautWitness:
    case VerdictClass::NegatedNonTautWitness:
      if (std::abs(v.max - v.min) <= v.tolerance)
        s += ", div^Q " + field_symbol + " = " + fmt(v.max);
      else
        s += ", div^Q " + field_symbol + " in [" + fmt(v.min) + ", " + fmt(v.max) + "]";
      break;
    case VerdictClass::IdenticallyZero:
    case VerdictClass::MixedSign: s += " (consistent with taut)"; break;
    case VerdictClass::Inconclusive: break;
  }
  return s;
}

std::string model_line(const LoadedModel& lm) {
  return "model: " + lm.model.name() + " (" + kind_name(lm.model) + ", dim " + std::to_string(lm.model.dim()) +
         ", leaves " + fmt_indices(lm.split.leaf()) + ", transverse " + fmt_indices(lm.split.transverse()) + ")\n";
}

std::string field_text(const VectorFieldSpec& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.dim(); ++k) s += (k ? ", " : "") + print(v.component(k));
  return s + ")";
}

json field_json(const VectorFieldSpec& v) { return field_to_json(v)["components"]; }

// ---------------------------------------------------------------------------

Report cmd_analyze(const Options& o) {
  const LoadedModel lm = load(o);
  const FrameModel& m = lm.model;
  const Grid grid = sample_grid(m, grid_or_default(o, 8));
  const ValidationReport validation = validate_model(m, grid);

  Point p;
  if (m.is_chart()) {
    if (!o.point.empty()) {
      if (o.point.size() != m.dim()) throw SchemaError("--point needs " + std::to_string(m.dim()) + " coordinates");
      p = o.point;
    } else {
      for (double L : m.chart_data().periods) p.push_back(0.5 * L);
    }
  }

  Report r;
  r.data = {{"command", "analyze"},
            {"model", m.name()},
            {"kind", kind_name(m)},
            {"dim", m.dim()},
            {"leaf_indices", one_based(lm.split.leaf())},
            {"transverse_indices", one_based(lm.split.transverse())},
            {"dense_leaves", m.dense_leaves},
            {"point", p}};
  std::ostringstream t;
  t << model_line(lm);
  if (!m.notes.empty()) t << "notes: " << m.notes << "\n";

  json checks = json::array();
  t << "validation (grid " << (grid.resolution.empty() ? std::string("1 abstract point") : [&] {
    std::string s;
    for (auto n : grid.resolution) s += (s.empty() ? "" : "x") + std::to_string(n);
    return s;
  }()) << "):\n";
  for (const auto& c : validation.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"worst_value", c.worst_value},
                      {"worst_point", c.worst_point},
                      {"detail", c.detail}});
    t << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << fmt(c.worst_value);
    if (!c.worst_point.empty()) t << " at " << fmt_point(c.worst_point);
    t << " [" << c.detail << "]\n";
  }
  r.data["validation"] = checks;
  r.data["valid"] = validation.passed();
  if (!validation.passed()) {
    r.exit_code = kValidationFailure;
    r.text = t.str();
    return r;
  }

  const LocalFrame f = local_frame(m, p);
  const ChristoffelTable gamma = christoffel(f.structure);
  const auto kappa = mean_curvature(gamma, lm.split.leaf());
  const std::size_t n = m.dim();

  json structure = json::array();
  t << "structure functions at " << fmt_point(p) << " ([E_i, E_j] = C_ij^k E_k, nonzero, i < j):\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double c = f.structure(i, j, k);
        if (c == 0.0) continue;
        structure.push_back({{"i", i + 1}, {"j", j + 1}, {"k", k + 1}, {"value", c}});
        t << "  C_" << i + 1 << j + 1 << "^" << k + 1 << " = " << fmt(c) << "\n";
      }
  json gam = json::array();
  t << "Christoffel coefficients (" << kKoszulFormula << ", nonzero):\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double g = gamma(i, j, k);
        if (g == 0.0) continue;
        gam.push_back({{"i", i + 1}, {"j", j + 1}, {"k", k + 1}, {"value", g}});
        t << "  Gamma_" << i + 1 << j + 1 << "^" << k + 1 << " = " << fmt(g) << "\n";
      }
  t << "mean curvature of the leaves (kappa^# = pi_Q(sum_a nabla_{F_a} F_a)): (";
  for (std::size_t k = 0; k < n; ++k) t << (k ? ", " : "") << fmt(kappa.components[k]);
  t << ")\n";
  r.data["structure_constants"] = structure;
  r.data["christoffel"] = gam;
  r.data["koszul_formula"] = kKoszulFormula;
  r.data["mean_curvature"] = kappa.components;
  r.text = t.str();
  return r;
}

Report cmd_taut_check(const Options& o) {
  const LoadedModel lm = load(o);
  const VectorFieldSpec v = load_field_source(o, lm);
  const Grid grid = sample_grid(lm.model, grid_or_default(o, 64));
  const BasicCheck basic = check_basic(lm.model, lm.split, v, grid);
  const TautnessVerdict verdict = classify_divergence(lm.model, lm.split, v, grid, o.tol, o.threads);

  Report r;
  r.data = {{"command", "taut-check"},
            {"model", lm.model.name()},
            {"field", o.field},
            {"field_components", field_json(v)},
            {"grid", grid.resolution},
            {"basic_residual", basic.worst_residual},
            {"identity", kTransverseDivergence}};
  r.data.update(verdict_json(verdict));
  const std::string sym = o.field == "alvarez" ? "\xcf\x84" : "v";
  std::ostringstream t;
  t << model_line(lm);
  t << "field: " << (o.field == "alvarez" ? "alvarez candidate tau = kappa^#" : o.field) << " = " << field_text(v)
    << " in the frame\n";
  t << "basic: yes (max |pi_Q [F_a, v]| = " << fmt(basic.worst_residual) << ")\n";
  t << kTransverseDivergence << "\n";
  t << "samples: " << verdict.samples << ", min " << fmt(verdict.min) << " at " << fmt_point(verdict.argmin)
    << ", max " << fmt(verdict.max) << " at " << fmt_point(verdict.argmax) << ", tol " << fmt(verdict.tolerance)
    << "\n";
  t << verdict_line(verdict, sym) << "\n";
  t << "status: " << epistemic_status(verdict.verdict) << "\n";
  r.text = t.str();
  return r;
}

Report cmd_green_check(const Options& o) {
  const LoadedModel lm = load(o);
  const VectorFieldSpec v = load_field_source(o, lm);
  const QuadratureReport q = green_check(lm.model, lm.split, v, grid_or_default(o, 64));
  Report r;
  r.data = {{"command", "green-check"},
            {"model", lm.model.name()},
            {"field", o.field},
            {"field_components", field_json(v)},
            {"lhs", q.lhs},
            {"rhs", q.rhs},
            {"abs_error", q.abs_error},
            {"resolution", q.resolution},
            {"density", q.density},
            {"identity", kGreenFormula}};
  std::ostringstream t;
  t << model_line(lm);
  t << "field: " << o.field << " = " << field_text(v) << "\n";
  t << kGreenFormula << "\n";
  t << "lhs = " << fmt(q.lhs) << "\nrhs = " << fmt(q.rhs) << "\n|lhs - rhs| = " << fmt(q.abs_error) << "\n";
  t << "quadrature: " << q.density << ", resolution";
  for (auto n : q.resolution) t << " " << n;
  t << "\n";
  r.text = t.str();
  return r;
}

json spectral_json(const IntegerMatrix& a, const SuspensionDiagnostics& d) {
  json j = {{"matrix", a.to_string()},
            {"det", d.det},
            {"trace", d.trace},
            {"admissible", d.admissible},
            {"det_is_one", d.det_is_one},
            {"real_distinct", d.real_distinct},
            {"positive", d.positive},
            {"none_equal_one", d.none_equal_one},
            {"messages", d.messages}};
  if (d.trace_above_two) j["trace_above_two"] = *d.trace_above_two;
  const IntPolynomial p = d.spectral ? d.spectral->char_poly : char_poly(a);
  j["char_poly"] = p.to_string();
  j["char_poly_coefficients"] = p.coefficients;
  if (d.spectral) {
    json ev = json::array();
    for (const auto& root : d.spectral->eigenvalues)
      ev.push_back({{"value", root.value},
                    {"lower", root.lower},
                    {"upper", root.upper},
                    {"refined_lower", root.refined_lower},
                    {"refined_upper", root.refined_upper}});
    j["eigenvalues"] = ev;
    j["log_eigenvalues"] = d.spectral->log_eigenvalues;
  }
  return j;
}

std::string spectral_text(const IntegerMatrix& a, const SuspensionDiagnostics& d) {
  std::ostringstream t;
  const IntPolynomial p = d.spectral ? d.spectral->char_poly : char_poly(a);
  t << "matrix: " << a.to_string() << "\n";
  t << "det = " << d.det << ", trace = " << d.trace << "\n";
  t << "char poly det(A - xI) = " << p.to_string() << "\n";
  if (d.spectral) {
    for (std::size_t i = 0; i < d.spectral->eigenvalues.size(); ++i) {
      const auto& root = d.spectral->eigenvalues[i];
      t << "lambda_" << i + 1 << " = " << fmt(root.value) << " in (" << root.lower << ", " << root.upper
        << "), ln = " << fmt(d.spectral->log_eigenvalues[i]) << "\n";
    }
  }
  if (d.trace_above_two) t << "trace > 2: " << (*d.trace_above_two ? "yes" : "no") << "\n";
  t << "admissible for a suspension: " << (d.admissible ? "yes" : "no") << "\n";
  for (const auto& msg : d.messages) t << "  " << msg << "\n";
  return t.str();
}

Report cmd_spectral(const Options& o) {
  const IntegerMatrix a = IntegerMatrix::parse(o.matrix);
  const SuspensionDiagnostics d = validate_suspension_matrix(a);
  Report r;
  r.data = spectral_json(a, d);
  r.data["command"] = "spectral";
  r.text = spectral_text(a, d);
  r.exit_code = d.admissible ? kSuccess : kValidationFailure;
  return r;
}

Report cmd_suspend(const Options& o) {
  const IntegerMatrix a = IntegerMatrix::parse(o.matrix);
  const Suspension s = build_suspension(a, o.leaf, o.name.empty() ? "suspension" : o.name);
  const json doc = model_to_json(s.model, s.split);
  if (o.output.empty()) throw SchemaError("suspend needs -o <path>");
  std::ofstream file(o.output);
  if (!file) throw SchemaError("cannot write '" + o.output + "'");
  file << doc.dump(2) << "\n";

  Report r;
  r.data = {{"command", "suspend"},
            {"matrix", a.to_string()},
            {"leaf", o.leaf},
            {"model_path", o.output},
            {"model", doc}};
  std::ostringstream t;
  t << "wrote " << o.output << ": " << s.model.name() << " (dim " << s.model.dim() << ", leaves "
    << fmt_indices(s.split.leaf()) << ")\n";
  for (std::size_t i = 0; i < s.spectral.eigenvalues.size(); ++i)
    t << "  [E_1, E_" << i + 2 << "] = ln(lambda_" << i + 1 << ") E_" << i + 2 << ", ln(lambda_" << i + 1
      << ") = " << fmt(s.spectral.log_eigenvalues[i]) << "\n";
  r.text = t.str();
  return r;
}

Report cmd_cover(const Options& o) {
  const LoadedModel lm = load(o);
  const VectorFieldSpec v = load_field_source(o, lm);
  if (o.coord < 1) throw SchemaError("--coord is 1-based");
  const CoverLift lift = lift_to_cover(lm.model, lm.split, v, o.coord - 1, o.fold);
  const Grid base_grid = sample_grid(lm.model, grid_or_default(o, 64));
  const Grid cover_grid = sample_grid(lift.model, [&] {
    std::vector<std::size_t> res = base_grid.resolution;
    res[lift.coord] *= lift.fold;
    return res;
  }());

  const TautnessVerdict base = classify_divergence(lm.model, lm.split, v, base_grid, o.tol);
  const TautnessVerdict cover = classify_divergence(lift.model, lift.split, lift.field, cover_grid, o.tol);
  const auto lifted_values = transverse_divergence_on_grid(lift.model, lift.split, lift.field, cover_grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < cover_grid.points.size(); ++i) {
    const double down = transverse_divergence(lm.model, lm.split, v, project_to_base(lift, cover_grid.points[i]));
    worst = std::max(worst, std::abs(lifted_values[i] - down));
  }
  const VectorFieldSpec averaged = deck_average(lift, lift.field);
  const TautnessVerdict projected = classify_divergence(lm.model, lm.split, averaged, base_grid, o.tol);

  Report r;
  r.data = {{"command", "cover"},
            {"model", lm.model.name()},
            {"cover_model", lift.model.name()},
            {"coord", o.coord},
            {"fold", o.fold},
            {"max_pointwise_difference", worst},
            {"base", verdict_json(base)},
            {"cover", verdict_json(cover)},
            {"deck_average", verdict_json(projected)},
            {"same_class", base.verdict == cover.verdict && base.verdict == projected.verdict}};
  std::ostringstream t;
  t << model_line(lm);
  t << "cover: " << lift.model.name() << ", " << o.fold << "-fold along x" << o.coord << "\n";
  t << "max |div^Q(lift v) - div^Q(v) o pi| = " << fmt(worst) << " over " << cover_grid.points.size()
    << " cover points\n";
  t << "base   " << verdict_line(base, "v") << "\n";
  t << "cover  " << verdict_line(cover, "v") << "\n";
  t << "deck-averaged projection " << verdict_line(projected, "v") << "\n";
  r.text = t.str();
  return r;
}

Report cmd_volume_check(const Options& o) {
  const LoadedModel lm = load(o);
  const VectorFieldSpec v = load_field_source(o, lm);
  const Grid grid = sample_grid(lm.model, grid_or_default(o, 64));
  const VolumeReport vr = volume_preservation_check(lm.model, lm.split, v, grid, o.tol);
  Report r;
  r.data = {{"command", "volume-check"},
            {"model", lm.model.name()},
            {"field", o.field},
            {"preserved", vr.preserved},
            {"dense_leaves_asserted", vr.dense_leaves_asserted},
            {"explanation", vr.explanation},
            {"identity", kVolumeIdentity}};
  r.data.update(verdict_json(vr.verdict));
  std::ostringstream t;
  t << model_line(lm);
  t << kVolumeIdentity << "\n";
  t << "transverse volume preserved: " << (vr.preserved ? "yes" : "no") << "\n";
  t << verdict_line(vr.verdict, "v") << "\n";
  t << vr.explanation << "\n";
  r.text = t.str();
  return r;
}

void add_model_options(CLI::App* sub, Options& o) {
  sub->add_option("model", o.model, "builtin name or model file")->required();
  sub->add_option("--builtin-matrix", o.builtin_matrix, "matrix for t3a / suspension-3, e.g. \"2,1;1,1\"");
  sub->add_option("--warp", o.warp, "warping function f(x2) for torus-warped");
}

void add_output_options(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  sub->add_option("-o,--output", o.output, "write the report to a file");
}

void add_grid_options(CLI::App* sub, Options& o) {
  sub->add_option("--grid", o.grid, "cells per coordinate, e.g. 16,256")->delimiter(',');
  sub->add_option("--tol", o.tol, "zero tolerance")->check(CLI::NonNegativeNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transverse divergence and tautness checks for Riemannian foliations", "tautcheck"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "validate a model, print structure functions, Christoffel data, mean curvature");
  add_model_options(analyze, o);
  add_output_options(analyze, o);
  analyze->add_option("--grid", o.grid, "validation grid")->delimiter(',');
  analyze->add_option("--point", o.point, "evaluation point")->delimiter(',');

  auto* taut = app.add_subcommand("taut-check", "classify the sign of div^Q v");
  add_model_options(taut, o);
  add_output_options(taut, o);
  add_grid_options(taut, o);
  taut->add_option("--field", o.field, "field file or 'alvarez'")->required();
  taut->add_option("--threads", o.threads, "worker threads for grid evaluation")->check(CLI::PositiveNumber);

  auto* green = app.add_subcommand("green-check", "transverse Green formula by quadrature");
  add_model_options(green, o);
  add_output_options(green, o);
  green->add_option("--field", o.field, "field file or 'alvarez'")->required();
  green->add_option("--grid", o.grid, "cells per coordinate")->delimiter(',')->required();

  auto* spectral = app.add_subcommand("spectral", "characteristic polynomial, eigenvalues, admissibility");
  add_output_options(spectral, o);
  spectral->add_option("--matrix", o.matrix, "rows separated by ';', entries by ','")->required();

  auto* suspend = app.add_subcommand("suspend", "build a suspension model file");
  suspend->add_option("--matrix", o.matrix, "rows separated by ';', entries by ','")->required();
  suspend->add_option("--leaf", o.leaf, "sorted eigenvalue index spanning the leaves (1-based)")->required();
  suspend->add_option("-o,--output", o.output, "model file to write")->required();
  suspend->add_option("--name", o.name, "model name");
  suspend->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* cover = app.add_subcommand("cover", "lift to a finite cover and compare verdicts");
  add_model_options(cover, o);
  add_output_options(cover, o);
  add_grid_options(cover, o);
  cover->add_option("--field", o.field, "field file or 'alvarez'")->required();
  cover->add_option("--coord", o.coord, "coordinate to unroll (1-based)")->required()->check(CLI::PositiveNumber);
  cover->add_option("--fold", o.fold, "number of sheets")->required()->check(CLI::PositiveNumber);

  auto* volume = app.add_subcommand("volume-check", "transverse volume preservation along a basic field");
  add_model_options(volume, o);
  add_output_options(volume, o);
  add_grid_options(volume, o);
  volume->add_option("--field", o.field, "field file or 'alvarez'")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsageError;
  }
  for (auto n : o.grid)
    if (n == 0) {
      err << "error: grid resolution entries must be >= 1\n";
      return kUsageError;
    }

  Report report;
  try {
    if (analyze->parsed()) report = cmd_analyze(o);
    else if (taut->parsed()) report = cmd_taut_check(o);
    else if (green->parsed()) report = cmd_green_check(o);
    else if (spectral->parsed()) report = cmd_spectral(o);
    else if (suspend->parsed()) report = cmd_suspend(o);
    else if (cover->parsed()) report = cmd_cover(o);
    else if (volume->parsed()) report = cmd_volume_check(o);
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const BindError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ValidationError& e) {
    err << "validation failure: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const DomainError& e) {
    err << "math error: " << e.what() << "\n";
    return kMathError;
  } catch (const UnsupportedDerivative& e) {
    err << "math error: " << e.what() << "\n";
    return kMathError;
  } catch (const OverflowError& e) {
    err << "math error: " << e.what() << "\n";
    return kMathError;
  }

  const std::string body = o.format == "json" ? report.data.dump(2) + "\n" : report.text;
  if (!o.output.empty() && !suspend->parsed()) {
    std::ofstream file(o.output);
    if (!file) {
      err << "error: cannot write '" << o.output << "'\n";
      return kUsageError;
    }
    file << body;
  } else {
    out << body;
  }
  return report.exit_code;
}

}  // namespace taut::cli
