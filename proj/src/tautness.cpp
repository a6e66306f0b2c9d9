#include "taut/tautness.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace taut {

std::string_view to_string(VerdictClass v) {
  switch (v) {
    case VerdictClass::IdenticallyZero: return "IDENTICALLY ZERO";
    case VerdictClass::MixedSign: return "MIXED SIGN";
    case VerdictClass::NonTautWitness: return "NON-TAUT WITNESS";
    case VerdictClass::NegatedNonTautWitness: return "NEGATED NON-TAUT WITNESS";
    case VerdictClass::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string_view epistemic_status(VerdictClass v) {
  switch (v) {
    case VerdictClass::IdenticallyZero:
    case VerdictClass::MixedSign:
      return "consistent with taut: this candidate is no witness; tautness needs every basic field to behave so";
    case VerdictClass::NonTautWitness:
      return "evidence of non-tautness: div^Q v >= 0 on every sample and > 0 on some (grid sampling, not proof)";
    case VerdictClass::NegatedNonTautWitness:
      return "evidence of non-tautness: -v is the witness (grid sampling, not proof)";
    case VerdictClass::Inconclusive:
      return "inconclusive: no samples";
  }
  return "";
}

TautnessVerdict classify_values(const std::vector<double>& values, const std::vector<Point>& points, double tol) {
  TautnessVerdict v;
  v.tolerance = tol;
  v.samples = values.size();
  if (values.empty()) return v;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  v.min = *lo;
  v.max = *hi;
  v.argmin = points[static_cast<std::size_t>(lo - values.begin())];
  v.argmax = points[static_cast<std::size_t>(hi - values.begin())];
  if (std::max(std::abs(v.min), std::abs(v.max)) <= tol)
    v.verdict = VerdictClass::IdenticallyZero;
  else if (v.min >= -tol)
    v.verdict = VerdictClass::NonTautWitness;
  else if (v.max <= tol)
    v.verdict = VerdictClass::NegatedNonTautWitness;
  else
    v.verdict = VerdictClass::MixedSign;
  return v;
}

namespace {

template <class Fn>
void for_each_index(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void require_basic(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v, const Grid& grid) {
  const BasicCheck basic = check_basic(m, split, v, grid);
  if (!basic.basic) {
    throw NonBasicField("field is not basic: transverse part of [F_" + std::to_string(basic.worst_leaf_index + 1) +
                            ", v] reaches " + std::to_string(basic.worst_residual),
                        basic.worst_residual);
  }
}

}  // namespace

std::vector<double> transverse_divergence_on_grid(const FrameModel& m, const FoliationSplit& split,
                                                  const VectorFieldSpec& v, const Grid& grid, unsigned threads) {
  v.bind(m);
  std::vector<double> out(grid.points.size());
  for_each_index(grid.points.size(), threads, [&](std::size_t i) {
    const LocalFrame f = local_frame(m, grid.points[i]);
    out[i] = divergence_sub(m, f, christoffel(f.structure), split.transverse(), v);
  });
  return out;
}

TautnessVerdict classify_divergence(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                                    const Grid& grid, double tol, unsigned threads) {
  v.bind(m);
  require_basic(m, split, v, grid);
  return classify_values(transverse_divergence_on_grid(m, split, v, grid, threads), grid.points, tol);
}

// ---------------------------------------------------------------------------

namespace {

using ExprMatrix = std::vector<std::vector<Expr>>;

Expr symbolic_determinant(const ExprMatrix& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  Expr det = Expr::number(0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j].is_number(0.0)) continue;
    ExprMatrix minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Expr> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(a[i][c]);
      minor.push_back(std::move(row));
    }
    const Expr term = a[0][j] * symbolic_determinant(minor);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

// Structure functions of a chart frame as expressions. With A the frame
// matrix and b_ij the coordinate bracket, C_ij = A^{-T} b_ij, written through
// the adjugate: C_ij^k = sum_c b_ij^c adj(A)_ck / det(A).
std::vector<Expr> symbolic_structure(const FrameModel& m) {
  const auto& chart = m.chart_data();
  const std::size_t n = m.dim();
  ExprMatrix a(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n; ++c) a[i][c] = chart.frame[i * n + c];
  const Expr det = symbolic_determinant(a);

  // adj(A)_ck = (-1)^{c+k} M_kc
  ExprMatrix adj(n, std::vector<Expr>(n));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t k = 0; k < n; ++k) {
      if (n == 1) {
        adj[c][k] = Expr::number(1.0);
        continue;
      }
      ExprMatrix minor;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        std::vector<Expr> row;
        for (std::size_t col = 0; col < n; ++col)
          if (col != c) row.push_back(a[i][col]);
        minor.push_back(std::move(row));
      }
      const Expr md = symbolic_determinant(minor);
      adj[c][k] = ((c + k) % 2 == 0) ? md : -md;
    }

  std::vector<Expr> out(n * n * n, Expr::number(0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<Expr> b(n);
      for (std::size_t c = 0; c < n; ++c) {
        Expr s = Expr::number(0.0);
        for (std::size_t l = 0; l < n; ++l)
          s = s + a[i][l] * chart.partials[(j * n + c) * n + l] - a[j][l] * chart.partials[(i * n + c) * n + l];
        b[c] = s;
      }
      for (std::size_t k = 0; k < n; ++k) {
        Expr s = Expr::number(0.0);
        for (std::size_t c = 0; c < n; ++c) s = s + b[c] * adj[c][k];
        out[(i * n + j) * n + k] = s / det;
      }
    }
  return out;
}

}  // namespace

VectorFieldSpec alvarez_candidate(const FrameModel& m, const FoliationSplit& split) {
  const std::size_t n = m.dim();
  std::vector<Expr> comps(n, Expr::number(0.0));
  // Gamma_aa^k = C_ka^a by the Koszul formula.
  if (m.is_chart()) {
    const auto c = symbolic_structure(m);
    for (std::size_t k : split.transverse())
      for (std::size_t a : split.leaf()) comps[k] = comps[k] + c[(k * n + a) * n + a];
  } else {
    const auto& table = m.constant_data().table;
    for (std::size_t k : split.transverse()) {
      double s = 0.0;
      for (std::size_t a : split.leaf()) s += table(k, a, a);
      comps[k] = Expr::number(s);
    }
  }
  VectorFieldSpec kappa(std::move(comps));
  const Grid probe = sample_grid(m, {m.is_chart() ? std::size_t{16} : std::size_t{1}});
  const BasicCheck basic = check_basic(m, split, kappa, probe);
  if (!basic.basic)
    throw NonBasicField("mean curvature not basic on this model (residual " + std::to_string(basic.worst_residual) +
                            ")",
                        basic.worst_residual);
  return kappa;
}

// ---------------------------------------------------------------------------

QuadratureReport green_check(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                             const std::vector<std::size_t>& resolution) {
  if (!m.is_chart()) throw ValidationError("green-check needs a chart model");
  v.bind(m);
  const Grid grid = sample_grid(m, resolution);
  require_basic(m, split, v, grid);

  const auto& periods = m.chart_data().periods;
  double cell = 1.0;
  for (std::size_t c = 0; c < m.dim(); ++c) cell *= periods[c] / static_cast<double>(grid.resolution[c]);

  QuadratureReport r;
  r.resolution = grid.resolution;
  r.density = "1/|det(frame)| on a cell-centred uniform grid";
  for (const auto& p : grid.points) {
    const LocalFrame f = local_frame(m, p);
    const ChristoffelTable gamma = christoffel(f.structure);
    const double w = cell / std::abs(f.determinant);
    const double div_q = divergence_sub(m, f, gamma, split.transverse(), v);
    const auto kappa = mean_curvature(gamma, split.leaf());
    r.lhs += w * div_q;
    r.rhs += w * dot(v.values(f.env), kappa.components);
  }
  r.abs_error = std::abs(r.lhs - r.rhs);
  return r;
}

VolumeReport volume_preservation_check(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v,
                                       const Grid& grid, double tol) {
  VolumeReport r;
  r.dense_leaves_asserted = m.dense_leaves;
  r.verdict = classify_divergence(m, split, v, grid, tol);
  r.preserved = r.verdict.verdict == VerdictClass::IdenticallyZero;
  r.explanation = "for basic v, L_v nu_Q = div^Q v * nu_Q, so nu_Q is preserved iff div^Q v vanishes; ";
  r.explanation += r.preserved ? "div^Q v vanishes on the grid" : "div^Q v does not vanish on the grid";
  if (!r.dense_leaves_asserted) r.explanation += "; dense-leaves hypothesis not asserted, no tautness conclusion";
  return r;
}

// ---------------------------------------------------------------------------

CoverLift lift_to_cover(const FrameModel& m, const FoliationSplit& split, const VectorFieldSpec& v, std::size_t coord,
                        std::size_t k) {
  if (!m.is_chart()) throw ValidationError("covers need a chart model; constant-structure models have no chart to unroll");
  if (coord >= m.dim()) throw ValidationError("coordinate " + std::to_string(coord + 1) + " is not a periodic coordinate");
  if (k == 0) throw ValidationError("cover fold must be >= 1");
  v.bind(m);

  ChartData chart = m.chart_data();
  const double base_period = chart.periods[coord];
  if (chart.reduce_periods[coord] == 0.0) chart.reduce_periods[coord] = base_period;
  chart.periods[coord] = base_period * static_cast<double>(k);

  const std::string name = k == 1 ? m.name() : m.name() + "-cover" + std::to_string(k) + "x" + std::to_string(coord + 1);
  FrameModel lifted(name, m.parameters(), std::move(chart));
  lifted.dense_leaves = m.dense_leaves;
  lifted.notes = m.notes;
  return CoverLift{std::move(lifted), split, v, coord, k, base_period};
}

Point project_to_base(const CoverLift& lift, const Point& p) {
  Point q = p;
  const double L = lift.base_period;
  q[lift.coord] -= L * std::floor(q[lift.coord] / L);
  return q;
}

VectorFieldSpec deck_average(const CoverLift& lift, const VectorFieldSpec& cover_field) {
  const std::string var = coordinate_name(lift.coord);
  const Expr x = Expr::variable(var);
  std::vector<Expr> comps;
  for (const auto& c : cover_field.components()) {
    Expr sum = Expr::number(0.0);
    for (std::size_t j = 0; j < lift.fold; ++j) {
      const Expr shifted = j == 0 ? x : x + Expr::number(static_cast<double>(j) * lift.base_period);
      sum = sum + substitute(c, var, shifted);
    }
    comps.push_back(lift.fold == 1 ? sum : sum / Expr::number(static_cast<double>(lift.fold)));
  }
  return VectorFieldSpec(std::move(comps));
}

}  // namespace taut
