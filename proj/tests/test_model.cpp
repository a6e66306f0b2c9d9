#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "taut/builtins.hpp"
#include "taut/model.hpp"
#include "taut/model_io.hpp"

using namespace taut;
using namespace taut::testing;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
const double kLnGolden = std::log((3.0 + std::sqrt(5.0)) / 2.0);

const CheckResult& find_check(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("no check named " << name);
  throw;
}

}  // namespace

TEST_CASE("builtin documents load with the expected splits") {
  const auto torus = load_builtin("torus-warped");
  CHECK(torus.model.is_chart());
  CHECK(torus.model.dim() == 2);
  CHECK(torus.split.leaf() == std::vector<std::size_t>{0});
  CHECK(torus.split.transverse() == std::vector<std::size_t>{1});
  CHECK_FALSE(torus.model.dense_leaves);

  const auto t3a = load_builtin("t3a");
  CHECK(t3a.model.kind() == ModelKind::ConstantStructure);
  CHECK(t3a.model.dim() == 3);
  CHECK(t3a.split.leaf() == std::vector<std::size_t>{2});
  CHECK(t3a.split.transverse() == std::vector<std::size_t>{0, 1});

  const auto flat = load_builtin("flat-kronecker");
  CHECK(flat.model.dense_leaves);
  CHECK(load_builtin("suspension-3").model.dim() == 4);
}

TEST_CASE("degenerate splits are rejected") {
  auto doc = builtin_document("torus-warped");
  doc["leaf_indices"] = nlohmann::json::array();
  CHECK_THROWS_WITH(load_model(doc), Catch::Matchers::ContainsSubstring("empty leaf set"));
  doc["leaf_indices"] = {1, 2};
  CHECK_THROWS_WITH(load_model(doc), Catch::Matchers::ContainsSubstring("empty transverse set"));
  doc["leaf_indices"] = {3};
  CHECK_THROWS_AS(load_model(doc), SchemaError);
  CHECK_THROWS_AS(FoliationSplit::from_leaf_indices(3, {1, 1}), ValidationError);
}

TEST_CASE("schema violations are reported") {
  auto doc = builtin_document("t3a");
  doc["colour"] = "blue";
  CHECK_THROWS_AS(load_model(doc), SchemaError);

  doc = builtin_document("t3a");
  doc["structure_constants"][0]["value"] = "ln_lambda1 +";
  CHECK_THROWS_AS(load_model(doc), SyntaxError);

  doc = builtin_document("t3a");
  doc["structure_constants"][0]["value"] = "x1";
  CHECK_THROWS_AS(load_model(doc), BindError);

  doc = builtin_document("torus-warped");
  doc["frame"][0] = "exp(-(0.3*sin(2*pi*x2)))*y";
  CHECK_THROWS_AS(load_model(doc), BindError);

  doc = builtin_document("torus-warped");
  doc["frame"][0] = "0";
  CHECK_THROWS_AS(load_model(doc), SingularFrame);
}

TEST_CASE("model documents round trip") {
  for (const auto& name : builtin_names()) {
    const auto loaded = load_builtin(name);
    const auto again = load_model(model_to_json(loaded.model, loaded.split));
    CHECK(again.split.leaf() == loaded.split.leaf());
    const Point p = loaded.model.is_chart() ? Point(loaded.model.dim(), 0.3) : Point{};
    const auto c1 = structure_functions(loaded.model, p);
    const auto c2 = structure_functions(again.model, p);
    const std::size_t n = loaded.model.dim();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) CHECK(c1(i, j, k) == c2(i, j, k));
  }
}

TEST_CASE("structure functions of the builtins") {
  const auto t3a = load_builtin("t3a");
  const auto c = structure_functions(t3a.model, {});
  CHECK(c(0, 1, 1) == Approx(-kLnGolden).epsilon(1e-14));
  CHECK(c(0, 2, 2) == Approx(kLnGolden).epsilon(1e-14));
  CHECK(c(1, 0, 1) == -c(0, 1, 1));
  for (std::size_t k = 0; k < 3; ++k) CHECK(c(1, 2, k) == 0.0);

  const auto torus = load_builtin("torus-warped");
  const auto ct = structure_functions(torus.model, {0.4, 0.0});
  CHECK(std::abs(ct(1, 0, 0) - (-0.6 * kPi)) <= 1e-12);
  CHECK(std::abs(ct(0, 1, 0) - 0.6 * kPi) <= 1e-12);
  for (double y : {0.1, 0.25, 0.7}) {
    const double fprime = 0.6 * kPi * std::cos(2 * kPi * y);
    CHECK(std::abs(structure_functions(torus.model, {0.2, y})(1, 0, 0) + fprime) <= 1e-12);
  }

  const auto flat = load_builtin("flat-kronecker");
  const auto cf = structure_functions(flat.model, {0.3, 0.6});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) CHECK(cf(i, j, k) == 0.0);
}

TEST_CASE("chart structure functions match the finite-difference bracket") {
  std::mt19937 rng(20240611);
  std::vector<RandomModel> models;
  models.push_back({load_builtin("torus-warped").model, load_builtin("torus-warped").split});
  for (int r = 0; r < 4; ++r) models.push_back(random_chart_model(rng, 2 + pick(rng, 2)));
  for (const auto& rm : models) {
    for (int s = 0; s < 20; ++s) {
      const Point p = random_point(rng, rm.model);
      const auto exact = structure_functions(rm.model, p);
      const auto oracle = fd_structure(rm.model, p);
      const std::size_t n = rm.model.dim();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            CHECK(std::abs(exact(i, j, k) - oracle(i, j, k)) <= 1e-6);
            CHECK(std::abs(exact(i, j, k) + exact(j, i, k)) <= 1e-12);
          }
    }
  }
}

TEST_CASE("validate_model diagnostics") {
  const auto t3a = load_builtin("t3a");
  CHECK(validate_model(t3a.model, sample_grid(t3a.model, {1})).passed());

  const auto so3 = FrameModel::constant_structure(
      "so3", 3, {}, {{0, 1, 2, Expr::number(1.0)}, {1, 2, 0, Expr::number(1.0)}, {0, 2, 1, Expr::number(-1.0)}});
  const auto so3_report = validate_model(so3, sample_grid(so3, {1}));
  CHECK(so3_report.passed());
  CHECK(find_check(so3_report, "jacobi").worst_value <= 1e-12);

  // [E0,E1] = E0, [E1,E2] = E1: the cyclic sum on (E0,E1,E2) is E0.
  const auto bad = FrameModel::constant_structure("bad", 3, {},
                                                  {{0, 1, 0, Expr::number(1.0)}, {1, 2, 1, Expr::number(1.0)}});
  const auto bad_report = validate_model(bad, sample_grid(bad, {1}));
  CHECK_FALSE(bad_report.passed());
  CHECK_FALSE(find_check(bad_report, "jacobi").passed);
  CHECK(find_check(bad_report, "jacobi").worst_value == Approx(1.0));

  const auto singular = FrameModel::chart("singular", {}, {1.0, 1.0},
                                          {parse("x1"), parse("0"), parse("0"), parse("1")});
  const auto sing_report = validate_model(singular, sample_grid(singular, {8}));
  const auto& inv = find_check(sing_report, "frame invertible");
  CHECK_FALSE(inv.passed);
  CHECK(inv.worst_point.at(0) == 0.0);
  CHECK_THROWS_AS(local_frame(singular, {0.0, 0.5}), SingularFrame);

  const auto aperiodic = FrameModel::chart("aperiodic", {}, {1.0, 1.0},
                                           {parse("1 + 0.5*x1"), parse("0"), parse("0"), parse("1")});
  CHECK_FALSE(find_check(validate_model(aperiodic, sample_grid(aperiodic, {8})), "frame periodic").passed);

  for (const auto& name : builtin_names()) {
    const auto b = load_builtin(name);
    CHECK(validate_model(b.model, sample_grid(b.model, {8})).passed());
  }
}

TEST_CASE("sample_grid lattices") {
  const auto torus = load_builtin("torus-warped");
  const auto g = sample_grid(torus.model, {4, 4});
  REQUIRE(g.points.size() == 16);
  CHECK(g.points[0] == Point{0.125, 0.125});
  CHECK(g.points[1] == Point{0.125, 0.375});
  CHECK(g.points[15] == Point{0.875, 0.875});
  const auto line = sample_grid(torus.model, {1, 256});
  CHECK(line.points.size() == 256);
  CHECK(line.points[3] == Point{0.5, 3.5 / 256});
  CHECK(sample_grid(torus.model, {5}).points.size() == 25);
  CHECK_THROWS_AS(sample_grid(torus.model, {0, 3}), SchemaError);

  const auto t3a = load_builtin("t3a");
  for (std::size_t n : {1, 7, 64}) CHECK(sample_grid(t3a.model, {n}).points.size() == 1);
}

TEST_CASE("check_basic examples") {
  const auto t3a = load_builtin("t3a");
  const auto g1 = sample_grid(t3a.model, {1});
  const auto e1 = check_basic(t3a.model, t3a.split, VectorFieldSpec::constant({1.0, 0.0, 0.0}), g1);
  CHECK(e1.basic);
  CHECK(e1.worst_residual == 0.0);
  // [E3, E2] = 0 and [E3, E3] = 0: E2 and E3 are basic too; E1 + E2 by linearity.
  CHECK(check_basic(t3a.model, t3a.split, VectorFieldSpec::constant({1.0, 2.0, -1.0}), g1).basic);

  const auto torus = load_builtin("torus-warped");
  const auto g = sample_grid(torus.model, {8, 8});
  const VectorFieldSpec phi({parse("0"), parse("cos(2*pi*x2)")});
  const auto r1 = check_basic(torus.model, torus.split, phi, g);
  CHECK(r1.basic);
  CHECK(r1.worst_residual <= 1e-12);

  const VectorFieldSpec wobble({parse("0"), parse("cos(2*pi*x1)")});
  const auto r2 = check_basic(torus.model, torus.split, wobble, g);
  CHECK_FALSE(r2.basic);
  // F_1(v^2) = e^{-f} d/dx1 cos(2 pi x1); the worst cell centre sits near a
  // maximum of |sin| and of e^{-f}.
  CHECK(r2.worst_residual > 1.0);
  CHECK(r2.worst_residual <= 2 * kPi * std::exp(0.3) + 1e-9);

  // [F_1, h(x2) E1] = 0, so a leafwise component depending on x2 alone is basic.
  const VectorFieldSpec leafwise({parse("sin(2*pi*x2)"), parse("0")});
  CHECK(check_basic(torus.model, torus.split, leafwise, g).basic);
}

TEST_CASE("the basic condition is linear") {
  std::mt19937 rng(99);
  const auto torus = load_builtin("torus-warped");
  const auto g = sample_grid(torus.model, {6, 6});
  for (int r = 0; r < 20; ++r) {
    const VectorFieldSpec v({random_periodic(rng, 1, 1.0), substitute(random_periodic(rng, 1, 1.0), "x1", parse("x2"))});
    const VectorFieldSpec w({random_periodic(rng, 1, 1.0), substitute(random_periodic(rng, 1, 1.0), "x1", parse("x2"))});
    const auto rv = check_basic(torus.model, torus.split, v, g);
    const auto rw = check_basic(torus.model, torus.split, w, g);
    const auto rs = check_basic(torus.model, torus.split, add(v, w), g);
    CHECK(rs.worst_residual <= rv.worst_residual + rw.worst_residual + 1e-12);
    if (rv.basic && rw.basic) CHECK(rs.basic);
  }
}

TEST_CASE("fields are checked against their model") {
  const auto t3a = load_builtin("t3a");
  CHECK_THROWS_AS(VectorFieldSpec({parse("x1"), parse("0"), parse("0")}).bind(t3a.model), BindError);
  CHECK_THROWS_AS(VectorFieldSpec::constant({1.0, 0.0}).bind(t3a.model), SchemaError);
  CHECK_NOTHROW(VectorFieldSpec({parse("ln_lambda2"), parse("0"), parse("0")}).bind(t3a.model));
  const auto torus = load_builtin("torus-warped");
  CHECK_THROWS_AS(VectorFieldSpec({parse("x3"), parse("0")}).bind(torus.model), BindError);
}
