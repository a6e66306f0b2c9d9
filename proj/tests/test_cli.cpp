#include "catch_amalgamated.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "taut/builtins.hpp"
#include "taut/cli.hpp"
#include "taut/tautness.hpp"

using namespace taut;
using nlohmann::json;

namespace {

const std::filesystem::path kData = TAUT_DATA_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& rel) { return (kData / rel).string(); }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "tautcheck-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Numbers must survive dump/parse unchanged.
void require_bit_exact_round_trip(const json& doc) {
  const json again = json::parse(doc.dump(2));
  CHECK(again == doc);
  CHECK(again.dump() == doc.dump());
}

}  // namespace

TEST_CASE("documented text reports") {
  const auto t3a = run_cli({"taut-check", "t3a", "--field", "alvarez"});
  CHECK(t3a.code == 0);
  CHECK_THAT(t3a.out, Catch::Matchers::ContainsSubstring("verdict: NON-TAUT WITNESS, div^Q \xcf\x84 = 0.926259"));

  const auto spectral = run_cli({"spectral", "--matrix", "2,0,-1;0,3,-1;-1,-1,1"});
  CHECK(spectral.code == 0);
  CHECK_THAT(spectral.out, Catch::Matchers::ContainsSubstring("-x^3+6x^2-9x+1"));
  CHECK_THAT(spectral.out, Catch::Matchers::ContainsSubstring("in (0, 1)"));
  CHECK_THAT(spectral.out, Catch::Matchers::ContainsSubstring("in (2, 3)"));
  CHECK_THAT(spectral.out, Catch::Matchers::ContainsSubstring("in (3, 4)"));

  const auto constant = run_cli({"taut-check", "torus-warped", "--field", data("fields/const.json")});
  CHECK(constant.code == 0);
  CHECK_THAT(constant.out, Catch::Matchers::ContainsSubstring("verdict: IDENTICALLY ZERO (consistent with taut)"));

  const auto e2 = run_cli({"taut-check", "t3a", "--field", data("fields/t3a-e2.json")});
  CHECK(e2.code == 0);
  CHECK_THAT(e2.out, Catch::Matchers::ContainsSubstring("IDENTICALLY ZERO"));

  const auto mixed = run_cli({"taut-check", "torus-warped", "--field", data("fields/cos.json"), "--grid", "1,64"});
  CHECK_THAT(mixed.out, Catch::Matchers::ContainsSubstring("verdict: MIXED SIGN (consistent with taut)"));

  const auto green = run_cli({"green-check", "torus-warped", "--field", data("fields/cos.json"), "--grid", "16,256"});
  CHECK(green.code == 0);
  CHECK_THAT(green.out, Catch::Matchers::ContainsSubstring("integral div^Q v dmu = integral g(v, kappa^#) dmu"));
}

TEST_CASE("exit codes") {
  CHECK(run_cli({}).code == cli::kUsageError);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsageError);
  CHECK(run_cli({"analyze", "no-such-model"}).code == cli::kUsageError);
  CHECK(run_cli({"taut-check", "t3a"}).code == cli::kUsageError);
  CHECK(run_cli({"taut-check", "t3a", "--field", "alvarez", "--grid", "0"}).code == cli::kUsageError);
  CHECK(run_cli({"analyze", "torus-warped", "--warp", "sin(("}).code == cli::kUsageError);
  CHECK(run_cli({"analyze", "torus-warped", "--warp", "x1"}).code == cli::kUsageError);
  CHECK(run_cli({"analyze", "torus-warped", "--warp", "ln(x2 - 0.5)"}).code == cli::kMathError);
  CHECK(run_cli({"spectral", "--matrix", "2,1;1"}).code == cli::kUsageError);
  CHECK(run_cli({"spectral", "--matrix", "0,-1;1,0"}).code == cli::kValidationFailure);
  CHECK(run_cli({"analyze", "t3a", "--builtin-matrix", "1,1;0,1"}).code == cli::kValidationFailure);

  const auto nonbasic = run_cli({"taut-check", "torus-warped", "--field", data("fields/wobble.json")});
  CHECK(nonbasic.code == cli::kValidationFailure);
  CHECK_THAT(nonbasic.err, Catch::Matchers::ContainsSubstring("not basic"));

  auto doc = builtin_document("torus-warped");
  doc["frame"] = {"x1", "0", "0", "1"};
  const auto singular = scratch("singular.json");
  std::ofstream(singular) << doc.dump(2);
  CHECK(run_cli({"analyze", singular.string()}).code == cli::kValidationFailure);

  const auto broken = scratch("broken.json");
  std::ofstream(broken) << "{ not json";
  CHECK(run_cli({"analyze", broken.string()}).code == cli::kUsageError);

  CHECK(run_cli({"cover", "t3a", "--field", "alvarez", "--coord", "1", "--fold", "2"}).code ==
        cli::kValidationFailure);
}

TEST_CASE("json reports round trip bit-exactly") {
  const std::vector<std::vector<std::string>> commands{
      {"analyze", "torus-warped"},
      {"analyze", "suspension-3"},
      {"taut-check", "t3a", "--field", "alvarez"},
      {"taut-check", "torus-warped", "--field", data("fields/cos.json"), "--grid", "4,32"},
      {"green-check", "torus-warped", "--field", data("fields/cos.json"), "--grid", "16,256"},
      {"spectral", "--matrix", "2,0,-1;0,3,-1;-1,-1,1"},
      {"cover", "torus-warped", "--field", data("fields/cos.json"), "--coord", "2", "--fold", "3", "--grid", "4,16"},
      {"volume-check", "flat-kronecker", "--field", data("fields/transverse-unit.json"), "--grid", "8"}};
  for (auto args : commands) {
    args.insert(args.end(), {"--format", "json"});
    const auto r = run_cli(args);
    INFO(args[0]);
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc.at("command") == args[0]);
    require_bit_exact_round_trip(doc);
  }
}

TEST_CASE("json numbers equal the library values") {
  const auto t3a = load_builtin("t3a");
  const auto verdict = classify_divergence(t3a.model, t3a.split, alvarez_candidate(t3a.model, t3a.split),
                                           sample_grid(t3a.model, {1}));
  const json taut = json::parse(run_cli({"taut-check", "t3a", "--field", "alvarez", "--format", "json"}).out);
  CHECK(taut.at("min").get<double>() == verdict.min);
  CHECK(taut.at("max").get<double>() == verdict.max);
  CHECK(taut.at("verdict") == "NON-TAUT WITNESS");

  const auto torus = load_builtin("torus-warped");
  const VectorFieldSpec cos_field({parse("0"), parse("cos(2*pi*x2)")});
  const auto q = green_check(torus.model, torus.split, cos_field, {16, 256});
  const json green = json::parse(
      run_cli({"green-check", "torus-warped", "--field", data("fields/cos.json"), "--grid", "16,256", "--format", "json"})
          .out);
  CHECK(green.at("lhs").get<double>() == q.lhs);
  CHECK(green.at("rhs").get<double>() == q.rhs);
  CHECK(green.at("abs_error").get<double>() == q.abs_error);

  const auto diag = validate_suspension_matrix(IntegerMatrix::parse("2,0,-1;0,3,-1;-1,-1,1"));
  const json spec = json::parse(run_cli({"spectral", "--matrix", "2,0,-1;0,3,-1;-1,-1,1", "--format", "json"}).out);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(spec.at("eigenvalues")[i].at("value").get<double>() == diag.spectral->eigenvalues[i].value);
    CHECK(spec.at("log_eigenvalues")[i].get<double>() == diag.spectral->log_eigenvalues[i]);
  }
  CHECK(spec.at("char_poly_coefficients") == json{1, -9, 6, -1});
}

TEST_CASE("builtin names resolve identically across subcommands") {
  for (const auto& name : builtin_names()) {
    INFO(name);
    const auto file = scratch(name + ".json");
    std::ofstream(file) << builtin_document(name).dump(2);
    const auto by_name = run_cli({"analyze", name, "--format", "json"});
    const auto by_file = run_cli({"analyze", file.string(), "--format", "json"});
    REQUIRE(by_name.code == 0);
    CHECK(by_name.out == by_file.out);
    const auto t1 = run_cli({"taut-check", name, "--field", "alvarez", "--grid", "4", "--format", "json"});
    const auto t2 = run_cli({"taut-check", file.string(), "--field", "alvarez", "--grid", "4", "--format", "json"});
    CHECK(t1.code == 0);
    CHECK(t1.out == t2.out);
    CHECK(json::parse(t1.out).at("model") == name);
  }
}

TEST_CASE("builtin options") {
  const auto custom = run_cli({"taut-check", "t3a", "--builtin-matrix", "3,1;2,1", "--field", "alvarez"});
  CHECK(custom.code == 0);
  CHECK_THAT(custom.out, Catch::Matchers::ContainsSubstring("1.73437810227"));
  const auto warp = run_cli({"analyze", "torus-warped", "--warp", "0", "--format", "json"});
  REQUIRE(warp.code == 0);
  const json report = json::parse(warp.out);
  for (const auto& x : report.at("mean_curvature")) CHECK(x.get<double>() == 0.0);
}

TEST_CASE("suspend writes a loadable model") {
  const auto path = scratch("suspension.json");
  const auto r = run_cli({"suspend", "--matrix", "2,0,-1;0,3,-1;-1,-1,1", "--leaf", "2", "-o", path.string()});
  REQUIRE(r.code == 0);
  const auto check = run_cli({"taut-check", path.string(), "--field", "alvarez", "--format", "json"});
  REQUIRE(check.code == 0);
  const json doc = json::parse(check.out);
  CHECK(std::abs(doc.at("min").get<double>() - 0.728059758730707) <= 1e-12);
  CHECK(doc.at("verdict") == "NON-TAUT WITNESS");
}

TEST_CASE("reports can go to a file and threads do not change them") {
  const auto path = scratch("report.json");
  std::filesystem::remove(path);
  const std::vector<std::string> base{"taut-check", "torus-warped", "--field", data("fields/cos.json"),
                                      "--grid", "9,40", "--format", "json"};
  auto to_file = base;
  to_file.insert(to_file.end(), {"-o", path.string()});
  REQUIRE(run_cli(to_file).code == 0);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto serial = run_cli(base);
  CHECK(buf.str() == serial.out);
  auto threaded = base;
  threaded.insert(threaded.end(), {"--threads", "4"});
  CHECK(run_cli(threaded).out == serial.out);
}
