#include "taut/builtins.hpp"

#include <filesystem>

namespace taut {

using nlohmann::json;

std::vector<std::string> builtin_names() { return {"t3a", "suspension-3", "torus-warped", "flat-kronecker"}; }

bool is_builtin(std::string_view name) {
  for (const auto& n : builtin_names())
    if (n == name) return true;
  return false;
}

namespace {

json suspension_document(const std::string& name, std::string_view matrix_text, std::size_t expected_size,
                         std::size_t leaf_index) {
  const auto a = IntegerMatrix::parse(matrix_text);
  if (a.size() != expected_size)
    throw SchemaError("builtin '" + name + "' needs a " + std::to_string(expected_size) + "x" +
                      std::to_string(expected_size) + " matrix");
  const auto s = build_suspension(a, leaf_index, name);
  return model_to_json(s.model, s.split);
}

}  // namespace

json builtin_document(std::string_view name, const BuiltinOptions& options) {
  if (name == "t3a") {
    // Leaves along the eigen-direction of the larger eigenvalue.
    return suspension_document("t3a", options.matrix.value_or(std::string(kT3aMatrix)), 2, 2);
  }
  if (name == "suspension-3") {
    return suspension_document("suspension-3", options.matrix.value_or(std::string(kSuspension3Matrix)), 3, 2);
  }
  if (name == "torus-warped") {
    const std::string f = options.warp.value_or(std::string(kDefaultWarp));
    for (const auto& v : free_variables(parse(f)))
      if (v != "x2") throw SchemaError("warp function may only depend on x2, found '" + v + "'");
    return {
        {"name", "torus-warped"},
        {"kind", "chart"},
        {"dim", 2},
        {"leaf_indices", {1}},
        {"parameters", json::object()},
        {"dense_leaves", false},
        {"notes", "metric e^{2f} dx1^2 + dx2^2 with f = " + f},
        {"periods", {1.0, 1.0}},
        {"frame", {"exp(-(" + f + "))", "0", "0", "1"}},
    };
  }
  if (name == "flat-kronecker") {
    return {
        {"name", "flat-kronecker"},
        {"kind", "chart"},
        {"dim", 2},
        {"leaf_indices", {1}},
        {"parameters", {{"theta", "pi/8"}}},
        {"dense_leaves", true},
        {"notes", "flat torus, leaves of slope tan(theta) = sqrt(2) - 1"},
        {"periods", {1.0, 1.0}},
        {"frame", {"cos(theta)", "sin(theta)", "-sin(theta)", "cos(theta)"}},
    };
  }
  throw SchemaError("unknown builtin model '" + std::string(name) + "'");
}

LoadedModel load_builtin(std::string_view name, const BuiltinOptions& options) {
  return load_model(builtin_document(name, options));
}

LoadedModel resolve_model(const std::string& source, const BuiltinOptions& options) {
  if (is_builtin(source)) return load_builtin(source, options);
  if (!std::filesystem::exists(source))
    throw SchemaError("'" + source + "' is neither a builtin model (" + [] {
      std::string s;
      for (const auto& n : builtin_names()) s += (s.empty() ? "" : ", ") + n;
      return s;
    }() + ") nor an existing file");
  return load_model_file(source);
}

}  // namespace taut
