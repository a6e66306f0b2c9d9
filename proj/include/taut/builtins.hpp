#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "taut/model_io.hpp"
#include "taut/spectral.hpp"

namespace taut {

struct BuiltinOptions {
  /// t3a / suspension-3: "rows;..." integer matrix.
  std::optional<std::string> matrix;
  /// torus-warped: warping function f as an expression in x2.
  std::optional<std::string> warp;
};

inline constexpr std::string_view kT3aMatrix = "2,1;1,1";
inline constexpr std::string_view kSuspension3Matrix = "2,0,-1;0,3,-1;-1,-1,1";
inline constexpr std::string_view kDefaultWarp = "0.3*sin(2*pi*x2)";

std::vector<std::string> builtin_names();
bool is_builtin(std::string_view name);

/// Model document of a builtin:
///  t3a           suspension of a 2x2 matrix, leaves along the larger eigenvalue
///  suspension-3  suspension of a 3x3 matrix, leaves along the middle eigenvalue
///  torus-warped  T^2 with g = e^{2f(x2)} dx1^2 + dx2^2, leaves along x1
///  flat-kronecker flat T^2 with a linear foliation of slope sqrt(2) - 1
nlohmann::json builtin_document(std::string_view name, const BuiltinOptions& options = {});

LoadedModel load_builtin(std::string_view name, const BuiltinOptions& options = {});

/// Builtin name or path to a model document.
LoadedModel resolve_model(const std::string& source, const BuiltinOptions& options = {});

}  // namespace taut
