#pragma once

// JSON model and field documents.
//
// Model document keys: name, kind ("constant_structure" | "chart"), dim,
// leaf_indices (1-based), parameters (name -> number or constant expression
// string), dense_leaves (default false), notes (optional).
// constant_structure adds structure_constants: [{i, j, k, value}] with 1-based
// i < j and value an expression string over parameters; chart adds periods
// (list) and frame (row-major list of dim*dim expression strings).
//
// Field document: {"components": [...]} with expression strings or numbers.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "taut/model.hpp"

namespace taut {

struct LoadedModel {
  FrameModel model;
  FoliationSplit split;
};

/// Parses and validates a model document. Schema problems raise SchemaError,
/// expression problems SyntaxError/BindError, a singular frame at one of the
/// probe points (a coarse cell-centred grid) SingularFrame.
LoadedModel load_model(const nlohmann::json& doc);
LoadedModel load_model_file(const std::filesystem::path& path);

nlohmann::json model_to_json(const FrameModel& m, const FoliationSplit& split);

VectorFieldSpec load_field(const nlohmann::json& doc, const FrameModel& m);
VectorFieldSpec load_field_file(const std::filesystem::path& path, const FrameModel& m);
nlohmann::json field_to_json(const VectorFieldSpec& v);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace taut
