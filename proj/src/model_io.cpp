#include "taut/model_io.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <optional>
#include <set>

namespace taut {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw SchemaError(std::string("missing key '") + key + "'");
  return *it;
}

std::size_t require_index(const json& v, std::size_t dim, const std::string& what) {
  if (!v.is_number_integer()) throw SchemaError(what + " must be an integer");
  const auto i = v.get<std::int64_t>();
  if (i < 1 || static_cast<std::size_t>(i) > dim)
    throw SchemaError(what + " = " + std::to_string(i) + " is out of range 1.." + std::to_string(dim));
  return static_cast<std::size_t>(i - 1);
}

Expr parse_in(const std::string& text, const std::string& where) {
  try {
    return parse(text);
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.offset(), e.expected(), where + ": " + e.what());
  }
}

Expr expression_value(const json& v, const std::string& where) {
  if (v.is_number()) return Expr::number(v.get<double>());
  if (v.is_string()) return parse_in(v.get<std::string>(), where);
  throw SchemaError(where + " must be a number or an expression string");
}

Parameters read_parameters(const json& doc) {
  Parameters params;
  const auto it = doc.find("parameters");
  if (it == doc.end()) return params;
  if (!it->is_object()) throw SchemaError("'parameters' must be an object");
  const Env none;
  for (const auto& [name, value] : it->items()) {
    const Expr e = expression_value(value, "parameter '" + name + "'");
    if (!free_variables(e).empty())
      throw SchemaError("parameter '" + name + "' must be a constant expression");
    params[name] = eval(e, none);
  }
  return params;
}

std::size_t probe_resolution(std::size_t dim) { return dim <= 3 ? 8 : 4; }

const std::set<std::string> kModelKeys{"name",   "kind",    "dim",   "leaf_indices", "parameters",
                                       "dense_leaves", "notes", "structure_constants", "periods",
                                       "frame",  "reduce_periods"};

}  // namespace

LoadedModel load_model(const json& doc) {
  if (!doc.is_object()) throw SchemaError("model document must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!kModelKeys.contains(key)) throw SchemaError("unknown key '" + key + "'");

  const json& name = require(doc, "name");
  if (!name.is_string()) throw SchemaError("'name' must be a string");
  const json& kind = require(doc, "kind");
  if (!kind.is_string()) throw SchemaError("'kind' must be a string");
  const json& dim_json = require(doc, "dim");
  if (!dim_json.is_number_integer() || dim_json.get<std::int64_t>() < 1)
    throw SchemaError("'dim' must be a positive integer");
  const auto dim = static_cast<std::size_t>(dim_json.get<std::int64_t>());

  const json& leaf_json = require(doc, "leaf_indices");
  if (!leaf_json.is_array()) throw SchemaError("'leaf_indices' must be an array");
  std::vector<std::size_t> leaf;
  for (const auto& v : leaf_json) leaf.push_back(require_index(v, dim, "leaf index"));

  Parameters params = read_parameters(doc);

  std::optional<FrameModel> model;
  const auto kind_str = kind.get<std::string>();
  if (kind_str == "constant_structure") {
    for (const char* key : {"periods", "frame", "reduce_periods"})
      if (doc.contains(key)) throw SchemaError(std::string("'") + key + "' is only valid for chart models");
    std::vector<StructureConstant> entries;
    if (const auto it = doc.find("structure_constants"); it != doc.end()) {
      if (!it->is_array()) throw SchemaError("'structure_constants' must be an array");
      for (const auto& c : *it) {
        if (!c.is_object()) throw SchemaError("structure constant entries must be objects");
        StructureConstant sc;
        sc.i = require_index(require(c, "i"), dim, "structure constant i");
        sc.j = require_index(require(c, "j"), dim, "structure constant j");
        sc.k = require_index(require(c, "k"), dim, "structure constant k");
        if (sc.i >= sc.j) throw SchemaError("structure constants need i < j");
        sc.value = expression_value(require(c, "value"), "structure constant value");
        entries.push_back(std::move(sc));
      }
    }
    model.emplace(FrameModel::constant_structure(name.get<std::string>(), dim, std::move(params), std::move(entries)));
  } else if (kind_str == "chart") {
    if (doc.contains("structure_constants")) throw SchemaError("'structure_constants' is only valid for constant_structure models");
    const json& periods_json = require(doc, "periods");
    if (!periods_json.is_array() || periods_json.size() != dim)
      throw SchemaError("'periods' must be an array of " + std::to_string(dim) + " numbers");
    std::vector<double> periods;
    for (const auto& p : periods_json) {
      if (!p.is_number()) throw SchemaError("periods must be numbers");
      periods.push_back(p.get<double>());
    }
    const json& frame_json = require(doc, "frame");
    if (!frame_json.is_array() || frame_json.size() != dim * dim)
      throw SchemaError("'frame' must be a row-major array of " + std::to_string(dim * dim) + " expressions");
    std::vector<Expr> frame;
    for (std::size_t idx = 0; idx < frame_json.size(); ++idx)
      frame.push_back(expression_value(frame_json[idx], "frame entry (" + std::to_string(idx / dim + 1) + ", " +
                                                            std::to_string(idx % dim + 1) + ")"));
    model.emplace(FrameModel::chart(name.get<std::string>(), std::move(params), std::move(periods), std::move(frame)));
    if (const auto it = doc.find("reduce_periods"); it != doc.end()) {
      if (!it->is_array() || it->size() != dim) throw SchemaError("'reduce_periods' must have one entry per coordinate");
      ChartData chart = model->chart_data();
      for (std::size_t c = 0; c < dim; ++c) {
        const double r = (*it)[c].get<double>();
        if (!(r >= 0.0)) throw SchemaError("'reduce_periods' entries must be >= 0");
        chart.reduce_periods[c] = r;
      }
      FrameModel reduced(model->name(), model->parameters(), std::move(chart));
      model.emplace(std::move(reduced));
    }
  } else {
    throw SchemaError("'kind' must be \"constant_structure\" or \"chart\", got \"" + kind_str + "\"");
  }

  if (const auto it = doc.find("dense_leaves"); it != doc.end()) {
    if (!it->is_boolean()) throw SchemaError("'dense_leaves' must be a boolean");
    model->dense_leaves = it->get<bool>();
  }
  if (const auto it = doc.find("notes"); it != doc.end()) {
    if (!it->is_string()) throw SchemaError("'notes' must be a string");
    model->notes = it->get<std::string>();
  }

  auto split = FoliationSplit::from_leaf_indices(dim, std::move(leaf));

  if (model->is_chart()) {
    const Grid probe = sample_grid(*model, {probe_resolution(dim)});
    for (const auto& p : probe.points) (void)local_frame(*model, p);
  }
  return LoadedModel{std::move(*model), std::move(split)};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

LoadedModel load_model_file(const std::filesystem::path& path) { return load_model(read_json_file(path)); }

json model_to_json(const FrameModel& m, const FoliationSplit& split) {
  json doc;
  doc["name"] = m.name();
  doc["kind"] = m.is_chart() ? "chart" : "constant_structure";
  doc["dim"] = m.dim();
  json leaf = json::array();
  for (auto i : split.leaf()) leaf.push_back(i + 1);
  doc["leaf_indices"] = leaf;
  json params = json::object();
  for (const auto& [k, v] : m.parameters()) params[k] = v;
  doc["parameters"] = params;
  doc["dense_leaves"] = m.dense_leaves;
  if (!m.notes.empty()) doc["notes"] = m.notes;
  if (m.is_chart()) {
    const auto& chart = m.chart_data();
    doc["periods"] = chart.periods;
    json frame = json::array();
    for (const auto& e : chart.frame) frame.push_back(print(e));
    doc["frame"] = frame;
    if (std::any_of(chart.reduce_periods.begin(), chart.reduce_periods.end(), [](double r) { return r > 0.0; }))
      doc["reduce_periods"] = chart.reduce_periods;
  } else {
    json entries = json::array();
    for (const auto& c : m.constant_data().entries)
      entries.push_back({{"i", c.i + 1}, {"j", c.j + 1}, {"k", c.k + 1}, {"value", print(c.value)}});
    doc["structure_constants"] = entries;
  }
  return doc;
}

VectorFieldSpec load_field(const json& doc, const FrameModel& m) {
  if (!doc.is_object()) throw SchemaError("field document must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (key != "components" && key != "name") throw SchemaError("unknown key '" + key + "' in field document");
  const json& comps = require(doc, "components");
  if (!comps.is_array()) throw SchemaError("'components' must be an array");
  std::vector<Expr> out;
  for (std::size_t k = 0; k < comps.size(); ++k)
    out.push_back(expression_value(comps[k], "field component " + std::to_string(k + 1)));
  VectorFieldSpec v(std::move(out));
  v.bind(m);
  return v;
}

VectorFieldSpec load_field_file(const std::filesystem::path& path, const FrameModel& m) {
  return load_field(read_json_file(path), m);
}

json field_to_json(const VectorFieldSpec& v) {
  json comps = json::array();
  for (const auto& c : v.components()) comps.push_back(print(c));
  return {{"components", comps}};
}

}  // namespace taut
