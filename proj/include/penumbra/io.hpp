/*
 * Copyright 2026 The Penumbra Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "penumbra/compare.hpp"
#include "penumbra/constructions.hpp"
#include "penumbra/framework.hpp"
#include "penumbra/update.hpp"

namespace penumbra::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Scenario files
//
// A scenario is one observer's framework plus optional probes and an optional
// simulation block, as strict JSON: unknown fields are rejected with a
// path-qualified error, extended-real bounds are the strings "inf"/"-inf".
// ---------------------------------------------------------------------------

struct SimulationSpec {
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  GeneratorConfig config;

  bool operator==(const SimulationSpec&) const = default;
};

struct LoadedScenario {
  PropertyFramework framework;
  std::vector<SystemRecord> probes;
  std::optional<SimulationSpec> simulation;
  double epsilon = kDefaultEpsilon;

  bool operator==(const LoadedScenario& other) const {
    return framework == other.framework && probes == other.probes &&
           simulation == other.simulation && epsilon == other.epsilon;
  }
};

namespace detail {

[[noreturn]] inline void fail(Errc code, const std::string& path, const std::string& what) {
  throw Error(code, path + ": " + what);
}

inline void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(Errc::ParseError, path, "expected an object");
}

inline void strict_keys(const json& j, const std::string& path,
                        std::initializer_list<const char*> allowed) {
  expect_object(j, path);
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(Errc::UnknownField, path + "." + key, "unknown field");
  }
}

inline const json& require(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(Errc::ParseError, path + "." + key, "missing required field");
  return *it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(Errc::ParseError, path, "expected a number");
  return j.get<double>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(Errc::ParseError, path, "expected a string");
  return j.get<std::string>();
}

inline std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    fail(Errc::ParseError, path, "expected a non-negative integer");
  }
  if (j.is_number_integer() && j.get<std::int64_t>() < 0) {
    fail(Errc::ParseError, path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline double as_bound(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(Errc::ParseError, path, "expected a number or \"inf\"/\"-inf\"");
}

inline json bound_json(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

inline std::vector<double> as_features(const json& j, const std::string& path) {
  if (!j.is_array()) fail(Errc::ParseError, path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline SystemRecord parse_record(const json& j, const std::string& path) {
  strict_keys(j, path, {"id", "features", "provenance"});
  SystemRecord rec;
  rec.id = as_string(require(j, path, "id"), path + ".id");
  if (rec.id.empty()) fail(Errc::ParseError, path + ".id", "id must not be empty");
  rec.features = as_features(require(j, path, "features"), path + ".features");
  if (auto it = j.find("provenance"); it != j.end()) {
    const std::string p = as_string(*it, path + ".provenance");
    if (p == "apriori") {
      rec.provenance = Provenance::Apriori;
    } else if (p == "determined") {
      rec.provenance = Provenance::DeterminedByMetric;
    } else {
      fail(Errc::ParseError, path + ".provenance", "expected \"apriori\" or \"determined\"");
    }
  }
  return rec;
}

inline std::vector<SystemRecord> parse_records(const json& j, const std::string& path) {
  if (!j.is_array()) fail(Errc::ParseError, path, "expected an array");
  std::vector<SystemRecord> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(parse_record(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline Bounds parse_bounds(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(Errc::ParseError, path, "expected [lower, upper]");
  return Bounds{as_bound(j[0], path + "[0]"), as_bound(j[1], path + "[1]")};
}

inline Metric parse_metric(const json& j, const std::string& path, const ExemplarSets& exemplars,
                           double epsilon) {
  expect_object(j, path);
  const std::string kind = as_string(require(j, path, "kind"), path + ".kind");
  if (kind == "linear") {
    strict_keys(j, path, {"kind", "weights", "bias", "bounds"});
    std::vector<double> weights =
        as_features(require(j, path, "weights"), path + ".weights");
    double bias = 0.0;
    if (auto it = j.find("bias"); it != j.end()) bias = as_number(*it, path + ".bias");
    return Metric::linear(std::move(weights), bias,
                          parse_bounds(require(j, path, "bounds"), path + ".bounds"));
  }
  if (kind == "tabulated") {
    strict_keys(j, path, {"kind", "table", "bounds"});
    const json& tj = require(j, path, "table");
    expect_object(tj, path + ".table");
    std::map<std::string, double> table;
    for (const auto& [id, value] : tj.items()) {
      table[id] = as_number(value, path + ".table." + id);
    }
    return Metric::tabulated(std::move(table),
                             parse_bounds(require(j, path, "bounds"), path + ".bounds"));
  }
  if (kind == "trivial_faithful") {
    strict_keys(j, path, {"kind", "bounds"});
    const Bounds b = parse_bounds(require(j, path, "bounds"), path + ".bounds");
    return trivial_faithful_metric(exemplars, b.lower, b.upper);
  }
  if (kind == "binarized") {
    strict_keys(j, path, {"kind", "base", "eta0"});
    Metric base = parse_metric(require(j, path, "base"), path + ".base", exemplars, epsilon);
    return Metric::binarized(std::move(base), as_number(require(j, path, "eta0"), path + ".eta0"),
                             epsilon);
  }
  if (kind == "rescaled") {
    strict_keys(j, path, {"kind", "base", "map"});
    Metric base = parse_metric(require(j, path, "base"), path + ".base", exemplars, epsilon);
    const json& mj = require(j, path, "map");
    strict_keys(mj, path + ".map", {"gamma0", "eta0", "alpha", "beta"});
    const RescaleMap map = RescaleMap::make(
        as_number(require(mj, path + ".map", "gamma0"), path + ".map.gamma0"),
        as_number(require(mj, path + ".map", "eta0"), path + ".map.eta0"),
        as_number(require(mj, path + ".map", "alpha"), path + ".map.alpha"),
        as_bound(require(mj, path + ".map", "beta"), path + ".map.beta"));
    return Metric::rescaled(std::move(base), map);
  }
  fail(Errc::ParseError, path + ".kind",
       "unknown metric kind '" + kind +
           "' (expected linear, tabulated, trivial_faithful, binarized or rescaled)");
}

inline FeatureModel parse_feature_model(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = as_string(require(j, path, "kind"), path + ".kind");
  FeatureModel m;
  if (kind == "uniform") {
    strict_keys(j, path, {"kind", "low", "high"});
    m.kind = FeatureModel::Kind::Uniform;
    m.a = as_number(require(j, path, "low"), path + ".low");
    m.b = as_number(require(j, path, "high"), path + ".high");
  } else if (kind == "normal") {
    strict_keys(j, path, {"kind", "mean", "stddev"});
    m.kind = FeatureModel::Kind::Normal;
    m.a = as_number(require(j, path, "mean"), path + ".mean");
    m.b = as_number(require(j, path, "stddev"), path + ".stddev");
  } else {
    fail(Errc::ParseError, path + ".kind", "expected \"uniform\" or \"normal\"");
  }
  return m;
}

inline SimulationSpec parse_simulation(const json& j, const std::string& path) {
  strict_keys(j, path,
              {"seed", "steps", "target_probabilities", "feature_models", "on_violation"});
  SimulationSpec spec;
  spec.seed = as_uint(require(j, path, "seed"), path + ".seed");
  spec.steps = static_cast<std::size_t>(as_uint(require(j, path, "steps"), path + ".steps"));

  const json& tp = require(j, path, "target_probabilities");
  strict_keys(tp, path + ".target_probabilities", {"clear", "clear_non", "borderline"});
  auto prob = [&](const char* key) {
    auto it = tp.find(key);
    return it == tp.end() ? 0.0
                          : as_number(*it, path + ".target_probabilities." + key);
  };
  spec.config.p_clear = prob("clear");
  spec.config.p_clear_non = prob("clear_non");
  spec.config.p_borderline = prob("borderline");

  const json& fm = require(j, path, "feature_models");
  strict_keys(fm, path + ".feature_models", {"clear", "clear_non", "borderline"});
  if (auto it = fm.find("clear"); it != fm.end()) {
    spec.config.clear_model = parse_feature_model(*it, path + ".feature_models.clear");
  }
  if (auto it = fm.find("clear_non"); it != fm.end()) {
    spec.config.clear_non_model = parse_feature_model(*it, path + ".feature_models.clear_non");
  }
  if (auto it = fm.find("borderline"); it != fm.end()) {
    spec.config.borderline_model = parse_feature_model(*it, path + ".feature_models.borderline");
  }

  if (auto it = j.find("on_violation"); it != j.end()) {
    const std::string v = as_string(*it, path + ".on_violation");
    if (v == "halt") {
      spec.config.halt_on_violation = true;
    } else if (v == "skip") {
      spec.config.halt_on_violation = false;
    } else {
      fail(Errc::ParseError, path + ".on_violation", "expected \"halt\" or \"skip\"");
    }
  }
  validate_generator_config(spec.config);
  return spec;
}

}  // namespace detail

inline LoadedScenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
  using namespace detail;
  const std::string root = "$";
  strict_keys(j, root,
              {"version", "observer", "property", "epsilon", "schema", "metric", "exemplars",
               "probes", "simulation"});
  if (as_uint(require(j, root, "version"), root + ".version") != 1) {
    fail(Errc::ParseError, root + ".version", "unsupported scenario version (expected 1)");
  }
  const std::string observer = as_string(require(j, root, "observer"), root + ".observer");
  const std::string property = as_string(require(j, root, "property"), root + ".property");

  double epsilon = kDefaultEpsilon;
  if (auto it = j.find("epsilon"); it != j.end()) {
    epsilon = as_number(*it, root + ".epsilon");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      fail(Errc::ParseError, root + ".epsilon", "epsilon must be a positive finite number");
    }
  }

  const json& sj = require(j, root, "schema");
  strict_keys(sj, root + ".schema", {"dimension", "feature_names", "feature_units"});
  std::vector<std::string> names;
  const json& nj = require(sj, root + ".schema", "feature_names");
  if (!nj.is_array()) fail(Errc::ParseError, root + ".schema.feature_names", "expected an array");
  for (std::size_t i = 0; i < nj.size(); ++i) {
    names.push_back(as_string(nj[i], root + ".schema.feature_names[" + std::to_string(i) + "]"));
  }
  std::vector<std::string> units;
  if (auto it = sj.find("feature_units"); it != sj.end()) {
    if (!it->is_array()) fail(Errc::ParseError, root + ".schema.feature_units", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      units.push_back(
          as_string((*it)[i], root + ".schema.feature_units[" + std::to_string(i) + "]"));
    }
  }
  ObservationSchema schema(names, units);
  if (auto it = sj.find("dimension"); it != sj.end()) {
    if (as_uint(*it, root + ".schema.dimension") != schema.dimension()) {
      fail(Errc::ParseError, root + ".schema.dimension",
           "dimension does not match feature_names length");
    }
  }

  const json& ej = require(j, root, "exemplars");
  strict_keys(ej, root + ".exemplars", {"clear", "clear_non", "borderline"});
  auto records_field = [&](const char* key) -> std::vector<SystemRecord> {
    auto it = ej.find(key);
    if (it == ej.end()) return {};
    return parse_records(*it, root + ".exemplars." + key);
  };
  ExemplarSets exemplars(records_field("clear"), records_field("clear_non"),
                         records_field("borderline"));

  Metric metric = parse_metric(require(j, root, "metric"), root + ".metric", exemplars, epsilon);

  std::vector<SystemRecord> probes;
  if (auto it = j.find("probes"); it != j.end()) {
    probes = parse_records(*it, root + ".probes");
    std::set<std::string> ids;
    for (const auto& p : probes) {
      schema.validate_record(p);
      if (!ids.insert(p.id).second) {
        throw Error(Errc::DuplicateSystemId, "probe id '" + p.id + "' appears twice");
      }
    }
  }

  std::optional<SimulationSpec> simulation;
  if (auto it = j.find("simulation"); it != j.end()) {
    simulation = parse_simulation(*it, root + ".simulation");
  }

  PropertyFramework framework(observer, property, std::move(schema), std::move(exemplars),
                              std::move(metric));
  return LoadedScenario{std::move(framework), std::move(probes), std::move(simulation), epsilon};
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot read file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write file '" + path.string() + "'");
  out << text;
}

inline LoadedScenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path));
}

namespace detail {

inline json record_json(const SystemRecord& rec) {
  json j{{"id", rec.id}, {"features", rec.features}};
  if (rec.provenance != Provenance::Apriori) j["provenance"] = "determined";
  return j;
}

inline json records_json(const std::vector<SystemRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_json(r));
  return arr;
}

inline json metric_json(const Metric& m) {
  json j{{"kind", metric_kind_name(m.kind())}};
  switch (m.kind()) {
    case MetricKind::LinearFeature:
      j["weights"] = m.linear_weights();
      j["bias"] = m.linear_bias();
      j["bounds"] = json::array({bound_json(m.bounds().lower), bound_json(m.bounds().upper)});
      break;
    case MetricKind::Tabulated: {
      json table = json::object();
      for (const auto& [id, v] : m.table()) table[id] = v;
      j["table"] = std::move(table);
      j["bounds"] = json::array({bound_json(m.bounds().lower), bound_json(m.bounds().upper)});
      break;
    }
    case MetricKind::TrivialFaithful:
      // Rebuilt from the scenario's exemplars at load time.
      j["bounds"] = json::array({bound_json(m.bounds().lower), bound_json(m.bounds().upper)});
      break;
    case MetricKind::Binarized:
      j["base"] = metric_json(m.base());
      j["eta0"] = m.binarize_cut();
      break;
    case MetricKind::Rescaled: {
      const RescaleMap& map = m.rescale_map();
      j["base"] = metric_json(m.base());
      j["map"] = json{{"gamma0", map.gamma0()},
                      {"eta0", map.eta0()},
                      {"alpha", map.alpha()},
                      {"beta", bound_json(map.beta())}};
      break;
    }
  }
  return j;
}

}  // namespace detail

inline json scenario_to_json(const LoadedScenario& scenario) {
  using namespace detail;
  const PropertyFramework& fw = scenario.framework;
  json j;
  j["version"] = 1;
  j["observer"] = fw.observer_id();
  j["property"] = fw.property_name();
  j["epsilon"] = scenario.epsilon;
  j["schema"] = json{{"dimension", fw.schema().dimension()},
                     {"feature_names", fw.schema().feature_names()},
                     {"feature_units", fw.schema().feature_units()}};
  j["metric"] = metric_json(fw.metric());
  j["exemplars"] = json{{"clear", records_json(fw.exemplars().clear())},
                        {"clear_non", records_json(fw.exemplars().clear_non())},
                        {"borderline", records_json(fw.exemplars().borderline())}};
  j["probes"] = records_json(scenario.probes);
  if (scenario.simulation) {
    const SimulationSpec& sim = *scenario.simulation;
    json models = json::object();
    auto model_json = [](const FeatureModel& m) {
      if (m.kind == FeatureModel::Kind::Uniform) {
        return json{{"kind", "uniform"}, {"low", m.a}, {"high", m.b}};
      }
      return json{{"kind", "normal"}, {"mean", m.a}, {"stddev", m.b}};
    };
    if (sim.config.p_clear > 0.0) models["clear"] = model_json(sim.config.clear_model);
    if (sim.config.p_clear_non > 0.0) models["clear_non"] = model_json(sim.config.clear_non_model);
    if (sim.config.p_borderline > 0.0) {
      models["borderline"] = model_json(sim.config.borderline_model);
    }
    j["simulation"] = json{{"seed", sim.seed},
                           {"steps", sim.steps},
                           {"target_probabilities",
                            json{{"clear", sim.config.p_clear},
                                 {"clear_non", sim.config.p_clear_non},
                                 {"borderline", sim.config.p_borderline}}},
                           {"feature_models", std::move(models)},
                           {"on_violation", sim.config.halt_on_violation ? "halt" : "skip"}};
  }
  return j;
}

inline std::string serialize_scenario(const LoadedScenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Systems CSV
//
// Header: id,<feature names in schema order>[,provenance][,target]
// provenance: apriori | determined   target: clear | clear_non | borderline
// ---------------------------------------------------------------------------

struct CsvSystems {
  std::vector<SystemRecord> records;
  std::vector<std::optional<TargetSet>> targets;  // parallel to records
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_csv_double(const std::string& s, std::size_t row, const std::string& col) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(Errc::ParseError,
                "row " + std::to_string(row) + ", column '" + col + "': not a number");
  }
  return v;
}

}  // namespace detail

inline CsvSystems parse_systems_csv(const std::string& text, const ObservationSchema& schema) {
  using namespace detail;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(Errc::HeaderMismatch, "empty file, expected a header row");
  }
  const std::vector<std::string> header = split_csv_line(line);
  const std::size_t dim = schema.dimension();
  if (header.empty() || header[0] != "id") {
    throw Error(Errc::HeaderMismatch, "first column must be 'id'");
  }
  if (header.size() < 1 + dim) {
    throw Error(Errc::HeaderMismatch, "header has fewer columns than the schema dimension");
  }
  for (std::size_t d = 0; d < dim; ++d) {
    if (header[1 + d] != schema.feature_names()[d]) {
      throw Error(Errc::HeaderMismatch, "column " + std::to_string(d + 2) + " is '" +
                                            header[1 + d] + "', schema expects '" +
                                            schema.feature_names()[d] + "'");
    }
  }
  std::optional<std::size_t> provenance_col, target_col;
  for (std::size_t c = 1 + dim; c < header.size(); ++c) {
    if (header[c] == "provenance" && !provenance_col) {
      provenance_col = c;
    } else if (header[c] == "target" && !target_col) {
      target_col = c;
    } else {
      throw Error(Errc::HeaderMismatch, "unexpected column '" + header[c] + "'");
    }
  }

  CsvSystems out;
  std::set<std::string> ids;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(Errc::ParseError, "row " + std::to_string(row) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
    }
    SystemRecord rec;
    rec.id = fields[0];
    if (rec.id.empty()) {
      throw Error(Errc::ParseError, "row " + std::to_string(row) + ": empty id");
    }
    if (!ids.insert(rec.id).second) {
      throw Error(Errc::DuplicateSystemId,
                  "row " + std::to_string(row) + ": id '" + rec.id + "' appears twice");
    }
    rec.features.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = parse_csv_double(fields[1 + d], row, schema.feature_names()[d]);
      if (!std::isfinite(v)) {
        throw Error(Errc::NonFiniteFeature,
                    "row " + std::to_string(row) + ": non-finite value in '" +
                        schema.feature_names()[d] + "'");
      }
      rec.features.push_back(v);
    }
    if (provenance_col) {
      const std::string& p = fields[*provenance_col];
      if (p == "apriori") {
        rec.provenance = Provenance::Apriori;
      } else if (p == "determined") {
        rec.provenance = Provenance::DeterminedByMetric;
      } else {
        throw Error(Errc::ParseError, "row " + std::to_string(row) +
                                          ": provenance must be 'apriori' or 'determined'");
      }
    }
    std::optional<TargetSet> target;
    if (target_col) {
      const std::string& t = fields[*target_col];
      if (t == "clear") {
        target = TargetSet::Clear;
      } else if (t == "clear_non") {
        target = TargetSet::ClearNon;
      } else if (t == "borderline") {
        target = TargetSet::Borderline;
      } else if (!t.empty()) {
        throw Error(Errc::ParseError,
                    "row " + std::to_string(row) +
                        ": target must be 'clear', 'clear_non' or 'borderline'");
      }
    }
    out.records.push_back(std::move(rec));
    out.targets.push_back(target);
  }
  return out;
}

inline CsvSystems ingest_systems_csv(const std::filesystem::path& path,
                                     const ObservationSchema& schema) {
  return parse_systems_csv(read_text_file(path), schema);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json thresholds_json(const Thresholds& th) {
  using detail::bound_json;
  return json{{"eta0", bound_json(th.eta0)},
              {"gamma0", bound_json(th.gamma0)},
              {"alpha", bound_json(th.alpha)},
              {"beta", bound_json(th.beta)},
              {"exhibit_interval", json::array({bound_json(th.eta0), bound_json(th.beta)})},
              {"non_exhibit_interval", json::array({bound_json(th.alpha), bound_json(th.gamma0)})},
              {"borderline_interval", json::array({bound_json(th.gamma0), bound_json(th.eta0)})}};
}

namespace detail {

inline json report_header(const char* kind, const PropertyFramework& fw, double eps) {
  return json{{"report", kind},
              {"observer", fw.observer_id()},
              {"property", fw.property_name()},
              {"epsilon", eps}};
}

}  // namespace detail

inline json thresholds_report(const PropertyFramework& fw, const Thresholds& th, double eps) {
  json j = detail::report_header("thresholds", fw, eps);
  j["thresholds"] = thresholds_json(th);
  return j;
}

inline json determination_json(const Determination& d) {
  return json{{"id", d.system_id},
              {"value", d.metric_value},
              {"margin", d.margin},
              {"verdict", verdict_name(d.verdict)}};
}

inline json classify_report(const PropertyFramework& fw, const Thresholds& th,
                            const std::vector<Determination>& determinations, double eps) {
  json j = detail::report_header("classify", fw, eps);
  j["thresholds"] = thresholds_json(th);
  json arr = json::array();
  for (const auto& d : determinations) arr.push_back(determination_json(d));
  j["determinations"] = std::move(arr);
  return j;
}

inline json faithfulness_report_json(const PropertyFramework& fw, const FaithfulnessReport& rep,
                                     double eps) {
  json j = detail::report_header("faithfulness", fw, eps);
  j["is_faithful"] = rep.is_faithful;
  json arr = json::array();
  for (const auto& v : rep.violations) {
    arr.push_back(json{{"id", v.system_id},
                       {"membership", target_set_name(v.membership)},
                       {"value", v.metric_value},
                       {"condition", v.condition}});
  }
  j["violations"] = std::move(arr);
  j["thresholds"] = rep.derived_thresholds ? thresholds_json(*rep.derived_thresholds) : json();
  return j;
}

inline json sharpness_report(const PropertyFramework& fw, const Thresholds& th,
                             const SharpnessVerdict& verdict, double eps) {
  json j = detail::report_header("sharpness", fw, eps);
  j["weak_sharp"] = verdict.weak_sharp;
  j["strong_sharp"] = verdict.strong_sharp;
  j["borderline_exemplars"] = fw.exemplars().borderline().size();
  j["thresholds"] = thresholds_json(th);
  return j;
}

inline json pan_check_report(const PropertyFramework& fw, const Thresholds& th,
                             const PanXReport& rep, double eps) {
  using detail::bound_json;
  json j = detail::report_header("pan_check", fw, eps);
  j["gamma_at_floor"] = rep.gamma_at_floor;
  j["non_exhibit_is_singleton"] = rep.non_exhibit_is_singleton;
  j["alpha"] = bound_json(th.alpha);
  j["gamma0"] = bound_json(th.gamma0);
  j["flagged"] = rep.flagged_small_systems;
  return j;
}

inline json update_event_json(const UpdateEvent& ev) {
  using detail::bound_json;
  json j;
  j["op"] = ev.incoming ? "add_exemplar" : "swap_metric";
  j["incoming"] = ev.incoming ? detail::record_json(*ev.incoming) : json();
  j["target"] = ev.target_set ? json(target_set_name(*ev.target_set)) : json();
  j["kind"] = update_kind_name(ev.kind);
  j["width_before"] = bound_json(ev.interval_width_before);
  j["width_after"] = bound_json(ev.interval_width_after);
  j["thresholds"] = ev.resulting_thresholds ? thresholds_json(*ev.resulting_thresholds) : json();
  json flips = json::array();
  for (const auto& r : ev.reclassified) {
    flips.push_back(json{{"id", r.system_id},
                         {"old", verdict_name(r.old_verdict)},
                         {"new", verdict_name(r.new_verdict)}});
  }
  j["reclassified"] = std::move(flips);
  json viols = json::array();
  for (const auto& v : ev.violations) {
    viols.push_back(json{{"id", v.system_id},
                         {"membership", target_set_name(v.membership)},
                         {"value", v.metric_value},
                         {"condition", v.condition}});
  }
  j["violations"] = std::move(viols);
  return j;
}

inline json update_report(const PropertyFramework& fw, const std::vector<UpdateEvent>& events,
                          const std::optional<Thresholds>& final_thresholds, double eps) {
  json j = detail::report_header("update", fw, eps);
  json arr = json::array();
  for (const auto& ev : events) arr.push_back(update_event_json(ev));
  j["events"] = std::move(arr);
  j["final_thresholds"] = final_thresholds ? thresholds_json(*final_thresholds) : json();
  return j;
}

inline json compare_report(const PropertyFramework& fw1, const PropertyFramework& fw2,
                           const DisagreementReport& rep, std::size_t probe_count, double eps) {
  json j{{"report", "compare"},
         {"observer_1", fw1.observer_id()},
         {"observer_2", fw2.observer_id()},
         {"property", fw1.property_name()},
         {"epsilon", eps}};
  j["probe_count"] = probe_count;
  j["agreement_rate"] = rep.agreement_rate;
  j["opposite"] = rep.opposite;
  json splits = json::array();
  for (const auto& s : rep.borderline_vs_decided) {
    splits.push_back(json{{"id", s.system_id},
                          {"verdict_1", verdict_name(s.verdict_1)},
                          {"verdict_2", verdict_name(s.verdict_2)}});
  }
  j["borderline_vs_decided"] = std::move(splits);
  j["agreed"] = rep.agreed;
  j["emergent_vagueness"] = rep.emergent_vagueness;
  return j;
}

inline json rescale_report(const PropertyFramework& fw, const MergedProperty& merged, double eps) {
  json j = detail::report_header("rescale", fw, eps);
  j["merged"] = merged.map.has_value();
  if (merged.map) {
    j["map"] = json{{"gamma0", merged.map->gamma0()},
                    {"eta0", merged.map->eta0()},
                    {"alpha", merged.map->alpha()},
                    {"beta", detail::bound_json(merged.map->beta())},
                    {"seam_value", merged.map->seam_value()}};
  } else {
    j["map"] = json();
  }
  j["merged_property"] = merged.framework.property_name();
  j["merged_thresholds"] = thresholds_json(merged.thresholds);
  return j;
}

inline json binarize_report(const PropertyFramework& fw, double base_eta0, double eps) {
  json j = detail::report_header("binarize", fw, eps);
  j["base_eta0"] = base_eta0;
  j["eta0_prime"] = 1.0;
  j["bounds"] = json::array({0.0, 1.0});
  return j;
}

/// JSON-lines trace: a header line naming the generator and seed, then one
/// line per event carrying its step index.
inline std::string trace_to_jsonl(const SimulationTrace& trace) {
  json header{{"type", "header"},
              {"generator", trace.generator_name},
              {"seed", trace.seed},
              {"events", trace.events.size()},
              {"initial", thresholds_json(trace.initial)}};
  std::string out = header.dump() + "\n";
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    json line = update_event_json(trace.events[i]);
    line["type"] = "event";
    line["step"] = i;
    out += line.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Table rendering
// ---------------------------------------------------------------------------

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace detail {

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline std::string rows_to_table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return "";
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += c + 1 == row.size() ? row[c] : pad(row[c], widths[c] + 2);
    }
    out += "\n";
  }
  return out;
}

inline std::string interval_text(double lo, double hi, bool lo_open, bool hi_open) {
  return std::string(lo_open ? "(" : "[") + format_number(lo) + ", " + format_number(hi) +
         (hi_open ? ")" : "]");
}

}  // namespace detail

inline std::string thresholds_table(const PropertyFramework& fw, const Thresholds& th) {
  using namespace detail;
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"property", fw.property_name() + " (observer " + fw.observer_id() + ")"});
  rows.push_back({"bounds", interval_text(th.alpha, th.beta, false, false)});
  rows.push_back({"eta0", format_number(th.eta0)});
  rows.push_back({"gamma0", format_number(th.gamma0)});
  rows.push_back({"exhibits", interval_text(th.eta0, th.beta, false, false)});
  rows.push_back({"borderline", interval_text(th.gamma0, th.eta0, true, true)});
  rows.push_back({"not-exhibits", interval_text(th.alpha, th.gamma0, false, false)});
  return rows_to_table(rows);
}

inline std::string classify_table(const std::vector<Determination>& determinations) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"id", "value", "margin", "verdict"});
  for (const auto& d : determinations) {
    rows.push_back({d.system_id, format_number(d.metric_value), format_number(d.margin),
                    verdict_name(d.verdict)});
  }
  return detail::rows_to_table(rows);
}

inline std::string faithfulness_table(const PropertyFramework& fw, const FaithfulnessReport& rep) {
  std::string out = "property " + fw.property_name() + " (observer " + fw.observer_id() + "): " +
                    (rep.is_faithful ? "faithful" : "NOT faithful") + "\n";
  if (!rep.violations.empty()) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"id", "set", "value", "condition"});
    for (const auto& v : rep.violations) {
      rows.push_back(
          {v.system_id, target_set_name(v.membership), format_number(v.metric_value), v.condition});
    }
    out += detail::rows_to_table(rows);
  }
  if (rep.derived_thresholds) {
    out += "eta0 " + format_number(rep.derived_thresholds->eta0) + ", gamma0 " +
           format_number(rep.derived_thresholds->gamma0) + "\n";
  }
  return out;
}

inline std::string sharpness_table(const PropertyFramework& fw, const Thresholds& th,
                                   const SharpnessVerdict& v) {
  using namespace detail;
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"property", fw.property_name() + " (observer " + fw.observer_id() + ")"});
  rows.push_back({"weak sharp", v.weak_sharp ? "yes" : "no"});
  rows.push_back({"strong sharp", v.strong_sharp ? "yes" : "no"});
  rows.push_back({"borderline interval", interval_text(th.gamma0, th.eta0, true, true)});
  return rows_to_table(rows);
}

inline std::string pan_check_table(const PropertyFramework& fw, const Thresholds& th,
                                   const PanXReport& rep) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"property", fw.property_name() + " (observer " + fw.observer_id() + ")"});
  rows.push_back({"gamma0 at floor", rep.gamma_at_floor ? "yes" : "no"});
  rows.push_back({"non-exhibit singleton", rep.non_exhibit_is_singleton ? "yes" : "no"});
  rows.push_back({"gamma0", format_number(th.gamma0)});
  rows.push_back({"alpha", format_number(th.alpha)});
  std::string flagged;
  for (const auto& id : rep.flagged_small_systems) {
    if (!flagged.empty()) flagged += ", ";
    flagged += id;
  }
  rows.push_back({"flagged", flagged.empty() ? "-" : flagged});
  return detail::rows_to_table(rows);
}

inline std::string update_table(const std::vector<UpdateEvent>& events) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"#", "op", "id", "target", "kind", "width", "flips"});
  for (std::size_t i = 0; i < events.size(); ++i) {
    const UpdateEvent& ev = events[i];
    rows.push_back({std::to_string(i), ev.incoming ? "add" : "swap",
                    ev.incoming ? ev.incoming->id : "-",
                    ev.target_set ? target_set_name(*ev.target_set) : "-",
                    update_kind_name(ev.kind),
                    format_number(ev.interval_width_before) + " -> " +
                        format_number(ev.interval_width_after),
                    std::to_string(ev.reclassified.size())});
  }
  return detail::rows_to_table(rows);
}

inline std::string compare_table(const PropertyFramework& fw1, const PropertyFramework& fw2,
                                 const DisagreementReport& rep, std::size_t probe_count) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"observers", fw1.observer_id() + " vs " + fw2.observer_id()});
  rows.push_back({"probes", std::to_string(probe_count)});
  rows.push_back({"agreement rate", format_number(rep.agreement_rate)});
  rows.push_back({"opposite", std::to_string(rep.opposite.size())});
  rows.push_back({"borderline vs decided", std::to_string(rep.borderline_vs_decided.size())});
  rows.push_back({"emergent vagueness", rep.emergent_vagueness ? "yes" : "no"});
  std::string out = detail::rows_to_table(rows);
  if (!rep.opposite.empty() || !rep.borderline_vs_decided.empty()) {
    std::vector<std::vector<std::string>> detail_rows;
    detail_rows.push_back({"id", fw1.observer_id(), fw2.observer_id()});
    for (const auto& id : rep.opposite) detail_rows.push_back({id, "*", "*"});
    for (const auto& s : rep.borderline_vs_decided) {
      detail_rows.push_back({s.system_id, verdict_name(s.verdict_1), verdict_name(s.verdict_2)});
    }
    out += detail::rows_to_table(detail_rows);
  }
  return out;
}

inline std::string rescale_table(const MergedProperty& merged) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"merged property", merged.framework.property_name()});
  if (merged.map) {
    rows.push_back({"gamma0", format_number(merged.map->gamma0())});
    rows.push_back({"eta0", format_number(merged.map->eta0())});
    rows.push_back({"beta", format_number(merged.map->beta())});
    rows.push_back({"seam value", format_number(merged.map->seam_value())});
  } else {
    rows.push_back({"map", "identity (no non-cases to absorb)"});
  }
  rows.push_back({"exhibit threshold", format_number(merged.thresholds.eta0)});
  rows.push_back({"non-exhibit threshold", format_number(merged.thresholds.gamma0)});
  return detail::rows_to_table(rows);
}

inline std::string binarize_table(const PropertyFramework& fw, double base_eta0) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"property", fw.property_name() + " (observer " + fw.observer_id() + ")"});
  rows.push_back({"base eta0", format_number(base_eta0)});
  rows.push_back({"binarized bounds", "[0, 1]"});
  rows.push_back({"binarized eta0", "1"});
  return detail::rows_to_table(rows);
}

}  // namespace penumbra::io
