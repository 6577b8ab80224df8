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

#include <catch2/catch.hpp>

#include <limits>
#include <string>

#include "penumbra/penumbra.hpp"
#include "schema_check.hpp"
#include "support.hpp"

using namespace penumbra;
using io::LoadedScenario;
using nlohmann::json;

namespace {

const char* kTallScenario = R"({
  "version": 1,
  "observer": "A1",
  "property": "tall",
  "schema": {"feature_names": ["height_m"], "feature_units": ["m"]},
  "metric": {"kind": "linear", "weights": [1.0], "bias": 0.0, "bounds": [0.0, 3.0]},
  "exemplars": {
    "clear": [{"id": "p1", "features": [1.9]}, {"id": "p2", "features": [2.0]}],
    "clear_non": [{"id": "p3", "features": [1.5]}, {"id": "p4", "features": [1.6]}],
    "borderline": [{"id": "p5", "features": [1.8]}]
  },
  "probes": [{"id": "q_180", "features": [1.8]}]
})";

std::string repo_path(const char* rel) { return std::string(PENUMBRA_REPO_ROOT "/") + rel; }

}  // namespace

TEST_CASE("scenario parsing builds the framework") {
  const LoadedScenario sc = io::parse_scenario(kTallScenario);
  CHECK(sc.framework.property_name() == "tall");
  CHECK(sc.epsilon == kDefaultEpsilon);
  CHECK(sc.probes.size() == 1);
  const Thresholds th = derive_thresholds(sc.framework);
  CHECK(th.eta0 == 1.9);
  CHECK(th.gamma0 == 1.6);
}

TEST_CASE("scenario round-trips through its canonical serialization") {
  const LoadedScenario sc = io::parse_scenario(kTallScenario);
  const std::string canonical = io::serialize_scenario(sc);
  const LoadedScenario again = io::parse_scenario(canonical);
  CHECK(sc == again);
  CHECK(io::serialize_scenario(again) == canonical);
}

TEST_CASE("shipped scenarios parse and round-trip") {
  for (const char* rel :
       {"scenarios/tall.scenario.json", "scenarios/iit.scenario.json",
        "scenarios/tall_a2.scenario.json"}) {
    const LoadedScenario sc = io::load_scenario(repo_path(rel));
    const LoadedScenario again = io::parse_scenario(io::serialize_scenario(sc));
    CHECK(sc == again);
  }
}

TEST_CASE("unknown fields are rejected with their path") {
  const char* text = R"({
    "version": 1, "observer": "A1", "property": "tall",
    "schema": {"feature_names": ["height_m"]},
    "metric": {"kind": "linear", "weigths": [1.0], "bounds": [0.0, 3.0]},
    "exemplars": {"clear": [{"id": "p1", "features": [1.9]}]}
  })";
  try {
    io::parse_scenario(text);
    FAIL("expected UnknownField");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownField);
    CHECK(std::string(e.what()).find("$.metric.weigths") != std::string::npos);
  }
}

TEST_CASE("type errors carry the offending path") {
  const char* text = R"({
    "version": 1, "observer": "A1", "property": "tall",
    "schema": {"feature_names": ["height_m"]},
    "metric": {"kind": "linear", "weights": [1.0], "bounds": [0.0, 3.0]},
    "exemplars": {"clear": [{"id": "p1", "features": ["a"]}]}
  })";
  try {
    io::parse_scenario(text);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("$.exemplars.clear[0].features[0]") != std::string::npos);
  }
}

TEST_CASE("extended-real bounds use string sentinels") {
  const char* text = R"({
    "version": 1, "observer": "A1", "property": "conscious",
    "schema": {"feature_names": ["phi"]},
    "metric": {"kind": "linear", "weights": [1.0], "bounds": [0.0, "inf"]},
    "exemplars": {"clear": [{"id": "h1", "features": [12.0]}]}
  })";
  const LoadedScenario sc = io::parse_scenario(text);
  CHECK(sc.framework.metric().bounds().upper == std::numeric_limits<double>::infinity());
  const std::string out = io::serialize_scenario(sc);
  CHECK(out.find("\"inf\"") != std::string::npos);
  CHECK(io::parse_scenario(out).framework.metric().bounds().upper ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("scenario versioning and structural errors") {
  CHECK_THROWS_MATCHES(io::parse_scenario("{"), Error, testsupport::HasErrc(Errc::ParseError));
  CHECK_THROWS_MATCHES(io::parse_scenario(R"({"version": 2})"), Error,
                       testsupport::HasErrc(Errc::ParseError));
  const char* dup = R"({
    "version": 1, "observer": "A1", "property": "p",
    "schema": {"feature_names": ["x"]},
    "metric": {"kind": "linear", "weights": [1.0], "bounds": [0.0, 3.0]},
    "exemplars": {"clear": [{"id": "p1", "features": [1.9]}],
                  "clear_non": [{"id": "p1", "features": [1.5]}]}
  })";
  CHECK_THROWS_MATCHES(io::parse_scenario(dup), Error,
                       testsupport::HasErrc(Errc::DuplicateSystemId));
}

TEST_CASE("nested metric kinds load from scenarios") {
  const char* text = R"({
    "version": 1, "observer": "A1", "property": "tall",
    "schema": {"feature_names": ["height_m"]},
    "metric": {"kind": "binarized",
               "base": {"kind": "linear", "weights": [1.0], "bounds": [0.0, 3.0]},
               "eta0": 1.9},
    "exemplars": {"clear": [{"id": "p1", "features": [1.9]}]}
  })";
  const LoadedScenario sc = io::parse_scenario(text);
  CHECK(sc.framework.metric().kind() == MetricKind::Binarized);
  CHECK(sc.framework.metric().evaluate(testsupport::probe("q", 2.2)) == 1.0);

  const char* trivial = R"({
    "version": 1, "observer": "A1", "property": "tall",
    "schema": {"feature_names": ["height_m"]},
    "metric": {"kind": "trivial_faithful", "bounds": [0.0, 1.0]},
    "exemplars": {"clear": [{"id": "p1", "features": [1.9]}],
                  "clear_non": [{"id": "p3", "features": [1.5]}]}
  })";
  const LoadedScenario tsc = io::parse_scenario(trivial);
  const Thresholds th = derive_thresholds(tsc.framework);
  CHECK(th.eta0 == 1.0);
  CHECK(th.gamma0 == 0.0);
}

TEST_CASE("systems CSV ingestion") {
  const ObservationSchema schema({"height_m"});
  SECTION("plain rows") {
    const io::CsvSystems got = io::parse_systems_csv("id,height_m\np9,1.72\n", schema);
    REQUIRE(got.records.size() == 1);
    CHECK(got.records[0].id == "p9");
    CHECK(got.records[0].features == std::vector<double>{1.72});
    CHECK(got.records[0].provenance == Provenance::Apriori);
    CHECK_FALSE(got.targets[0].has_value());
  }
  SECTION("header mismatch") {
    CHECK_THROWS_MATCHES(io::parse_systems_csv("id,weight_kg\np9,70\n", schema), Error,
                         testsupport::HasErrc(Errc::HeaderMismatch));
  }
  SECTION("non-finite value names the row") {
    try {
      io::parse_systems_csv("id,height_m\np9,NaN\n", schema);
      FAIL("expected NonFiniteFeature");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonFiniteFeature);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
  SECTION("duplicate ids") {
    CHECK_THROWS_MATCHES(io::parse_systems_csv("id,height_m\np9,1.7\np9,1.8\n", schema), Error,
                         testsupport::HasErrc(Errc::DuplicateSystemId));
  }
  SECTION("provenance and target columns, CRLF line ends") {
    const io::CsvSystems got = io::parse_systems_csv(
        "id,height_m,provenance,target\r\np9,1.85,apriori,clear\r\npx,1.7,determined,\r\n",
        schema);
    REQUIRE(got.records.size() == 2);
    CHECK(got.targets[0] == TargetSet::Clear);
    CHECK(got.records[1].provenance == Provenance::DeterminedByMetric);
    CHECK_FALSE(got.targets[1].has_value());
  }
  SECTION("malformed number") {
    CHECK_THROWS_MATCHES(io::parse_systems_csv("id,height_m\np9,abc\n", schema), Error,
                         testsupport::HasErrc(Errc::ParseError));
  }
}

TEST_CASE("reports validate against the shipped grammar") {
  const json schema = json::parse(io::read_text_file(repo_path("docs/report-schema.json")));
  const PropertyFramework fw = testsupport::tall_framework();
  const Thresholds th = derive_thresholds(fw);
  const double eps = kDefaultEpsilon;

  std::vector<json> reports;
  reports.push_back(io::thresholds_report(fw, th, eps));
  reports.push_back(io::classify_report(
      fw, th, {classify(fw, th, testsupport::probe("q_180", 1.8))}, eps));
  reports.push_back(io::faithfulness_report_json(fw, check_faithfulness(fw), eps));
  reports.push_back(io::sharpness_report(fw, th, sharpness(fw, th), eps));
  const std::vector<SystemRecord> probes{testsupport::probe("tiny", 0.01)};
  reports.push_back(io::pan_check_report(fw, th, pan_x_check(fw, th, probes), eps));
  const UpdateResult up =
      apply_update(fw, testsupport::probe("p9", 1.85), TargetSet::Clear, probes);
  reports.push_back(io::update_report(fw, {up.event}, up.event.resulting_thresholds, eps));
  const UpdateResult rejected =
      apply_update(fw, mark_determined(testsupport::probe("px", 1.7)), TargetSet::Clear);
  reports.push_back(io::update_report(fw, {rejected.event}, std::nullopt, eps));
  reports.push_back(io::compare_report(fw, fw, compare_observers(fw, fw, probes), 1, eps));
  reports.push_back(io::rescale_report(fw, absorb_non_cases(fw), eps));
  reports.push_back(io::binarize_report(fw, th.eta0, eps));

  for (const auto& report : reports) {
    std::string why;
    INFO(report.dump(2));
    INFO(why);
    CHECK(schemacheck::validate(report, schema, &why));
  }

  // A corrupted report must not validate.
  json bad = reports.front();
  bad["extra_field"] = 1;
  CHECK_FALSE(schemacheck::validate(bad, schema));
}

TEST_CASE("threshold reports carry extended-real sentinels") {
  const PropertyFramework fw = build_framework(
      "A1", "conscious", ObservationSchema({"phi"}),
      ExemplarSets({{"h1", {12.0}}}, {}, {}),
      Metric::linear({1.0}, 0.0, Bounds{0.0, std::numeric_limits<double>::infinity()}));
  const Thresholds th = derive_thresholds(fw);
  const json rep = io::thresholds_report(fw, th, kDefaultEpsilon);
  CHECK(rep["thresholds"]["beta"] == "inf");
  CHECK(rep["thresholds"]["exhibit_interval"][1] == "inf");

  const json schema = json::parse(io::read_text_file(repo_path("docs/report-schema.json")));
  std::string why;
  CHECK(schemacheck::validate(rep, schema, &why));
}

TEST_CASE("report JSON is byte-stable") {
  const PropertyFramework fw = testsupport::tall_framework();
  const Thresholds th = derive_thresholds(fw);
  const std::string a = io::thresholds_report(fw, th, kDefaultEpsilon).dump(2);
  const std::string b = io::thresholds_report(fw, th, kDefaultEpsilon).dump(2);
  CHECK(a == b);
  CHECK(a.find("\"eta0\": 1.9") != std::string::npos);
  CHECK(a.find("\"gamma0\": 1.6") != std::string::npos);
}

TEST_CASE("table rendering is deterministic and readable") {
  const PropertyFramework fw = testsupport::tall_framework();
  const Thresholds th = derive_thresholds(fw);
  const std::string table = io::thresholds_table(fw, th);
  CHECK(table.find("eta0") != std::string::npos);
  CHECK(table.find("1.9") != std::string::npos);
  CHECK(table == io::thresholds_table(fw, th));

  const std::string ct =
      io::classify_table({classify(fw, th, testsupport::probe("q_180", 1.8))});
  CHECK(ct.find("borderline") != std::string::npos);
}

TEST_CASE("simulation block round-trips") {
  const LoadedScenario sc = io::load_scenario(repo_path("scenarios/tall.scenario.json"));
  REQUIRE(sc.simulation.has_value());
  CHECK(sc.simulation->seed == 42);
  CHECK(sc.simulation->steps == 8);
  CHECK(sc.simulation->config.p_clear == 0.5);
  CHECK(sc.simulation->config.halt_on_violation);
  const LoadedScenario again = io::parse_scenario(io::serialize_scenario(sc));
  CHECK(again.simulation == sc.simulation);
}
