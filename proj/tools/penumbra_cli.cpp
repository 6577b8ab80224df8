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

// penumbra: exemplar-anchored three-way classification from the command
// line. Subcommands: thresholds, classify, faithfulness, sharpness,
// pan-check, update, simulate, compare, rescale, binarize.
//
// Exit codes: 0 success, 1 internal error, 2 validation/input error,
// 3 faithfulness violation (machine-detectable without parsing output).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "penumbra/penumbra.hpp"

namespace {

using namespace penumbra;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitViolation = 3;

struct CommonArgs {
  std::string scenario_path;
  std::string systems_path;
  std::string out_path;
  std::string format = "table";
  std::optional<double> epsilon;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool scenario_required = true) {
  auto* scenario = cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file");
  if (scenario_required) scenario->required();
  cmd->add_option("--systems", args.systems_path, "Systems CSV file");
  cmd->add_option("--out", args.out_path, "Write the report here instead of stdout");
  cmd->add_option("--format", args.format, "Report format")
      ->check(CLI::IsMember({"json", "table"}));
  cmd->add_option("--epsilon", args.epsilon, "Comparison tolerance override");
  cmd->add_option("--seed", args.seed, "Simulation seed override");
}

struct Loaded {
  io::LoadedScenario scenario;
  double eps;
};

Loaded load(const CommonArgs& args) {
  io::LoadedScenario sc = io::load_scenario(args.scenario_path);
  const double eps = args.epsilon.value_or(sc.epsilon);
  if (!(eps > 0.0)) {
    throw Error(Errc::ParseError, "--epsilon must be positive");
  }
  return Loaded{std::move(sc), eps};
}

void emit(const CommonArgs& args, const json& report, const std::string& table) {
  const std::string text = args.format == "json" ? report.dump(2) + "\n" : table;
  if (args.out_path.empty()) {
    std::cout << text;
  } else {
    io::write_text_file(args.out_path, text);
  }
}

/// Systems for classification-style commands: --systems CSV when given,
/// otherwise the scenario's probes.
std::vector<SystemRecord> gather_systems(const CommonArgs& args, const Loaded& loaded) {
  if (!args.systems_path.empty()) {
    return io::ingest_systems_csv(args.systems_path, loaded.scenario.framework.schema()).records;
  }
  return loaded.scenario.probes;
}

Thresholds require_faithful(const PropertyFramework& fw, double eps) {
  const FaithfulnessReport rep = check_faithfulness(fw, eps);
  if (!rep.is_faithful) {
    std::string detail = "framework is not faithful";
    if (!rep.violations.empty()) {
      detail += " (" + rep.violations.front().system_id + ": " +
                rep.violations.front().condition + ")";
    }
    throw Error(Errc::UnfaithfulFramework, detail);
  }
  return *rep.derived_thresholds;
}

int run_thresholds(const CommonArgs& args) {
  const Loaded loaded = load(args);
  const Thresholds th = derive_thresholds(loaded.scenario.framework);
  emit(args, io::thresholds_report(loaded.scenario.framework, th, loaded.eps),
       io::thresholds_table(loaded.scenario.framework, th));
  return kExitOk;
}

int run_classify(const CommonArgs& args) {
  const Loaded loaded = load(args);
  const PropertyFramework& fw = loaded.scenario.framework;
  const Thresholds th = require_faithful(fw, loaded.eps);
  const std::vector<SystemRecord> systems = gather_systems(args, loaded);
  if (systems.empty()) {
    throw Error(Errc::ParseError, "nothing to classify: give --systems or scenario probes");
  }
  std::vector<Determination> determinations;
  determinations.reserve(systems.size());
  for (const auto& sys : systems) {
    determinations.push_back(classify(fw, th, sys, loaded.eps));
  }
  emit(args, io::classify_report(fw, th, determinations, loaded.eps),
       io::classify_table(determinations));
  return kExitOk;
}

int run_faithfulness(const CommonArgs& args) {
  const Loaded loaded = load(args);
  const FaithfulnessReport rep = check_faithfulness(loaded.scenario.framework, loaded.eps);
  emit(args, io::faithfulness_report_json(loaded.scenario.framework, rep, loaded.eps),
       io::faithfulness_table(loaded.scenario.framework, rep));
  return rep.is_faithful ? kExitOk : kExitViolation;
}

int run_sharpness(const CommonArgs& args) {
  const Loaded loaded = load(args);
  const PropertyFramework& fw = loaded.scenario.framework;
  const Thresholds th = require_faithful(fw, loaded.eps);
  const SharpnessVerdict verdict = sharpness(fw, th, loaded.eps);
  emit(args, io::sharpness_report(fw, th, verdict, loaded.eps),
       io::sharpness_table(fw, th, verdict));
  return kExitOk;
}

int run_pan_check(const CommonArgs& args) {
  const Loaded loaded = load(args);
  const PropertyFramework& fw = loaded.scenario.framework;
  const Thresholds th = require_faithful(fw, loaded.eps);
  const std::vector<SystemRecord> probes = gather_systems(args, loaded);
  const PanXReport rep = pan_x_check(fw, th, probes, loaded.eps);
  emit(args, io::pan_check_report(fw, th, rep, loaded.eps), io::pan_check_table(fw, th, rep));
  return kExitOk;
}

int run_update(const CommonArgs& args, const std::string& target_flag) {
  const Loaded loaded = load(args);
  if (args.systems_path.empty()) {
    throw Error(Errc::ParseError, "update needs --systems with the incoming exemplars");
  }
  const io::CsvSystems incoming =
      io::ingest_systems_csv(args.systems_path, loaded.scenario.framework.schema());

  std::optional<TargetSet> flag_target;
  if (!target_flag.empty()) {
    if (target_flag == "clear") flag_target = TargetSet::Clear;
    else if (target_flag == "clear_non") flag_target = TargetSet::ClearNon;
    else if (target_flag == "borderline") flag_target = TargetSet::Borderline;
  }

  PropertyFramework current = loaded.scenario.framework;
  require_faithful(current, loaded.eps);
  std::vector<UpdateEvent> events;
  bool violated = false;
  for (std::size_t i = 0; i < incoming.records.size(); ++i) {
    const std::optional<TargetSet> target =
        incoming.targets[i] ? incoming.targets[i] : flag_target;
    if (!target) {
      throw Error(Errc::ParseError,
                  "no target set for '" + incoming.records[i].id +
                      "': add a 'target' CSV column or pass --target");
    }
    UpdateResult result = apply_update(current, incoming.records[i], *target,
                                       loaded.scenario.probes, loaded.eps);
    const UpdateKind kind = result.event.kind;
    events.push_back(std::move(result.event));
    if (kind == UpdateKind::FaithfulnessViolation) {
      violated = true;
      break;  // quarantined: stop applying further rows
    }
    if (kind != UpdateKind::Rejected) current = std::move(result.framework);
  }
  const std::optional<Thresholds> final_th =
      violated ? std::nullopt : std::optional(derive_thresholds(current));
  emit(args, io::update_report(loaded.scenario.framework, events, final_th, loaded.eps),
       io::update_table(events));
  return violated ? kExitViolation : kExitOk;
}

int run_simulate(const CommonArgs& args, std::optional<std::uint64_t> steps_flag) {
  const Loaded loaded = load(args);
  if (!loaded.scenario.simulation) {
    throw Error(Errc::ParseError, "scenario has no simulation block");
  }
  const io::SimulationSpec& spec = *loaded.scenario.simulation;
  const std::uint64_t seed = args.seed.value_or(spec.seed);
  const std::size_t steps = steps_flag ? static_cast<std::size_t>(*steps_flag) : spec.steps;

  const SimulationTrace trace = simulate_stream(loaded.scenario.framework, spec.config, seed,
                                                steps, loaded.scenario.probes, loaded.eps);
  const std::string jsonl = io::trace_to_jsonl(trace);
  if (args.out_path.empty()) {
    std::cout << jsonl;
  } else {
    io::write_text_file(args.out_path, jsonl);
  }
  for (const auto& ev : trace.events) {
    if (ev.kind == UpdateKind::FaithfulnessViolation) return kExitViolation;
  }
  return kExitOk;
}

int run_compare(const CommonArgs& args, const std::string& scenario2_path,
                std::uint64_t grid_points) {
  const Loaded loaded = load(args);
  const io::LoadedScenario other = io::load_scenario(scenario2_path);
  const PropertyFramework& fw1 = loaded.scenario.framework;
  const PropertyFramework& fw2 = other.framework;
  require_faithful(fw1, loaded.eps);
  require_faithful(fw2, loaded.eps);

  // Caller probes from both scenarios and the CSV, plus an automatic grid
  // over the exemplar bounding box.
  std::vector<SystemRecord> probes = loaded.scenario.probes;
  probes.insert(probes.end(), other.probes.begin(), other.probes.end());
  if (!args.systems_path.empty()) {
    const io::CsvSystems extra = io::ingest_systems_csv(args.systems_path, fw1.schema());
    probes.insert(probes.end(), extra.records.begin(), extra.records.end());
  }
  if (grid_points > 0) {
    const std::vector<SystemRecord> grid =
        probe_grid(fw1, static_cast<std::size_t>(grid_points));
    probes.insert(probes.end(), grid.begin(), grid.end());
  }

  const DisagreementReport rep = compare_observers(fw1, fw2, probes, loaded.eps);
  emit(args, io::compare_report(fw1, fw2, rep, probes.size(), loaded.eps),
       io::compare_table(fw1, fw2, rep, probes.size()));
  return kExitOk;
}

int run_rescale(const CommonArgs& args, const std::string& scenario_out) {
  const Loaded loaded = load(args);
  const PropertyFramework& fw = loaded.scenario.framework;
  require_faithful(fw, loaded.eps);
  const MergedProperty merged = absorb_non_cases(fw);
  if (!scenario_out.empty()) {
    const io::LoadedScenario derived{merged.framework, loaded.scenario.probes, std::nullopt,
                                     loaded.eps};
    io::write_text_file(scenario_out, io::serialize_scenario(derived));
  }
  emit(args, io::rescale_report(fw, merged, loaded.eps), io::rescale_table(merged));
  return kExitOk;
}

int run_binarize(const CommonArgs& args, const std::string& scenario_out) {
  const Loaded loaded = load(args);
  const PropertyFramework& fw = loaded.scenario.framework;
  const Thresholds th = derive_thresholds(fw);
  const Metric prime = binarize_metric(fw.metric(), th.eta0, loaded.eps);
  if (!scenario_out.empty()) {
    const io::LoadedScenario derived{fw.with_metric(prime), loaded.scenario.probes, std::nullopt,
                                     loaded.eps};
    io::write_text_file(scenario_out, io::serialize_scenario(derived));
  }
  emit(args, io::binarize_report(fw, th.eta0, loaded.eps), io::binarize_table(fw, th.eta0));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exemplar-anchored vagueness quantification and three-way classification"};
  app.require_subcommand(1);

  CommonArgs thresholds_args, classify_args, faithfulness_args, sharpness_args, pan_args,
      update_args, simulate_args, compare_args, rescale_args, binarize_args;
  std::string update_target, compare_scenario2, rescale_out, binarize_out;
  std::optional<std::uint64_t> simulate_steps;
  std::uint64_t compare_grid = 101;

  add_common(app.add_subcommand("thresholds", "Derive eta0/gamma0 and the intervals"),
             thresholds_args);
  add_common(app.add_subcommand("classify", "Three-way classification of systems"),
             classify_args);
  add_common(app.add_subcommand("faithfulness", "Check the faithfulness conditions"),
             faithfulness_args);
  add_common(app.add_subcommand("sharpness", "Weak/strong sharpness verdict"), sharpness_args);
  add_common(app.add_subcommand("pan-check", "Floor-condition (pan-X) analysis"), pan_args);

  auto* update_cmd = app.add_subcommand("update", "Apply apriori exemplar updates");
  add_common(update_cmd, update_args);
  update_cmd->add_option("--target", update_target, "Target set for rows without one")
      ->check(CLI::IsMember({"clear", "clear_non", "borderline"}));

  auto* simulate_cmd = app.add_subcommand("simulate", "Run the scenario's exemplar stream");
  add_common(simulate_cmd, simulate_args);
  simulate_cmd->add_option("--steps", simulate_steps, "Step-count override");

  auto* compare_cmd = app.add_subcommand("compare", "Two-observer disagreement analysis");
  add_common(compare_cmd, compare_args);
  compare_cmd->add_option("--scenario2", compare_scenario2, "Second observer's scenario")
      ->required();
  compare_cmd->add_option("--grid", compare_grid, "Auto probe-grid points (0 disables)");

  auto* rescale_cmd =
      app.add_subcommand("rescale", "Absorb the non-cases into a merged property");
  add_common(rescale_cmd, rescale_args);
  rescale_cmd->add_option("--scenario-out", rescale_out, "Write the merged scenario here");

  auto* binarize_cmd = app.add_subcommand("binarize", "Collapse the metric to {0,1} at eta0");
  add_common(binarize_cmd, binarize_args);
  binarize_cmd->add_option("--scenario-out", binarize_out, "Write the binarized scenario here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (app.got_subcommand("thresholds")) return run_thresholds(thresholds_args);
    if (app.got_subcommand("classify")) return run_classify(classify_args);
    if (app.got_subcommand("faithfulness")) return run_faithfulness(faithfulness_args);
    if (app.got_subcommand("sharpness")) return run_sharpness(sharpness_args);
    if (app.got_subcommand("pan-check")) return run_pan_check(pan_args);
    if (app.got_subcommand("update")) return run_update(update_args, update_target);
    if (app.got_subcommand("simulate")) return run_simulate(simulate_args, simulate_steps);
    if (app.got_subcommand("compare")) {
      return run_compare(compare_args, compare_scenario2, compare_grid);
    }
    if (app.got_subcommand("rescale")) return run_rescale(rescale_args, rescale_out);
    if (app.got_subcommand("binarize")) return run_binarize(binarize_args, binarize_out);
    std::cerr << "error: no subcommand\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::UnfaithfulFramework ? kExitViolation : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
