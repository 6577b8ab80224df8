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

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "penumbra/thresholds.hpp"

namespace penumbra {

enum class UpdateKind { Sharpening, Vaguening, Neutral, FaithfulnessViolation, Rejected };

inline const char* update_kind_name(UpdateKind k) {
  switch (k) {
    case UpdateKind::Sharpening: return "sharpening";
    case UpdateKind::Vaguening: return "vaguening";
    case UpdateKind::Neutral: return "neutral";
    case UpdateKind::FaithfulnessViolation: return "faithfulness_violation";
    case UpdateKind::Rejected: return "rejected";
  }
  return "?";
}

struct ReclassifiedEntry {
  std::string system_id;
  Verdict old_verdict;
  Verdict new_verdict;

  bool operator==(const ReclassifiedEntry&) const = default;
};

/// What one update did to a framework. `incoming`/`target_set` are absent
/// for metric swaps; `resulting_thresholds` is absent when the update left
/// the framework quarantined (FaithfulnessViolation) or untouched
/// (Rejected). Width is the borderline-interval width eta0 - gamma0.
struct UpdateEvent {
  std::optional<SystemRecord> incoming;
  std::optional<TargetSet> target_set;
  std::optional<Thresholds> resulting_thresholds;
  UpdateKind kind = UpdateKind::Neutral;
  double interval_width_before = 0.0;
  double interval_width_after = 0.0;
  std::vector<ReclassifiedEntry> reclassified;
  std::vector<FaithfulnessViolationEntry> violations;
};

struct UpdateResult {
  PropertyFramework framework;
  UpdateEvent event;
};

namespace detail {

inline UpdateKind kind_from_widths(double before, double after, double eps) {
  if (after < before - eps) return UpdateKind::Sharpening;
  if (after > before + eps) return UpdateKind::Vaguening;
  return UpdateKind::Neutral;
}

inline std::vector<ReclassifiedEntry> verdict_flips(const PropertyFramework& old_fw,
                                                    const Thresholds& old_th,
                                                    const PropertyFramework& new_fw,
                                                    const Thresholds& new_th,
                                                    std::span<const SystemRecord> tracked,
                                                    double eps) {
  std::vector<ReclassifiedEntry> flips;
  for (const auto& rec : tracked) {
    const Verdict before = classify(old_fw, old_th, rec, eps).verdict;
    const Verdict after = classify(new_fw, new_th, rec, eps).verdict;
    if (before != after) flips.push_back({rec.id, before, after});
  }
  return flips;
}

}  // namespace detail

/// Adds an apriori exemplar and reports what that did to the thresholds.
///
/// Metric-determined systems are Rejected outright — feeding a metric's own
/// verdicts back into the exemplar sets would fabricate sharpening — and
/// the framework comes back bit-identical. An accepted exemplar that breaks
/// faithfulness quarantines the framework: the exemplar is recorded, no
/// thresholds are derivable, and the caller must swap in a repaired metric.
/// `tracked` systems (typically the scenario probes) are re-classified
/// under the new thresholds and verdict flips reported; their set
/// membership never changes.
inline UpdateResult apply_update(const PropertyFramework& fw, const SystemRecord& incoming,
                                 TargetSet target, std::span<const SystemRecord> tracked = {},
                                 double eps = kDefaultEpsilon) {
  fw.schema().validate_record(incoming);
  const Thresholds before = derive_thresholds(fw);
  const double width_before = before.width();

  UpdateEvent event;
  event.incoming = incoming;
  event.target_set = target;
  event.interval_width_before = width_before;
  event.interval_width_after = width_before;

  if (incoming.provenance == Provenance::DeterminedByMetric) {
    event.kind = UpdateKind::Rejected;
    return UpdateResult{fw, std::move(event)};
  }

  PropertyFramework updated = fw.with_added_exemplar(incoming, target);
  FaithfulnessReport rep = check_faithfulness(updated, eps);
  if (!rep.is_faithful) {
    event.kind = UpdateKind::FaithfulnessViolation;
    event.violations = std::move(rep.violations);
    return UpdateResult{std::move(updated), std::move(event)};
  }

  const Thresholds after = *rep.derived_thresholds;
  event.resulting_thresholds = after;
  event.interval_width_after = after.width();
  event.kind = detail::kind_from_widths(width_before, after.width(), eps);
  event.reclassified = detail::verdict_flips(fw, before, updated, after, tracked, eps);
  return UpdateResult{std::move(updated), std::move(event)};
}

/// Replaces the metric — the only way out of quarantine, and the only move
/// that can widen the borderline interval (a vaguening). Width-before comes
/// from the old metric's extrema, which stay defined even when the old
/// state was unfaithful.
inline UpdateResult swap_metric(const PropertyFramework& fw, Metric replacement,
                                std::span<const SystemRecord> tracked = {},
                                double eps = kDefaultEpsilon) {
  const Thresholds before = derive_thresholds(fw);
  const bool old_faithful = check_faithfulness(fw, eps).is_faithful;

  UpdateEvent event;
  event.interval_width_before = before.width();
  event.interval_width_after = before.width();

  PropertyFramework updated = fw.with_metric(std::move(replacement));
  FaithfulnessReport rep = check_faithfulness(updated, eps);
  if (!rep.is_faithful) {
    event.kind = UpdateKind::FaithfulnessViolation;
    event.violations = std::move(rep.violations);
    return UpdateResult{std::move(updated), std::move(event)};
  }

  const Thresholds after = *rep.derived_thresholds;
  event.resulting_thresholds = after;
  event.interval_width_after = after.width();
  event.kind = detail::kind_from_widths(before.width(), after.width(), eps);
  if (old_faithful) {
    event.reclassified = detail::verdict_flips(fw, before, updated, after, tracked, eps);
  }
  return UpdateResult{std::move(updated), std::move(event)};
}

/// Per-dimension sampling model for generated exemplar features.
struct FeatureModel {
  enum class Kind { Uniform, Normal };
  Kind kind = Kind::Uniform;
  double a = 0.0;  // low  / mean
  double b = 1.0;  // high / stddev

  bool operator==(const FeatureModel&) const = default;
};

/// Stream generator: per-step target-set probabilities plus a feature model
/// per set. Violations either halt the stream or are skipped (the offending
/// exemplar is dropped and the previous framework kept).
struct GeneratorConfig {
  double p_clear = 0.0;
  double p_clear_non = 0.0;
  double p_borderline = 0.0;
  FeatureModel clear_model;
  FeatureModel clear_non_model;
  FeatureModel borderline_model;
  bool halt_on_violation = true;

  bool operator==(const GeneratorConfig&) const = default;
};

inline void validate_generator_config(const GeneratorConfig& cfg) {
  auto bad = [](double p) { return !std::isfinite(p) || p < 0.0; };
  if (bad(cfg.p_clear) || bad(cfg.p_clear_non) || bad(cfg.p_borderline)) {
    throw Error(Errc::InvalidGeneratorConfig, "target probabilities must be finite and >= 0");
  }
  const double sum = cfg.p_clear + cfg.p_clear_non + cfg.p_borderline;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::InvalidGeneratorConfig, "target probabilities must sum to 1");
  }
  auto check_model = [](const FeatureModel& m, const char* which) {
    if (!std::isfinite(m.a) || !std::isfinite(m.b)) {
      throw Error(Errc::InvalidGeneratorConfig, std::string(which) + " model parameters must be finite");
    }
    if (m.kind == FeatureModel::Kind::Uniform && m.a > m.b) {
      throw Error(Errc::InvalidGeneratorConfig, std::string(which) + " uniform model has low > high");
    }
    if (m.kind == FeatureModel::Kind::Normal && m.b < 0.0) {
      throw Error(Errc::InvalidGeneratorConfig, std::string(which) + " normal model has stddev < 0");
    }
  };
  if (cfg.p_clear > 0.0) check_model(cfg.clear_model, "clear");
  if (cfg.p_clear_non > 0.0) check_model(cfg.clear_non_model, "clear_non");
  if (cfg.p_borderline > 0.0) check_model(cfg.borderline_model, "borderline");
}

/// Name recorded in every trace header; identifies the exact sampling
/// algorithm so a trace can be reproduced outside this codebase.
inline constexpr const char* kStreamSamplerName = "mt19937_64/bits53/box-muller";

/// Seeded sampler with fully pinned-down mappings. std::mt19937_64 is
/// specified bit-for-bit by the standard; the distribution adapters are
/// hand-rolled because the standard library's are not.
///   unit:    take the top 53 bits of one 64-bit draw, scale by 2^-53
///   uniform: a + unit * (b - a)
///   normal:  Box-Muller on two unit draws, cosine branch first, the sine
///            branch cached and returned on the next call
class StreamSampler {
 public:
  explicit StreamSampler(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + unit() * (b - a); }

  double normal(double mean, double stddev) {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return mean + stddev * z;
    }
    double u1 = unit();
    const double u2 = unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(0) guard
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    return mean + stddev * r * std::cos(theta);
  }

  double sample(const FeatureModel& m) {
    return m.kind == FeatureModel::Kind::Uniform ? uniform(m.a, m.b) : normal(m.a, m.b);
  }

 private:
  std::mt19937_64 rng_;
  std::optional<double> spare_;
};

struct SimulationTrace {
  std::uint64_t seed = 0;
  std::string generator_name = kStreamSamplerName;
  Thresholds initial;
  std::vector<UpdateEvent> events;
  std::vector<std::pair<double, double>> width_series;  // (gamma0, eta0) after each accepted event
};

/// Runs `steps` generated apriori updates against a faithful framework.
/// Deterministic: the same (framework, config, seed, steps) always yields
/// the same trace. Per step the draw order is fixed — one unit draw picks
/// the target set (cumulative clear, clear_non, borderline), then one model
/// draw per feature dimension.
inline SimulationTrace simulate_stream(const PropertyFramework& fw, const GeneratorConfig& config,
                                       std::uint64_t seed, std::size_t steps,
                                       std::span<const SystemRecord> tracked = {},
                                       double eps = kDefaultEpsilon) {
  validate_generator_config(config);
  FaithfulnessReport start = check_faithfulness(fw, eps);
  if (!start.is_faithful) {
    throw Error(Errc::UnfaithfulFramework, "simulation needs a faithful starting framework");
  }

  SimulationTrace trace;
  trace.seed = seed;
  trace.initial = *start.derived_thresholds;
  trace.width_series.push_back({trace.initial.gamma0, trace.initial.eta0});

  StreamSampler sampler(seed);
  PropertyFramework current = fw;
  for (std::size_t step = 0; step < steps; ++step) {
    const double pick = sampler.unit();
    TargetSet target;
    const FeatureModel* model;
    if (pick < config.p_clear) {
      target = TargetSet::Clear;
      model = &config.clear_model;
    } else if (pick < config.p_clear + config.p_clear_non) {
      target = TargetSet::ClearNon;
      model = &config.clear_non_model;
    } else {
      target = TargetSet::Borderline;
      model = &config.borderline_model;
    }

    SystemRecord rec;
    rec.id = "sim-" + std::to_string(step);
    rec.features.reserve(fw.schema().dimension());
    for (std::size_t d = 0; d < fw.schema().dimension(); ++d) {
      rec.features.push_back(sampler.sample(*model));
    }

    UpdateResult result = apply_update(current, rec, target, tracked, eps);
    const UpdateKind kind = result.event.kind;
    trace.events.push_back(std::move(result.event));
    if (kind == UpdateKind::FaithfulnessViolation) {
      if (config.halt_on_violation) break;
      continue;  // drop the exemplar, keep the previous framework
    }
    current = std::move(result.framework);
    const Thresholds& th = *trace.events.back().resulting_thresholds;
    trace.width_series.push_back({th.gamma0, th.eta0});
  }
  return trace;
}

}  // namespace penumbra
