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

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "penumbra/errors.hpp"
#include "penumbra/metric.hpp"
#include "penumbra/types.hpp"

namespace penumbra {

/// Derived decision thresholds plus the metric bounds they live in.
/// The three determination intervals partition [alpha, beta]:
///   not-exhibits  [alpha, gamma0]
///   borderline    (gamma0, eta0)      open
///   exhibits      [eta0, beta]
struct Thresholds {
  double eta0;
  double gamma0;
  double alpha;
  double beta;

  double width() const noexcept { return eta0 - gamma0; }

  bool operator==(const Thresholds&) const = default;
};

enum class Verdict { Exhibits, NotExhibits, Borderline };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Exhibits: return "exhibits";
    case Verdict::NotExhibits: return "not_exhibits";
    case Verdict::Borderline: return "borderline";
  }
  return "?";
}

/// Three-way verdict for one system, with the raw metric value and its
/// signed distance from the exhibit threshold.
struct Determination {
  Verdict verdict;
  double metric_value;
  double margin;  // metric_value - eta0
  std::string system_id;

  bool operator==(const Determination&) const = default;
};

/// One faithfulness breach: which exemplar, where it sits, and why.
struct FaithfulnessViolationEntry {
  std::string system_id;
  TargetSet membership;
  double metric_value;
  std::string condition;

  bool operator==(const FaithfulnessViolationEntry&) const = default;
};

struct FaithfulnessReport {
  bool is_faithful = false;
  std::vector<FaithfulnessViolationEntry> violations;
  std::optional<Thresholds> derived_thresholds;  // absent when unfaithful
};

/// One observer's complete picture of one property: the observation schema,
/// the three apriori exemplar sets, and the quantification metric. A value
/// type — immutable once built; every "mutation" produces a new framework.
class PropertyFramework {
 public:
  PropertyFramework(std::string observer_id, std::string property_name, ObservationSchema schema,
                    ExemplarSets exemplars, Metric metric)
      : observer_id_(std::move(observer_id)), property_name_(std::move(property_name)),
        schema_(std::move(schema)), exemplars_(std::move(exemplars)), metric_(std::move(metric)) {
    validate_bounds(metric_.bounds());
    auto check_all = [&](const std::vector<SystemRecord>& set) {
      for (const auto& rec : set) schema_.validate_record(rec);
    };
    check_all(exemplars_.clear());
    check_all(exemplars_.clear_non());
    check_all(exemplars_.borderline());
    if (auto arity = metric_.expected_arity(); arity && *arity != schema_.dimension()) {
      throw Error(Errc::SchemaMismatch, "metric expects arity " + std::to_string(*arity) +
                                            ", schema has dimension " +
                                            std::to_string(schema_.dimension()));
    }
  }

  const std::string& observer_id() const noexcept { return observer_id_; }
  const std::string& property_name() const noexcept { return property_name_; }
  const ObservationSchema& schema() const noexcept { return schema_; }
  const ExemplarSets& exemplars() const noexcept { return exemplars_; }
  const Metric& metric() const noexcept { return metric_; }

  PropertyFramework with_added_exemplar(const SystemRecord& record, TargetSet target) const {
    return PropertyFramework(observer_id_, property_name_, schema_,
                             exemplars_.with_added(record, target), metric_);
  }

  PropertyFramework with_metric(Metric replacement) const {
    return PropertyFramework(observer_id_, property_name_, schema_, exemplars_,
                             std::move(replacement));
  }

  bool operator==(const PropertyFramework& other) const {
    return observer_id_ == other.observer_id_ && property_name_ == other.property_name_ &&
           schema_ == other.schema_ && exemplars_ == other.exemplars_ && metric_ == other.metric_;
  }

 private:
  std::string observer_id_;
  std::string property_name_;
  ObservationSchema schema_;
  ExemplarSets exemplars_;
  Metric metric_;
};

inline PropertyFramework build_framework(std::string observer_id, std::string property_name,
                                         ObservationSchema schema, ExemplarSets exemplars,
                                         Metric metric) {
  return PropertyFramework(std::move(observer_id), std::move(property_name), std::move(schema),
                           std::move(exemplars), std::move(metric));
}

inline double evaluate_metric(const Metric& metric, std::span<const double> features) {
  return metric.evaluate(features);
}

}  // namespace penumbra
