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
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "penumbra/errors.hpp"

namespace penumbra {

/// Absolute tolerance used for every threshold comparison in the library.
/// Overridable per call; surfaced as --epsilon / the scenario "epsilon" field.
inline constexpr double kDefaultEpsilon = 1e-9;

/// How a system entered the model. Only apriori-identified systems may join
/// the exemplar sets; systems classified by a metric are quarantined from
/// them so a metric can never feed its own thresholds.
enum class Provenance { Apriori, DeterminedByMetric };

inline const char* provenance_name(Provenance p) {
  return p == Provenance::Apriori ? "apriori" : "determined";
}

/// Which exemplar set an update targets.
enum class TargetSet { Clear, ClearNon, Borderline };

inline const char* target_set_name(TargetSet t) {
  switch (t) {
    case TargetSet::Clear: return "clear";
    case TargetSet::ClearNon: return "clear_non";
    case TargetSet::Borderline: return "borderline";
  }
  return "?";
}

/// An identified system together with its measured feature vector.
struct SystemRecord {
  std::string id;
  std::vector<double> features;
  Provenance provenance = Provenance::Apriori;

  bool operator==(const SystemRecord&) const = default;
};

/// Returns a copy tagged as metric-determined. Such a record is rejected by
/// every exemplar-set update.
inline SystemRecord mark_determined(SystemRecord record) {
  record.provenance = Provenance::DeterminedByMetric;
  return record;
}

/// The measurement side of the model: how many observables a record carries
/// and what they are called. Observation itself happens off-library; records
/// arrive pre-measured and are validated against this schema.
class ObservationSchema {
 public:
  explicit ObservationSchema(std::vector<std::string> feature_names,
                             std::vector<std::string> feature_units = {})
      : names_(std::move(feature_names)), units_(std::move(feature_units)) {
    if (names_.empty()) {
      throw Error(Errc::SchemaMismatch, "schema needs at least one feature");
    }
    std::set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) {
        throw Error(Errc::SchemaMismatch, "duplicate feature name '" + n + "'");
      }
    }
    if (units_.empty()) {
      units_.assign(names_.size(), "");
    } else if (units_.size() != names_.size()) {
      throw Error(Errc::SchemaMismatch, "feature_units arity does not match feature_names");
    }
  }

  std::size_t dimension() const noexcept { return names_.size(); }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  const std::vector<std::string>& feature_units() const noexcept { return units_; }

  /// Arity and finiteness check for a record entering the model.
  void validate_record(const SystemRecord& record) const {
    if (record.features.size() != names_.size()) {
      throw Error(Errc::SchemaMismatch,
                  "system '" + record.id + "' has " + std::to_string(record.features.size()) +
                      " features, schema expects " + std::to_string(names_.size()));
    }
    for (double v : record.features) {
      if (!std::isfinite(v)) {
        throw Error(Errc::NonFiniteFeature, "system '" + record.id + "' has a non-finite feature");
      }
    }
  }

  bool operator==(const ObservationSchema&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::string> units_;
};

/// The three apriori exemplar sets: clear cases, clear non-cases, borderline
/// cases. Disjoint by id, apriori-only by construction.
class ExemplarSets {
 public:
  ExemplarSets() = default;

  ExemplarSets(std::vector<SystemRecord> clear, std::vector<SystemRecord> clear_non,
               std::vector<SystemRecord> borderline)
      : clear_(std::move(clear)), clear_non_(std::move(clear_non)),
        borderline_(std::move(borderline)) {
    std::set<std::string> ids;
    auto check = [&](const std::vector<SystemRecord>& set) {
      for (const auto& rec : set) {
        if (rec.provenance != Provenance::Apriori) {
          throw Error(Errc::ProvenanceViolation,
                      "system '" + rec.id + "' was determined by a metric and cannot be an exemplar");
        }
        if (!ids.insert(rec.id).second) {
          throw Error(Errc::DuplicateSystemId, "system '" + rec.id + "' appears in more than one slot");
        }
      }
    };
    check(clear_);
    check(clear_non_);
    check(borderline_);
  }

  const std::vector<SystemRecord>& clear() const noexcept { return clear_; }
  const std::vector<SystemRecord>& clear_non() const noexcept { return clear_non_; }
  const std::vector<SystemRecord>& borderline() const noexcept { return borderline_; }

  const std::vector<SystemRecord>& set_for(TargetSet t) const noexcept {
    switch (t) {
      case TargetSet::Clear: return clear_;
      case TargetSet::ClearNon: return clear_non_;
      case TargetSet::Borderline: return borderline_;
    }
    return clear_;
  }

  bool contains_id(const std::string& id) const {
    auto in = [&](const std::vector<SystemRecord>& set) {
      for (const auto& rec : set) {
        if (rec.id == id) return true;
      }
      return false;
    };
    return in(clear_) || in(clear_non_) || in(borderline_);
  }

  std::size_t total_size() const noexcept {
    return clear_.size() + clear_non_.size() + borderline_.size();
  }

  /// New value with `record` appended to `target`; validates disjointness
  /// and provenance again.
  ExemplarSets with_added(const SystemRecord& record, TargetSet target) const {
    std::vector<SystemRecord> c = clear_, n = clear_non_, b = borderline_;
    switch (target) {
      case TargetSet::Clear: c.push_back(record); break;
      case TargetSet::ClearNon: n.push_back(record); break;
      case TargetSet::Borderline: b.push_back(record); break;
    }
    return ExemplarSets(std::move(c), std::move(n), std::move(b));
  }

  bool operator==(const ExemplarSets&) const = default;

 private:
  std::vector<SystemRecord> clear_;
  std::vector<SystemRecord> clear_non_;
  std::vector<SystemRecord> borderline_;
};

}  // namespace penumbra
