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

#include <algorithm>
#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "penumbra/constructions.hpp"
#include "penumbra/thresholds.hpp"

namespace penumbra {

/// Two observers' verdicts on a shared probe set, bucketed. Every probe
/// lands in exactly one of: agreed, borderline_vs_decided, opposite.
/// Borderline-vs-borderline counts as agreement; only an Exhibits /
/// NotExhibits split is opposition.
struct DisagreementReport {
  struct Split {
    std::string system_id;
    Verdict verdict_1;
    Verdict verdict_2;

    bool operator==(const Split&) const = default;
  };

  std::vector<std::string> opposite;
  std::vector<Split> borderline_vs_decided;
  std::vector<std::string> agreed;
  double agreement_rate = 1.0;
  /// Both observers are individually weak-sharp (no borderline exemplars)
  /// yet take opposite positions on at least one probe: vagueness that only
  /// exists between them.
  bool emergent_vagueness = false;
};

inline DisagreementReport compare_observers(const PropertyFramework& fw1,
                                            const PropertyFramework& fw2,
                                            std::span<const SystemRecord> probes,
                                            double eps = kDefaultEpsilon) {
  if (fw1.schema() != fw2.schema()) {
    throw Error(Errc::SchemaMismatch, "observers must share the observation schema");
  }
  const Thresholds th1 = derive_thresholds(fw1);
  const Thresholds th2 = derive_thresholds(fw2);

  DisagreementReport report;
  for (const auto& probe : probes) {
    const Verdict v1 = classify(fw1, th1, probe, eps).verdict;
    const Verdict v2 = classify(fw2, th2, probe, eps).verdict;
    if (v1 == v2) {
      report.agreed.push_back(probe.id);
    } else if (v1 == Verdict::Borderline || v2 == Verdict::Borderline) {
      report.borderline_vs_decided.push_back({probe.id, v1, v2});
    } else {
      report.opposite.push_back(probe.id);
    }
  }
  report.agreement_rate =
      probes.empty() ? 1.0 : static_cast<double>(report.agreed.size()) / probes.size();
  report.emergent_vagueness = fw1.exemplars().borderline().empty() &&
                              fw2.exemplars().borderline().empty() && !report.opposite.empty();
  return report;
}

namespace detail {

inline std::vector<SystemRecord> sorted_by_id(std::vector<SystemRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const SystemRecord& a, const SystemRecord& b) { return a.id < b.id; });
  return records;
}

inline bool same_records(const std::vector<SystemRecord>& a, const std::vector<SystemRecord>& b) {
  return sorted_by_id(a) == sorted_by_id(b);
}

}  // namespace detail

/// Executable form of the shared-clear-set agreement result: two observers
/// with identical clear sets and identical metrics share eta0, so their
/// Exhibits verdicts coincide on every probe no matter how their non-case
/// sets differ. Returns the verified conjunction over the probes.
inline bool shared_clear_agreement(const PropertyFramework& fw1, const PropertyFramework& fw2,
                                   std::span<const SystemRecord> probes,
                                   double eps = kDefaultEpsilon) {
  if (!detail::same_records(fw1.exemplars().clear(), fw2.exemplars().clear())) {
    throw Error(Errc::PreconditionUnmet, "observers must share the clear exemplar set");
  }
  if (!(fw1.metric() == fw2.metric())) {
    throw Error(Errc::PreconditionUnmet, "observers must share the metric");
  }
  if (fw1.schema() != fw2.schema()) {
    throw Error(Errc::SchemaMismatch, "observers must share the observation schema");
  }
  const Thresholds th1 = derive_thresholds(fw1);
  const Thresholds th2 = derive_thresholds(fw2);
  for (const auto& probe : probes) {
    const bool e1 = classify(fw1, th1, probe, eps).verdict == Verdict::Exhibits;
    const bool e2 = classify(fw2, th2, probe, eps).verdict == Verdict::Exhibits;
    if (e1 != e2) return false;
  }
  return true;
}

/// Probes on which the base property and its non-case-absorbing merge
/// genuinely disagree. Empty only when there were no non-cases to absorb.
struct PropertyIdentityReport {
  struct Diff {
    std::string system_id;
    Verdict under_base;
    Verdict under_merged;

    bool operator==(const Diff&) const = default;
  };

  std::vector<Diff> differing;
  bool same_property() const noexcept { return differing.empty(); }
};

/// Requires fw2 to be exactly the absorb_non_cases derivation of fw1 and
/// classifies every probe under both, recording the determinations that
/// split. The merged side uses the construction-pinned thresholds.
inline PropertyIdentityReport property_identity_analysis(const PropertyFramework& fw1,
                                                         const PropertyFramework& fw2,
                                                         std::span<const SystemRecord> probes,
                                                         double eps = kDefaultEpsilon) {
  const MergedProperty expected = absorb_non_cases(fw1);
  if (!(fw2 == expected.framework)) {
    throw Error(Errc::PreconditionUnmet,
                "second framework is not the non-case-absorbing derivation of the first");
  }
  const Thresholds th1 = derive_thresholds(fw1);
  const Thresholds th2 = expected.thresholds;

  PropertyIdentityReport report;
  for (const auto& probe : probes) {
    const Verdict v1 = classify(fw1, th1, probe, eps).verdict;
    const Verdict v2 = classify(fw2, th2, probe, eps).verdict;
    if (v1 != v2) report.differing.push_back({probe.id, v1, v2});
  }
  return report;
}

/// Deterministic probe grid over the exemplar feature bounding box:
/// `points` samples per dimension, zipped diagonally so the grid stays at
/// `points` records for any dimension. Degenerate dimensions are widened
/// by ±1 around the single observed value.
inline std::vector<SystemRecord> probe_grid(const PropertyFramework& fw, std::size_t points = 101) {
  if (points == 0) return {};
  const std::size_t dim = fw.schema().dimension();
  if (fw.exemplars().total_size() == 0) {
    throw Error(Errc::PreconditionUnmet, "probe grid needs at least one exemplar to span");
  }

  std::vector<double> lo(dim, 0.0), hi(dim, 0.0);
  bool first = true;
  auto absorb = [&](const std::vector<SystemRecord>& set) {
    for (const auto& rec : set) {
      for (std::size_t d = 0; d < dim; ++d) {
        if (first) {
          lo[d] = hi[d] = rec.features[d];
        } else {
          lo[d] = std::min(lo[d], rec.features[d]);
          hi[d] = std::max(hi[d], rec.features[d]);
        }
      }
      first = false;
    }
  };
  absorb(fw.exemplars().clear());
  absorb(fw.exemplars().clear_non());
  absorb(fw.exemplars().borderline());
  for (std::size_t d = 0; d < dim; ++d) {
    if (lo[d] == hi[d]) {
      lo[d] -= 1.0;
      hi[d] += 1.0;
    }
  }

  std::size_t width = 1;
  for (std::size_t p = points - 1; p >= 10; p /= 10) ++width;

  std::vector<SystemRecord> grid;
  grid.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    SystemRecord rec;
    std::string index = std::to_string(i);
    if (index.size() < width) index.insert(0, width - index.size(), '0');
    rec.id = "grid-" + index;
    rec.features.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d) rec.features.push_back(lo[d] + t * (hi[d] - lo[d]));
    grid.push_back(std::move(rec));
  }
  return grid;
}

}  // namespace penumbra
