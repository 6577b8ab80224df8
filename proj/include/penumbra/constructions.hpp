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
#include <string>
#include <utility>
#include <vector>

#include "penumbra/thresholds.hpp"

namespace penumbra {

/// The always-available faithful metric: a pointwise table sending every
/// clear exemplar to beta and every clear non-case to alpha, so the derived
/// thresholds are eta0 = beta and gamma0 = alpha by construction. Borderline
/// exemplars are tabulated at the midpoint — any interior value keeps the
/// construction faithful, and it is only defined on the exemplars anyway:
/// evaluating it on an unknown system is an error, not a default.
inline Metric trivial_faithful_metric(const ExemplarSets& exemplars, double alpha, double beta) {
  if (exemplars.clear().empty()) {
    throw Error(Errc::EmptyClearSet, "the trivial construction needs at least one clear exemplar");
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !(alpha < beta)) {
    throw Error(Errc::BoundsViolation, "the trivial construction needs finite alpha < beta");
  }
  std::vector<Metric::TrivialEntry> entries;
  entries.reserve(exemplars.total_size());
  for (const auto& rec : exemplars.clear()) entries.push_back({rec.id, rec.features, beta});
  for (const auto& rec : exemplars.clear_non()) entries.push_back({rec.id, rec.features, alpha});
  const double mid = alpha + (beta - alpha) / 2.0;
  for (const auto& rec : exemplars.borderline()) entries.push_back({rec.id, rec.features, mid});
  return Metric::trivial_table(std::move(entries), Bounds{alpha, beta});
}

/// Collapses a metric to {0, 1} around a cut: 1 when the base value clears
/// eta0, 0 below it. Still classifies faithfully (the derived exhibit
/// threshold becomes 1) but all clear cases share the value 1, so any
/// ranking among them is gone.
inline Metric binarize_metric(const Metric& base, double eta0, double eps = kDefaultEpsilon) {
  return Metric::binarized(base, eta0, eps);
}

/// Signed distance of a metric value from the exhibit threshold; the basis
/// for "how much more" one system exhibits a property than another.
inline double margin(double value, double eta0) { return value - eta0; }

/// Builds the two-region remap for a framework's landmarks. Requires the
/// paper-shaped setup: a zero floor and a genuine borderline interval.
inline RescaleMap build_rescale_map(const Thresholds& th, double alpha, double beta) {
  if (th.alpha != alpha || th.beta != beta) {
    throw Error(Errc::LandmarkMismatch, "alpha/beta do not match the thresholds' bounds");
  }
  return RescaleMap::make(th.gamma0, th.eta0, alpha, beta);
}

/// psi = map ∘ base, bounded [0, beta] like the base metric.
inline Metric rescale_metric(const Metric& base, const RescaleMap& map) {
  return Metric::rescaled(base, map);
}

/// A merged property built from an existing framework: the old non-cases
/// are absorbed into the clear set and the metric is remapped so they score
/// inside the exhibit interval.
struct MergedProperty {
  PropertyFramework framework;
  /// Determination thresholds pinned by the construction: the exhibit cut
  /// stays at the source eta0 (the map sends the floor there), and gamma0
  /// drops to 0 because the merged framework has no non-cases. Deriving
  /// thresholds from the merged exemplars instead is still faithful but
  /// puts the cut at the smallest merged image, not at eta0.
  Thresholds thresholds;
  std::optional<RescaleMap> map;  // absent when there was nothing to merge
};

/// Builds P' from P: clear' = clear ∪ clear_non, clear_non' = ∅, metric
/// psi = rescale ∘ phi. With no non-cases there is nothing to merge and the
/// framework comes back unchanged.
inline MergedProperty absorb_non_cases(const PropertyFramework& fw) {
  const Thresholds th = derive_thresholds(fw);
  if (fw.exemplars().clear_non().empty()) {
    return MergedProperty{fw, th, std::nullopt};
  }
  const Bounds b = fw.metric().bounds();
  const RescaleMap map = build_rescale_map(th, b.lower, b.upper);
  Metric psi = rescale_metric(fw.metric(), map);

  std::vector<SystemRecord> merged_clear = fw.exemplars().clear();
  const auto& non = fw.exemplars().clear_non();
  merged_clear.insert(merged_clear.end(), non.begin(), non.end());

  PropertyFramework merged(fw.observer_id(), fw.property_name() + "'", fw.schema(),
                           ExemplarSets(std::move(merged_clear), {}, fw.exemplars().borderline()),
                           std::move(psi));
  const Thresholds pinned{th.eta0, 0.0, 0.0, b.upper};
  return MergedProperty{std::move(merged), pinned, map};
}

}  // namespace penumbra
