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
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "penumbra/framework.hpp"

namespace penumbra {

struct SharpnessVerdict {
  bool weak_sharp;    // no apriori borderline exemplars
  bool strong_sharp;  // gamma0 = eta0 within tolerance: no borderline interval at all
};

/// Structural floor-condition report: when the non-case threshold sits at
/// the metric's lower bound, "does not exhibit" survives only at the exact
/// floor value and everything above it is borderline-or-exhibiting.
struct PanXReport {
  bool gamma_at_floor;
  bool non_exhibit_is_singleton;
  std::vector<std::string> flagged_small_systems;
};

/// eta0 = min metric value over the clear cases; gamma0 = max over the clear
/// non-cases, or the lower bound exactly when there are none.
inline Thresholds derive_thresholds(const PropertyFramework& fw) {
  const auto& ex = fw.exemplars();
  if (ex.clear().empty()) {
    throw Error(Errc::EmptyClearSet, "eta0 needs at least one clear exemplar");
  }
  const Bounds b = fw.metric().bounds();

  double eta0 = fw.metric().evaluate(ex.clear().front());
  for (std::size_t i = 1; i < ex.clear().size(); ++i) {
    eta0 = std::min(eta0, fw.metric().evaluate(ex.clear()[i]));
  }

  double gamma0 = b.lower;
  if (!ex.clear_non().empty()) {
    gamma0 = fw.metric().evaluate(ex.clear_non().front());
    for (std::size_t i = 1; i < ex.clear_non().size(); ++i) {
      gamma0 = std::max(gamma0, fw.metric().evaluate(ex.clear_non()[i]));
    }
  }
  return Thresholds{eta0, gamma0, b.lower, b.upper};
}

/// Checks the faithfulness conditions and reports every breach instead of
/// throwing: an unfaithful metric is a finding to act on, not a crash.
///
/// Clear cases sit at or above eta0 and clear non-cases at or below gamma0
/// by construction of the extrema; what can actually fail is the cross
/// condition (gamma0 must not exceed eta0; equality demands an empty
/// borderline set) and strict interior placement of every apriori
/// borderline exemplar.
inline FaithfulnessReport check_faithfulness(const PropertyFramework& fw,
                                             double eps = kDefaultEpsilon) {
  const Thresholds th = derive_thresholds(fw);
  FaithfulnessReport report;

  if (th.gamma0 > th.eta0 + eps) {
    for (const auto& rec : fw.exemplars().clear_non()) {
      const double v = fw.metric().evaluate(rec);
      if (v > th.eta0 + eps) {
        report.violations.push_back(
            {rec.id, TargetSet::ClearNon, v, "clear non-case above eta0 (gamma0 > eta0)"});
      }
    }
    for (const auto& rec : fw.exemplars().clear()) {
      const double v = fw.metric().evaluate(rec);
      if (v < th.gamma0 - eps) {
        report.violations.push_back(
            {rec.id, TargetSet::Clear, v, "clear case below gamma0 (gamma0 > eta0)"});
      }
    }
  }

  for (const auto& rec : fw.exemplars().borderline()) {
    const double v = fw.metric().evaluate(rec);
    if (!(v > th.gamma0 + eps && v < th.eta0 - eps)) {
      report.violations.push_back(
          {rec.id, TargetSet::Borderline, v, "not strictly inside (gamma0, eta0)"});
    }
  }

  report.is_faithful = report.violations.empty();
  if (report.is_faithful) report.derived_thresholds = th;
  return report;
}

/// Three-way determination. Exhibits wins the tie when gamma0 = eta0 and the
/// value sits exactly on both thresholds; that precedence is a documented
/// choice surfaced in reports, nothing in the underlying model forces it.
inline Determination classify(const PropertyFramework& fw, const Thresholds& th,
                              const SystemRecord& system, double eps = kDefaultEpsilon) {
  if (th.gamma0 > th.eta0 + eps) {
    throw Error(Errc::UnfaithfulFramework,
                "thresholds have gamma0 > eta0; repair or replace the metric first");
  }
  if (system.features.size() != fw.schema().dimension()) {
    throw Error(Errc::ArityMismatch, "system '" + system.id + "' has " +
                                         std::to_string(system.features.size()) +
                                         " features, schema expects " +
                                         std::to_string(fw.schema().dimension()));
  }
  for (double v : system.features) {
    if (!std::isfinite(v)) {
      throw Error(Errc::NonFiniteFeature, "system '" + system.id + "' has a non-finite feature");
    }
  }
  const double value = fw.metric().evaluate(system);
  Verdict verdict;
  if (value >= th.eta0 - eps) {
    verdict = Verdict::Exhibits;
  } else if (value <= th.gamma0 + eps) {
    verdict = Verdict::NotExhibits;
  } else {
    verdict = Verdict::Borderline;
  }
  return Determination{verdict, value, value - th.eta0, system.id};
}

inline SharpnessVerdict sharpness(const PropertyFramework& fw, const Thresholds& th,
                                  double eps = kDefaultEpsilon) {
  return SharpnessVerdict{fw.exemplars().borderline().empty(),
                          extended_equal(th.eta0, th.gamma0, eps)};
}

/// Probes are caller-supplied small-scale candidates; when the floor
/// condition holds, every probe strictly above the lower bound is flagged
/// as borderline-or-exhibiting.
inline PanXReport pan_x_check(const PropertyFramework& fw, const Thresholds& th,
                              std::span<const SystemRecord> probes,
                              double eps = kDefaultEpsilon) {
  PanXReport report;
  report.gamma_at_floor = extended_equal(th.gamma0, th.alpha, eps);
  report.non_exhibit_is_singleton = report.gamma_at_floor;
  if (report.gamma_at_floor) {
    for (const auto& probe : probes) {
      if (fw.metric().evaluate(probe) > th.alpha + eps) {
        report.flagged_small_systems.push_back(probe.id);
      }
    }
  }
  return report;
}

}  // namespace penumbra
