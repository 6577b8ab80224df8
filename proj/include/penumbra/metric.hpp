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
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "penumbra/errors.hpp"
#include "penumbra/types.hpp"

namespace penumbra {

/// Extended-real metric bounds [lower, upper]. Infinite endpoints are plain
/// IEEE infinities; all comparisons work unchanged.
struct Bounds {
  double lower;
  double upper;

  bool operator==(const Bounds&) const = default;
};

inline void validate_bounds(const Bounds& b) {
  if (std::isnan(b.lower) || std::isnan(b.upper)) {
    throw Error(Errc::BoundsViolation, "metric bounds must not be NaN");
  }
  if (!(b.lower < b.upper)) {
    throw Error(Errc::BoundsViolation, "metric bounds must satisfy lower < upper strictly");
  }
}

/// Extended-real equality: two same-signed infinities are equal, finite
/// values compare within eps.
inline bool extended_equal(double a, double b, double eps) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= eps;
}

/// Order-preserving two-region remap of a score range [0, beta]:
///
///   merged region  [0, gamma0] ∪ [eta0, beta]  →  [eta0, beta]
///       the two pieces are concatenated end to end (total span
///       L = gamma0 + (beta − eta0)) and stretched affinely, so the old
///       non-case region lands at the bottom of the exhibit interval and
///       t = gamma0 / t = eta0 meet at the same seam value;
///   open region    (gamma0, eta0)              →  (0, eta0)
///       affine with positive slope eta0 / (eta0 − gamma0).
///
/// Used to build the merged-property score psi from a base score.
class RescaleMap {
 public:
  static RescaleMap make(double gamma0, double eta0, double alpha, double beta) {
    if (alpha != 0.0) {
      throw Error(Errc::NonZeroFloor, "rescale construction requires a zero lower bound");
    }
    if (!std::isfinite(beta)) {
      throw Error(Errc::LandmarkMismatch, "rescale construction requires a finite upper bound");
    }
    if (!std::isfinite(gamma0) || !std::isfinite(eta0)) {
      throw Error(Errc::LandmarkMismatch, "rescale landmarks must be finite");
    }
    if (gamma0 < 0.0 || eta0 > beta) {
      throw Error(Errc::LandmarkMismatch, "rescale landmarks must satisfy 0 <= gamma0 < eta0 <= beta");
    }
    if (!(gamma0 < eta0)) {
      throw Error(Errc::DegenerateInterval, "gamma0 = eta0 leaves no borderline region to remap");
    }
    return RescaleMap(gamma0, eta0, beta);
  }

  double apply(double t) const {
    if (std::isnan(t) || t < 0.0 || t > beta_) {
      throw Error(Errc::BoundsViolation, "rescale input outside [0, beta]");
    }
    const double span = merged_span();
    if (t <= gamma0_) {
      if (span == 0.0) return eta0_;  // merged region collapsed to {0, beta}
      return eta0_ + (t / span) * (beta_ - eta0_);
    }
    if (t >= eta0_) {
      if (span == 0.0) return eta0_;
      return eta0_ + ((gamma0_ + t - eta0_) / span) * (beta_ - eta0_);
    }
    return (t - gamma0_) * eta0_ / (eta0_ - gamma0_);
  }

  double gamma0() const noexcept { return gamma0_; }
  double eta0() const noexcept { return eta0_; }
  double alpha() const noexcept { return 0.0; }
  double beta() const noexcept { return beta_; }

  /// Combined length of the two merged-source pieces.
  double merged_span() const noexcept { return gamma0_ + (beta_ - eta0_); }

  /// Common image of t = gamma0 and t = eta0.
  double seam_value() const { return apply(gamma0_); }

  bool operator==(const RescaleMap&) const = default;

 private:
  RescaleMap(double gamma0, double eta0, double beta) : gamma0_(gamma0), eta0_(eta0), beta_(beta) {}

  double gamma0_;
  double eta0_;
  double beta_;
};

enum class MetricKind { TrivialFaithful, Binarized, Rescaled, LinearFeature, Tabulated };

inline const char* metric_kind_name(MetricKind k) {
  switch (k) {
    case MetricKind::TrivialFaithful: return "trivial_faithful";
    case MetricKind::Binarized: return "binarized";
    case MetricKind::Rescaled: return "rescaled";
    case MetricKind::LinearFeature: return "linear";
    case MetricKind::Tabulated: return "tabulated";
  }
  return "?";
}

/// A bounded scalar quantification of a property. Evaluation always checks
/// the declared bounds: a value outside [lower, upper] raises
/// BoundsViolation — the metric is mis-declared, never silently clamped.
///
/// Kinds:
///   LinearFeature    weights · x + bias
///   Tabulated        explicit id → value table (escape hatch; needs ids)
///   TrivialFaithful  pointwise table over exemplars: clear cases at the
///                    upper bound, clear non-cases at the lower bound,
///                    borderline exemplars midway; matches by id or by
///                    exact feature vector, errors off the table
///   Binarized        1 when a base metric clears a cut, else 0
///   Rescaled         RescaleMap composed with a base metric
class Metric {
 public:
  struct TrivialEntry {
    std::string id;
    std::vector<double> features;
    double value;

    bool operator==(const TrivialEntry&) const = default;
  };

  static Metric linear(std::vector<double> weights, double bias, Bounds bounds) {
    validate_bounds(bounds);
    if (weights.empty()) {
      throw Error(Errc::InvalidMetric, "linear metric needs at least one weight");
    }
    for (double w : weights) {
      if (!std::isfinite(w)) throw Error(Errc::InvalidMetric, "linear weights must be finite");
    }
    if (!std::isfinite(bias)) throw Error(Errc::InvalidMetric, "linear bias must be finite");
    return Metric(LinearParams{std::move(weights), bias}, bounds);
  }

  static Metric tabulated(std::map<std::string, double> table, Bounds bounds) {
    validate_bounds(bounds);
    for (const auto& [id, v] : table) {
      if (!std::isfinite(v)) {
        throw Error(Errc::InvalidMetric, "tabulated value for '" + id + "' must be finite");
      }
    }
    return Metric(TabulatedParams{std::move(table)}, bounds);
  }

  static Metric trivial_table(std::vector<TrivialEntry> entries, Bounds bounds) {
    validate_bounds(bounds);
    if (entries.empty()) {
      throw Error(Errc::InvalidMetric, "trivial metric needs at least one entry");
    }
    const std::size_t dim = entries.front().features.size();
    for (const auto& e : entries) {
      if (e.features.size() != dim) {
        throw Error(Errc::InvalidMetric, "trivial metric entries disagree on feature arity");
      }
    }
    return Metric(TrivialParams{std::move(entries)}, bounds);
  }

  static Metric binarized(Metric base, double cut, double eps = kDefaultEpsilon) {
    const Bounds bb = base.bounds();
    if (std::isnan(cut) || cut < bb.lower || cut > bb.upper) {
      throw Error(Errc::BoundsViolation, "binarization cut lies outside the base metric bounds");
    }
    if (!(eps >= 0.0)) {
      throw Error(Errc::InvalidMetric, "binarization tolerance must be non-negative");
    }
    return Metric(BinarizedParams{std::make_shared<const Metric>(std::move(base)), cut, eps},
                  Bounds{0.0, 1.0});
  }

  static Metric rescaled(Metric base, RescaleMap map) {
    const Bounds bb = base.bounds();
    if (bb.lower != map.alpha() || bb.upper != map.beta()) {
      throw Error(Errc::LandmarkMismatch, "base metric bounds do not match the rescale landmarks");
    }
    const Bounds out{0.0, map.beta()};
    return Metric(RescaledParams{std::make_shared<const Metric>(std::move(base)), map}, out);
  }

  MetricKind kind() const noexcept {
    switch (params_.index()) {
      case 0: return MetricKind::LinearFeature;
      case 1: return MetricKind::Tabulated;
      case 2: return MetricKind::TrivialFaithful;
      case 3: return MetricKind::Binarized;
      default: return MetricKind::Rescaled;
    }
  }

  Bounds bounds() const noexcept { return bounds_; }

  /// Feature-vector arity this metric expects, when it has one. Tabulated
  /// metrics look systems up by id and accept any arity.
  std::optional<std::size_t> expected_arity() const {
    switch (params_.index()) {
      case 0: return std::get<LinearParams>(params_).weights.size();
      case 1: return std::nullopt;
      case 2: return std::get<TrivialParams>(params_).entries.front().features.size();
      case 3: return std::get<BinarizedParams>(params_).base->expected_arity();
      default: return std::get<RescaledParams>(params_).base->expected_arity();
    }
  }

  /// Evaluate on an identified system. Table-backed kinds resolve by id
  /// first, then (trivial tables only) by exact feature match.
  double evaluate(const SystemRecord& record) const {
    return checked(raw_record(record));
  }

  /// Evaluate on a bare feature vector. Kinds defined pointwise on known
  /// systems raise UnknownSystem when the vector is not in their table.
  double evaluate(std::span<const double> features) const {
    return checked(raw_features(features));
  }

  // Parameter accessors for serialization and structural checks. Each
  // throws InvalidMetric when asked of the wrong kind.
  const std::vector<double>& linear_weights() const { return get<LinearParams>().weights; }
  double linear_bias() const { return get<LinearParams>().bias; }
  const std::map<std::string, double>& table() const { return get<TabulatedParams>().table; }
  const std::vector<TrivialEntry>& trivial_entries() const { return get<TrivialParams>().entries; }
  const Metric& base() const {
    if (const auto* b = std::get_if<BinarizedParams>(&params_)) return *b->base;
    if (const auto* r = std::get_if<RescaledParams>(&params_)) return *r->base;
    throw Error(Errc::InvalidMetric, "metric has no base metric");
  }
  double binarize_cut() const { return get<BinarizedParams>().cut; }
  double binarize_eps() const { return get<BinarizedParams>().eps; }
  const RescaleMap& rescale_map() const { return get<RescaledParams>().map; }

  bool operator==(const Metric& other) const {
    if (bounds_ != other.bounds_ || params_.index() != other.params_.index()) return false;
    switch (params_.index()) {
      case 0: return std::get<LinearParams>(params_) == std::get<LinearParams>(other.params_);
      case 1: return std::get<TabulatedParams>(params_) == std::get<TabulatedParams>(other.params_);
      case 2: return std::get<TrivialParams>(params_) == std::get<TrivialParams>(other.params_);
      case 3: {
        const auto& a = std::get<BinarizedParams>(params_);
        const auto& b = std::get<BinarizedParams>(other.params_);
        return a.cut == b.cut && a.eps == b.eps && *a.base == *b.base;
      }
      default: {
        const auto& a = std::get<RescaledParams>(params_);
        const auto& b = std::get<RescaledParams>(other.params_);
        return a.map == b.map && *a.base == *b.base;
      }
    }
  }

 private:
  struct LinearParams {
    std::vector<double> weights;
    double bias;
    bool operator==(const LinearParams&) const = default;
  };
  struct TabulatedParams {
    std::map<std::string, double> table;
    bool operator==(const TabulatedParams&) const = default;
  };
  struct TrivialParams {
    std::vector<TrivialEntry> entries;
    bool operator==(const TrivialParams&) const = default;
  };
  struct BinarizedParams {
    std::shared_ptr<const Metric> base;
    double cut;
    double eps;
  };
  struct RescaledParams {
    std::shared_ptr<const Metric> base;
    RescaleMap map;
  };

  using Params =
      std::variant<LinearParams, TabulatedParams, TrivialParams, BinarizedParams, RescaledParams>;

  Metric(Params params, Bounds bounds) : params_(std::move(params)), bounds_(bounds) {}

  template <typename P>
  const P& get() const {
    if (const auto* p = std::get_if<P>(&params_)) return *p;
    throw Error(Errc::InvalidMetric,
                std::string("metric of kind ") + metric_kind_name(kind()) +
                    " does not carry the requested parameters");
  }

  void check_arity(std::size_t got) const {
    const auto want = expected_arity();
    if (want && got != *want) {
      throw Error(Errc::ArityMismatch, "feature vector has " + std::to_string(got) +
                                           " entries, metric expects " + std::to_string(*want));
    }
  }

  double checked(double v) const {
    if (std::isnan(v) || v < bounds_.lower || v > bounds_.upper) {
      throw Error(Errc::BoundsViolation,
                  "metric value " + std::to_string(v) + " escapes its declared bounds");
    }
    return v;
  }

  double linear_at(std::span<const double> features) const {
    const auto& p = std::get<LinearParams>(params_);
    check_arity(features.size());
    double acc = p.bias;
    for (std::size_t i = 0; i < features.size(); ++i) acc += p.weights[i] * features[i];
    return acc;
  }

  double trivial_by_features(std::span<const double> features) const {
    const auto& p = std::get<TrivialParams>(params_);
    check_arity(features.size());
    for (const auto& e : p.entries) {
      if (std::equal(e.features.begin(), e.features.end(), features.begin(), features.end())) {
        return e.value;
      }
    }
    throw Error(Errc::UnknownSystem, "feature vector matches no tabulated exemplar");
  }

  double raw_record(const SystemRecord& record) const {
    switch (params_.index()) {
      case 0: return linear_at(record.features);
      case 1: {
        const auto& table = std::get<TabulatedParams>(params_).table;
        auto it = table.find(record.id);
        if (it == table.end()) {
          throw Error(Errc::UnknownSystem, "system '" + record.id + "' is not in the metric table");
        }
        return it->second;
      }
      case 2: {
        for (const auto& e : std::get<TrivialParams>(params_).entries) {
          if (e.id == record.id) return e.value;
        }
        return trivial_by_features(record.features);
      }
      case 3: {
        const auto& p = std::get<BinarizedParams>(params_);
        return p.base->evaluate(record) >= p.cut - p.eps ? 1.0 : 0.0;
      }
      default: {
        const auto& p = std::get<RescaledParams>(params_);
        return p.map.apply(p.base->evaluate(record));
      }
    }
  }

  double raw_features(std::span<const double> features) const {
    switch (params_.index()) {
      case 0: return linear_at(features);
      case 1:
        throw Error(Errc::UnknownSystem, "tabulated metric needs a system id, not bare features");
      case 2: return trivial_by_features(features);
      case 3: {
        const auto& p = std::get<BinarizedParams>(params_);
        return p.base->evaluate(features) >= p.cut - p.eps ? 1.0 : 0.0;
      }
      default: {
        const auto& p = std::get<RescaledParams>(params_);
        return p.map.apply(p.base->evaluate(features));
      }
    }
  }

  Params params_;
  Bounds bounds_;
};

}  // namespace penumbra
