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

#include <catch2/catch.hpp>

#include <string>

#include "penumbra/penumbra.hpp"

namespace testsupport {

/// Matches a penumbra::Error by its code.
class HasErrc : public Catch::MatcherBase<penumbra::Error> {
 public:
  explicit HasErrc(penumbra::Errc code) : code_(code) {}

  bool match(const penumbra::Error& err) const override { return err.code() == code_; }

  std::string describe() const override {
    return std::string("has error code ") + penumbra::errc_name(code_);
  }

 private:
  penumbra::Errc code_;
};

/// The worked 1-D example used throughout the suites: heights in meters,
/// identity metric on [0, 3], clear {1.9, 2.0}, clear-non {1.5, 1.6},
/// borderline {1.8}.
inline penumbra::PropertyFramework tall_framework() {
  using namespace penumbra;
  return build_framework(
      "A1", "tall", ObservationSchema({"height_m"}, {"m"}),
      ExemplarSets({{"p1", {1.9}}, {"p2", {2.0}}}, {{"p3", {1.5}}, {"p4", {1.6}}},
                   {{"p5", {1.8}}}),
      Metric::linear({1.0}, 0.0, Bounds{0.0, 3.0}));
}

/// Same framework without the borderline exemplar (weakly sharp).
inline penumbra::PropertyFramework tall_framework_no_borderline() {
  using namespace penumbra;
  return build_framework(
      "A1", "tall", ObservationSchema({"height_m"}, {"m"}),
      ExemplarSets({{"p1", {1.9}}, {"p2", {2.0}}}, {{"p3", {1.5}}, {"p4", {1.6}}}, {}),
      Metric::linear({1.0}, 0.0, Bounds{0.0, 3.0}));
}

inline penumbra::SystemRecord probe(const std::string& id, double value) {
  return penumbra::SystemRecord{id, {value}, penumbra::Provenance::Apriori};
}

}  // namespace testsupport
