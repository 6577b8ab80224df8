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

// End-to-end tour of the library on the canonical 1-D example: "tall",
// measured in meters, anchored by two clear cases, two clear non-cases and
// one borderline person at 1.8m.

#include <iostream>

#include "penumbra/penumbra.hpp"

int main() {
  using namespace penumbra;

  const PropertyFramework tall = build_framework(
      "A1", "tall", ObservationSchema({"height_m"}, {"m"}),
      ExemplarSets({{"p1", {1.9}}, {"p2", {2.0}}}, {{"p3", {1.5}}, {"p4", {1.6}}},
                   {{"p5", {1.8}}}),
      Metric::linear({1.0}, 0.0, Bounds{0.0, 3.0}));

  const Thresholds th = derive_thresholds(tall);
  std::cout << io::thresholds_table(tall, th) << "\n";

  std::cout << "faithful: " << (check_faithfulness(tall).is_faithful ? "yes" : "no") << "\n\n";

  std::vector<Determination> verdicts;
  for (double h : {1.55, 1.7, 1.8, 1.95}) {
    verdicts.push_back(classify(tall, th, SystemRecord{"h=" + io::format_number(h), {h}}));
  }
  std::cout << io::classify_table(verdicts) << "\n";

  // A new apriori clear case at 1.85m tightens the borderline interval.
  const UpdateResult update =
      apply_update(tall, SystemRecord{"p9", {1.85}}, TargetSet::Clear,
                   std::vector<SystemRecord>{{"watched", {1.87}}});
  std::cout << io::update_table({update.event}) << "\n";

  // Absorbing the non-cases yields a property nobody fails short of the floor.
  const MergedProperty merged = absorb_non_cases(tall);
  std::cout << io::rescale_table(merged);
  return 0;
}
