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

#include <catch2/catch.hpp>

#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "penumbra/penumbra.hpp"
#include "support.hpp"

using namespace penumbra;

TEST_CASE("trivial faithful construction tabulates the exemplars") {
  const PropertyFramework fw = testsupport::tall_framework();
  const Metric m = trivial_faithful_metric(fw.exemplars(), 0.0, 1.0);
  CHECK(m.kind() == MetricKind::TrivialFaithful);

  CHECK(m.evaluate(SystemRecord{"p1", {1.9}}) == 1.0);
  CHECK(m.evaluate(SystemRecord{"p2", {2.0}}) == 1.0);
  CHECK(m.evaluate(SystemRecord{"p3", {1.5}}) == 0.0);
  CHECK(m.evaluate(SystemRecord{"p4", {1.6}}) == 0.0);
  CHECK(m.evaluate(SystemRecord{"p5", {1.8}}) == 0.5);  // interior slot for borderline

  // Matching by features alone also works for exemplar vectors.
  const std::vector<double> p1_features{1.9};
  CHECK(evaluate_metric(m, p1_features) == 1.0);

  CHECK_THROWS_MATCHES(m.evaluate(SystemRecord{"zz", {0.4}}), Error,
                       testsupport::HasErrc(Errc::UnknownSystem));
}

TEST_CASE("trivial construction edge cases") {
  SECTION("single clear exemplar, empty non-case set") {
    const ExemplarSets ex({{"p1", {1.9}}}, {}, {});
    const Metric m = trivial_faithful_metric(ex, 0.0, 1.0);
    const PropertyFramework fw =
        build_framework("A1", "p", ObservationSchema({"x"}), ex, m);
    const Thresholds th = derive_thresholds(fw);
    CHECK(th.eta0 == 1.0);
    CHECK(th.gamma0 == 0.0);  // empty-set rule
  }
  SECTION("empty clear set") {
    CHECK_THROWS_MATCHES(trivial_faithful_metric(ExemplarSets(), 0.0, 1.0), Error,
                         testsupport::HasErrc(Errc::EmptyClearSet));
  }
  SECTION("bounds must be finite and ordered") {
    const ExemplarSets ex({{"p1", {1.9}}}, {}, {});
    CHECK_THROWS_MATCHES(trivial_faithful_metric(ex, 1.0, 1.0), Error,
                         testsupport::HasErrc(Errc::BoundsViolation));
    CHECK_THROWS_MATCHES(
        trivial_faithful_metric(ex, 0.0, std::numeric_limits<double>::infinity()), Error,
        testsupport::HasErrc(Errc::BoundsViolation));
  }
}

TEST_CASE("binarization collapses values to the indicator of the cut") {
  const Metric base = Metric::linear({1.0}, 0.0, Bounds{0.0, 3.0});
  const Metric prime = binarize_metric(base, 1.9);
  CHECK(prime.bounds() == Bounds{0.0, 1.0});

  const std::vector<double> above{2.0}, below{1.8}, at{1.9};
  CHECK(evaluate_metric(prime, above) == 1.0);
  CHECK(evaluate_metric(prime, below) == 0.0);
  CHECK(evaluate_metric(prime, at) == 1.0);  // boundary uses >=
}

TEST_CASE("binarization destroys ranking but keeps the decision") {
  const PropertyFramework fw = testsupport::tall_framework();
  const Thresholds th = derive_thresholds(fw);
  const PropertyFramework bfw = fw.with_metric(binarize_metric(fw.metric(), th.eta0));
  const Thresholds bth = derive_thresholds(bfw);
  CHECK(bth.eta0 == 1.0);

  // All clear exemplars share the value 1: no ordering survives.
  for (const auto& rec : bfw.exemplars().clear()) {
    CHECK(bfw.metric().evaluate(rec) == 1.0);
  }

  // The binarized metric squashes borderline exemplars to 0, outside the
  // open interval: faithful use of the indicator needs an empty borderline
  // set. With one it is a reported violation.
  const FaithfulnessReport with_borderline = check_faithfulness(bfw);
  CHECK_FALSE(with_borderline.is_faithful);
  REQUIRE(with_borderline.violations.size() == 1);
  CHECK(with_borderline.violations[0].system_id == "p5");

  const PropertyFramework weakly = testsupport::tall_framework_no_borderline();
  const PropertyFramework bweakly =
      weakly.with_metric(binarize_metric(weakly.metric(), th.eta0));
  CHECK(check_faithfulness(bweakly).is_faithful);
}

TEST_CASE("margin is the signed distance from the exhibit threshold") {
  CHECK(margin(4.0, 2.0) == 2.0);
  CHECK(margin(8.0, 2.0) == 6.0);
  CHECK(margin(8.0, 2.0) == 3.0 * margin(4.0, 2.0));  // ratio comparisons are margin-based
  CHECK(margin(2.0, 2.0) == 0.0);
}

TEST_CASE("rescale map hits the hand-computed landmarks") {
  // gamma0 = 2, eta0 = 6, beta = 10: merged span L = 2 + 4 = 6.
  const RescaleMap map = RescaleMap::make(2.0, 6.0, 0.0, 10.0);
  CHECK(map.apply(0.0) == Approx(6.0).margin(1e-12));
  CHECK(map.apply(2.0) == Approx(6.0 + (2.0 / 6.0) * 4.0).margin(1e-12));  // 7.3333...
  CHECK(map.apply(6.0) == Approx(7.333333333333333).margin(1e-12));
  CHECK(map.apply(10.0) == Approx(10.0).margin(1e-12));
  CHECK(map.apply(4.0) == Approx(3.0).margin(1e-12));  // borderline midpoint
  CHECK(map.apply(2.0) == map.apply(6.0));             // seam continuity
  CHECK(map.seam_value() == map.apply(2.0));
}

TEST_CASE("rescale map with gamma0 at zero is the identity where it can be") {
  const RescaleMap map = RescaleMap::make(0.0, 6.0, 0.0, 10.0);
  CHECK(map.apply(7.0) == Approx(7.0).margin(1e-12));
  CHECK(map.apply(10.0) == Approx(10.0).margin(1e-12));
  CHECK(map.apply(3.0) == Approx(3.0).margin(1e-12));  // borderline slope 1
  CHECK(map.apply(0.0) == Approx(6.0).margin(1e-12));  // the floor still jumps to eta0
}

TEST_CASE("rescale map construction guards") {
  CHECK_THROWS_MATCHES(RescaleMap::make(2.0, 2.0, 0.0, 10.0), Error,
                       testsupport::HasErrc(Errc::DegenerateInterval));
  CHECK_THROWS_MATCHES(RescaleMap::make(2.0, 6.0, 1.0, 10.0), Error,
                       testsupport::HasErrc(Errc::NonZeroFloor));
  CHECK_THROWS_MATCHES(
      RescaleMap::make(2.0, 6.0, 0.0, std::numeric_limits<double>::infinity()), Error,
      testsupport::HasErrc(Errc::LandmarkMismatch));
  CHECK_THROWS_MATCHES(RescaleMap::make(-1.0, 6.0, 0.0, 10.0), Error,
                       testsupport::HasErrc(Errc::LandmarkMismatch));
  CHECK_THROWS_MATCHES(RescaleMap::make(2.0, 11.0, 0.0, 10.0), Error,
                       testsupport::HasErrc(Errc::LandmarkMismatch));
}

TEST_CASE("rescale map passes the independent grid oracle") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double beta = 2.0 + 18.0 * unit(rng);
    const double gamma0 = beta * 0.45 * unit(rng);
    const double eta0 = gamma0 + (beta - gamma0) * (0.1 + 0.85 * unit(rng));
    const RescaleMap map = RescaleMap::make(gamma0, eta0, 0.0, beta);
    const auto check = oracle::check_two_region_map(
        [&](double t) { return map.apply(t); }, gamma0, eta0, beta, 500);
    REQUIRE(check.monotone_merged);
    REQUIRE(check.monotone_border);
    REQUIRE(check.merged_image_ok);
    REQUIRE(check.border_image_ok);
    REQUIRE(check.seam_ok);
    REQUIRE(check.endpoints_ok);
  }
}

TEST_CASE("build_rescale_map checks the landmark wiring") {
  const PropertyFramework fw = testsupport::tall_framework();
  const Thresholds th = derive_thresholds(fw);
  CHECK_NOTHROW(build_rescale_map(th, 0.0, 3.0));
  CHECK_THROWS_MATCHES(build_rescale_map(th, 0.0, 4.0), Error,
                       testsupport::HasErrc(Errc::LandmarkMismatch));
}

TEST_CASE("rescaled metric keeps the outer bounds and remaps the regions") {
  const Metric base = Metric::linear({1.0}, 0.0, Bounds{0.0, 10.0});
  const RescaleMap map = RescaleMap::make(2.0, 6.0, 0.0, 10.0);
  const Metric psi = rescale_metric(base, map);
  CHECK(psi.bounds() == Bounds{0.0, 10.0});

  const std::vector<double> top{10.0}, non{1.5}, seam{2.0};
  CHECK(evaluate_metric(psi, top) == Approx(10.0).margin(1e-12));
  CHECK(evaluate_metric(psi, non) >= 6.0);  // former non-case region lands in the exhibit band
  CHECK(evaluate_metric(psi, seam) == Approx(6.0 + (2.0 / 6.0) * 4.0).margin(1e-12));

  const Metric off_base = Metric::linear({1.0}, 0.0, Bounds{0.0, 9.0});
  CHECK_THROWS_MATCHES(rescale_metric(off_base, map), Error,
                       testsupport::HasErrc(Errc::LandmarkMismatch));
}

TEST_CASE("absorbing the non-cases merges the clear set and pins thresholds") {
  const PropertyFramework fw = testsupport::tall_framework();
  const MergedProperty merged = absorb_non_cases(fw);
  REQUIRE(merged.map.has_value());
  CHECK(merged.framework.property_name() == "tall'");
  CHECK(merged.framework.exemplars().clear().size() == 4);
  CHECK(merged.framework.exemplars().clear_non().empty());
  CHECK(merged.thresholds.eta0 == 1.9);
  CHECK(merged.thresholds.gamma0 == 0.0);

  // A former non-case height now scores inside the exhibit band:
  // psi(1.5) = 1.9 + (1.5 / 2.7) * 1.1, with L = 1.6 + (3 - 1.9) = 2.7.
  const double psi_15 = merged.framework.metric().evaluate(testsupport::probe("q", 1.5));
  CHECK(psi_15 == Approx(1.9 + (1.5 / 2.7) * 1.1).margin(1e-12));
  CHECK(classify(merged.framework, merged.thresholds, testsupport::probe("q", 1.5)).verdict ==
        Verdict::Exhibits);

  // Borderline stays borderline: psi(1.8) = (1.8 - 1.6) * 1.9 / 0.3.
  const double psi_18 = merged.framework.metric().evaluate(testsupport::probe("q", 1.8));
  CHECK(psi_18 == Approx((1.8 - 1.6) * 1.9 / 0.3).margin(1e-12));
  CHECK(classify(merged.framework, merged.thresholds, testsupport::probe("q", 1.8)).verdict ==
        Verdict::Borderline);

  // The merged framework is still faithful with its own derived thresholds.
  CHECK(check_faithfulness(merged.framework).is_faithful);
}

TEST_CASE("absorbing with no non-cases changes nothing") {
  const PropertyFramework fw = build_framework(
      "A1", "tall", ObservationSchema({"height_m"}),
      ExemplarSets({{"p1", {1.9}}, {"p2", {2.0}}}, {}, {}),
      Metric::linear({1.0}, 0.0, Bounds{0.0, 3.0}));
  const MergedProperty merged = absorb_non_cases(fw);
  CHECK_FALSE(merged.map.has_value());
  CHECK(merged.framework == fw);
}

TEST_CASE("binarize decision-equivalence over random frameworks") {
  std::mt19937_64 rng(271828);
  for (int trial = 0; trial < 300; ++trial) {
    const auto gen = testgen::random_faithful_framework(rng);
    const Thresholds th = derive_thresholds(gen.fw);
    const PropertyFramework bfw = gen.fw.with_metric(binarize_metric(gen.fw.metric(), th.eta0));
    const Thresholds bth = derive_thresholds(bfw);
    REQUIRE(bth.eta0 == 1.0);
    for (int p = 0; p < 4; ++p) {
      const SystemRecord probe = testgen::random_probe(rng, gen, "q");
      const bool base_exhibits = classify(gen.fw, th, probe).verdict == Verdict::Exhibits;
      const bool prime_exhibits = classify(bfw, bth, probe).verdict == Verdict::Exhibits;
      REQUIRE(base_exhibits == prime_exhibits);
    }
  }
}

TEST_CASE("under the merged property nothing below the ceiling is excluded") {
  std::mt19937_64 rng(161803);
  testgen::GenOptions opt;
  opt.allow_empty_clear_non = false;
  opt.zero_floor = true;  // the rescale construction needs alpha = 0
  for (int trial = 0; trial < 100; ++trial) {
    const auto gen = testgen::random_faithful_framework(rng, opt);
    const MergedProperty merged = absorb_non_cases(gen.fw);
    REQUIRE(merged.map.has_value());
    // Every former clear or non-case exemplar exhibits the merged property.
    for (const auto& rec : merged.framework.exemplars().clear()) {
      REQUIRE(classify(merged.framework, merged.thresholds, rec).verdict == Verdict::Exhibits);
    }
    // Former borderline exemplars stay borderline.
    for (const auto& rec : merged.framework.exemplars().borderline()) {
      REQUIRE(classify(merged.framework, merged.thresholds, rec).verdict == Verdict::Borderline);
    }
  }
}
