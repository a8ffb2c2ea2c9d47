#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <doctest.h>

#include "dose.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "phantom.hpp"
#include "rng.hpp"
#include "test_util.hpp"
#include "uncertainty.hpp"

using rtplan::BeamletSet;
using rtplan::ClinicalGoals;
using rtplan::DoseGrid;
using rtplan::DoseInfluence;
using rtplan::DvhCurve;
using rtplan::ErrorBars;
using rtplan::ErrorKind;
using rtplan::MotionStates;
using rtplan::Phantom;
using rtplan::RespiratoryPdf;
using rtplan::StructureLabel;
using rtplan::UncertaintySet;
using testutil::thrown_kind;

namespace {

Phantom line_phantom(std::vector<StructureLabel> labels) {
  const int cols = static_cast<int>(labels.size());
  return Phantom::from_labels(1, cols, 1.0, std::move(labels));
}

DoseGrid line_dose(const std::vector<double>& values) {
  DoseGrid dose(1, static_cast<int>(values.size()));
  for (std::size_t v = 0; v < values.size(); ++v) dose[v] = values[v];
  return dose;
}

// 6x6 phantom with a 2x2 tumor block, a lung column, and a heart column;
// everything else is normal tissue.
Phantom block_phantom() {
  std::vector<StructureLabel> labels(36, StructureLabel::Normal);
  auto set = [&](int r, int c, StructureLabel label) {
    labels[static_cast<std::size_t>(r) * 6 + c] = label;
  };
  set(2, 2, StructureLabel::Tumor);
  set(2, 3, StructureLabel::Tumor);
  set(3, 2, StructureLabel::Tumor);
  set(3, 3, StructureLabel::Tumor);
  for (int r = 0; r < 6; ++r) set(r, 0, StructureLabel::LeftLung);
  for (int r = 0; r < 6; ++r) set(r, 5, StructureLabel::Heart);
  return Phantom::from_labels(6, 6, 2.0, std::move(labels));
}

UncertaintySet block_uncertainty() {
  return UncertaintySet(MotionStates({-2.0, 0.0, 2.0}),
                        RespiratoryPdf({0.25, 0.5, 0.25}),
                        ErrorBars{{0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}},
                        {0, 1, 2});
}

}  // namespace

TEST_CASE("clinical goal validation") {
  ClinicalGoals goals;
  CHECK_NOTHROW(goals.validate());
  CHECK(goals.band_mid_gy() == doctest::Approx(76.0));

  ClinicalGoals flipped;
  flipped.tumor_low_gy = 80.0;
  flipped.tumor_high_gy = 72.0;
  CHECK(thrown_kind([&] { flipped.validate(); }) ==
        ErrorKind::InvalidArgument);

  ClinicalGoals zero_low;
  zero_low.tumor_low_gy = 0.0;
  CHECK(thrown_kind([&] { zero_low.validate(); }) ==
        ErrorKind::InvalidArgument);

  ClinicalGoals negative;
  negative.w_lung = -1.0;
  CHECK(thrown_kind([&] { negative.validate(); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("dvh of a uniform dose is a step function") {
  Phantom phantom = line_phantom(std::vector<StructureLabel>(
      4, StructureLabel::Tumor));
  DoseGrid dose = line_dose({5.0, 5.0, 5.0, 5.0});
  DvhCurve curve = rtplan::dvh(dose, phantom, StructureLabel::Tumor);

  REQUIRE(curve.bin_edges_gy.size() == 51);
  REQUIRE(curve.volume_fraction.size() == 51);
  CHECK(curve.bin_edges_gy.front() == 0.0);
  CHECK(curve.bin_edges_gy.back() == doctest::Approx(5.0));
  CHECK(curve.bin_edges_gy[1] == doctest::Approx(0.1));
  for (std::size_t i = 0; i <= 50; ++i) {
    REQUIRE(curve.volume_fraction[i] == 1.0);  // every voxel receives 5 Gy
  }
}

TEST_CASE("dvh counts the fraction of voxels at or above each threshold") {
  Phantom phantom = line_phantom(std::vector<StructureLabel>(
      4, StructureLabel::Tumor));
  DoseGrid dose = line_dose({0.0, 0.25, 1.0, 2.5});
  DvhCurve curve = rtplan::dvh(dose, phantom, StructureLabel::Tumor);

  REQUIRE(curve.bin_edges_gy.size() == 31);  // edges 0.0 .. 3.0
  CHECK(curve.volume_fraction[0] == 1.0);
  CHECK(curve.volume_fraction[1] == 0.75);   // edge 0.1
  CHECK(curve.volume_fraction[2] == 0.75);   // edge 0.2: the 0.25 voxel counts
  CHECK(curve.volume_fraction[3] == 0.5);    // edge 0.3
  CHECK(curve.volume_fraction[10] == 0.5);   // edge 1.0: d = 1.0 still counts
  CHECK(curve.volume_fraction[11] == 0.25);  // edge 1.1
  CHECK(curve.volume_fraction[25] == 0.25);  // edge 2.5
  CHECK(curve.volume_fraction[26] == 0.0);
  CHECK(curve.volume_fraction[30] == 0.0);
}

TEST_CASE("dvh curves are monotone non-increasing for random doses") {
  Phantom phantom = line_phantom(std::vector<StructureLabel>(
      32, StructureLabel::Heart));
  rtplan::Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> values(32);
    for (double& v : values) v = rng.uniform(0.0, 12.0);
    DvhCurve curve =
        rtplan::dvh(line_dose(values), phantom, StructureLabel::Heart);
    REQUIRE(curve.bin_edges_gy.size() == curve.volume_fraction.size());
    REQUIRE(curve.volume_fraction.front() == 1.0);
    const double max_dose = *std::max_element(values.begin(), values.end());
    REQUIRE(curve.bin_edges_gy.back() ==
            doctest::Approx(std::ceil(max_dose) * 10.0 / 10.0));
    for (std::size_t i = 1; i < curve.volume_fraction.size(); ++i) {
      REQUIRE(curve.volume_fraction[i] <= curve.volume_fraction[i - 1]);
      REQUIRE(curve.bin_edges_gy[i] ==
              doctest::Approx(curve.bin_edges_gy[i - 1] + 0.1));
    }
  }
}

TEST_CASE("dvh requires a populated structure") {
  Phantom phantom = line_phantom({StructureLabel::Tumor});
  DoseGrid dose = line_dose({1.0});
  CHECK(thrown_kind([&] {
          rtplan::dvh(dose, phantom, StructureLabel::Heart);
        }) == ErrorKind::EmptyStructure);
  CHECK(thrown_kind([&] {
          rtplan::dose_stats(dose, phantom, StructureLabel::LeftLung);
        }) == ErrorKind::EmptyStructure);
}

TEST_CASE("dose stats report mean, extrema, and d95") {
  SUBCASE("uniform dose") {
    Phantom phantom = line_phantom(std::vector<StructureLabel>(
        4, StructureLabel::Tumor));
    rtplan::DoseStats stats = rtplan::dose_stats(
        line_dose({5.0, 5.0, 5.0, 5.0}), phantom, StructureLabel::Tumor);
    CHECK(stats.mean_gy == doctest::Approx(5.0));
    CHECK(stats.min_gy == 5.0);
    CHECK(stats.max_gy == 5.0);
    CHECK(stats.d95_gy == doctest::Approx(5.0));
  }

  SUBCASE("staircase of 100 doses") {
    Phantom phantom = line_phantom(std::vector<StructureLabel>(
        100, StructureLabel::Tumor));
    std::vector<double> values(100);
    for (int i = 0; i < 100; ++i) values[i] = static_cast<double>(i + 1);
    rtplan::DoseStats stats =
        rtplan::dose_stats(line_dose(values), phantom, StructureLabel::Tumor);
    CHECK(stats.mean_gy == doctest::Approx(50.5));
    CHECK(stats.min_gy == 1.0);
    CHECK(stats.max_gy == 100.0);
    // 95 of the 100 voxels receive at least 6 Gy, 94 at least 6.1 Gy.
    CHECK(stats.d95_gy == doctest::Approx(6.0));
  }

  SUBCASE("d95 falls to zero when the cold tail is too large") {
    Phantom phantom = line_phantom(std::vector<StructureLabel>(
        4, StructureLabel::Tumor));
    rtplan::DoseStats stats = rtplan::dose_stats(
        line_dose({0.0, 0.25, 1.0, 2.5}), phantom, StructureLabel::Tumor);
    CHECK(stats.d95_gy == 0.0);
    CHECK(stats.min_gy == 0.0);
    CHECK(stats.max_gy == 2.5);
  }
}

TEST_CASE("clinical penalty matches hand-computed values") {
  Phantom phantom = Phantom::from_labels(
      2, 2, 1.0,
      {StructureLabel::Tumor, StructureLabel::Tumor, StructureLabel::LeftLung,
       StructureLabel::Heart});
  ClinicalGoals goals;

  SUBCASE("underdose only") {
    DoseGrid dose = line_dose({70.0, 71.0, 3.0, 5.0});
    // under mean (4 + 1) / 2 = 2.5 weighted 100, lung 3, heart 5 * 2.
    CHECK(rtplan::clinical_penalty(dose, phantom, goals) ==
          doctest::Approx(263.0).epsilon(1e-12));
  }

  SUBCASE("mixed under and over") {
    DoseGrid dose = line_dose({85.0, 71.0, 3.0, 5.0});
    // under mean 0.5 * 100 + over mean 12.5 * 50 + 3 + 10.
    CHECK(rtplan::clinical_penalty(dose, phantom, goals) ==
          doctest::Approx(688.0).epsilon(1e-12));
  }

  SUBCASE("inside the band only organ terms remain") {
    DoseGrid dose = line_dose({75.0, 78.0, 3.0, 5.0});
    CHECK(rtplan::clinical_penalty(dose, phantom, goals) ==
          doctest::Approx(13.0).epsilon(1e-12));
  }

  SUBCASE("missing tumor raises EmptyStructure") {
    Phantom no_tumor = Phantom::from_labels(
        1, 2, 1.0, {StructureLabel::LeftLung, StructureLabel::Heart});
    DoseGrid dose = line_dose({1.0, 1.0});
    CHECK(thrown_kind([&] {
            rtplan::clinical_penalty(dose, no_tumor, goals);
          }) == ErrorKind::EmptyStructure);
  }
}

TEST_CASE("per-state tumor means track the static doses") {
  Phantom phantom = block_phantom();
  MotionStates states({-2.0, 0.0, 2.0});
  BeamletSet beams;
  beams.angles_deg = {0.0, 90.0};
  beams.beamlets_per_angle = 3;
  DoseInfluence inf = DoseInfluence::compute(phantom, beams, states);
  const std::vector<double> weights = {1.0, 0.5, 0.25, 2.0, 0.0, 1.5};

  std::vector<double> means =
      rtplan::per_state_mean_tumor_dose(inf, phantom, weights);
  REQUIRE(means.size() == 3);
  for (std::size_t x = 0; x < 3; ++x) {
    DoseGrid dose = inf.static_dose(weights, x);
    double sum = 0.0;
    const auto& tumor = phantom.structure_voxels(StructureLabel::Tumor);
    for (std::size_t v : tumor) sum += dose[v];
    CHECK(means[x] ==
          doctest::Approx(sum / static_cast<double>(tumor.size()))
              .epsilon(1e-12));
  }
  // Shifting by one voxel changes the tumor coverage, so the three states
  // must not all agree.
  const bool all_equal = means[0] == means[1] && means[1] == means[2];
  CHECK_FALSE(all_equal);
}

TEST_CASE("robust fitness is the worst penalty over the scenario bundle") {
  Phantom phantom = block_phantom();
  MotionStates states({-2.0, 0.0, 2.0});
  BeamletSet beams;
  beams.angles_deg = {0.0, 90.0};
  beams.beamlets_per_angle = 3;
  DoseInfluence inf = DoseInfluence::compute(phantom, beams, states);
  UncertaintySet set = block_uncertainty();
  ClinicalGoals goals;
  const std::vector<double> weights = {1.0, 0.5, 0.25, 2.0, 0.0, 1.5};

  const std::vector<double> means =
      rtplan::per_state_mean_tumor_dose(inf, phantom, weights);
  double worst = 0.0;
  for (const RespiratoryPdf& pdf : set.scenario_set(means)) {
    worst = std::max(worst,
                     rtplan::clinical_penalty(inf.expected_dose(weights, pdf),
                                              phantom, goals));
  }
  CHECK(rtplan::robust_fitness(weights, inf, phantom, set, goals) ==
        doctest::Approx(worst).epsilon(1e-15));

  // The robust value can never be better than the nominal scenario value.
  const double nominal_penalty = rtplan::clinical_penalty(
      inf.expected_dose(weights, set.nominal()), phantom, goals);
  CHECK(rtplan::robust_fitness(weights, inf, phantom, set, goals) >=
        nominal_penalty - 1e-12);
}

TEST_CASE("zero weights cost exactly the underdose floor") {
  Phantom phantom = block_phantom();
  MotionStates states({-2.0, 0.0, 2.0});
  BeamletSet beams;
  beams.angles_deg = {0.0};
  beams.beamlets_per_angle = 2;
  DoseInfluence inf = DoseInfluence::compute(phantom, beams, states);
  UncertaintySet set = block_uncertainty();
  ClinicalGoals goals;
  const std::vector<double> zero(2, 0.0);
  // All doses vanish, so the penalty is w_under * tumor_low^2.
  CHECK(rtplan::robust_fitness(zero, inf, phantom, set, goals) ==
        doctest::Approx(100.0 * 72.0 * 72.0).epsilon(1e-15));
}

TEST_CASE("fast robust objective agrees with the reference evaluator") {
  Phantom phantom = block_phantom();
  MotionStates states({-2.0, 0.0, 2.0});
  BeamletSet beams;
  beams.angles_deg = {0.0, 90.0, 200.0};
  beams.beamlets_per_angle = 3;
  DoseInfluence inf = DoseInfluence::compute(phantom, beams, states);
  UncertaintySet set = block_uncertainty();
  ClinicalGoals goals;
  rtplan::RobustObjective fast(inf, phantom, set, goals);
  REQUIRE(fast.beamlet_count() == 9);

  rtplan::Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> weights(9);
    for (double& w : weights) w = rng.uniform(0.0, 10.0);
    const double reference =
        rtplan::robust_fitness(weights, inf, phantom, set, goals);
    const double value = fast(weights);
    REQUIRE(value == doctest::Approx(reference).epsilon(1e-9));
  }

  CHECK(thrown_kind([&] { fast(std::vector<double>(4, 1.0)); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("fast robust objective requires all evaluated structures") {
  std::vector<StructureLabel> labels(36, StructureLabel::Normal);
  labels[14] = StructureLabel::Tumor;
  labels[0] = StructureLabel::LeftLung;
  Phantom no_heart = Phantom::from_labels(6, 6, 2.0, std::move(labels));
  MotionStates states({0.0});
  BeamletSet beams;
  beams.angles_deg = {0.0};
  beams.beamlets_per_angle = 1;
  DoseInfluence inf = DoseInfluence::compute(no_heart, beams, states);
  UncertaintySet set(states, RespiratoryPdf({1.0}), ErrorBars{{0.0}, {0.0}},
                     {0});
  ClinicalGoals goals;
  CHECK(thrown_kind([&] {
          rtplan::RobustObjective obj(inf, no_heart, set, goals);
        }) == ErrorKind::EmptyStructure);
}
