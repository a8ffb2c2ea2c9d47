#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "errors.hpp"
#include "rng.hpp"
#include "test_util.hpp"
#include "uncertainty.hpp"

using rtplan::ErrorBars;
using rtplan::ErrorKind;
using rtplan::MotionStates;
using rtplan::RespiratoryPdf;
using rtplan::Rng;
using rtplan::SmoothnessBound;
using rtplan::UncertaintySet;
using rtplan::WorstCaseSense;
using testutil::thrown_kind;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> all_states(std::size_t n) {
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;
  return active;
}

UncertaintySet make_set(std::vector<double> offsets, std::vector<double> nominal,
                        std::vector<double> lower, std::vector<double> upper,
                        SmoothnessBound smoothness = {}) {
  const std::size_t n = nominal.size();
  return UncertaintySet(MotionStates(std::move(offsets)),
                        RespiratoryPdf(std::move(nominal)),
                        ErrorBars{std::move(lower), std::move(upper)},
                        all_states(n), smoothness);
}

double dot(const RespiratoryPdf& pdf, const std::vector<double>& values) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pdf.size(); ++i) sum += pdf[i] * values[i];
  return sum;
}

}  // namespace

TEST_CASE("motion states require strictly increasing offsets and one zero") {
  MotionStates states({-10.0, -5.0, 0.0, 5.0, 10.0});
  CHECK(states.size() == 5);
  CHECK(states.reference_index() == 2);
  CHECK(states.offset_mm(0) == -10.0);

  MotionStates single({0.0});
  CHECK(single.reference_index() == 0);

  CHECK(thrown_kind([] { MotionStates({-5.0, 5.0}); }) ==
        ErrorKind::InvalidArgument);
  CHECK(thrown_kind([] { MotionStates({0.0, 5.0, 5.0}); }) ==
        ErrorKind::InvalidArgument);
  CHECK(thrown_kind([] { MotionStates({5.0, 0.0}); }) ==
        ErrorKind::InvalidArgument);
  CHECK(thrown_kind([] { MotionStates({}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("pdf validation accepts the uniform pdf and rejects bad masses") {
  RespiratoryPdf uniform({0.25, 0.25, 0.25, 0.25});
  CHECK(uniform.size() == 4);
  CHECK(uniform[1] == 0.25);

  CHECK(thrown_kind([] { RespiratoryPdf({0.5, 0.6}); }) ==
        ErrorKind::NotNormalized);
  CHECK(thrown_kind([] { RespiratoryPdf({0.7, -0.1, 0.4}); }) ==
        ErrorKind::NegativeMass);
  CHECK(thrown_kind([] { RespiratoryPdf({}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("membership follows the box, equality, sum, and smoothness rules") {
  SUBCASE("nominal is always a member") {
    UncertaintySet set = make_set({-5.0, 0.0, 5.0}, {0.5, 0.3, 0.2},
                                  {0.1, 0.1, 0.1}, {0.1, 0.1, 0.1});
    CHECK(set.is_member(set.nominal()));
  }

  SUBCASE("zero bars collapse the set to the nominal pdf") {
    UncertaintySet set =
        make_set({0.0, 5.0}, {0.5, 0.5}, {0.0, 0.0}, {0.0, 0.0});
    CHECK(set.is_member(RespiratoryPdf({0.5, 0.5})));
    CHECK_FALSE(set.is_member(RespiratoryPdf({0.6, 0.4})));
    CHECK(set.has_zero_bars());
  }

  SUBCASE("box constraints checked per state") {
    UncertaintySet set = make_set({-5.0, 0.0, 5.0}, {0.5, 0.3, 0.2},
                                  {0.1, 0.1, 0.1}, {0.1, 0.1, 0.1});
    CHECK(set.is_member(RespiratoryPdf({0.6, 0.2, 0.2})));
    CHECK_FALSE(set.is_member(RespiratoryPdf({0.65, 0.15, 0.2})));
  }

  SUBCASE("states outside the active region must equal the nominal") {
    UncertaintySet set(MotionStates({-5.0, 0.0, 5.0}),
                       RespiratoryPdf({0.3, 0.4, 0.3}),
                       ErrorBars{{0.2, 0.2, 0.0}, {0.2, 0.2, 0.0}}, {0, 1});
    CHECK(set.is_member(RespiratoryPdf({0.4, 0.3, 0.3})));
    CHECK_FALSE(set.is_member(RespiratoryPdf({0.3, 0.3, 0.4})));
  }

  SUBCASE("different state count raises StateMismatch") {
    UncertaintySet set =
        make_set({0.0, 5.0}, {0.5, 0.5}, {0.1, 0.1}, {0.1, 0.1});
    CHECK(thrown_kind([&] {
            set.is_member(RespiratoryPdf({0.5, 0.25, 0.25}));
          }) == ErrorKind::StateMismatch);
  }

  SUBCASE("smoothness bound compares states within delta") {
    SmoothnessBound smoothness{0.15, 5.0};
    UncertaintySet set =
        make_set({-5.0, 0.0, 5.0}, {0.3, 0.4, 0.3}, {0.3, 0.3, 0.3},
                 {0.3, 0.3, 0.3}, smoothness);
    // Jump of 0.3 between adjacent states (gap 5 <= delta) breaks the bound.
    CHECK_FALSE(set.is_member(RespiratoryPdf({0.6, 0.3, 0.1})));
    CHECK(set.is_member(RespiratoryPdf({0.35, 0.35, 0.3})));
    // States 0 and 2 are 10 mm apart, beyond delta, so their difference may
    // exceed epsilon as long as each adjacent pair stays within it.
    CHECK(set.is_member(RespiratoryPdf({0.25, 0.375, 0.375})));
  }
}

TEST_CASE("uncertainty set construction validates its pieces") {
  CHECK(thrown_kind([] {
          make_set({0.0, 5.0}, {0.5, 0.5}, {0.6, 0.0}, {0.0, 0.0});
        }) == ErrorKind::InvalidArgument);  // lower bar below zero mass
  CHECK(thrown_kind([] {
          make_set({0.0, 5.0}, {0.5, 0.5}, {0.0, 0.0}, {0.6, 0.0});
        }) == ErrorKind::InvalidArgument);  // upper bar above one
  CHECK(thrown_kind([] {
          UncertaintySet(MotionStates({0.0, 5.0}), RespiratoryPdf({0.5, 0.5}),
                         ErrorBars{{0.1, 0.1}, {0.1, 0.1}}, {0});
        }) == ErrorKind::InvalidArgument);  // nonzero bar outside active region
  CHECK(thrown_kind([] {
          UncertaintySet(MotionStates({0.0}), RespiratoryPdf({0.5, 0.5}),
                         ErrorBars{{0.0, 0.0}, {0.0, 0.0}}, {0});
        }) == ErrorKind::StateMismatch);
  CHECK(thrown_kind([] {
          UncertaintySet(MotionStates({0.0, 5.0}), RespiratoryPdf({0.5, 0.5}),
                         ErrorBars{{0.0, 0.0}, {0.0, 0.0}}, {0, 0});
        }) == ErrorKind::InvalidArgument);  // repeated active index
  CHECK(thrown_kind([] {
          make_set({0.0, 5.0}, {0.9, 0.1}, {0.1, 0.1}, {0.1, 0.1},
                   SmoothnessBound{0.1, 5.0});
        }) == ErrorKind::InvalidArgument);  // nominal breaks smoothness
}

TEST_CASE("greedy worst case matches the hand-solved instances") {
  const std::vector<double> values = {10.0, 20.0, 30.0};
  const double third = 1.0 / 3.0;

  SUBCASE("zero bars return the nominal") {
    UncertaintySet set = make_set({-5.0, 0.0, 5.0}, {third, third, third},
                                  {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
    RespiratoryPdf worst = set.worst_case(values, WorstCaseSense::Minimize);
    CHECK(dot(worst, values) == doctest::Approx(20.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(worst[i] == doctest::Approx(third).epsilon(1e-12));
    }
  }

  SUBCASE("bars of one third move all free mass to the extremes") {
    UncertaintySet set = make_set({-5.0, 0.0, 5.0}, {third, third, third},
                                  {third, third, third}, {third, third, third});
    RespiratoryPdf low = set.worst_case(values, WorstCaseSense::Minimize);
    CHECK(low[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(low[1] == doctest::Approx(third).epsilon(1e-12));
    CHECK(low[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dot(low, values) == doctest::Approx(40.0 / 3.0).epsilon(1e-12));

    RespiratoryPdf high = set.worst_case(values, WorstCaseSense::Maximize);
    CHECK(high[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(high[1] == doctest::Approx(third).epsilon(1e-12));
    CHECK(high[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(dot(high, values) == doctest::Approx(80.0 / 3.0).epsilon(1e-12));
  }

  SUBCASE("equal values break ties by state index") {
    UncertaintySet set = make_set({-5.0, 0.0, 5.0}, {0.25, 0.25, 0.5},
                                  {0.1, 0.1, 0.1}, {0.1, 0.1, 0.1});
    RespiratoryPdf worst =
        set.worst_case({7.0, 7.0, 7.0}, WorstCaseSense::Minimize);
    // Residual mass after the lower bounds goes to state 0 first, then 1.
    CHECK(worst[0] == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(worst[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(worst[2] == doctest::Approx(0.4).epsilon(1e-12));
  }
}

TEST_CASE("infeasible bound boxes are rejected") {
  CHECK(thrown_kind([] {
          rtplan::worst_case_mass({0.6, 0.6}, {0.7, 0.7}, {1.0, 2.0},
                                  WorstCaseSense::Minimize);
        }) == ErrorKind::InfeasibleSet);  // lower bounds alone exceed 1
  CHECK(thrown_kind([] {
          rtplan::worst_case_mass({0.1, 0.1}, {0.3, 0.3}, {1.0, 2.0},
                                  WorstCaseSense::Minimize);
        }) == ErrorKind::InfeasibleSet);  // upper bounds cannot reach 1
  CHECK(thrown_kind([] {
          rtplan::worst_case_mass({0.5, 0.5}, {0.4, 0.6}, {1.0, 2.0},
                                  WorstCaseSense::Minimize);
        }) == ErrorKind::InfeasibleSet);  // crossed bounds at state 0
  CHECK(thrown_kind([] {
          rtplan::worst_case_mass({0.5, 0.5}, {0.6}, {1.0, 2.0},
                                  WorstCaseSense::Minimize);
        }) == ErrorKind::StateMismatch);
}

TEST_CASE("greedy worst case beats random feasible members") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(4);
    std::vector<double> offsets(n), nominal(n), lower(n), upper(n), values(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      offsets[i] = 5.0 * static_cast<double>(i) -
                   5.0 * static_cast<double>(n / 2);
      nominal[i] = 0.05 + rng.uniform01();
      sum += nominal[i];
      values[i] = rng.uniform(-50.0, 50.0);
    }
    // A state offset of zero must exist; the construction above provides it.
    for (std::size_t i = 0; i < n; ++i) nominal[i] /= sum;
    for (std::size_t i = 0; i < n; ++i) {
      lower[i] = std::min(nominal[i], rng.uniform(0.0, 0.2));
      upper[i] = std::min(1.0 - nominal[i], rng.uniform(0.0, 0.2));
    }
    UncertaintySet set = make_set(offsets, nominal, lower, upper);

    for (WorstCaseSense sense :
         {WorstCaseSense::Minimize, WorstCaseSense::Maximize}) {
      RespiratoryPdf extreme = set.worst_case(values, sense);
      CHECK(set.is_member(extreme));
      const double extreme_value = dot(extreme, values);
      for (int s = 0; s < 40; ++s) {
        RespiratoryPdf member = set.sample_member(rng);
        const double value = dot(member, values);
        if (sense == WorstCaseSense::Minimize) {
          CHECK(extreme_value <= value + 1e-9);
        } else {
          CHECK(extreme_value >= value - 1e-9);
        }
      }
    }
  }
}

TEST_CASE("sampled members satisfy the membership predicate") {
  UncertaintySet set = make_set({-10.0, -5.0, 0.0, 5.0, 10.0},
                                {0.1, 0.2, 0.4, 0.2, 0.1},
                                {0.1, 0.1, 0.1, 0.1, 0.1},
                                {0.1, 0.1, 0.1, 0.1, 0.1});
  Rng rng(7);
  double max_spread = 0.0;
  for (int s = 0; s < 200; ++s) {
    RespiratoryPdf member = set.sample_member(rng);
    CHECK(set.is_member(member));
    max_spread = std::max(max_spread, std::abs(member[2] - 0.4));
  }
  // The sampler explores the box rather than returning the nominal.
  CHECK(max_spread > 0.01);

  UncertaintySet frozen =
      make_set({0.0, 5.0}, {0.5, 0.5}, {0.0, 0.0}, {0.0, 0.0});
  RespiratoryPdf only = frozen.sample_member(rng);
  CHECK(only[0] == 0.5);
  CHECK(only[1] == 0.5);
}

TEST_CASE("smoothness-bounded worst case stays feasible and deterministic") {
  SmoothnessBound smoothness{0.12, 5.0};
  UncertaintySet set = make_set({-5.0, 0.0, 5.0}, {0.3, 0.4, 0.3},
                                {0.15, 0.15, 0.15}, {0.15, 0.15, 0.15},
                                smoothness);
  const std::vector<double> values = {10.0, 20.0, 30.0};

  RespiratoryPdf a = set.worst_case(values, WorstCaseSense::Minimize);
  RespiratoryPdf b = set.worst_case(values, WorstCaseSense::Minimize);
  CHECK(a.mass() == b.mass());
  CHECK(set.is_member(a));
  CHECK(dot(a, values) <= dot(set.nominal(), values) + 1e-12);

  RespiratoryPdf up = set.worst_case(values, WorstCaseSense::Maximize);
  CHECK(set.is_member(up));
  CHECK(dot(up, values) >= dot(set.nominal(), values) - 1e-12);

  // The smoothness bound must bite: without it the extremes violate it.
  UncertaintySet loose = make_set({-5.0, 0.0, 5.0}, {0.3, 0.4, 0.3},
                                  {0.15, 0.15, 0.15}, {0.15, 0.15, 0.15});
  RespiratoryPdf unbounded = loose.worst_case(values, WorstCaseSense::Minimize);
  CHECK_FALSE(set.is_member(unbounded));
}

TEST_CASE("scenario sets start with the nominal and deduplicate extremes") {
  SUBCASE("zero bars yield only the nominal") {
    UncertaintySet set =
        make_set({0.0, 5.0}, {0.5, 0.5}, {0.0, 0.0}, {0.0, 0.0});
    auto scenarios = set.scenario_set({1.0, 2.0});
    REQUIRE(scenarios.size() == 1);
    CHECK(scenarios[0].mass() == set.nominal().mass());
  }

  SUBCASE("constant values collapse min and max to one extreme") {
    UncertaintySet set = make_set({-5.0, 0.0, 5.0, 10.0},
                                  {0.25, 0.25, 0.25, 0.25},
                                  {0.1, 0.1, 0.1, 0.1}, {0.1, 0.1, 0.1, 0.1});
    auto scenarios = set.scenario_set({3.0, 3.0, 3.0, 3.0});
    REQUIRE(scenarios.size() == 2);
    CHECK(scenarios[0].mass() == set.nominal().mass());
    CHECK(scenarios[1][0] == doctest::Approx(0.35).epsilon(1e-12));
    CHECK(scenarios[1][3] == doctest::Approx(0.15).epsilon(1e-12));
  }

  SUBCASE("distinct extremes give three scenarios") {
    UncertaintySet set = make_set({-5.0, 0.0, 5.0}, {0.3, 0.4, 0.3},
                                  {0.1, 0.1, 0.1}, {0.1, 0.1, 0.1});
    auto scenarios = set.scenario_set({1.0, 2.0, 3.0});
    REQUIRE(scenarios.size() == 3);
    CHECK(dot(scenarios[1], {1.0, 2.0, 3.0}) <
          dot(scenarios[0], {1.0, 2.0, 3.0}));
    CHECK(dot(scenarios[2], {1.0, 2.0, 3.0}) >
          dot(scenarios[0], {1.0, 2.0, 3.0}));
  }
}

TEST_CASE("worst case handles epsilon infinity as disabled smoothness") {
  SmoothnessBound disabled{kInf, 100.0};
  CHECK_FALSE(disabled.enabled());
  UncertaintySet set = make_set({-5.0, 0.0, 5.0}, {0.3, 0.4, 0.3},
                                {0.2, 0.2, 0.2}, {0.2, 0.2, 0.2}, disabled);
  // The greedy path runs despite the large delta because epsilon is infinite.
  RespiratoryPdf low = set.worst_case({1.0, 2.0, 3.0}, WorstCaseSense::Minimize);
  CHECK(low[0] == doctest::Approx(0.5).epsilon(1e-12));
}
