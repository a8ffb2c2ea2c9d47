#include "uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace rtplan {

namespace {

constexpr double kBoxTol = 1e-9;
constexpr double kSumTol = 1e-9;
constexpr double kEqualityTol = 1e-12;
constexpr double kSmoothnessTol = 1e-12;

// Sampling limits for the rejection loop in sample_member.
constexpr int kRedistributionRounds = 100;
constexpr int kSampleAttempts = 1000;

// Fixed seed and batch size for the sampled worst case under a smoothness
// bound; a constant keeps worst_case deterministic across calls.
constexpr std::uint64_t kWorstCaseSeed = 0x5eed'0f'ca5e5ULL;
constexpr int kWorstCaseSamples = 512;

}  // namespace

MotionStates::MotionStates(std::vector<double> offsets_mm)
    : offsets_mm_(std::move(offsets_mm)) {
  if (offsets_mm_.empty()) {
    fail(ErrorKind::InvalidArgument, "motion state list is empty");
  }
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < offsets_mm_.size(); ++i) {
    if (!std::isfinite(offsets_mm_[i])) {
      fail(ErrorKind::InvalidArgument, "motion offset is not finite");
    }
    if (i > 0 && offsets_mm_[i] <= offsets_mm_[i - 1]) {
      fail(ErrorKind::InvalidArgument,
           "motion offsets must be strictly increasing");
    }
    if (offsets_mm_[i] == 0.0) {
      reference_index_ = i;
      ++zeros;
    }
  }
  if (zeros != 1) {
    fail(ErrorKind::InvalidArgument,
         "motion states must contain exactly one offset of 0 mm");
  }
}

RespiratoryPdf::RespiratoryPdf(std::vector<double> mass)
    : mass_(std::move(mass)) {
  if (mass_.empty()) {
    fail(ErrorKind::InvalidArgument, "pdf has no states");
  }
  double sum = 0.0;
  for (double m : mass_) {
    if (!(m >= 0.0)) {
      fail(ErrorKind::NegativeMass,
           "pdf mass " + std::to_string(m) + " is negative");
    }
    sum += m;
  }
  if (std::abs(sum - 1.0) > kSumTol) {
    fail(ErrorKind::NotNormalized,
         "pdf mass sums to " + std::to_string(sum) + ", expected 1");
  }
}

std::vector<double> worst_case_mass(const std::vector<double>& lower,
                                    const std::vector<double>& upper,
                                    const std::vector<double>& per_state_value,
                                    WorstCaseSense sense) {
  const std::size_t n = lower.size();
  if (upper.size() != n || per_state_value.size() != n) {
    fail(ErrorKind::StateMismatch,
         "bounds and per-state values must have the same length");
  }
  double sum_lower = 0.0;
  double sum_upper = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (lower[i] > upper[i] + kBoxTol) {
      fail(ErrorKind::InfeasibleSet, "lower bound exceeds upper bound at state " +
                                         std::to_string(i));
    }
    sum_lower += lower[i];
    sum_upper += upper[i];
  }
  if (sum_lower > 1.0 + kSumTol || sum_upper < 1.0 - kSumTol) {
    fail(ErrorKind::InfeasibleSet,
         "bounds admit no normalized pdf (mass between " +
             std::to_string(sum_lower) + " and " + std::to_string(sum_upper) +
             ")");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (sense == WorstCaseSense::Minimize) {
                       return per_state_value[a] < per_state_value[b];
                     }
                     return per_state_value[a] > per_state_value[b];
                   });

  std::vector<double> mass(lower);
  double residual = 1.0 - sum_lower;
  for (std::size_t idx : order) {
    if (residual <= 0.0) break;
    double add = std::min(residual, upper[idx] - mass[idx]);
    if (add > 0.0) {
      mass[idx] += add;
      residual -= add;
    }
  }
  return mass;
}

UncertaintySet::UncertaintySet(MotionStates states, RespiratoryPdf nominal,
                               ErrorBars bars,
                               std::vector<std::size_t> active_region,
                               SmoothnessBound smoothness)
    : states_(std::move(states)),
      nominal_(std::move(nominal)),
      bars_(std::move(bars)),
      active_(std::move(active_region)),
      smoothness_(smoothness) {
  const std::size_t n = states_.size();
  if (nominal_.size() != n) {
    fail(ErrorKind::StateMismatch, "nominal pdf has " +
                                       std::to_string(nominal_.size()) +
                                       " states, motion model has " +
                                       std::to_string(n));
  }
  if (bars_.lower.size() != n || bars_.upper.size() != n) {
    fail(ErrorKind::StateMismatch, "error bars must have one entry per state");
  }
  std::vector<bool> in_active(n, false);
  for (std::size_t idx : active_) {
    if (idx >= n) {
      fail(ErrorKind::InvalidArgument,
           "active region index " + std::to_string(idx) + " is out of range");
    }
    if (in_active[idx]) {
      fail(ErrorKind::InvalidArgument, "active region repeats state " +
                                           std::to_string(idx));
    }
    in_active[idx] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(bars_.lower[i] >= 0.0) || !(bars_.upper[i] >= 0.0)) {
      fail(ErrorKind::InvalidArgument, "error bars must be non-negative");
    }
    if (!in_active[i] && (bars_.lower[i] != 0.0 || bars_.upper[i] != 0.0)) {
      fail(ErrorKind::InvalidArgument,
           "state " + std::to_string(i) +
               " lies outside the active region but has nonzero error bars");
    }
    if (nominal_[i] - bars_.lower[i] < -kBoxTol) {
      fail(ErrorKind::InvalidArgument,
           "lower bar at state " + std::to_string(i) +
               " pushes the pdf below zero");
    }
    if (nominal_[i] + bars_.upper[i] > 1.0 + kBoxTol) {
      fail(ErrorKind::InvalidArgument,
           "upper bar at state " + std::to_string(i) +
               " pushes the pdf above one");
    }
  }
  if (smoothness_.enabled()) {
    if (smoothness_.epsilon < 0.0 || smoothness_.delta_mm < 0.0) {
      fail(ErrorKind::InvalidArgument,
           "smoothness bound needs epsilon >= 0 and delta >= 0");
    }
    if (!smoothness_ok(nominal_.mass())) {
      fail(ErrorKind::InvalidArgument,
           "nominal pdf violates the smoothness bound");
    }
  }
}

bool UncertaintySet::has_zero_bars() const {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (bars_.lower[i] != 0.0 || bars_.upper[i] != 0.0) return false;
  }
  return true;
}

bool UncertaintySet::smoothness_ok(const std::vector<double>& mass) const {
  if (!smoothness_.enabled()) return true;
  const std::size_t n = mass.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double gap = std::abs(states_.offset_mm(i) - states_.offset_mm(j));
      if (gap <= smoothness_.delta_mm + kSmoothnessTol &&
          std::abs(mass[i] - mass[j]) >
              smoothness_.epsilon + kSmoothnessTol) {
        return false;
      }
    }
  }
  return true;
}

bool UncertaintySet::is_member(const RespiratoryPdf& candidate) const {
  const std::size_t n = states_.size();
  if (candidate.size() != n) {
    fail(ErrorKind::StateMismatch, "candidate pdf has " +
                                       std::to_string(candidate.size()) +
                                       " states, set has " + std::to_string(n));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += candidate[i];
  if (std::abs(sum - 1.0) > kSumTol) return false;

  std::vector<bool> in_active(n, false);
  for (std::size_t idx : active_) in_active[idx] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_active[i]) {
      if (candidate[i] < lower_bound(i) - kBoxTol ||
          candidate[i] > upper_bound(i) + kBoxTol) {
        return false;
      }
    } else if (std::abs(candidate[i] - nominal_[i]) > kEqualityTol) {
      return false;
    }
  }
  return smoothness_ok(candidate.mass());
}

RespiratoryPdf UncertaintySet::worst_case(
    const std::vector<double>& per_state_value, WorstCaseSense sense) const {
  const std::size_t n = states_.size();
  if (per_state_value.size() != n) {
    fail(ErrorKind::StateMismatch,
         "per-state values must have one entry per motion state");
  }

  if (!smoothness_.enabled()) {
    std::vector<double> lower(n), upper(n);
    for (std::size_t i = 0; i < n; ++i) {
      lower[i] = lower_bound(i);
      upper[i] = upper_bound(i);
    }
    return RespiratoryPdf(worst_case_mass(lower, upper, per_state_value, sense));
  }

  // With the smoothness bound active the feasible set is no longer a box on
  // the simplex, so fall back to the best of the nominal pdf and a fixed
  // batch of feasible samples.
  auto objective = [&](const RespiratoryPdf& p) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += p[i] * per_state_value[i];
    return v;
  };
  RespiratoryPdf best = nominal_;
  double best_value = objective(best);
  Rng rng(kWorstCaseSeed);
  for (int k = 0; k < kWorstCaseSamples; ++k) {
    RespiratoryPdf candidate = sample_member(rng);
    double v = objective(candidate);
    bool better = sense == WorstCaseSense::Minimize ? v < best_value
                                                    : v > best_value;
    if (better) {
      best = candidate;
      best_value = v;
    }
  }
  return best;
}

RespiratoryPdf UncertaintySet::sample_member(Rng& rng) const {
  if (has_zero_bars()) return nominal_;

  const std::size_t n = states_.size();
  std::vector<bool> in_active(n, false);
  for (std::size_t idx : active_) in_active[idx] = true;

  for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
    std::vector<double> mass(n);
    for (std::size_t i = 0; i < n; ++i) {
      mass[i] = in_active[i] ? rng.uniform(lower_bound(i), upper_bound(i))
                             : nominal_[i];
    }

    // Push the draw back onto the simplex by spreading the mass defect or
    // excess over the active states in proportion to their remaining slack.
    bool normalized = false;
    for (int round = 0; round < kRedistributionRounds; ++round) {
      double sum = 0.0;
      for (double m : mass) sum += m;
      double defect = 1.0 - sum;
      if (std::abs(defect) <= kSumTol) {
        normalized = true;
        break;
      }
      double slack_total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!in_active[i]) continue;
        slack_total += defect > 0.0 ? upper_bound(i) - mass[i]
                                    : mass[i] - lower_bound(i);
      }
      if (slack_total <= 0.0) break;
      for (std::size_t i = 0; i < n; ++i) {
        if (!in_active[i]) continue;
        if (defect > 0.0) {
          double slack = upper_bound(i) - mass[i];
          mass[i] = std::min(upper_bound(i), mass[i] + defect * slack / slack_total);
        } else {
          double slack = mass[i] - lower_bound(i);
          mass[i] = std::max(lower_bound(i), mass[i] + defect * slack / slack_total);
        }
      }
    }
    if (!normalized) continue;
    if (!smoothness_ok(mass)) continue;
    return RespiratoryPdf(std::move(mass));
  }
  fail(ErrorKind::SamplingExhausted,
       "no feasible pdf found after " + std::to_string(kSampleAttempts) +
           " attempts; the smoothness bound may be too tight");
}

std::vector<RespiratoryPdf> UncertaintySet::scenario_set(
    const std::vector<double>& per_state_value) const {
  std::vector<RespiratoryPdf> scenarios;
  scenarios.push_back(nominal_);
  if (has_zero_bars()) return scenarios;

  auto push_unique = [&](RespiratoryPdf pdf) {
    for (const RespiratoryPdf& existing : scenarios) {
      double gap = 0.0;
      for (std::size_t i = 0; i < pdf.size(); ++i) {
        gap = std::max(gap, std::abs(existing[i] - pdf[i]));
      }
      if (gap <= kEqualityTol) return;
    }
    scenarios.push_back(std::move(pdf));
  };
  push_unique(worst_case(per_state_value, WorstCaseSense::Minimize));
  push_unique(worst_case(per_state_value, WorstCaseSense::Maximize));
  return scenarios;
}

}  // namespace rtplan
