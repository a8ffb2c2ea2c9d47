#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "rng.hpp"

namespace rtplan {

// Ordered list of breathing offsets along the superior-inferior axis.
// Exactly one state must sit at offset 0 (the planning reference).
class MotionStates {
public:
  explicit MotionStates(std::vector<double> offsets_mm);

  std::size_t size() const { return offsets_mm_.size(); }
  double offset_mm(std::size_t i) const { return offsets_mm_[i]; }
  const std::vector<double>& offsets_mm() const { return offsets_mm_; }
  std::size_t reference_index() const { return reference_index_; }

  bool operator==(const MotionStates&) const = default;

private:
  std::vector<double> offsets_mm_;
  std::size_t reference_index_ = 0;
};

// Probability mass function over motion states.
class RespiratoryPdf {
public:
  // Validates non-negativity and normalization (|sum - 1| <= 1e-9).
  explicit RespiratoryPdf(std::vector<double> mass);

  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  const std::vector<double>& mass() const { return mass_; }

  bool operator==(const RespiratoryPdf&) const = default;

private:
  std::vector<double> mass_;
};

// Per-state downward/upward error bars around a nominal pdf.
struct ErrorBars {
  std::vector<double> lower;
  std::vector<double> upper;
};

// Optional bound |p(x) - p(y)| <= epsilon for states whose offsets differ
// by at most delta_mm. An infinite epsilon disables the constraint.
struct SmoothnessBound {
  double epsilon = std::numeric_limits<double>::infinity();
  double delta_mm = 0.0;

  bool enabled() const { return std::isfinite(epsilon); }
};

enum class WorstCaseSense { Minimize, Maximize };

// Greedy exact solver for the box-constrained worst case on the simplex:
// start every state at its lower bound and hand the remaining mass to the
// states with the smallest (Minimize) or largest (Maximize) per-state value,
// capping each at its upper bound. Ties are broken by state index.
// Throws InfeasibleSet when the box cannot hold a normalized pdf.
std::vector<double> worst_case_mass(const std::vector<double>& lower,
                                    const std::vector<double>& upper,
                                    const std::vector<double>& per_state_value,
                                    WorstCaseSense sense);

// Set of plausible respiratory pdfs: box error bars on an active region,
// equality to the nominal pdf elsewhere, unit total mass, and an optional
// smoothness bound between nearby states.
class UncertaintySet {
public:
  UncertaintySet(MotionStates states, RespiratoryPdf nominal, ErrorBars bars,
                 std::vector<std::size_t> active_region,
                 SmoothnessBound smoothness = {});

  const MotionStates& states() const { return states_; }
  const RespiratoryPdf& nominal() const { return nominal_; }
  const std::vector<std::size_t>& active_region() const { return active_; }
  const SmoothnessBound& smoothness() const { return smoothness_; }

  double lower_bound(std::size_t i) const { return nominal_[i] - bars_.lower[i]; }
  double upper_bound(std::size_t i) const { return nominal_[i] + bars_.upper[i]; }
  bool has_zero_bars() const;

  // Membership test with fixed tolerances: 1e-9 on the box and the total
  // mass, 1e-12 on equality outside the active region and on smoothness.
  bool is_member(const RespiratoryPdf& candidate) const;

  // Exact extremal pdf for a linear objective sum_x p(x) * value(x). With a
  // smoothness bound active the exact solver no longer applies and the best
  // of the nominal pdf plus a fixed batch of feasible samples is returned.
  RespiratoryPdf worst_case(const std::vector<double>& per_state_value,
                            WorstCaseSense sense) const;

  // Random member: uniform draw inside the bars, then proportional
  // redistribution onto the simplex; rejection on the smoothness bound.
  RespiratoryPdf sample_member(Rng& rng) const;

  // Scenario bundle for robust evaluation: nominal, then the minimizing and
  // maximizing extremal pdfs for the given per-state values, deduplicated.
  std::vector<RespiratoryPdf> scenario_set(
      const std::vector<double>& per_state_value) const;

private:
  bool smoothness_ok(const std::vector<double>& mass) const;

  MotionStates states_;
  RespiratoryPdf nominal_;
  ErrorBars bars_;
  std::vector<std::size_t> active_;
  SmoothnessBound smoothness_;
};

}  // namespace rtplan
