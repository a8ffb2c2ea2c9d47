#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "levy.hpp"

namespace rtplan {

using Objective = std::function<double(const std::vector<double>&)>;

struct SearchSpace {
  std::vector<double> lower;
  std::vector<double> upper;

  static SearchSpace box(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower.size(); }
  void validate() const;
  double clamp1(std::size_t i, double v) const;
  void clamp(std::vector<double>& point) const;
};

struct CsoParams {
  int n_nests = 25;
  double pa = 0.25;
  int max_iterations = 2000;
  LevyConfig levy;

  void validate() const;
};

struct FpaParams {
  int n_flowers = 25;
  double switch_p = 0.8;
  int max_iterations = 2000;
  LevyConfig levy;

  void validate() const;
};

struct BsoParams {
  int n_bats = 25;
  double f_min = 0.0;
  double f_max = 2.0;
  double loudness_a0 = 1.0;
  double a_min = 0.05;
  double pulse_r0 = 0.5;
  double alpha_loud = 0.9;
  double gamma_pulse = 0.9;
  int max_iterations = 2000;

  void validate() const;
};

struct OptimizationResult {
  std::vector<double> best_point;
  double best_value = 0.0;
  // Best value after initialization, then after every iteration; monotone
  // non-increasing, and best_value equals the last entry.
  std::vector<double> history;
  std::uint64_t evaluations = 0;
  std::uint64_t seed = 0;
};

// Optional instrumentation for property tests: observe population state per
// iteration (all optimizers) and loudness/pulse dynamics (bat search only).
struct OptimizerTrace {
  std::function<void(int iteration,
                     const std::vector<std::vector<double>>& population)>
      on_population;
  std::function<void(int iteration, const std::vector<double>& loudness,
                     const std::vector<double>& pulse)>
      on_bat_state;
};

// Cuckoo search: one Levy-flight cuckoo per iteration challenges a random
// nest, then the worst ceil(pa*n) nests are abandoned and rebuilt by a
// differential step toward surviving nests.
OptimizationResult cso_minimize(const Objective& objective,
                                const SearchSpace& space,
                                const CsoParams& params, std::uint64_t seed,
                                const OptimizerTrace* trace = nullptr);

// Flower pollination: per flower, global Levy pollination toward the best
// with probability switch_p, otherwise a local differential move; greedy
// acceptance.
OptimizationResult fpa_minimize(const Objective& objective,
                                const SearchSpace& space,
                                const FpaParams& params, std::uint64_t seed,
                                const OptimizerTrace* trace = nullptr);

// Bat search: frequency-weighted velocity update toward the best, pulse-rate
// gated local walk around it, and loudness-gated acceptance that decays
// loudness and grows the pulse rate.
OptimizationResult bso_minimize(const Objective& objective,
                                const SearchSpace& space,
                                const BsoParams& params, std::uint64_t seed,
                                const OptimizerTrace* trace = nullptr);

}  // namespace rtplan
