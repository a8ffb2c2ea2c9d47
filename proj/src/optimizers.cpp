#include "optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace rtplan {

SearchSpace SearchSpace::box(std::size_t dim, double lo, double hi) {
  SearchSpace space;
  space.lower.assign(dim, lo);
  space.upper.assign(dim, hi);
  space.validate();
  return space;
}

void SearchSpace::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    fail(ErrorKind::DimensionMismatch,
         "search space bounds must be non-empty and equally sized");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) ||
        !(lower[i] < upper[i])) {
      fail(ErrorKind::InvalidArgument,
           "search space needs lower < upper at every dimension");
    }
  }
}

double SearchSpace::clamp1(std::size_t i, double v) const {
  return std::min(upper[i], std::max(lower[i], v));
}

void SearchSpace::clamp(std::vector<double>& point) const {
  for (std::size_t i = 0; i < point.size(); ++i) point[i] = clamp1(i, point[i]);
}

void CsoParams::validate() const {
  if (n_nests < 2) {
    fail(ErrorKind::InvalidArgument, "n_nests must be >= 2");
  }
  if (!(pa >= 0.0) || !(pa <= 1.0)) {
    fail(ErrorKind::InvalidArgument,
         "pa = " + std::to_string(pa) + " outside [0, 1]");
  }
  if (max_iterations < 0) {
    fail(ErrorKind::InvalidArgument, "max_iterations must be >= 0");
  }
  levy.validate();
}

void FpaParams::validate() const {
  if (n_flowers < 2) {
    fail(ErrorKind::InvalidArgument, "n_flowers must be >= 2");
  }
  if (!(switch_p >= 0.0) || !(switch_p <= 1.0)) {
    fail(ErrorKind::InvalidArgument,
         "switch_p = " + std::to_string(switch_p) + " outside [0, 1]");
  }
  if (max_iterations < 0) {
    fail(ErrorKind::InvalidArgument, "max_iterations must be >= 0");
  }
  levy.validate();
}

void BsoParams::validate() const {
  if (n_bats < 1) {
    fail(ErrorKind::InvalidArgument, "n_bats must be >= 1");
  }
  if (!(f_min < f_max)) {
    fail(ErrorKind::InvalidArgument, "need f_min < f_max");
  }
  if (!(loudness_a0 > 0.0) || !(a_min > 0.0) || a_min > loudness_a0) {
    fail(ErrorKind::InvalidArgument,
         "need 0 < a_min <= loudness_a0");
  }
  if (!(pulse_r0 >= 0.0) || !(pulse_r0 <= 1.0)) {
    fail(ErrorKind::InvalidArgument,
         "pulse_r0 = " + std::to_string(pulse_r0) + " outside [0, 1]");
  }
  if (!(alpha_loud > 0.0) || !(alpha_loud < 1.0)) {
    fail(ErrorKind::InvalidArgument,
         "alpha_loud = " + std::to_string(alpha_loud) + " outside (0, 1)");
  }
  if (!(gamma_pulse > 0.0)) {
    fail(ErrorKind::InvalidArgument, "gamma_pulse must be > 0");
  }
  if (max_iterations < 0) {
    fail(ErrorKind::InvalidArgument, "max_iterations must be >= 0");
  }
}

namespace {

// Counts evaluations and rejects non-finite objective values.
class EvalGuard {
public:
  explicit EvalGuard(const Objective& objective) : objective_(&objective) {}

  double operator()(const std::vector<double>& x) {
    const double value = (*objective_)(x);
    ++count_;
    if (!std::isfinite(value)) {
      fail(ErrorKind::ObjectiveNonFinite,
           "objective returned a non-finite value");
    }
    return value;
  }

  std::uint64_t count() const { return count_; }

private:
  const Objective* objective_;
  std::uint64_t count_ = 0;
};

// Per-dimension Levy scale: explicit alpha_step, or 0.01 x range when the
// config leaves it empty.
std::vector<double> resolve_alpha(const LevyConfig& levy,
                                  const SearchSpace& space) {
  const std::size_t dim = space.dim();
  std::vector<double> alpha(dim);
  if (levy.alpha_step.empty()) {
    for (std::size_t i = 0; i < dim; ++i) {
      alpha[i] = 0.01 * (space.upper[i] - space.lower[i]);
    }
  } else if (levy.alpha_step.size() == 1) {
    alpha.assign(dim, levy.alpha_step[0]);
  } else if (levy.alpha_step.size() == dim) {
    alpha = levy.alpha_step;
  } else {
    fail(ErrorKind::DimensionMismatch,
         "alpha_step must have 1 or " + std::to_string(dim) + " entries");
  }
  return alpha;
}

// Population member i is drawn from its own sub-stream (iteration 0), so
// initialization is independent of population evaluation order.
std::vector<std::vector<double>> init_population(const SearchSpace& space,
                                                 int n, std::uint64_t seed) {
  std::vector<std::vector<double>> population(n);
  for (int i = 0; i < n; ++i) {
    Rng rng = sub_rng(seed, 0, static_cast<std::uint64_t>(i));
    std::vector<double>& x = population[i];
    x.resize(space.dim());
    for (std::size_t d = 0; d < space.dim(); ++d) {
      x[d] = rng.uniform(space.lower[d], space.upper[d]);
    }
  }
  return population;
}

struct BestTracker {
  std::vector<double> point;
  double value = std::numeric_limits<double>::infinity();

  void offer(const std::vector<double>& x, double v) {
    if (v < value) {
      point = x;
      value = v;
    }
  }
};

void notify_population(const OptimizerTrace* trace, int iteration,
                       const std::vector<std::vector<double>>& population) {
  if (trace != nullptr && trace->on_population) {
    trace->on_population(iteration, population);
  }
}

}  // namespace

OptimizationResult cso_minimize(const Objective& objective,
                                const SearchSpace& space,
                                const CsoParams& params, std::uint64_t seed,
                                const OptimizerTrace* trace) {
  space.validate();
  params.validate();
  const std::size_t dim = space.dim();
  const int n = params.n_nests;
  const std::vector<double> alpha = resolve_alpha(params.levy, space);
  const double sigma_u = levy_sigma_u(params.levy.lambda);

  EvalGuard eval(objective);
  std::vector<std::vector<double>> nests = init_population(space, n, seed);
  std::vector<double> values(n);
  BestTracker best;
  for (int i = 0; i < n; ++i) {
    values[i] = eval(nests[i]);
    best.offer(nests[i], values[i]);
  }

  OptimizationResult result;
  result.history.push_back(best.value);
  notify_population(trace, 0, nests);

  const int n_abandon = std::min(
      n, static_cast<int>(std::ceil(params.pa * static_cast<double>(n))));

  for (int t = 1; t <= params.max_iterations; ++t) {
    Rng rng = sub_rng(seed, static_cast<std::uint64_t>(t), 0);

    // Levy flight of one randomly chosen cuckoo, challenging a random nest.
    const int i = static_cast<int>(rng.below(n));
    std::vector<double> candidate = nests[i];
    for (std::size_t d = 0; d < dim; ++d) {
      candidate[d] += alpha[d] * levy_raw_step(rng, params.levy.lambda,
                                               sigma_u, params.levy.s0);
    }
    space.clamp(candidate);
    const double candidate_value = eval(candidate);
    const int j = static_cast<int>(rng.below(n));
    if (candidate_value < values[j]) {
      nests[j] = std::move(candidate);
      values[j] = candidate_value;
      best.offer(nests[j], values[j]);
    }

    // Abandon the worst nests and rebuild each from its old position plus a
    // differential step between two surviving nests.
    if (n_abandon > 0) {
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return values[a] > values[b];
      });
      std::vector<int> abandoned(order.begin(), order.begin() + n_abandon);
      std::vector<int> survivors(order.begin() + n_abandon, order.end());
      const std::vector<int>& pool = survivors.empty() ? abandoned : survivors;

      const std::vector<std::vector<double>> old_nests = nests;
      for (int w : abandoned) {
        const int a = pool[rng.below(pool.size())];
        const int b = pool[rng.below(pool.size())];
        const double r = rng.uniform01();
        std::vector<double>& fresh = nests[w];
        for (std::size_t d = 0; d < dim; ++d) {
          fresh[d] = space.clamp1(
              d, old_nests[w][d] + r * (old_nests[a][d] - old_nests[b][d]));
        }
        values[w] = eval(fresh);
        best.offer(fresh, values[w]);
      }
    }

    result.history.push_back(best.value);
    notify_population(trace, t, nests);
  }

  result.best_point = best.point;
  result.best_value = best.value;
  result.evaluations = eval.count();
  result.seed = seed;
  return result;
}

OptimizationResult fpa_minimize(const Objective& objective,
                                const SearchSpace& space,
                                const FpaParams& params, std::uint64_t seed,
                                const OptimizerTrace* trace) {
  space.validate();
  params.validate();
  const std::size_t dim = space.dim();
  const int n = params.n_flowers;
  const std::vector<double> alpha = resolve_alpha(params.levy, space);
  const double sigma_u = levy_sigma_u(params.levy.lambda);

  EvalGuard eval(objective);
  std::vector<std::vector<double>> flowers = init_population(space, n, seed);
  std::vector<double> values(n);
  BestTracker best;
  for (int i = 0; i < n; ++i) {
    values[i] = eval(flowers[i]);
    best.offer(flowers[i], values[i]);
  }

  OptimizationResult result;
  result.history.push_back(best.value);
  notify_population(trace, 0, flowers);

  std::vector<double> candidate(dim);
  for (int t = 1; t <= params.max_iterations; ++t) {
    for (int i = 0; i < n; ++i) {
      Rng rng = sub_rng(seed, static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(i));
      if (rng.uniform01() < params.switch_p) {
        // Global pollination: Levy-weighted pull toward the best flower.
        for (std::size_t d = 0; d < dim; ++d) {
          const double levy = alpha[d] * levy_raw_step(rng, params.levy.lambda,
                                                       sigma_u, params.levy.s0);
          candidate[d] = space.clamp1(
              d, flowers[i][d] + levy * (best.point[d] - flowers[i][d]));
        }
      } else {
        // Local pollination: scaled difference of two distinct flowers.
        const double epsilon = rng.uniform01();
        const int j = static_cast<int>(rng.below(n));
        int k = static_cast<int>(rng.below(n));
        while (k == j) k = static_cast<int>(rng.below(n));
        for (std::size_t d = 0; d < dim; ++d) {
          candidate[d] = space.clamp1(
              d, flowers[i][d] + epsilon * (flowers[j][d] - flowers[k][d]));
        }
      }
      const double candidate_value = eval(candidate);
      if (candidate_value < values[i]) {
        flowers[i] = candidate;
        values[i] = candidate_value;
        best.offer(flowers[i], values[i]);
      }
    }
    result.history.push_back(best.value);
    notify_population(trace, t, flowers);
  }

  result.best_point = best.point;
  result.best_value = best.value;
  result.evaluations = eval.count();
  result.seed = seed;
  return result;
}

OptimizationResult bso_minimize(const Objective& objective,
                                const SearchSpace& space,
                                const BsoParams& params, std::uint64_t seed,
                                const OptimizerTrace* trace) {
  space.validate();
  params.validate();
  const std::size_t dim = space.dim();
  const int n = params.n_bats;

  EvalGuard eval(objective);
  std::vector<std::vector<double>> bats = init_population(space, n, seed);
  std::vector<std::vector<double>> velocity(
      n, std::vector<double>(dim, 0.0));
  std::vector<double> values(n);
  std::vector<double> loudness(n, params.loudness_a0);
  std::vector<double> pulse(n, 0.0);
  BestTracker best;
  for (int i = 0; i < n; ++i) {
    values[i] = eval(bats[i]);
    best.offer(bats[i], values[i]);
  }

  OptimizationResult result;
  result.history.push_back(best.value);
  notify_population(trace, 0, bats);
  if (trace != nullptr && trace->on_bat_state) {
    trace->on_bat_state(0, loudness, pulse);
  }

  std::vector<double> candidate(dim);
  for (int t = 1; t <= params.max_iterations; ++t) {
    double mean_loudness = 0.0;
    for (double a : loudness) mean_loudness += a;
    mean_loudness /= static_cast<double>(n);

    for (int i = 0; i < n; ++i) {
      Rng rng = sub_rng(seed, static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(i));
      const double freq =
          params.f_min + (params.f_max - params.f_min) * rng.uniform01();
      for (std::size_t d = 0; d < dim; ++d) {
        velocity[i][d] += (bats[i][d] - best.point[d]) * freq;
        candidate[d] = space.clamp1(d, bats[i][d] + velocity[i][d]);
      }
      if (rng.uniform01() > pulse[i]) {
        // Local walk around the best position, scaled by mean loudness.
        for (std::size_t d = 0; d < dim; ++d) {
          const double epsilon = 2.0 * rng.uniform01() - 1.0;
          candidate[d] =
              space.clamp1(d, best.point[d] + epsilon * mean_loudness);
        }
      }
      const double candidate_value = eval(candidate);
      if (rng.uniform01() < loudness[i] && candidate_value < values[i]) {
        bats[i] = candidate;
        values[i] = candidate_value;
        loudness[i] = std::max(params.a_min, params.alpha_loud * loudness[i]);
        pulse[i] = params.pulse_r0 *
                   (1.0 - std::exp(-params.gamma_pulse * static_cast<double>(t)));
        best.offer(bats[i], values[i]);
      }
    }
    result.history.push_back(best.value);
    notify_population(trace, t, bats);
    if (trace != nullptr && trace->on_bat_state) {
      trace->on_bat_state(t, loudness, pulse);
    }
  }

  result.best_point = best.point;
  result.best_value = best.value;
  result.evaluations = eval.count();
  result.seed = seed;
  return result;
}

}  // namespace rtplan
