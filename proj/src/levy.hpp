#pragma once

#include <cstddef>
#include <vector>

#include "rng.hpp"

namespace rtplan {

// Mantegna Levy-flight step generator settings. alpha_step holds the
// per-dimension scale factor; a single entry broadcasts to every dimension,
// and an empty vector tells the optimizers to use 0.01 x (upper - lower).
struct LevyConfig {
  double lambda = 1.5;
  std::vector<double> alpha_step;
  double s0 = 0.0;

  void validate() const;
};

// sigma_u = { G(1+l)·sin(pi·l/2) / [ G((1+l)/2) · l · 2^((l-1)/2) ] }^(1/l).
// The expression is positive only for lambda in [1, 2); larger exponents
// make the bracket non-positive, which cannot define a normal scale, so
// they are rejected alongside values outside [1, 3].
double levy_sigma_u(double lambda);

// One raw Mantegna step u / |v|^(1/lambda) with u ~ N(0, sigma_u^2) and
// v ~ N(0, 1). Steps smaller in magnitude than s0 are redrawn when s0 > 0.
double levy_raw_step(Rng& rng, double lambda, double sigma_u, double s0);

// Vector of scaled steps alpha_step[i] * raw_i. alpha_step must have one
// entry (broadcast) or dim entries.
std::vector<double> levy_step(Rng& rng, const LevyConfig& cfg,
                              std::size_t dim);

}  // namespace rtplan
