#include "levy.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace rtplan {

namespace {

constexpr int kMaxRedraws = 100000;

}  // namespace

void LevyConfig::validate() const {
  levy_sigma_u(lambda);
  for (double a : alpha_step) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      fail(ErrorKind::InvalidArgument, "alpha_step entries must be >= 0");
    }
  }
  if (!(s0 >= 0.0) || !std::isfinite(s0)) {
    fail(ErrorKind::InvalidArgument, "s0 must be >= 0");
  }
}

double levy_sigma_u(double lambda) {
  if (!(lambda >= 1.0) || !(lambda <= 3.0)) {
    fail(ErrorKind::LambdaOutOfRange,
         "lambda = " + std::to_string(lambda) + " outside [1, 3]");
  }
  // sin(pi*lambda/2) <= 0 for lambda in [2, 3], so the bracket cannot be a
  // normal scale there; the float sin never lands exactly on 0, hence the
  // explicit cut at 2.
  if (lambda >= 2.0) {
    fail(ErrorKind::LambdaOutOfRange,
         "lambda = " + std::to_string(lambda) +
             " makes the sigma_u expression non-positive (sin(pi*lambda/2) "
             "<= 0 for lambda >= 2); use lambda in [1, 2)");
  }
  const double bracket =
      std::tgamma(1.0 + lambda) * std::sin(std::numbers::pi * lambda / 2.0) /
      (std::tgamma((1.0 + lambda) / 2.0) * lambda *
       std::pow(2.0, (lambda - 1.0) / 2.0));
  if (!(bracket > 0.0)) {
    fail(ErrorKind::LambdaOutOfRange,
         "lambda = " + std::to_string(lambda) +
             " does not define a positive sigma_u");
  }
  return std::pow(bracket, 1.0 / lambda);
}

double levy_raw_step(Rng& rng, double lambda, double sigma_u, double s0) {
  double step = 0.0;
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const double u = rng.normal(0.0, sigma_u);
    double v = rng.normal(0.0, 1.0);
    while (v == 0.0) v = rng.normal(0.0, 1.0);
    step = u / std::pow(std::abs(v), 1.0 / lambda);
    if (s0 <= 0.0 || std::abs(step) >= s0) return step;
  }
  fail(ErrorKind::InvalidArgument,
       "levy step threshold s0 = " + std::to_string(s0) +
           " rejected every draw");
}

std::vector<double> levy_step(Rng& rng, const LevyConfig& cfg,
                              std::size_t dim) {
  if (cfg.alpha_step.empty() ||
      (cfg.alpha_step.size() != 1 && cfg.alpha_step.size() != dim)) {
    fail(ErrorKind::DimensionMismatch,
         "alpha_step must have 1 or " + std::to_string(dim) + " entries");
  }
  const double sigma_u = levy_sigma_u(cfg.lambda);
  std::vector<double> step(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double alpha =
        cfg.alpha_step.size() == 1 ? cfg.alpha_step[0] : cfg.alpha_step[i];
    step[i] = alpha * levy_raw_step(rng, cfg.lambda, sigma_u, cfg.s0);
  }
  return step;
}

}  // namespace rtplan
