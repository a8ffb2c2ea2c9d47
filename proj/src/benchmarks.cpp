#include "benchmarks.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace rtplan {

double evaluate_benchmark(const std::string& name,
                          const std::vector<double>& x) {
  if (x.empty()) {
    fail(ErrorKind::InvalidArgument, "benchmark input vector is empty");
  }
  if (name == "sphere") {
    double sum = 0.0;
    for (double v : x) sum += v * v;
    return sum;
  }
  if (name == "rosenbrock") {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = 1.0 - x[i];
      sum += 100.0 * a * a + b * b;
    }
    return sum;
  }
  if (name == "rastrigin") {
    double sum = 10.0 * static_cast<double>(x.size());
    for (double v : x) {
      sum += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    }
    return sum;
  }
  fail(ErrorKind::UnknownBenchmark, "unknown benchmark '" + name + "'");
}

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = {"sphere", "rosenbrock",
                                                 "rastrigin"};
  return names;
}

}  // namespace rtplan
