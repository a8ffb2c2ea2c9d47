#pragma once

#include <string>
#include <vector>

namespace rtplan {

// Analytic test functions: "sphere" and "rastrigin" have their global
// minimum 0 at the origin, "rosenbrock" at the all-ones point.
double evaluate_benchmark(const std::string& name,
                          const std::vector<double>& x);

const std::vector<std::string>& benchmark_names();

}  // namespace rtplan
