#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "dose.hpp"
#include "evaluation.hpp"
#include "optimizers.hpp"
#include "phantom.hpp"
#include "uncertainty.hpp"

namespace rtplan {

// Fully assembled planning problem. The influence matrix is calibrated so
// that the mid-box plan (every weight at w_max / 2) delivers the tumor band
// midpoint as mean tumor dose under the nominal pdf, putting random initial
// plans in reach of the band.
class PlanningEngine {
public:
  static PlanningEngine build(const PlannerConfig& config);

  const Phantom& phantom() const { return phantom_; }
  const DoseInfluence& influence() const { return influence_; }
  const UncertaintySet& uncertainty() const { return uncertainty_; }
  const ClinicalGoals& goals() const { return goals_; }
  double w_max() const { return w_max_; }
  double calibration_factor() const { return calibration_factor_; }

  SearchSpace search_space() const;

private:
  PlanningEngine(Phantom phantom, DoseInfluence influence,
                 UncertaintySet uncertainty, ClinicalGoals goals, double w_max,
                 double calibration_factor)
      : phantom_(std::move(phantom)),
        influence_(std::move(influence)),
        uncertainty_(std::move(uncertainty)),
        goals_(goals),
        w_max_(w_max),
        calibration_factor_(calibration_factor) {}

  Phantom phantom_;
  DoseInfluence influence_;
  UncertaintySet uncertainty_;
  ClinicalGoals goals_;
  double w_max_;
  double calibration_factor_;
};

// Dose statistics for one scenario pdf of the final plan, all structures.
struct ScenarioBlock {
  std::string name;
  std::vector<double> pdf;
  std::array<DoseStats, kStructureCount> stats;
};

struct RunReport {
  std::string algorithm;
  std::uint64_t seed = 0;
  int population = 0;
  int iterations = 0;
  std::uint64_t evaluations = 0;
  double best_fitness = 0.0;
  double wall_seconds = 0.0;  // reported via API/stdout only, never in files
  std::vector<double> best_weights;
  std::vector<double> history;
  std::vector<ScenarioBlock> scenarios;
};

// Runs the configured optimizer on the robust objective. Pure apart from
// timing; writes nothing.
RunReport optimize_plan(const PlannerConfig& config);
RunReport optimize_plan(const PlannerConfig& config,
                        const PlanningEngine& engine);

// optimize_plan plus artifact files in out_dir: plan.csv, convergence.csv,
// one dvh_<scenario>.csv per scenario, and report.txt.
RunReport run_optimize(const PlannerConfig& config, const std::string& out_dir);

// Runs all three algorithms with the same engine, seed, and budget; writes
// comparison.csv (nominal-scenario mean doses per structure plus fitness).
void run_compare(const PlannerConfig& config, const std::string& out_dir);

// Evaluates a stored plan under the nominal pdf and writes dvh_nominal.csv.
void run_dvh(const PlannerConfig& config, const std::string& weights_path,
             const std::string& out_dir);

// Writes the phantom label grid as phantom.csv.
void run_phantom(const PlannerConfig& config, const std::string& out_dir);

// Shared serialization helpers, exposed for tests.
std::string format_plan_csv(const std::vector<double>& weights);
std::string format_convergence_csv(const std::vector<double>& history);
std::string format_dvh_csv(const DoseGrid& dose, const Phantom& phantom);
std::string format_report(const RunReport& report);
std::vector<double> read_plan_csv(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace rtplan
