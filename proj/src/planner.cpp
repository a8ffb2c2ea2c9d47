#include "planner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "errors.hpp"

namespace rtplan {

namespace fs = std::filesystem;

namespace {

std::string format_g(double value, int precision) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
  return buffer;
}

// Weights and history round-trip exactly; reported doses use 12 digits.
std::string format_exact(double value) { return format_g(value, 17); }
std::string format_dose(double value) { return format_g(value, 12); }

// DVH exports cover the three structures of the planning objective, in
// ascending structure-name order.
constexpr std::array<StructureLabel, 3> kDvhStructures = {
    StructureLabel::Heart, StructureLabel::LeftLung, StructureLabel::Tumor};

constexpr std::array<StructureLabel, 4> kReportStructures = {
    StructureLabel::Tumor, StructureLabel::LeftLung, StructureLabel::Heart,
    StructureLabel::Normal};

std::vector<ScenarioBlock> evaluate_scenarios(const PlanningEngine& engine,
                                              const std::vector<double>& weights) {
  const DoseInfluence& influence = engine.influence();
  const Phantom& phantom = engine.phantom();
  const UncertaintySet& set = engine.uncertainty();

  const std::vector<double> values =
      per_state_mean_tumor_dose(influence, phantom, weights);

  std::vector<std::pair<std::string, RespiratoryPdf>> named;
  named.emplace_back("nominal", set.nominal());
  if (!set.has_zero_bars()) {
    RespiratoryPdf under = set.worst_case(values, WorstCaseSense::Minimize);
    RespiratoryPdf over = set.worst_case(values, WorstCaseSense::Maximize);
    auto distinct = [&](const RespiratoryPdf& pdf) {
      for (const auto& entry : named) {
        double gap = 0.0;
        for (std::size_t i = 0; i < pdf.size(); ++i) {
          gap = std::max(gap, std::abs(entry.second[i] - pdf[i]));
        }
        if (gap <= 1e-12) return false;
      }
      return true;
    };
    if (distinct(under)) named.emplace_back("underdose", under);
    if (distinct(over)) named.emplace_back("overdose", over);
  }

  std::vector<ScenarioBlock> blocks;
  blocks.reserve(named.size());
  for (const auto& [name, pdf] : named) {
    ScenarioBlock block;
    block.name = name;
    block.pdf = pdf.mass();
    const DoseGrid dose = influence.expected_dose(weights, pdf);
    for (StructureLabel label : kReportStructures) {
      block.stats[static_cast<std::size_t>(label)] =
          dose_stats(dose, phantom, label);
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace

PlanningEngine PlanningEngine::build(const PlannerConfig& config) {
  config.validate();
  Phantom phantom = config.build_phantom();
  MotionStates states = config.build_states();
  DoseInfluence influence = DoseInfluence::compute(
      phantom, config.build_beams(), states, config.build_kernel());
  UncertaintySet uncertainty = config.build_uncertainty();
  ClinicalGoals goals = config.goals;

  const std::vector<double> mid_plan(
      static_cast<std::size_t>(influence.beamlet_count()),
      0.5 * config.beams.w_max);
  const double mid_mean =
      [&] {
        const DoseGrid dose =
            influence.expected_dose(mid_plan, uncertainty.nominal());
        const auto& tumor = phantom.structure_voxels(StructureLabel::Tumor);
        double sum = 0.0;
        for (std::size_t v : tumor) sum += dose[v];
        return sum / static_cast<double>(tumor.size());
      }();
  if (!(mid_mean > 0.0)) {
    fail(ErrorKind::InvalidArgument,
         "beam layout deposits no dose in the tumor; calibration impossible");
  }
  const double factor = goals.band_mid_gy() / mid_mean;
  influence.scale(factor);

  return PlanningEngine(std::move(phantom), std::move(influence),
                        std::move(uncertainty), goals, config.beams.w_max,
                        factor);
}

SearchSpace PlanningEngine::search_space() const {
  return SearchSpace::box(static_cast<std::size_t>(influence_.beamlet_count()),
                          0.0, w_max_);
}

RunReport optimize_plan(const PlannerConfig& config) {
  return optimize_plan(config, PlanningEngine::build(config));
}

RunReport optimize_plan(const PlannerConfig& config,
                        const PlanningEngine& engine) {
  const RobustObjective objective(engine.influence(), engine.phantom(),
                                  engine.uncertainty(), engine.goals());
  const Objective f = [&objective](const std::vector<double>& w) {
    return objective(w);
  };
  const SearchSpace space = engine.search_space();
  const std::uint64_t seed = config.optimizer.seed;

  const auto start = std::chrono::steady_clock::now();
  OptimizationResult result;
  if (config.optimizer.algorithm == "cso") {
    result = cso_minimize(f, space, config.build_cso(), seed);
  } else if (config.optimizer.algorithm == "fpa") {
    result = fpa_minimize(f, space, config.build_fpa(), seed);
  } else if (config.optimizer.algorithm == "bso") {
    result = bso_minimize(f, space, config.build_bso(), seed);
  } else {
    fail(ErrorKind::SchemaError, "'optimizer.algorithm' must be cso, fpa, or "
                                 "bso, got '" +
                                     config.optimizer.algorithm + "'");
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;

  RunReport report;
  report.algorithm = config.optimizer.algorithm;
  report.seed = seed;
  report.population = config.optimizer.population;
  report.iterations = config.optimizer.max_iterations;
  report.evaluations = result.evaluations;
  report.best_fitness = result.best_value;
  report.wall_seconds = elapsed.count();
  report.best_weights = result.best_point;
  report.history = result.history;
  report.scenarios = evaluate_scenarios(engine, result.best_point);
  return report;
}

std::string format_plan_csv(const std::vector<double>& weights) {
  std::string out = "beamlet_index,weight\n";
  for (std::size_t b = 0; b < weights.size(); ++b) {
    out += std::to_string(b);
    out += ',';
    out += format_exact(weights[b]);
    out += '\n';
  }
  return out;
}

std::string format_convergence_csv(const std::vector<double>& history) {
  std::string out = "iteration,best_value\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_exact(history[i]);
    out += '\n';
  }
  return out;
}

std::string format_dvh_csv(const DoseGrid& dose, const Phantom& phantom) {
  std::string out = "structure,dose_gy,volume_fraction\n";
  for (StructureLabel label : kDvhStructures) {
    const DvhCurve curve = dvh(dose, phantom, label);
    const char* name = structure_name(label);
    for (std::size_t i = 0; i < curve.bin_edges_gy.size(); ++i) {
      out += name;
      out += ',';
      out += format_dose(curve.bin_edges_gy[i]);
      out += ',';
      out += format_dose(curve.volume_fraction[i]);
      out += '\n';
    }
  }
  return out;
}

std::string format_report(const RunReport& report) {
  std::string out;
  out += "algorithm = " + report.algorithm + "\n";
  out += "seed = " + std::to_string(report.seed) + "\n";
  out += "population = " + std::to_string(report.population) + "\n";
  out += "iterations = " + std::to_string(report.iterations) + "\n";
  out += "evaluations = " + std::to_string(report.evaluations) + "\n";
  out += "beamlets = " + std::to_string(report.best_weights.size()) + "\n";
  out += "best_fitness = " + format_exact(report.best_fitness) + "\n";
  std::string names;
  for (const ScenarioBlock& block : report.scenarios) {
    if (!names.empty()) names += ',';
    names += block.name;
  }
  out += "scenarios = " + names + "\n";
  for (const ScenarioBlock& block : report.scenarios) {
    const std::string prefix = "scenario." + block.name;
    std::string pdf;
    for (std::size_t i = 0; i < block.pdf.size(); ++i) {
      if (i > 0) pdf += ',';
      pdf += format_dose(block.pdf[i]);
    }
    out += prefix + ".pdf = " + pdf + "\n";
    for (StructureLabel label : kReportStructures) {
      const DoseStats& stats = block.stats[static_cast<std::size_t>(label)];
      const std::string key = prefix + "." + structure_name(label);
      out += key + ".mean_gy = " + format_dose(stats.mean_gy) + "\n";
      out += key + ".min_gy = " + format_dose(stats.min_gy) + "\n";
      out += key + ".max_gy = " + format_dose(stats.max_gy) + "\n";
      out += key + ".d95_gy = " + format_dose(stats.d95_gy) + "\n";
    }
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      fail(ErrorKind::IoError, "cannot create directory '" +
                                   target.parent_path().string() + "': " +
                                   ec.message());
    }
  }
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      fail(ErrorKind::IoError, "cannot open '" + temp.string() + "' for write");
    }
    out << content;
    out.flush();
    if (!out) {
      fail(ErrorKind::IoError, "write to '" + temp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fail(ErrorKind::IoError,
         "cannot move '" + temp.string() + "' into place: " + ec.message());
  }
}

RunReport run_optimize(const PlannerConfig& config, const std::string& out_dir) {
  const PlanningEngine engine = PlanningEngine::build(config);
  RunReport report = optimize_plan(config, engine);

  const fs::path dir(out_dir);
  write_file_atomic((dir / "plan.csv").string(),
                    format_plan_csv(report.best_weights));
  write_file_atomic((dir / "convergence.csv").string(),
                    format_convergence_csv(report.history));
  for (const ScenarioBlock& block : report.scenarios) {
    const DoseGrid dose = engine.influence().expected_dose(
        report.best_weights, RespiratoryPdf(block.pdf));
    write_file_atomic((dir / ("dvh_" + block.name + ".csv")).string(),
                      format_dvh_csv(dose, engine.phantom()));
  }
  write_file_atomic((dir / "report.txt").string(), format_report(report));
  return report;
}

void run_compare(const PlannerConfig& config, const std::string& out_dir) {
  const PlanningEngine engine = PlanningEngine::build(config);
  const std::array<std::string, 3> algorithms = {"cso", "fpa", "bso"};
  std::array<RunReport, 3> reports;
  for (std::size_t k = 0; k < algorithms.size(); ++k) {
    PlannerConfig variant = config;
    variant.optimizer.algorithm = algorithms[k];
    reports[k] = optimize_plan(variant, engine);
  }

  std::string out = "structure,cso,fpa,bso\n";
  for (StructureLabel label :
       {StructureLabel::Tumor, StructureLabel::LeftLung, StructureLabel::Heart}) {
    out += structure_name(label);
    for (const RunReport& report : reports) {
      out += ',';
      out += format_dose(
          report.scenarios[0].stats[static_cast<std::size_t>(label)].mean_gy);
    }
    out += '\n';
  }
  out += "fitness";
  for (const RunReport& report : reports) {
    out += ',';
    out += format_dose(report.best_fitness);
  }
  out += '\n';

  write_file_atomic((fs::path(out_dir) / "comparison.csv").string(), out);
}

std::vector<double> read_plan_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorKind::IoError, "cannot open weights file '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorKind::FileFormat, "weights file '" + path + "' is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "beamlet_index,weight") {
    fail(ErrorKind::FileFormat,
         "weights file must start with header 'beamlet_index,weight'");
  }
  std::vector<double> weights;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      fail(ErrorKind::FileFormat,
           "weights row " + std::to_string(row) + " must be 'index,weight'");
    }
    const std::string index_text = line.substr(0, comma);
    const std::string weight_text = line.substr(comma + 1);
    char* end = nullptr;
    const unsigned long index = std::strtoul(index_text.c_str(), &end, 10);
    if (end == index_text.c_str() || *end != '\0' || index != row) {
      fail(ErrorKind::FileFormat,
           "weights row " + std::to_string(row) +
               " has beamlet_index '" + index_text +
               "', expected ascending indices from 0");
    }
    end = nullptr;
    const double weight = std::strtod(weight_text.c_str(), &end);
    if (end == weight_text.c_str() || *end != '\0') {
      fail(ErrorKind::FileFormat, "weights row " + std::to_string(row) +
                                      " has non-numeric weight '" +
                                      weight_text + "'");
    }
    weights.push_back(weight);
    ++row;
  }
  if (weights.empty()) {
    fail(ErrorKind::FileFormat, "weights file '" + path + "' has no rows");
  }
  return weights;
}

void run_dvh(const PlannerConfig& config, const std::string& weights_path,
             const std::string& out_dir) {
  const PlanningEngine engine = PlanningEngine::build(config);
  const std::vector<double> weights = read_plan_csv(weights_path);
  if (weights.size() !=
      static_cast<std::size_t>(engine.influence().beamlet_count())) {
    fail(ErrorKind::DimensionMismatch,
         "weights file has " + std::to_string(weights.size()) +
             " beamlets, configuration defines " +
             std::to_string(engine.influence().beamlet_count()));
  }
  const FluencePlan plan(weights, engine.w_max());
  const DoseGrid dose = engine.influence().expected_dose(
      plan.weights(), engine.uncertainty().nominal());
  write_file_atomic((fs::path(out_dir) / "dvh_nominal.csv").string(),
                    format_dvh_csv(dose, engine.phantom()));
}

void run_phantom(const PlannerConfig& config, const std::string& out_dir) {
  config.validate();
  const Phantom phantom = config.build_phantom();
  write_file_atomic((fs::path(out_dir) / "phantom.csv").string(),
                    phantom.to_label_csv());
}

}  // namespace rtplan
