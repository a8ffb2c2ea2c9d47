#include "rtplan/rtplan.h"

#include <cstring>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "planner.hpp"

struct rtplan_config {
  rtplan::PlannerConfig cfg;
};

struct rtplan_result {
  rtplan::RunReport report;
};

namespace {

thread_local std::string g_last_error = "no error";

rtplan_status status_from(const rtplan::Error& e) {
  using rtplan::ErrorKind;
  switch (e.kind()) {
    case ErrorKind::ParseError:
    case ErrorKind::FileFormat:
      return RTPLAN_ERROR_PARSE;
    case ErrorKind::SchemaError:
      return RTPLAN_ERROR_SCHEMA;
    case ErrorKind::InvalidArgument:
      return RTPLAN_ERROR_INVALID_ARGUMENT;
    case ErrorKind::ObjectiveNonFinite:
    case ErrorKind::SamplingExhausted:
      return RTPLAN_ERROR_RUNTIME;
    case ErrorKind::IoError:
      return RTPLAN_ERROR_IO;
    default:
      return RTPLAN_ERROR_DOMAIN;
  }
}

rtplan_status set_error(rtplan_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

rtplan_status invalid(const char* message) {
  return set_error(RTPLAN_ERROR_INVALID_ARGUMENT, message);
}

template <typename Fn>
rtplan_status guarded(Fn&& fn) {
  try {
    fn();
    return RTPLAN_OK;
  } catch (const rtplan::Error& e) {
    return set_error(status_from(e), e.what());
  } catch (const std::exception& e) {
    return set_error(RTPLAN_ERROR_RUNTIME, e.what());
  } catch (...) {
    return set_error(RTPLAN_ERROR_RUNTIME, "unknown failure");
  }
}

const rtplan::ScenarioBlock* find_scenario(const rtplan_result* result,
                                           const char* name) {
  for (const rtplan::ScenarioBlock& block : result->report.scenarios) {
    if (block.name == name) return &block;
  }
  return nullptr;
}

rtplan_status copy_values(const std::vector<double>& values, double* buffer,
                          int32_t capacity) {
  if (buffer == nullptr) return invalid("null buffer");
  if (capacity < static_cast<int32_t>(values.size())) {
    return invalid("buffer capacity too small");
  }
  std::memcpy(buffer, values.data(), values.size() * sizeof(double));
  return RTPLAN_OK;
}

}  // namespace

extern "C" {

const char* rtplan_version(void) { return "1.0.0"; }

const char* rtplan_last_error(void) { return g_last_error.c_str(); }

rtplan_status rtplan_config_default(rtplan_config** out) {
  if (out == nullptr) return invalid("null output pointer");
  *out = nullptr;
  return guarded([&] {
    *out = new rtplan_config{rtplan::PlannerConfig::defaults()};
  });
}

rtplan_status rtplan_config_from_text(const char* text, rtplan_config** out) {
  if (text == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new rtplan_config{rtplan::PlannerConfig::parse_text(text)};
  });
}

rtplan_status rtplan_config_from_file(const char* path, rtplan_config** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new rtplan_config{rtplan::PlannerConfig::parse_file(path)};
  });
}

void rtplan_config_free(rtplan_config* config) { delete config; }

rtplan_status rtplan_config_set_seed(rtplan_config* config, uint64_t seed) {
  if (config == nullptr) return invalid("null config");
  config->cfg.optimizer.seed = seed;
  return RTPLAN_OK;
}

rtplan_status rtplan_config_set_algorithm(rtplan_config* config,
                                          const char* algorithm) {
  if (config == nullptr || algorithm == nullptr) return invalid("null argument");
  const std::string name = algorithm;
  if (name != "cso" && name != "fpa" && name != "bso") {
    return invalid("algorithm must be cso, fpa, or bso");
  }
  config->cfg.optimizer.algorithm = name;
  return RTPLAN_OK;
}

rtplan_status rtplan_config_beamlet_count(const rtplan_config* config,
                                          int32_t* out) {
  if (config == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] { *out = config->cfg.build_beams().total(); });
}

rtplan_status rtplan_run_phantom(const rtplan_config* config,
                                 const char* out_dir) {
  if (config == nullptr || out_dir == nullptr) return invalid("null argument");
  return guarded([&] { rtplan::run_phantom(config->cfg, out_dir); });
}

rtplan_status rtplan_run_optimize(const rtplan_config* config,
                                  const char* out_dir,
                                  rtplan_result** out_result) {
  if (config == nullptr) return invalid("null config");
  if (out_result != nullptr) *out_result = nullptr;
  return guarded([&] {
    rtplan::RunReport report =
        out_dir != nullptr ? rtplan::run_optimize(config->cfg, out_dir)
                           : rtplan::optimize_plan(config->cfg);
    if (out_result != nullptr) {
      *out_result = new rtplan_result{std::move(report)};
    }
  });
}

rtplan_status rtplan_run_compare(const rtplan_config* config,
                                 const char* out_dir) {
  if (config == nullptr || out_dir == nullptr) return invalid("null argument");
  return guarded([&] { rtplan::run_compare(config->cfg, out_dir); });
}

rtplan_status rtplan_run_dvh(const rtplan_config* config,
                             const char* weights_csv_path,
                             const char* out_dir) {
  if (config == nullptr || weights_csv_path == nullptr || out_dir == nullptr) {
    return invalid("null argument");
  }
  return guarded(
      [&] { rtplan::run_dvh(config->cfg, weights_csv_path, out_dir); });
}

void rtplan_result_free(rtplan_result* result) { delete result; }

rtplan_status rtplan_result_algorithm(const rtplan_result* result,
                                      const char** out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  *out = result->report.algorithm.c_str();
  return RTPLAN_OK;
}

rtplan_status rtplan_result_seed(const rtplan_result* result, uint64_t* out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  *out = result->report.seed;
  return RTPLAN_OK;
}

rtplan_status rtplan_result_best_fitness(const rtplan_result* result,
                                         double* out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  *out = result->report.best_fitness;
  return RTPLAN_OK;
}

rtplan_status rtplan_result_evaluations(const rtplan_result* result,
                                        uint64_t* out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  *out = result->report.evaluations;
  return RTPLAN_OK;
}

rtplan_status rtplan_result_wall_seconds(const rtplan_result* result,
                                         double* out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  *out = result->report.wall_seconds;
  return RTPLAN_OK;
}

rtplan_status rtplan_result_weight_count(const rtplan_result* result,
                                         int32_t* out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  *out = static_cast<int32_t>(result->report.best_weights.size());
  return RTPLAN_OK;
}

rtplan_status rtplan_result_weights(const rtplan_result* result,
                                    double* buffer, int32_t capacity) {
  if (result == nullptr) return invalid("null result");
  return copy_values(result->report.best_weights, buffer, capacity);
}

rtplan_status rtplan_result_history_length(const rtplan_result* result,
                                           int32_t* out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  *out = static_cast<int32_t>(result->report.history.size());
  return RTPLAN_OK;
}

rtplan_status rtplan_result_history(const rtplan_result* result,
                                    double* buffer, int32_t capacity) {
  if (result == nullptr) return invalid("null result");
  return copy_values(result->report.history, buffer, capacity);
}

rtplan_status rtplan_result_scenario_count(const rtplan_result* result,
                                           int32_t* out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  *out = static_cast<int32_t>(result->report.scenarios.size());
  return RTPLAN_OK;
}

rtplan_status rtplan_result_scenario_name(const rtplan_result* result,
                                          int32_t index, const char** out) {
  if (result == nullptr || out == nullptr) return invalid("null argument");
  if (index < 0 ||
      index >= static_cast<int32_t>(result->report.scenarios.size())) {
    return invalid("scenario index out of range");
  }
  *out = result->report.scenarios[index].name.c_str();
  return RTPLAN_OK;
}

rtplan_status rtplan_result_stat(const rtplan_result* result,
                                 const char* scenario, const char* structure,
                                 const char* stat, double* out) {
  if (result == nullptr || scenario == nullptr || structure == nullptr ||
      stat == nullptr || out == nullptr) {
    return invalid("null argument");
  }
  const rtplan::ScenarioBlock* block = find_scenario(result, scenario);
  if (block == nullptr) {
    return invalid(("unknown scenario '" + std::string(scenario) +
                    "' (not in this result)")
                       .c_str());
  }
  return guarded([&] {
    const rtplan::StructureLabel label =
        rtplan::structure_from_name(structure);
    const rtplan::DoseStats& stats =
        block->stats[static_cast<std::size_t>(label)];
    const std::string which = stat;
    if (which == "mean_gy") {
      *out = stats.mean_gy;
    } else if (which == "min_gy") {
      *out = stats.min_gy;
    } else if (which == "max_gy") {
      *out = stats.max_gy;
    } else if (which == "d95_gy") {
      *out = stats.d95_gy;
    } else {
      rtplan::fail(rtplan::ErrorKind::InvalidArgument,
                   "unknown stat '" + which +
                       "'; expected mean_gy, min_gy, max_gy, or d95_gy");
    }
  });
}

}  // extern "C"
