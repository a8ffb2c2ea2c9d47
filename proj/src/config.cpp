#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "levy.hpp"

namespace rtplan {

using json = nlohmann::json;

namespace {

std::string join_key(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void require_object(const json& node, const std::string& name) {
  if (!node.is_object()) {
    fail(ErrorKind::SchemaError, "'" + name + "' must be an object");
  }
}

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(ErrorKind::SchemaError,
           "unknown key '" + join_key(prefix, item.key()) + "'");
    }
  }
}

double get_number(const json& obj, const std::string& prefix, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& node = obj.at(key);
  if (!node.is_number()) {
    fail(ErrorKind::SchemaError,
         "'" + join_key(prefix, key) + "' must be a number");
  }
  return node.get<double>();
}

int get_int(const json& obj, const std::string& prefix, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& node = obj.at(key);
  if (!node.is_number_integer()) {
    fail(ErrorKind::SchemaError,
         "'" + join_key(prefix, key) + "' must be an integer");
  }
  return node.get<int>();
}

std::uint64_t get_u64(const json& obj, const std::string& prefix,
                      const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& node = obj.at(key);
  if (!node.is_number_integer() ||
      (node.is_number_integer() && !node.is_number_unsigned() &&
       node.get<std::int64_t>() < 0)) {
    fail(ErrorKind::SchemaError,
         "'" + join_key(prefix, key) + "' must be a non-negative integer");
  }
  return node.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& prefix,
                       const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& node = obj.at(key);
  if (!node.is_string()) {
    fail(ErrorKind::SchemaError,
         "'" + join_key(prefix, key) + "' must be a string");
  }
  return node.get<std::string>();
}

std::vector<double> get_number_array(const json& obj, const std::string& prefix,
                                     const char* key,
                                     const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& node = obj.at(key);
  if (!node.is_array()) {
    fail(ErrorKind::SchemaError,
         "'" + join_key(prefix, key) + "' must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(node.size());
  for (const json& item : node) {
    if (!item.is_number()) {
      fail(ErrorKind::SchemaError,
           "'" + join_key(prefix, key) + "' must contain only numbers");
    }
    out.push_back(item.get<double>());
  }
  return out;
}

void parse_phantom(const json& node, PhantomSection& out) {
  require_object(node, "phantom");
  check_keys(node, "phantom", {"rows", "cols", "voxel_size_mm", "preset"});
  out.rows = get_int(node, "phantom", "rows", out.rows);
  out.cols = get_int(node, "phantom", "cols", out.cols);
  out.voxel_size_mm =
      get_number(node, "phantom", "voxel_size_mm", out.voxel_size_mm);
  out.preset = get_string(node, "phantom", "preset", out.preset);
}

void parse_beams(const json& node, BeamSection& out) {
  require_object(node, "beams");
  check_keys(node, "beams",
             {"angles_deg", "beamlets_per_angle", "beamlet_width_mm",
              "mu_per_mm", "sigma_factor", "w_max"});
  out.angles_deg = get_number_array(node, "beams", "angles_deg", out.angles_deg);
  out.beamlets_per_angle =
      get_int(node, "beams", "beamlets_per_angle", out.beamlets_per_angle);
  out.beamlet_width_mm =
      get_number(node, "beams", "beamlet_width_mm", out.beamlet_width_mm);
  out.mu_per_mm = get_number(node, "beams", "mu_per_mm", out.mu_per_mm);
  out.sigma_factor = get_number(node, "beams", "sigma_factor", out.sigma_factor);
  out.w_max = get_number(node, "beams", "w_max", out.w_max);
}

void parse_motion(const json& node, MotionSection& out) {
  require_object(node, "motion");
  check_keys(node, "motion",
             {"offsets_mm", "nominal", "lower_bars", "upper_bars",
              "active_states", "epsilon", "delta_mm"});
  out.offsets_mm = get_number_array(node, "motion", "offsets_mm", out.offsets_mm);
  out.nominal = get_number_array(node, "motion", "nominal", out.nominal);
  out.lower_bars = get_number_array(node, "motion", "lower_bars", out.lower_bars);
  out.upper_bars = get_number_array(node, "motion", "upper_bars", out.upper_bars);
  if (node.contains("active_states")) {
    const json& active = node.at("active_states");
    if (!active.is_array()) {
      fail(ErrorKind::SchemaError,
           "'motion.active_states' must be an array of state indices");
    }
    out.active_all = false;
    out.active_states.clear();
    for (const json& item : active) {
      if (!item.is_number_integer() || item.get<std::int64_t>() < 0) {
        fail(ErrorKind::SchemaError,
             "'motion.active_states' must contain non-negative integers");
      }
      out.active_states.push_back(item.get<std::size_t>());
    }
  }
  if (node.contains("epsilon")) {
    const json& eps = node.at("epsilon");
    if (eps.is_null()) {
      out.epsilon = std::numeric_limits<double>::infinity();
    } else if (eps.is_number()) {
      out.epsilon = eps.get<double>();
    } else {
      fail(ErrorKind::SchemaError,
           "'motion.epsilon' must be a number or null (disabled)");
    }
  }
  out.delta_mm = get_number(node, "motion", "delta_mm", out.delta_mm);
}

void parse_goals(const json& node, ClinicalGoals& out) {
  require_object(node, "goals");
  check_keys(node, "goals",
             {"tumor_low_gy", "tumor_high_gy", "w_under", "w_over", "w_lung",
              "w_heart"});
  out.tumor_low_gy = get_number(node, "goals", "tumor_low_gy", out.tumor_low_gy);
  out.tumor_high_gy =
      get_number(node, "goals", "tumor_high_gy", out.tumor_high_gy);
  out.w_under = get_number(node, "goals", "w_under", out.w_under);
  out.w_over = get_number(node, "goals", "w_over", out.w_over);
  out.w_lung = get_number(node, "goals", "w_lung", out.w_lung);
  out.w_heart = get_number(node, "goals", "w_heart", out.w_heart);
}

void parse_optimizer(const json& node, OptimizerSection& out) {
  require_object(node, "optimizer");
  check_keys(node, "optimizer",
             {"algorithm", "seed", "population", "max_iterations", "levy",
              "cso", "fpa", "bso"});
  out.algorithm = get_string(node, "optimizer", "algorithm", out.algorithm);
  out.seed = get_u64(node, "optimizer", "seed", out.seed);
  out.population = get_int(node, "optimizer", "population", out.population);
  out.max_iterations =
      get_int(node, "optimizer", "max_iterations", out.max_iterations);
  if (node.contains("levy")) {
    const json& levy = node.at("levy");
    require_object(levy, "optimizer.levy");
    check_keys(levy, "optimizer.levy", {"lambda", "alpha_factor", "s0"});
    out.levy.lambda =
        get_number(levy, "optimizer.levy", "lambda", out.levy.lambda);
    out.levy.alpha_factor = get_number(levy, "optimizer.levy", "alpha_factor",
                                       out.levy.alpha_factor);
    out.levy.s0 = get_number(levy, "optimizer.levy", "s0", out.levy.s0);
  }
  if (node.contains("cso")) {
    const json& cso = node.at("cso");
    require_object(cso, "optimizer.cso");
    check_keys(cso, "optimizer.cso", {"pa"});
    out.cso.pa = get_number(cso, "optimizer.cso", "pa", out.cso.pa);
  }
  if (node.contains("fpa")) {
    const json& fpa = node.at("fpa");
    require_object(fpa, "optimizer.fpa");
    check_keys(fpa, "optimizer.fpa", {"switch_p"});
    out.fpa.switch_p =
        get_number(fpa, "optimizer.fpa", "switch_p", out.fpa.switch_p);
  }
  if (node.contains("bso")) {
    const json& bso = node.at("bso");
    require_object(bso, "optimizer.bso");
    check_keys(bso, "optimizer.bso",
               {"f_min", "f_max", "loudness_a0", "a_min", "pulse_r0",
                "alpha_loud", "gamma_pulse"});
    out.bso.f_min = get_number(bso, "optimizer.bso", "f_min", out.bso.f_min);
    out.bso.f_max = get_number(bso, "optimizer.bso", "f_max", out.bso.f_max);
    out.bso.loudness_a0 =
        get_number(bso, "optimizer.bso", "loudness_a0", out.bso.loudness_a0);
    out.bso.a_min = get_number(bso, "optimizer.bso", "a_min", out.bso.a_min);
    out.bso.pulse_r0 =
        get_number(bso, "optimizer.bso", "pulse_r0", out.bso.pulse_r0);
    out.bso.alpha_loud =
        get_number(bso, "optimizer.bso", "alpha_loud", out.bso.alpha_loud);
    out.bso.gamma_pulse =
        get_number(bso, "optimizer.bso", "gamma_pulse", out.bso.gamma_pulse);
  }
}

[[noreturn]] void rethrow_as_schema(const std::string& section,
                                    const Error& e) {
  fail(ErrorKind::SchemaError, section + ": " + e.what());
}

}  // namespace

void MotionSection::resolve_defaults() {
  const std::size_t n = offsets_mm.size();
  if (nominal.empty()) {
    if (n == 5) {
      nominal = {0.1, 0.2, 0.4, 0.2, 0.1};
    } else if (n > 0) {
      nominal.assign(n, 1.0 / static_cast<double>(n));
    }
  }
  if (lower_bars.empty() && nominal.size() == n) {
    lower_bars.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      lower_bars[i] = std::min(0.1, std::max(0.0, nominal[i]));
    }
  }
  if (upper_bars.empty() && nominal.size() == n) {
    upper_bars.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      upper_bars[i] = std::min(0.1, std::max(0.0, 1.0 - nominal[i]));
    }
  }
  if (active_all) {
    active_states.resize(n);
    for (std::size_t i = 0; i < n; ++i) active_states[i] = i;
  }
}

PlannerConfig PlannerConfig::defaults() {
  PlannerConfig config;
  config.motion.resolve_defaults();
  config.validate();
  return config;
}

PlannerConfig PlannerConfig::parse_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
  if (!root.is_object()) {
    fail(ErrorKind::SchemaError, "configuration root must be an object");
  }
  check_keys(root, "", {"phantom", "beams", "motion", "goals", "optimizer"});

  PlannerConfig config;
  if (root.contains("phantom")) parse_phantom(root.at("phantom"), config.phantom);
  if (root.contains("beams")) parse_beams(root.at("beams"), config.beams);
  if (root.contains("motion")) parse_motion(root.at("motion"), config.motion);
  if (root.contains("goals")) parse_goals(root.at("goals"), config.goals);
  if (root.contains("optimizer")) {
    parse_optimizer(root.at("optimizer"), config.optimizer);
  }
  config.motion.resolve_defaults();
  config.validate();
  return config;
}

PlannerConfig PlannerConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorKind::IoError, "cannot open config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    fail(ErrorKind::IoError, "cannot read config file '" + path + "'");
  }
  return parse_text(buffer.str());
}

void PlannerConfig::validate() const {
  if (phantom.rows < 16 || phantom.cols < 16) {
    fail(ErrorKind::SchemaError,
         "'phantom.rows'/'phantom.cols' must be >= 16, got " +
             std::to_string(phantom.rows) + "x" + std::to_string(phantom.cols));
  }
  if (!(phantom.voxel_size_mm > 0.0)) {
    fail(ErrorKind::SchemaError, "'phantom.voxel_size_mm' must be positive");
  }
  if (phantom.preset != "default") {
    fail(ErrorKind::SchemaError,
         "'phantom.preset' names an unknown preset '" + phantom.preset + "'");
  }

  try {
    build_beams().validate();
    build_kernel().validate();
  } catch (const Error& e) {
    rethrow_as_schema("beams", e);
  }
  if (!(beams.w_max > 0.0)) {
    fail(ErrorKind::SchemaError, "'beams.w_max' must be positive");
  }

  const std::size_t n = motion.offsets_mm.size();
  if (motion.nominal.size() != n) {
    fail(ErrorKind::SchemaError,
         "'motion.nominal' must have one entry per 'motion.offsets_mm' state");
  }
  if (motion.lower_bars.size() != n || motion.upper_bars.size() != n) {
    fail(ErrorKind::SchemaError,
         "'motion.lower_bars' and 'motion.upper_bars' must have one entry per "
         "'motion.offsets_mm' state");
  }
  if (!(motion.delta_mm >= 0.0)) {
    fail(ErrorKind::SchemaError, "'motion.delta_mm' must be >= 0");
  }
  if (!(motion.epsilon >= 0.0)) {
    fail(ErrorKind::SchemaError, "'motion.epsilon' must be >= 0");
  }
  try {
    build_uncertainty();
  } catch (const Error& e) {
    rethrow_as_schema("motion", e);
  }

  try {
    goals.validate();
  } catch (const Error& e) {
    rethrow_as_schema("goals (tumor_low_gy/tumor_high_gy band or weights)", e);
  }

  const OptimizerSection& opt = optimizer;
  if (opt.algorithm != "cso" && opt.algorithm != "fpa" &&
      opt.algorithm != "bso") {
    fail(ErrorKind::SchemaError,
         "'optimizer.algorithm' must be cso, fpa, or bso, got '" +
             opt.algorithm + "'");
  }
  if (opt.population < 2) {
    fail(ErrorKind::SchemaError, "'optimizer.population' must be >= 2");
  }
  if (opt.max_iterations < 0) {
    fail(ErrorKind::SchemaError, "'optimizer.max_iterations' must be >= 0");
  }
  try {
    levy_sigma_u(opt.levy.lambda);
  } catch (const Error& e) {
    rethrow_as_schema("'optimizer.levy.lambda'", e);
  }
  if (!(opt.levy.alpha_factor >= 0.0) || !std::isfinite(opt.levy.alpha_factor)) {
    fail(ErrorKind::SchemaError, "'optimizer.levy.alpha_factor' must be >= 0");
  }
  if (!(opt.levy.s0 >= 0.0) || !std::isfinite(opt.levy.s0)) {
    fail(ErrorKind::SchemaError, "'optimizer.levy.s0' must be >= 0");
  }
  if (!(opt.cso.pa >= 0.0) || !(opt.cso.pa <= 1.0)) {
    fail(ErrorKind::SchemaError, "'optimizer.cso.pa' = " +
                                     std::to_string(opt.cso.pa) +
                                     " outside [0, 1]");
  }
  if (!(opt.fpa.switch_p >= 0.0) || !(opt.fpa.switch_p <= 1.0)) {
    fail(ErrorKind::SchemaError, "'optimizer.fpa.switch_p' = " +
                                     std::to_string(opt.fpa.switch_p) +
                                     " outside [0, 1]");
  }
  try {
    build_bso().validate();
  } catch (const Error& e) {
    rethrow_as_schema("optimizer.bso", e);
  }
}

Phantom PlannerConfig::build_phantom() const {
  return Phantom::build(phantom.rows, phantom.cols, phantom.voxel_size_mm,
                        phantom.preset);
}

BeamletSet PlannerConfig::build_beams() const {
  BeamletSet set;
  set.angles_deg = beams.angles_deg;
  set.beamlets_per_angle = beams.beamlets_per_angle;
  set.beamlet_width_mm = beams.beamlet_width_mm;
  return set;
}

DoseKernelParams PlannerConfig::build_kernel() const {
  DoseKernelParams kernel;
  kernel.mu_per_mm = beams.mu_per_mm;
  kernel.sigma_factor = beams.sigma_factor;
  return kernel;
}

MotionStates PlannerConfig::build_states() const {
  return MotionStates(motion.offsets_mm);
}

UncertaintySet PlannerConfig::build_uncertainty() const {
  ErrorBars bars;
  bars.lower = motion.lower_bars;
  bars.upper = motion.upper_bars;
  SmoothnessBound smoothness;
  smoothness.epsilon = motion.epsilon;
  smoothness.delta_mm = motion.delta_mm;
  return UncertaintySet(build_states(), RespiratoryPdf(motion.nominal), bars,
                        motion.active_states, smoothness);
}

UncertaintySet PlannerConfig::build_nominal_only_uncertainty() const {
  ErrorBars bars;
  bars.lower.assign(motion.offsets_mm.size(), 0.0);
  bars.upper.assign(motion.offsets_mm.size(), 0.0);
  return UncertaintySet(build_states(), RespiratoryPdf(motion.nominal), bars,
                        motion.active_states, SmoothnessBound{});
}

namespace {

LevyConfig build_levy(const LevySection& levy, double w_max) {
  LevyConfig config;
  config.lambda = levy.lambda;
  config.alpha_step = {levy.alpha_factor * w_max};
  config.s0 = levy.s0;
  return config;
}

}  // namespace

CsoParams PlannerConfig::build_cso() const {
  CsoParams params;
  params.n_nests = optimizer.population;
  params.pa = optimizer.cso.pa;
  params.max_iterations = optimizer.max_iterations;
  params.levy = build_levy(optimizer.levy, beams.w_max);
  return params;
}

FpaParams PlannerConfig::build_fpa() const {
  FpaParams params;
  params.n_flowers = optimizer.population;
  params.switch_p = optimizer.fpa.switch_p;
  params.max_iterations = optimizer.max_iterations;
  params.levy = build_levy(optimizer.levy, beams.w_max);
  return params;
}

BsoParams PlannerConfig::build_bso() const {
  BsoParams params;
  params.n_bats = optimizer.population;
  params.f_min = optimizer.bso.f_min;
  params.f_max = optimizer.bso.f_max;
  params.loudness_a0 = optimizer.bso.loudness_a0;
  params.a_min = optimizer.bso.a_min;
  params.pulse_r0 = optimizer.bso.pulse_r0;
  params.alpha_loud = optimizer.bso.alpha_loud;
  params.gamma_pulse = optimizer.bso.gamma_pulse;
  params.max_iterations = optimizer.max_iterations;
  return params;
}

}  // namespace rtplan
