#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dose.hpp"
#include "evaluation.hpp"
#include "optimizers.hpp"
#include "phantom.hpp"
#include "uncertainty.hpp"

namespace rtplan {

// Configuration document: JSON with // and /* */ comments allowed, strict
// schema (unknown keys are rejected), defaults applied per key. The bundled
// example config documents every key and default.
struct PhantomSection {
  int rows = 64;
  int cols = 64;
  double voxel_size_mm = 3.0;
  std::string preset = "default";
};

struct BeamSection {
  std::vector<double> angles_deg = {0.0, 72.0, 144.0, 216.0, 288.0};
  int beamlets_per_angle = 16;
  double beamlet_width_mm = 5.0;
  double mu_per_mm = 0.005;
  double sigma_factor = 0.6;
  double w_max = 10.0;
};

struct MotionSection {
  std::vector<double> offsets_mm = {-10.0, -5.0, 0.0, 5.0, 10.0};
  // Empty vectors mean "use the documented default": the peaked 5-state pdf
  // for 5 states (uniform otherwise), and bars of 0.1 clipped to keep the
  // pdf inside [0, 1]. resolve_defaults() fills them in.
  std::vector<double> nominal;
  std::vector<double> lower_bars;
  std::vector<double> upper_bars;
  // Empty active_states with active_all = true means every state.
  std::vector<std::size_t> active_states;
  bool active_all = true;
  double epsilon = std::numeric_limits<double>::infinity();
  double delta_mm = 0.0;

  void resolve_defaults();
};

struct LevySection {
  double lambda = 1.5;
  double alpha_factor = 0.01;
  double s0 = 0.0;
};

struct CsoSection {
  double pa = 0.25;
};

struct FpaSection {
  double switch_p = 0.8;
};

struct BsoSection {
  double f_min = 0.0;
  double f_max = 2.0;
  double loudness_a0 = 1.0;
  double a_min = 0.05;
  double pulse_r0 = 0.5;
  double alpha_loud = 0.9;
  double gamma_pulse = 0.9;
};

struct OptimizerSection {
  std::string algorithm = "cso";
  std::uint64_t seed = 1;
  int population = 25;
  int max_iterations = 2000;
  LevySection levy;
  CsoSection cso;
  FpaSection fpa;
  BsoSection bso;
};

struct PlannerConfig {
  PhantomSection phantom;
  BeamSection beams;
  MotionSection motion;
  ClinicalGoals goals;
  OptimizerSection optimizer;

  static PlannerConfig defaults();
  static PlannerConfig parse_text(const std::string& text);
  static PlannerConfig parse_file(const std::string& path);

  // Full cross-field validation; SchemaError messages name the offending
  // key. parse_text/parse_file run this automatically.
  void validate() const;

  Phantom build_phantom() const;
  BeamletSet build_beams() const;
  DoseKernelParams build_kernel() const;
  MotionStates build_states() const;
  UncertaintySet build_uncertainty() const;
  // Same set with all bars collapsed to zero (nominal-only planning).
  UncertaintySet build_nominal_only_uncertainty() const;
  CsoParams build_cso() const;
  FpaParams build_fpa() const;
  BsoParams build_bso() const;
};

}  // namespace rtplan
