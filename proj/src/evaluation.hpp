#pragma once

#include <cstddef>
#include <vector>

#include "dose.hpp"
#include "phantom.hpp"
#include "uncertainty.hpp"

namespace rtplan {

// Planning objective weights around the tumor dose band [low, high] Gy.
struct ClinicalGoals {
  double tumor_low_gy = 72.0;
  double tumor_high_gy = 80.0;
  double w_under = 100.0;
  double w_over = 50.0;
  double w_lung = 1.0;
  double w_heart = 2.0;

  void validate() const;
  double band_mid_gy() const { return 0.5 * (tumor_low_gy + tumor_high_gy); }
};

// Cumulative dose-volume histogram: fraction of structure voxels receiving
// at least each threshold dose, on a fixed 0.1 Gy threshold grid.
struct DvhCurve {
  std::vector<double> bin_edges_gy;
  std::vector<double> volume_fraction;
};

struct DoseStats {
  double mean_gy = 0.0;
  double min_gy = 0.0;
  double max_gy = 0.0;
  double d95_gy = 0.0;
};

DvhCurve dvh(const DoseGrid& dose, const Phantom& phantom,
             StructureLabel structure);

DoseStats dose_stats(const DoseGrid& dose, const Phantom& phantom,
                     StructureLabel structure);

// penalty = w_under * mean_t[max(0, low - d)^2]
//         + w_over  * mean_t[max(0, d - high)^2]
//         + w_lung * mean_lung(d) + w_heart * mean_heart(d)
// with mean_t taken over tumor voxels.
double clinical_penalty(const DoseGrid& dose, const Phantom& phantom,
                        const ClinicalGoals& goals);

// Mean tumor dose for each motion state under the given plan; these are the
// per-state values handed to the worst-case pdf solver, so the minimizing
// scenario underdoses the tumor and the maximizing one overdoses it.
std::vector<double> per_state_mean_tumor_dose(const DoseInfluence& influence,
                                              const Phantom& phantom,
                                              const std::vector<double>& weights);

// Reference robust objective: the worst clinical penalty over the scenario
// bundle [nominal, underdosing extreme, overdosing extreme].
double robust_fitness(const std::vector<double>& weights,
                      const DoseInfluence& influence, const Phantom& phantom,
                      const UncertaintySet& set, const ClinicalGoals& goals);

// Precomputed evaluator for optimizer loops. Collapses the influence data
// to the structure voxels actually used by the penalty (per-state tumor
// blocks, per-state OAR column sums), which cuts an evaluation from a full
// grid pass to a few small dense products. Agrees with robust_fitness.
class RobustObjective {
public:
  RobustObjective(const DoseInfluence& influence, const Phantom& phantom,
                  const UncertaintySet& set, const ClinicalGoals& goals);

  double operator()(const std::vector<double>& weights) const;
  std::size_t beamlet_count() const { return n_beamlets_; }

private:
  const UncertaintySet* set_;
  ClinicalGoals goals_;
  std::size_t n_states_ = 0;
  std::size_t n_beamlets_ = 0;
  std::size_t n_tumor_ = 0;
  std::size_t n_lung_ = 0;
  std::size_t n_heart_ = 0;
  // tumor_mat_[x] is row-major n_tumor x n_beamlets for motion state x.
  std::vector<std::vector<double>> tumor_mat_;
  std::vector<std::vector<double>> lung_colsum_;
  std::vector<std::vector<double>> heart_colsum_;
};

}  // namespace rtplan
