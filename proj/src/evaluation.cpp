#include "evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace rtplan {

void ClinicalGoals::validate() const {
  if (!(tumor_low_gy > 0.0) || !(tumor_low_gy < tumor_high_gy)) {
    fail(ErrorKind::InvalidArgument,
         "tumor band needs 0 < tumor_low_gy < tumor_high_gy, got [" +
             std::to_string(tumor_low_gy) + ", " +
             std::to_string(tumor_high_gy) + "]");
  }
  for (double w : {w_under, w_over, w_lung, w_heart}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::InvalidArgument, "penalty weights must be >= 0");
    }
  }
}

namespace {

std::vector<double> structure_doses(const DoseGrid& dose,
                                    const Phantom& phantom,
                                    StructureLabel structure) {
  const auto& voxels = phantom.structure_voxels(structure);
  if (voxels.empty()) {
    fail(ErrorKind::EmptyStructure,
         std::string("phantom has no '") + structure_name(structure) +
             "' voxels");
  }
  std::vector<double> doses;
  doses.reserve(voxels.size());
  for (std::size_t v : voxels) doses.push_back(dose[v]);
  return doses;
}

double mean_dose(const DoseGrid& dose, const Phantom& phantom,
                 StructureLabel structure) {
  const auto& voxels = phantom.structure_voxels(structure);
  if (voxels.empty()) {
    fail(ErrorKind::EmptyStructure,
         std::string("phantom has no '") + structure_name(structure) +
             "' voxels");
  }
  double sum = 0.0;
  for (std::size_t v : voxels) sum += dose[v];
  return sum / static_cast<double>(voxels.size());
}

}  // namespace

DvhCurve dvh(const DoseGrid& dose, const Phantom& phantom,
             StructureLabel structure) {
  std::vector<double> doses = structure_doses(dose, phantom, structure);
  std::sort(doses.begin(), doses.end());
  const double max_dose = doses.back();
  const long last_edge = static_cast<long>(std::ceil(max_dose)) * 10;

  DvhCurve curve;
  curve.bin_edges_gy.reserve(last_edge + 1);
  curve.volume_fraction.reserve(last_edge + 1);
  const double n = static_cast<double>(doses.size());
  for (long i = 0; i <= last_edge; ++i) {
    const double edge = static_cast<double>(i) / 10.0;
    auto it = std::lower_bound(doses.begin(), doses.end(), edge);
    curve.bin_edges_gy.push_back(edge);
    curve.volume_fraction.push_back(
        static_cast<double>(doses.end() - it) / n);
  }
  return curve;
}

DoseStats dose_stats(const DoseGrid& dose, const Phantom& phantom,
                     StructureLabel structure) {
  std::vector<double> doses = structure_doses(dose, phantom, structure);
  DoseStats stats;
  stats.min_gy = doses[0];
  stats.max_gy = doses[0];
  double sum = 0.0;
  for (double d : doses) {
    stats.min_gy = std::min(stats.min_gy, d);
    stats.max_gy = std::max(stats.max_gy, d);
    sum += d;
  }
  stats.mean_gy = sum / static_cast<double>(doses.size());

  DvhCurve curve = dvh(dose, phantom, structure);
  for (std::size_t i = curve.bin_edges_gy.size(); i-- > 0;) {
    if (curve.volume_fraction[i] >= 0.95) {
      stats.d95_gy = curve.bin_edges_gy[i];
      break;
    }
  }
  return stats;
}

double clinical_penalty(const DoseGrid& dose, const Phantom& phantom,
                        const ClinicalGoals& goals) {
  const auto& tumor = phantom.structure_voxels(StructureLabel::Tumor);
  if (tumor.empty()) {
    fail(ErrorKind::EmptyStructure, "phantom has no 'tumor' voxels");
  }
  double under = 0.0;
  double over = 0.0;
  for (std::size_t v : tumor) {
    const double d = dose[v];
    const double u = std::max(0.0, goals.tumor_low_gy - d);
    const double o = std::max(0.0, d - goals.tumor_high_gy);
    under += u * u;
    over += o * o;
  }
  const double n_tumor = static_cast<double>(tumor.size());
  return goals.w_under * (under / n_tumor) + goals.w_over * (over / n_tumor) +
         goals.w_lung * mean_dose(dose, phantom, StructureLabel::LeftLung) +
         goals.w_heart * mean_dose(dose, phantom, StructureLabel::Heart);
}

std::vector<double> per_state_mean_tumor_dose(
    const DoseInfluence& influence, const Phantom& phantom,
    const std::vector<double>& weights) {
  const std::size_t n_states = influence.states().size();
  std::vector<double> values(n_states);
  for (std::size_t x = 0; x < n_states; ++x) {
    values[x] = mean_dose(influence.static_dose(weights, x), phantom,
                          StructureLabel::Tumor);
  }
  return values;
}

double robust_fitness(const std::vector<double>& weights,
                      const DoseInfluence& influence, const Phantom& phantom,
                      const UncertaintySet& set, const ClinicalGoals& goals) {
  const std::vector<double> values =
      per_state_mean_tumor_dose(influence, phantom, weights);
  double worst = 0.0;
  for (const RespiratoryPdf& pdf : set.scenario_set(values)) {
    worst = std::max(worst, clinical_penalty(
                                influence.expected_dose(weights, pdf),
                                phantom, goals));
  }
  return worst;
}

RobustObjective::RobustObjective(const DoseInfluence& influence,
                                 const Phantom& phantom,
                                 const UncertaintySet& set,
                                 const ClinicalGoals& goals)
    : set_(&set), goals_(goals) {
  goals_.validate();
  n_states_ = influence.states().size();
  n_beamlets_ = static_cast<std::size_t>(influence.beamlet_count());

  const auto& tumor = phantom.structure_voxels(StructureLabel::Tumor);
  const auto& lung = phantom.structure_voxels(StructureLabel::LeftLung);
  const auto& heart = phantom.structure_voxels(StructureLabel::Heart);
  if (tumor.empty() || lung.empty() || heart.empty()) {
    fail(ErrorKind::EmptyStructure,
         "robust objective needs tumor, left_lung, and heart voxels");
  }
  n_tumor_ = tumor.size();
  n_lung_ = lung.size();
  n_heart_ = heart.size();

  std::vector<long> tumor_pos(phantom.voxel_count(), -1);
  for (std::size_t t = 0; t < tumor.size(); ++t) {
    tumor_pos[tumor[t]] = static_cast<long>(t);
  }
  const int rows = influence.rows();
  const int cols = influence.cols();

  tumor_mat_.assign(n_states_, std::vector<double>(n_tumor_ * n_beamlets_, 0.0));
  lung_colsum_.assign(n_states_, std::vector<double>(n_beamlets_, 0.0));
  heart_colsum_.assign(n_states_, std::vector<double>(n_beamlets_, 0.0));

  for (std::size_t x = 0; x < n_states_; ++x) {
    const int shift = influence.shift_voxels(x);
    for (std::size_t b = 0; b < n_beamlets_; ++b) {
      const DoseInfluence::Column& col =
          influence.column(static_cast<int>(b));
      for (std::size_t k = 0; k < col.voxel.size(); ++k) {
        const int r = static_cast<int>(col.voxel[k]) / cols + shift;
        if (r < 0 || r >= rows) continue;
        const std::size_t v =
            static_cast<std::size_t>(r) * cols + col.voxel[k] % cols;
        switch (phantom.label_at(v)) {
          case StructureLabel::Tumor:
            tumor_mat_[x][static_cast<std::size_t>(tumor_pos[v]) * n_beamlets_ +
                          b] += col.value[k];
            break;
          case StructureLabel::LeftLung:
            lung_colsum_[x][b] += col.value[k];
            break;
          case StructureLabel::Heart:
            heart_colsum_[x][b] += col.value[k];
            break;
          case StructureLabel::Normal:
            break;
        }
      }
    }
  }
}

double RobustObjective::operator()(const std::vector<double>& weights) const {
  if (weights.size() != n_beamlets_) {
    fail(ErrorKind::DimensionMismatch,
         "plan has " + std::to_string(weights.size()) + " weights, expected " +
             std::to_string(n_beamlets_));
  }

  // Per-state tumor voxel doses and their means.
  std::vector<double> state_tumor(n_states_ * n_tumor_, 0.0);
  std::vector<double> state_mean(n_states_);
  for (std::size_t x = 0; x < n_states_; ++x) {
    const std::vector<double>& mat = tumor_mat_[x];
    double* out = state_tumor.data() + x * n_tumor_;
    for (std::size_t t = 0; t < n_tumor_; ++t) {
      const double* row = mat.data() + t * n_beamlets_;
      double d = 0.0;
      for (std::size_t b = 0; b < n_beamlets_; ++b) d += row[b] * weights[b];
      out[t] = d;
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < n_tumor_; ++t) sum += out[t];
    state_mean[x] = sum / static_cast<double>(n_tumor_);
  }

  std::vector<double> state_lung(n_states_), state_heart(n_states_);
  for (std::size_t x = 0; x < n_states_; ++x) {
    double dl = 0.0, dh = 0.0;
    for (std::size_t b = 0; b < n_beamlets_; ++b) {
      dl += lung_colsum_[x][b] * weights[b];
      dh += heart_colsum_[x][b] * weights[b];
    }
    state_lung[x] = dl;
    state_heart[x] = dh;
  }

  double worst = 0.0;
  for (const RespiratoryPdf& pdf : set_->scenario_set(state_mean)) {
    double under = 0.0, over = 0.0;
    for (std::size_t t = 0; t < n_tumor_; ++t) {
      double d = 0.0;
      for (std::size_t x = 0; x < n_states_; ++x) {
        d += pdf[x] * state_tumor[x * n_tumor_ + t];
      }
      const double u = std::max(0.0, goals_.tumor_low_gy - d);
      const double o = std::max(0.0, d - goals_.tumor_high_gy);
      under += u * u;
      over += o * o;
    }
    double lung_total = 0.0, heart_total = 0.0;
    for (std::size_t x = 0; x < n_states_; ++x) {
      lung_total += pdf[x] * state_lung[x];
      heart_total += pdf[x] * state_heart[x];
    }
    const double n_tumor = static_cast<double>(n_tumor_);
    const double penalty =
        goals_.w_under * (under / n_tumor) + goals_.w_over * (over / n_tumor) +
        goals_.w_lung * (lung_total / static_cast<double>(n_lung_)) +
        goals_.w_heart * (heart_total / static_cast<double>(n_heart_));
    worst = std::max(worst, penalty);
  }
  return worst;
}

}  // namespace rtplan
