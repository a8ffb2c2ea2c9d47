#include "dose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace rtplan {

namespace {

constexpr double kLateralCutoffSigmas = 4.0;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

void BeamletSet::validate() const {
  if (angles_deg.empty()) {
    fail(ErrorKind::InvalidArgument, "beam set needs at least one angle");
  }
  for (std::size_t i = 0; i < angles_deg.size(); ++i) {
    double a = angles_deg[i];
    if (!(a >= 0.0) || a >= 360.0) {
      fail(ErrorKind::InvalidArgument,
           "beam angle " + std::to_string(a) + " outside [0, 360)");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (angles_deg[j] == a) {
        fail(ErrorKind::InvalidArgument,
             "beam angle " + std::to_string(a) + " repeats");
      }
    }
  }
  if (beamlets_per_angle < 1) {
    fail(ErrorKind::InvalidArgument, "need at least one beamlet per angle");
  }
  if (!(beamlet_width_mm > 0.0)) {
    fail(ErrorKind::InvalidArgument, "beamlet width must be positive");
  }
}

FluencePlan::FluencePlan(std::vector<double> weights, double w_max)
    : weights_(std::move(weights)), w_max_(w_max) {
  if (!(w_max_ > 0.0)) {
    fail(ErrorKind::InvalidArgument, "w_max must be positive");
  }
  if (weights_.empty()) {
    fail(ErrorKind::InvalidArgument, "plan has no beamlet weights");
  }
  for (std::size_t b = 0; b < weights_.size(); ++b) {
    double w = weights_[b];
    if (!std::isfinite(w) || w < 0.0 || w > w_max_) {
      fail(ErrorKind::InvalidArgument,
           "beamlet weight " + std::to_string(w) + " at index " +
               std::to_string(b) + " outside [0, " + std::to_string(w_max_) +
               "]");
    }
  }
}

void DoseKernelParams::validate() const {
  if (!(mu_per_mm >= 0.0)) {
    fail(ErrorKind::InvalidArgument, "attenuation mu must be non-negative");
  }
  if (!(sigma_factor > 0.0)) {
    fail(ErrorKind::InvalidArgument, "lateral sigma factor must be positive");
  }
}

DoseInfluence DoseInfluence::compute(const Phantom& phantom,
                                     const BeamletSet& beams,
                                     const MotionStates& states,
                                     const DoseKernelParams& kernel) {
  beams.validate();
  kernel.validate();

  DoseInfluence influence(states);
  const int rows = phantom.rows();
  const int cols = phantom.cols();
  const double s = phantom.voxel_size_mm();
  influence.rows_ = rows;
  influence.cols_ = cols;

  influence.shifts_.reserve(states.size());
  for (std::size_t x = 0; x < states.size(); ++x) {
    influence.shifts_.push_back(
        static_cast<int>(std::lround(states.offset_mm(x) / s)));
  }

  const double iso_r = phantom.isocenter_row_mm();
  const double iso_c = phantom.isocenter_col_mm();
  const double sigma = kernel.sigma_factor * beams.beamlet_width_mm;
  const double cutoff = kLateralCutoffSigmas * sigma;
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  const int per_angle = beams.beamlets_per_angle;

  influence.columns_.resize(beams.total());
  for (std::size_t a = 0; a < beams.angles_deg.size(); ++a) {
    const double theta = deg_to_rad(beams.angles_deg[a]);
    const double ur = std::cos(theta), uc = std::sin(theta);
    const double nr = -std::sin(theta), nc = std::cos(theta);

    // Depth is measured from the first voxel center the beam direction
    // reaches, so entry voxels of axis-aligned beams attenuate by exactly 1.
    double dmin = std::numeric_limits<double>::infinity();
    for (double r : {0.5 * s, (rows - 0.5) * s}) {
      for (double c : {0.5 * s, (cols - 0.5) * s}) {
        dmin = std::min(dmin, r * ur + c * uc);
      }
    }

    for (int b = 0; b < per_angle; ++b) {
      const double offset =
          (b - 0.5 * (per_angle - 1)) * beams.beamlet_width_mm;
      Column& col = influence.columns_[a * per_angle + b];
      for (int r = 0; r < rows; ++r) {
        const double pr = (r + 0.5) * s;
        for (int c = 0; c < cols; ++c) {
          const double pc = (c + 0.5) * s;
          const double lateral =
              std::abs((pr - iso_r) * nr + (pc - iso_c) * nc - offset);
          if (lateral > cutoff) continue;
          const double depth = pr * ur + pc * uc - dmin;
          const double value = std::exp(-kernel.mu_per_mm * depth) *
                               std::exp(-lateral * lateral * inv_two_sigma_sq);
          col.voxel.push_back(static_cast<std::uint32_t>(r * cols + c));
          col.value.push_back(value);
        }
      }
    }
  }
  return influence;
}

double DoseInfluence::entry(std::size_t state, int row, int col,
                            int beamlet) const {
  const int r0 = row - shifts_[state];
  if (r0 < 0 || r0 >= rows_ || col < 0 || col >= cols_) return 0.0;
  const std::uint32_t target = static_cast<std::uint32_t>(r0 * cols_ + col);
  const Column& column = columns_[beamlet];
  auto it = std::lower_bound(column.voxel.begin(), column.voxel.end(), target);
  if (it == column.voxel.end() || *it != target) return 0.0;
  return column.value[it - column.voxel.begin()];
}

DoseGrid DoseInfluence::reference_dose(const std::vector<double>& weights) const {
  if (weights.size() != columns_.size()) {
    fail(ErrorKind::DimensionMismatch,
         "plan has " + std::to_string(weights.size()) + " weights, expected " +
             std::to_string(columns_.size()));
  }
  DoseGrid dose(rows_, cols_);
  for (std::size_t b = 0; b < columns_.size(); ++b) {
    const double w = weights[b];
    if (w == 0.0) continue;
    const Column& col = columns_[b];
    for (std::size_t k = 0; k < col.voxel.size(); ++k) {
      dose[col.voxel[k]] += col.value[k] * w;
    }
  }
  return dose;
}

DoseGrid DoseInfluence::static_dose(const std::vector<double>& weights,
                                    std::size_t state) const {
  if (state >= states_.size()) {
    fail(ErrorKind::InvalidArgument, "motion state index out of range");
  }
  DoseGrid base = reference_dose(weights);
  const int shift = shifts_[state];
  if (shift == 0) return base;
  DoseGrid dose(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    const int r0 = r - shift;
    if (r0 < 0 || r0 >= rows_) continue;
    for (int c = 0; c < cols_; ++c) {
      dose[static_cast<std::size_t>(r) * cols_ + c] = base.at(r0, c);
    }
  }
  return dose;
}

DoseGrid DoseInfluence::expected_dose(const std::vector<double>& weights,
                                      const RespiratoryPdf& pdf) const {
  if (pdf.size() != states_.size()) {
    fail(ErrorKind::StateMismatch,
         "pdf has " + std::to_string(pdf.size()) + " states, engine has " +
             std::to_string(states_.size()));
  }
  DoseGrid base = reference_dose(weights);
  DoseGrid dose(rows_, cols_);
  for (std::size_t x = 0; x < states_.size(); ++x) {
    const double p = pdf[x];
    const int shift = shifts_[x];
    for (int r = 0; r < rows_; ++r) {
      const int r0 = r - shift;
      if (r0 < 0 || r0 >= rows_) continue;
      for (int c = 0; c < cols_; ++c) {
        dose[static_cast<std::size_t>(r) * cols_ + c] += p * base.at(r0, c);
      }
    }
  }
  return dose;
}

void DoseInfluence::scale(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    fail(ErrorKind::InvalidArgument, "dose scale factor must be positive");
  }
  for (Column& col : columns_) {
    for (double& v : col.value) v *= factor;
  }
}

}  // namespace rtplan
