#pragma once

#include <cstdint>
#include <vector>

#include "phantom.hpp"
#include "uncertainty.hpp"

namespace rtplan {

// Coplanar beam arrangement: each angle carries a row of equally spaced
// beamlets centered on the isocenter.
struct BeamletSet {
  std::vector<double> angles_deg;
  int beamlets_per_angle = 16;
  double beamlet_width_mm = 5.0;

  void validate() const;
  int total() const {
    return static_cast<int>(angles_deg.size()) * beamlets_per_angle;
  }
};

// Pencil-beam kernel: exponential attenuation with depth and a Gaussian
// lateral falloff whose sigma is a fixed fraction of the beamlet width.
struct DoseKernelParams {
  double mu_per_mm = 0.005;
  double sigma_factor = 0.6;

  void validate() const;
};

// Beamlet weight vector, the optimization decision variable. Weights are
// unitless fluence values in [0, w_max].
class FluencePlan {
public:
  FluencePlan(std::vector<double> weights, double w_max);

  const std::vector<double>& weights() const { return weights_; }
  double w_max() const { return w_max_; }
  std::size_t size() const { return weights_.size(); }

private:
  std::vector<double> weights_;
  double w_max_;
};

// Dose distribution on the phantom grid, in Gy.
class DoseGrid {
public:
  DoseGrid(int rows, int cols)
      : rows_(rows), cols_(cols),
        dose_gy_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return dose_gy_.size(); }
  double operator[](std::size_t voxel) const { return dose_gy_[voxel]; }
  double& operator[](std::size_t voxel) { return dose_gy_[voxel]; }
  double at(int row, int col) const {
    return dose_gy_[static_cast<std::size_t>(row) * cols_ + col];
  }
  const std::vector<double>& values() const { return dose_gy_; }

private:
  int rows_;
  int cols_;
  std::vector<double> dose_gy_;
};

// Per-beamlet dose deposition, precomputed once per planning problem.
// Motion is handled with the isocenter-shift approximation: a breathing
// offset moves the whole dose pattern a whole number of voxels along the
// row (superior-inferior) axis, and shifted lookups that fall outside the
// grid contribute zero dose.
class DoseInfluence {
public:
  // Sparse column for one beamlet: voxel indices are strictly increasing.
  struct Column {
    std::vector<std::uint32_t> voxel;
    std::vector<double> value;
  };

  static DoseInfluence compute(const Phantom& phantom, const BeamletSet& beams,
                               const MotionStates& states,
                               const DoseKernelParams& kernel = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int beamlet_count() const { return static_cast<int>(columns_.size()); }
  const MotionStates& states() const { return states_; }
  const Column& column(int beamlet) const { return columns_[beamlet]; }
  int shift_voxels(std::size_t state) const { return shifts_[state]; }

  // Influence entry for one (state, voxel, beamlet) triple.
  double entry(std::size_t state, int row, int col, int beamlet) const;

  // Dose with the anatomy frozen in one motion state.
  DoseGrid static_dose(const std::vector<double>& weights,
                       std::size_t state) const;

  // Probability-weighted dose over all motion states.
  DoseGrid expected_dose(const std::vector<double>& weights,
                         const RespiratoryPdf& pdf) const;

  // Uniform rescale of every influence entry; used for output calibration.
  void scale(double factor);

private:
  DoseInfluence(const MotionStates& states) : states_(states) {}

  DoseGrid reference_dose(const std::vector<double>& weights) const;

  int rows_ = 0;
  int cols_ = 0;
  MotionStates states_;
  std::vector<int> shifts_;
  std::vector<Column> columns_;
};

}  // namespace rtplan
