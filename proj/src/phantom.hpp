#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rtplan {

enum class StructureLabel : std::uint8_t {
  Tumor = 0,
  LeftLung = 1,
  Heart = 2,
  Normal = 3,
};

constexpr std::size_t kStructureCount = 4;

const char* structure_name(StructureLabel label);
StructureLabel structure_from_name(const std::string& name);

// 2D axial slice of a synthetic thorax: every voxel carries exactly one
// structure label. Geometry is generated from a named preset so that the
// same grid size always yields the same phantom.
class Phantom {
public:
  static Phantom build(int rows, int cols, double voxel_size_mm,
                       const std::string& preset);

  // Assembles a phantom from explicit labels, with no minimum grid size and
  // possibly empty structures; intended for small synthetic test cases. The
  // isocenter is the tumor centroid, or the grid center without a tumor.
  static Phantom from_labels(int rows, int cols, double voxel_size_mm,
                             std::vector<StructureLabel> labels);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double voxel_size_mm() const { return voxel_size_mm_; }
  std::size_t voxel_count() const { return labels_.size(); }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * cols_ + col;
  }
  StructureLabel label(int row, int col) const { return labels_[index(row, col)]; }
  StructureLabel label_at(std::size_t voxel) const { return labels_[voxel]; }

  const std::vector<std::size_t>& structure_voxels(StructureLabel label) const {
    return structure_voxels_[static_cast<std::size_t>(label)];
  }
  std::array<std::size_t, kStructureCount> histogram() const;

  // Aiming point for the beam geometry: the tumor centroid of the preset,
  // in mm from the grid corner.
  double isocenter_row_mm() const { return isocenter_row_mm_; }
  double isocenter_col_mm() const { return isocenter_col_mm_; }

  // One line per voxel: "row,col,label".
  std::string to_label_csv() const;

private:
  Phantom() = default;

  int rows_ = 0;
  int cols_ = 0;
  double voxel_size_mm_ = 0.0;
  std::vector<StructureLabel> labels_;
  std::array<std::vector<std::size_t>, kStructureCount> structure_voxels_;
  double isocenter_row_mm_ = 0.0;
  double isocenter_col_mm_ = 0.0;
};

}  // namespace rtplan
