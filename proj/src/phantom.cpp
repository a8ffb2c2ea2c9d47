#include "phantom.hpp"

#include <cmath>

#include "errors.hpp"

namespace rtplan {

const char* structure_name(StructureLabel label) {
  switch (label) {
    case StructureLabel::Tumor: return "tumor";
    case StructureLabel::LeftLung: return "left_lung";
    case StructureLabel::Heart: return "heart";
    case StructureLabel::Normal: return "normal";
  }
  return "unknown";
}

StructureLabel structure_from_name(const std::string& name) {
  if (name == "tumor") return StructureLabel::Tumor;
  if (name == "left_lung") return StructureLabel::LeftLung;
  if (name == "heart") return StructureLabel::Heart;
  if (name == "normal") return StructureLabel::Normal;
  fail(ErrorKind::InvalidArgument, "unknown structure name '" + name + "'");
}

namespace {

bool inside_ellipse(double r, double c, double cr, double cc, double ar,
                    double ac) {
  double dr = (r - cr) / ar;
  double dc = (c - cc) / ac;
  return dr * dr + dc * dc <= 1.0;
}

}  // namespace

Phantom Phantom::build(int rows, int cols, double voxel_size_mm,
                       const std::string& preset) {
  if (rows < 16 || cols < 16) {
    fail(ErrorKind::GridTooSmall,
         "phantom grid must be at least 16x16, got " + std::to_string(rows) +
             "x" + std::to_string(cols));
  }
  if (!(voxel_size_mm > 0.0)) {
    fail(ErrorKind::InvalidArgument, "voxel size must be positive");
  }
  if (preset != "default") {
    fail(ErrorKind::InvalidArgument, "unknown phantom preset '" + preset + "'");
  }

  Phantom phantom;
  phantom.rows_ = rows;
  phantom.cols_ = cols;
  phantom.voxel_size_mm_ = voxel_size_mm;
  phantom.labels_.resize(static_cast<std::size_t>(rows) * cols,
                         StructureLabel::Normal);

  const double R = rows;
  const double C = cols;
  // The "default" preset in grid units: a left lung ellipse, a heart ellipse
  // to its medial side, and a spherical tumor embedded in the lower lung.
  const double lung_cr = 0.55 * R, lung_cc = 0.30 * C;
  const double lung_ar = 0.30 * R, lung_ac = 0.18 * C;
  const double heart_cr = 0.62 * R, heart_cc = 0.52 * C;
  const double heart_ar = 0.16 * R, heart_ac = 0.14 * C;
  const double tumor_cr = 0.68 * R, tumor_cc = 0.30 * C;
  const double tumor_radius = 4.0;

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double pr = r + 0.5;
      double pc = c + 0.5;
      bool in_lung = inside_ellipse(pr, pc, lung_cr, lung_cc, lung_ar, lung_ac);
      bool in_heart =
          inside_ellipse(pr, pc, heart_cr, heart_cc, heart_ar, heart_ac);
      double tr = pr - tumor_cr;
      double tc = pc - tumor_cc;
      bool in_tumor =
          in_lung && tr * tr + tc * tc <= tumor_radius * tumor_radius;

      StructureLabel label = StructureLabel::Normal;
      if (in_tumor) {
        label = StructureLabel::Tumor;
      } else if (in_heart) {
        label = StructureLabel::Heart;
      } else if (in_lung) {
        label = StructureLabel::LeftLung;
      }
      phantom.labels_[phantom.index(r, c)] = label;
    }
  }

  for (std::size_t v = 0; v < phantom.labels_.size(); ++v) {
    phantom.structure_voxels_[static_cast<std::size_t>(phantom.labels_[v])]
        .push_back(v);
  }
  for (std::size_t s = 0; s < kStructureCount; ++s) {
    if (phantom.structure_voxels_[s].empty()) {
      fail(ErrorKind::EmptyStructure,
           std::string("preset produced no voxels for structure '") +
               structure_name(static_cast<StructureLabel>(s)) + "'");
    }
  }

  phantom.isocenter_row_mm_ = tumor_cr * voxel_size_mm;
  phantom.isocenter_col_mm_ = tumor_cc * voxel_size_mm;
  return phantom;
}

Phantom Phantom::from_labels(int rows, int cols, double voxel_size_mm,
                             std::vector<StructureLabel> labels) {
  if (rows < 1 || cols < 1) {
    fail(ErrorKind::GridTooSmall, "phantom grid must be at least 1x1");
  }
  if (!(voxel_size_mm > 0.0)) {
    fail(ErrorKind::InvalidArgument, "voxel size must be positive");
  }
  if (labels.size() != static_cast<std::size_t>(rows) * cols) {
    fail(ErrorKind::DimensionMismatch,
         "label grid has " + std::to_string(labels.size()) +
             " entries, expected " + std::to_string(rows * cols));
  }
  Phantom phantom;
  phantom.rows_ = rows;
  phantom.cols_ = cols;
  phantom.voxel_size_mm_ = voxel_size_mm;
  phantom.labels_ = std::move(labels);
  for (std::size_t v = 0; v < phantom.labels_.size(); ++v) {
    phantom.structure_voxels_[static_cast<std::size_t>(phantom.labels_[v])]
        .push_back(v);
  }
  const auto& tumor = phantom.structure_voxels(StructureLabel::Tumor);
  if (tumor.empty()) {
    phantom.isocenter_row_mm_ = 0.5 * rows * voxel_size_mm;
    phantom.isocenter_col_mm_ = 0.5 * cols * voxel_size_mm;
  } else {
    double sr = 0.0, sc = 0.0;
    for (std::size_t v : tumor) {
      sr += (static_cast<double>(v / cols) + 0.5) * voxel_size_mm;
      sc += (static_cast<double>(v % cols) + 0.5) * voxel_size_mm;
    }
    phantom.isocenter_row_mm_ = sr / tumor.size();
    phantom.isocenter_col_mm_ = sc / tumor.size();
  }
  return phantom;
}

std::array<std::size_t, kStructureCount> Phantom::histogram() const {
  std::array<std::size_t, kStructureCount> counts{};
  for (std::size_t s = 0; s < kStructureCount; ++s) {
    counts[s] = structure_voxels_[s].size();
  }
  return counts;
}

std::string Phantom::to_label_csv() const {
  std::string out = "row,col,label\n";
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      out += std::to_string(r);
      out += ',';
      out += std::to_string(c);
      out += ',';
      out += structure_name(label(r, c));
      out += '\n';
    }
  }
  return out;
}

}  // namespace rtplan
