#pragma once

#include <filesystem>
#include <vector>

#include "lamina/keyframe.hpp"
#include "lamina/scan_model.hpp"

namespace lamina {

// Intensity-weighted lamina centroid of one transverse frame, projected into
// a key sagittal plane (lateral coordinate dropped).
struct CorePoint {
  double z_mm = 0.0;
  double y_mm = 0.0;
  int source_frame = 0;
  Side side = Side::left;
  double weight = 0.0;  // total intensity of contributing pixels, > 0
};

struct CorePointSets {
  std::vector<CorePoint> left;
  std::vector<CorePoint> right;
};

// Per frame and side, collects mask pixels whose world lateral coordinate is
// within +-band_mm of that side's key-frame plane and emits their
// intensity-weighted (z,y) centroid. Frames with no pixels in band contribute
// nothing; a side ending up with zero points is an error.
CorePointSets extract_core_points(const ScanDataset& ds, const KeyFrame& left,
                                  const KeyFrame& right, double band_mm);

// CSV with columns side,source_frame,z_mm,y_mm,weight.
void write_core_points_csv(const std::filesystem::path& path,
                           const CorePointSets& sets);

}  // namespace lamina
