#pragma once

#include <string>

#include "lamina/curvefit.hpp"
#include "lamina/keyframe.hpp"
#include "lamina/reconstruction.hpp"

#include <nlohmann/json_fwd.hpp>

namespace lamina {

struct MeasureParams {
  double voxel_mm = 0.5;
  double margin_mm = 5.0;
  double band_mm = 4.0;
  double eps_mm = 4.0;
  int min_pts = 5;
  double fill_mm = 1.0;
};

struct SideMeasurement {
  Side side = Side::left;
  KeyFrame key_frame;
  std::vector<CorePoint> kept;
  std::vector<CorePoint> noise;
  int points_extracted = 0;
  LaminaCurve curve;
};

struct MeasureResult {
  MeasureParams params;
  VolumeGeometry geometry;
  double midline_mm = 0.0;
  SideMeasurement left;
  SideMeasurement right;
};

// Full measurement chain: reconstruct -> key frames -> core points -> DBSCAN
// -> quintic fit -> signed angles, both sides.
MeasureResult run_measure(const ScanDataset& ds, const MeasureParams& params);

nlohmann::json measurement_to_json(const MeasureResult& result);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace lamina
