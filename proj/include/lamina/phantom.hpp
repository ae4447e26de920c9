#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

namespace lamina {

// Circular arc whose end tangents differ by subtended_deg. Positive bows the
// lamina track anteriorly in the middle (extension / lordosis), negative the
// opposite (flexion mimic).
struct ArcModel {
  double subtended_deg = 0.0;
};

// Depth profile y(z) = sum coeffs[k] * z^k with z in mm from the caudal end.
struct QuinticModel {
  std::array<double, 6> coeffs{};
};

using CurveModel = std::variant<ArcModel, QuinticModel>;

struct PhantomSpec {
  CurveModel curve_model = ArcModel{0.0};
  double lamina_offset_mm = 12.0;  // lateral distance of each lamina blob
  double blob_sigma_mm = 1.5;
  int frame_count = 400;
  double frame_spacing_mm = 0.3;
  double pose_noise_translation_mm = 0.0;
  double pose_noise_rotation_deg = 0.0;
  int intensity_peak = 200;  // 8-bit
  std::uint64_t seed = 1;

  int frame_width = 320;
  int frame_height = 240;
  double pixel_spacing_mm = 0.5;
  double base_depth_mm = 45.0;     // lamina depth at the track ends
  double spinous_depth_mm = 22.0;  // constant midline blob depth
  std::string subject_id = "phantom";
};

struct PhantomTruth {
  std::string model;  // "arc" or "quintic"
  double angle_deg = 0.0;
};

// Writes a complete scan dataset (manifest, pose table, frame rasters) plus
// truth.json into out_dir. Deterministic for a fixed spec and seed.
PhantomTruth generate(const PhantomSpec& spec,
                      const std::filesystem::path& out_dir);

// Analytic reported angle of the model, independent of any fitting.
double analytic_truth_angle(const PhantomSpec& spec);

}  // namespace lamina
