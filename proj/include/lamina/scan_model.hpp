#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lamina/geometry.hpp"
#include "lamina/grid.hpp"

namespace lamina {

enum class Posture { neutral, flexion };

// One transverse grayscale frame plus its tracked pose. Pixel (i,j) sits at
// (i*pixel_spacing_w, j*pixel_spacing_h, 0) in the frame plane; the pose maps
// that plane into world mm.
struct TrackedFrame {
  int index = 0;
  Grid2<std::uint8_t> intensity;
  Grid2<std::uint8_t> mask;  // strictly {0,1}
  Pose pose;
  double pixel_spacing_w = 0.0;  // mm/px
  double pixel_spacing_h = 0.0;

  Vec3 pixel_to_world(double i, double j) const {
    return pose.to_world({i * pixel_spacing_w, j * pixel_spacing_h, 0.0});
  }
};

struct ScanDataset {
  std::string subject_id;
  Posture posture = Posture::neutral;
  std::vector<TrackedFrame> frames;  // sorted by index, strictly increasing
};

// Loads a dataset from a manifest JSON (or a directory containing
// manifest.json). Frames are returned sorted by index with quaternions
// normalized; every structural violation throws input_error naming the
// offending frame.
ScanDataset load_dataset(const std::filesystem::path& manifest_or_dir);

// Writes manifest.json, poses.csv and one intensity/mask PGM pair per frame.
void serialize_dataset(const ScanDataset& ds, const std::filesystem::path& dir);

// Non-fatal sanity checks: frame count outside [300,600], inter-frame pose
// jumps over 20 mm, empty masks.
std::vector<std::string> validate_dataset(const ScanDataset& ds);

const char* to_string(Posture p);
Posture posture_from_string(const std::string& s);

}  // namespace lamina
