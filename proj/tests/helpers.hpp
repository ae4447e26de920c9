#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "lamina/scan_model.hpp"

namespace testutil {

// Unique scratch directory, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lamina_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline lamina::TrackedFrame make_frame(int index, int w, int h,
                                       double spacing_mm,
                                       const lamina::Pose& pose) {
  lamina::TrackedFrame f;
  f.index = index;
  f.pose = pose;
  f.pixel_spacing_w = spacing_mm;
  f.pixel_spacing_h = spacing_mm;
  f.intensity = lamina::Grid2<std::uint8_t>(w, h);
  f.mask = lamina::Grid2<std::uint8_t>(w, h);
  return f;
}

// Frames stacked along z with pseudo-random content; every frame carries at
// least one bone pixel on each lateral half.
inline lamina::ScanDataset make_random_dataset(int frames, int w, int h,
                                               unsigned seed,
                                               double pose_jitter_mm = 0.0) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> val(0, 255);
  std::uniform_real_distribution<double> jitter(-pose_jitter_mm,
                                                pose_jitter_mm);
  std::uniform_real_distribution<double> angle(-0.05, 0.05);

  lamina::ScanDataset ds;
  ds.subject_id = "random";
  for (int k = 0; k < frames; ++k) {
    lamina::Pose pose;
    pose.position = {pose_jitter_mm > 0 ? jitter(rng) : 0.0,
                     pose_jitter_mm > 0 ? jitter(rng) : 0.0,
                     k * 0.5 + (pose_jitter_mm > 0 ? jitter(rng) : 0.0)};
    if (pose_jitter_mm > 0) {
      const double a = angle(rng);
      pose.orientation = {std::cos(a / 2), 0.0, std::sin(a / 2), 0.0};
    }
    lamina::TrackedFrame f = make_frame(k, w, h, 0.5, pose);
    for (int j = 0; j < h; ++j)
      for (int i = 0; i < w; ++i) f.intensity.at(i, j) = val(rng);
    for (int rep = 0; rep < 4; ++rep) {
      const int i = std::uniform_int_distribution<int>(0, w / 2 - 1)(rng);
      const int j = std::uniform_int_distribution<int>(0, h - 1)(rng);
      f.mask.at(i, j) = 1;
      f.mask.at(w - 1 - i, j) = 1;
    }
    ds.frames.push_back(std::move(f));
  }
  return ds;
}

}  // namespace testutil
