#include "lamina/corepoints.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lamina/errors.hpp"

namespace lamina {

CorePointSets extract_core_points(const ScanDataset& ds, const KeyFrame& left,
                                  const KeyFrame& right, double band_mm) {
  if (!(band_mm > 0.0)) throw input_error("band must be > 0");
  const double lat[2] = {left.slice.lateral_mm, right.slice.lateral_mm};

  CorePointSets sets;
  for (const TrackedFrame& f : ds.frames) {
    double w_sum[2] = {0.0, 0.0};
    double wz_sum[2] = {0.0, 0.0};
    double wy_sum[2] = {0.0, 0.0};

    const int w = f.intensity.width();
    const int h = f.intensity.height();
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        if (!f.mask.at(i, j)) continue;
        const double inten = f.intensity.at(i, j);
        if (inten <= 0.0) continue;
        const Vec3 p = f.pixel_to_world(i, j);
        for (int s = 0; s < 2; ++s) {
          if (std::abs(p.x - lat[s]) > band_mm) continue;
          w_sum[s] += inten;
          wz_sum[s] += inten * p.z;
          wy_sum[s] += inten * p.y;
        }
      }
    }

    for (int s = 0; s < 2; ++s) {
      if (w_sum[s] <= 0.0) continue;
      CorePoint cp;
      cp.z_mm = wz_sum[s] / w_sum[s];
      cp.y_mm = wy_sum[s] / w_sum[s];
      cp.source_frame = f.index;
      cp.side = s == 0 ? Side::left : Side::right;
      cp.weight = w_sum[s];
      (s == 0 ? sets.left : sets.right).push_back(cp);
    }
  }

  if (sets.left.empty())
    throw pipeline_error("no core points found on the left side");
  if (sets.right.empty())
    throw pipeline_error("no core points found on the right side");
  return sets;
}

void write_core_points_csv(const std::filesystem::path& path,
                           const CorePointSets& sets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path.string());
  out << "side,source_frame,z_mm,y_mm,weight\n";
  auto emit = [&out](const std::vector<CorePoint>& pts) {
    char buf[160];
    for (const CorePoint& p : pts) {
      std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%.17g\n",
                    to_string(p.side), p.source_frame, p.z_mm, p.y_mm,
                    p.weight);
      out << buf;
    }
  };
  emit(sets.left);
  emit(sets.right);
}

}  // namespace lamina
