#include "lamina/keyframe.hpp"

#include <cmath>

#include "lamina/errors.hpp"

namespace lamina {

const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

SagittalSlice extract_sagittal_slice(const Volume& vol, int lateral_index) {
  const VolumeGeometry& g = vol.geometry;
  SagittalSlice s;
  s.lateral_index = lateral_index;
  s.lateral_mm = g.lateral_mm(lateral_index);
  s.intensity = Grid2<std::uint8_t>(g.ny, g.nz);
  s.bone = Grid2<std::uint8_t>(g.ny, g.nz);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int iy = 0; iy < g.ny; ++iy) {
      s.intensity.at(iy, iz) = vol.intensity.at(lateral_index, iy, iz);
      s.bone.at(iy, iz) = vol.bone.at(lateral_index, iy, iz);
    }
  return s;
}

std::optional<SliceWeight> slice_weight(const SagittalSlice& slice) {
  const int ny = slice.intensity.width();
  const int nz = slice.intensity.height();

  SliceWeight sw;
  double sum = 0.0;
  for (int iz = 0; iz < nz; ++iz) {
    int row_max = -1;
    for (int iy = 0; iy < ny; ++iy)
      if (slice.bone.at(iy, iz))
        row_max = std::max(row_max, int(slice.intensity.at(iy, iz)));
    if (row_max >= 0) {  // row contains bone
      sw.row_maxima.push_back(row_max);
      sum += row_max;
      ++sw.len_rows;
    }
  }
  if (sw.len_rows == 0 || sum <= 0.0) return std::nullopt;
  sw.weight = std::log(sum) * sw.len_rows;
  return sw;
}

double find_midline(const Volume& vol) {
  const VolumeGeometry& g = vol.geometry;
  double w_sum = 0.0;
  double wx_sum = 0.0;
  long long count = 0;
  double x_sum = 0.0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix)
        if (vol.bone.at(ix, iy, iz)) {
          const double w = vol.intensity.at(ix, iy, iz);
          const double x = g.lateral_mm(ix);
          w_sum += w;
          wx_sum += w * x;
          x_sum += x;
          ++count;
        }
  if (count == 0) throw pipeline_error("no bone voxels in volume");
  // All-zero intensities over the mask: fall back to the unweighted centroid.
  if (w_sum <= 0.0) return x_sum / count;
  return wx_sum / w_sum;
}

std::pair<KeyFrame, KeyFrame> select_key_frames(const Volume& vol,
                                                double margin_mm) {
  if (margin_mm < 0.0) throw input_error("margin must be >= 0");
  const VolumeGeometry& g = vol.geometry;
  const double midline = find_midline(vol);

  struct Best {
    bool valid = false;
    int index = 0;
    double dist = 0.0;
    SliceWeight sw;
  };
  Best best[2];

  for (int ix = 0; ix < g.nx; ++ix) {
    const double lat = g.lateral_mm(ix);
    int side;
    if (lat < midline - margin_mm) side = 0;
    else if (lat > midline + margin_mm) side = 1;
    else continue;

    SagittalSlice slice = extract_sagittal_slice(vol, ix);
    auto sw = slice_weight(slice);
    if (!sw) continue;

    Best& b = best[side];
    const double dist = std::abs(lat - midline);
    const bool better =
        !b.valid || sw->weight > b.sw.weight ||
        (sw->weight == b.sw.weight &&
         (dist > b.dist || (dist == b.dist && ix < b.index)));
    if (better) b = Best{true, ix, dist, std::move(*sw)};
  }

  for (int side = 0; side < 2; ++side)
    if (!best[side].valid)
      throw pipeline_error(std::string("no key-frame candidate on the ") +
                           (side == 0 ? "left" : "right") + " side");

  auto make_kf = [&](const Best& b, Side s) {
    KeyFrame kf;
    kf.slice = extract_sagittal_slice(vol, b.index);
    kf.side = s;
    kf.weight = b.sw.weight;
    kf.len_rows = b.sw.len_rows;
    kf.row_maxima = b.sw.row_maxima;
    return kf;
  };
  return {make_kf(best[0], Side::left), make_kf(best[1], Side::right)};
}

}  // namespace lamina
