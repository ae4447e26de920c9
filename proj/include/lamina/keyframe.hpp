#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lamina/reconstruction.hpp"

namespace lamina {

enum class Side { left, right };
const char* to_string(Side s);

// One lateral-position-fixed plane of the volume. Grids are indexed
// at(iy, iz): columns run over depth y, rows over longitudinal z.
struct SagittalSlice {
  int lateral_index = 0;
  double lateral_mm = 0.0;
  Grid2<std::uint8_t> intensity;
  Grid2<std::uint8_t> bone;
};

struct SliceWeight {
  double weight = 0.0;            // ln(sum of row maxima) * len_rows
  int len_rows = 0;               // z-rows containing at least one bone voxel
  std::vector<int> row_maxima;    // per effective row, ascending z
};

struct KeyFrame {
  SagittalSlice slice;
  Side side = Side::left;
  double weight = 0.0;
  int len_rows = 0;
  std::vector<int> row_maxima;
};

SagittalSlice extract_sagittal_slice(const Volume& vol, int lateral_index);

// Energy of one sagittal slice. Empty optional means the slice has no bone
// support (or zero total row maxima) and is never selectable.
std::optional<SliceWeight> slice_weight(const SagittalSlice& slice);

// Intensity-weighted lateral centroid of all bone voxels, in mm.
double find_midline(const Volume& vol);

// Maximal-weight slice strictly left of midline - margin and strictly right
// of midline + margin. Ties go to the slice farther from the midline, then to
// the lower lateral index.
std::pair<KeyFrame, KeyFrame> select_key_frames(const Volume& vol,
                                                double margin_mm);

}  // namespace lamina
