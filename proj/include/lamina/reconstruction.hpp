#pragma once

#include <cstdint>
#include <filesystem>

#include "lamina/grid.hpp"
#include "lamina/scan_model.hpp"

namespace lamina {

// Axis-aligned reconstruction grid. Axis convention:
//   x = lateral (left negative -> right positive)
//   y = depth (posterior -> anterior increasing)
//   z = longitudinal (caudal -> cranial)
struct VolumeGeometry {
  Vec3 origin;   // world mm of the center of voxel (0,0,0)
  Vec3 spacing;  // mm per voxel, componentwise > 0
  int nx = 0;
  int ny = 0;
  int nz = 0;

  Vec3 voxel_center(int ix, int iy, int iz) const {
    return {origin.x + ix * spacing.x, origin.y + iy * spacing.y,
            origin.z + iz * spacing.z};
  }
  double lateral_mm(int ix) const { return origin.x + ix * spacing.x; }
};

struct Volume {
  VolumeGeometry geometry;
  Grid3<std::uint8_t> intensity;
  Grid3<std::uint8_t> bone;       // {0,1}
  Grid3<std::uint32_t> hit_count;
  Grid3<std::uint8_t> filled;     // 1 where hole-filled
};

// Geometry whose box is the hull of all pose-transformed frame corners,
// padded by one voxel on each side.
VolumeGeometry plan_geometry(const ScanDataset& ds, const Vec3& spacing);

// Forward nearest-voxel projection: every pixel of every frame lands in the
// nearest voxel; intensity compounds by maximum, the mask by OR, hit_count by
// increment. Result is independent of frame order.
Volume compound(const ScanDataset& ds, const VolumeGeometry& geom);

// Fills unhit voxels lying between the first and last hit voxel of their
// z-column from the nearest hit voxel within radius_mm (Euclidean).
Volume fill_holes(const Volume& vol, double radius_mm);

// Raw little-endian channel dump (intensity, bone, hit_count, filled in that
// order, x fastest) plus a JSON geometry sidecar.
void export_volume(const Volume& vol, const std::filesystem::path& base_path);

}  // namespace lamina
