#include "lamina/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "lamina/errors.hpp"

namespace lamina {

namespace {

inline int nearest_index(double world, double origin, double spacing) {
  return static_cast<int>(std::llround((world - origin) / spacing));
}

}  // namespace

VolumeGeometry plan_geometry(const ScanDataset& ds, const Vec3& spacing) {
  if (ds.frames.empty()) throw input_error("cannot plan geometry for an empty dataset");
  if (!(spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0))
    throw input_error("voxel spacing must be > 0 componentwise");

  Vec3 lo{std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-lo.x, -lo.y, -lo.z};

  for (const TrackedFrame& f : ds.frames) {
    const double iw = f.intensity.width() - 1;
    const double ih = f.intensity.height() - 1;
    const Vec3 corners[4] = {
        f.pixel_to_world(0.0, 0.0), f.pixel_to_world(iw, 0.0),
        f.pixel_to_world(0.0, ih), f.pixel_to_world(iw, ih)};
    for (const Vec3& c : corners) {
      lo.x = std::min(lo.x, c.x);
      lo.y = std::min(lo.y, c.y);
      lo.z = std::min(lo.z, c.z);
      hi.x = std::max(hi.x, c.x);
      hi.y = std::max(hi.y, c.y);
      hi.z = std::max(hi.z, c.z);
    }
  }

  // One voxel of padding on each side; the AABB of the corners contains the
  // whole frame rectangle, so every pixel rounds to an interior voxel.
  VolumeGeometry g;
  g.spacing = spacing;
  g.origin = {lo.x - spacing.x, lo.y - spacing.y, lo.z - spacing.z};
  auto count = [](double lo_v, double hi_v, double s) {
    return static_cast<int>(
               std::ceil(std::max(0.0, hi_v - lo_v) / s - 1e-9)) + 3;
  };
  g.nx = count(lo.x, hi.x, spacing.x);
  g.ny = count(lo.y, hi.y, spacing.y);
  g.nz = count(lo.z, hi.z, spacing.z);
  return g;
}

Volume compound(const ScanDataset& ds, const VolumeGeometry& geom) {
  Volume vol;
  vol.geometry = geom;
  vol.intensity = Grid3<std::uint8_t>(geom.nx, geom.ny, geom.nz);
  vol.bone = Grid3<std::uint8_t>(geom.nx, geom.ny, geom.nz);
  vol.hit_count = Grid3<std::uint32_t>(geom.nx, geom.ny, geom.nz);
  vol.filled = Grid3<std::uint8_t>(geom.nx, geom.ny, geom.nz);

  for (const TrackedFrame& f : ds.frames) {
    const int w = f.intensity.width();
    const int h = f.intensity.height();
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        const Vec3 p = f.pixel_to_world(i, j);
        const int ix = nearest_index(p.x, geom.origin.x, geom.spacing.x);
        const int iy = nearest_index(p.y, geom.origin.y, geom.spacing.y);
        const int iz = nearest_index(p.z, geom.origin.z, geom.spacing.z);
        if (ix < 0 || ix >= geom.nx || iy < 0 || iy >= geom.ny || iz < 0 ||
            iz >= geom.nz)
          throw std::logic_error(
              "pixel maps outside the volume geometry (frame " +
              std::to_string(f.index) + ")");
        const std::size_t v = vol.intensity.index(ix, iy, iz);
        vol.intensity.data()[v] =
            std::max(vol.intensity.data()[v], f.intensity.at(i, j));
        vol.bone.data()[v] |= f.mask.at(i, j);
        ++vol.hit_count.data()[v];
      }
    }
  }
  return vol;
}

Volume fill_holes(const Volume& vol, double radius_mm) {
  if (radius_mm < 0.0) throw input_error("fill radius must be >= 0");
  Volume out = vol;
  if (radius_mm == 0.0) return out;

  const VolumeGeometry& g = vol.geometry;

  // Neighbor offsets within the radius, nearest first; ties resolved by
  // (dz,dy,dx) so the fill is scan-order independent.
  struct Offset {
    double d2;
    int dx, dy, dz;
  };
  std::vector<Offset> offsets;
  const int rx = static_cast<int>(std::floor(radius_mm / g.spacing.x));
  const int ry = static_cast<int>(std::floor(radius_mm / g.spacing.y));
  const int rz = static_cast<int>(std::floor(radius_mm / g.spacing.z));
  const double r2 = radius_mm * radius_mm;
  for (int dz = -rz; dz <= rz; ++dz)
    for (int dy = -ry; dy <= ry; ++dy)
      for (int dx = -rx; dx <= rx; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const double d2 = dx * g.spacing.x * dx * g.spacing.x +
                          dy * g.spacing.y * dy * g.spacing.y +
                          dz * g.spacing.z * dz * g.spacing.z;
        if (d2 <= r2 + 1e-12) offsets.push_back({d2, dx, dy, dz});
      }
  std::sort(offsets.begin(), offsets.end(), [](const Offset& a, const Offset& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.dz != b.dz) return a.dz < b.dz;
    if (a.dy != b.dy) return a.dy < b.dy;
    return a.dx < b.dx;
  });

  // First/last hit per z-column; only voxels between them are fill targets.
  Grid2<int> z_first(g.nx, g.ny, g.nz);
  Grid2<int> z_last(g.nx, g.ny, -1);
  for (int iz = 0; iz < g.nz; ++iz)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix)
        if (vol.hit_count.at(ix, iy, iz)) {
          if (z_first.at(ix, iy) == g.nz) z_first.at(ix, iy) = iz;
          z_last.at(ix, iy) = iz;
        }

  for (int iz = 0; iz < g.nz; ++iz) {
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        if (vol.hit_count.at(ix, iy, iz)) continue;
        if (iz <= z_first.at(ix, iy) || iz >= z_last.at(ix, iy)) continue;
        for (const Offset& o : offsets) {
          const int jx = ix + o.dx;
          const int jy = iy + o.dy;
          const int jz = iz + o.dz;
          if (jx < 0 || jx >= g.nx || jy < 0 || jy >= g.ny || jz < 0 ||
              jz >= g.nz)
            continue;
          if (!vol.hit_count.at(jx, jy, jz)) continue;
          out.intensity.at(ix, iy, iz) = vol.intensity.at(jx, jy, jz);
          out.bone.at(ix, iy, iz) = vol.bone.at(jx, jy, jz);
          out.filled.at(ix, iy, iz) = 1;
          break;
        }
      }
    }
  }
  return out;
}

void export_volume(const Volume& vol, const std::filesystem::path& base_path) {
  const VolumeGeometry& g = vol.geometry;

  std::filesystem::path raw_path = base_path;
  raw_path += ".raw";
  std::ofstream raw(raw_path, std::ios::binary);
  if (!raw) throw input_error("cannot write " + raw_path.string());
  raw.write(reinterpret_cast<const char*>(vol.intensity.data().data()),
            static_cast<std::streamsize>(vol.intensity.size()));
  raw.write(reinterpret_cast<const char*>(vol.bone.data().data()),
            static_cast<std::streamsize>(vol.bone.size()));
  // hit_count assumes a little-endian host, as declared in the sidecar
  raw.write(reinterpret_cast<const char*>(vol.hit_count.data().data()),
            static_cast<std::streamsize>(vol.hit_count.size() * 4));
  raw.write(reinterpret_cast<const char*>(vol.filled.data().data()),
            static_cast<std::streamsize>(vol.filled.size()));

  nlohmann::json side;
  side["origin_mm"] = {g.origin.x, g.origin.y, g.origin.z};
  side["spacing_mm"] = {g.spacing.x, g.spacing.y, g.spacing.z};
  side["dims"] = {g.nx, g.ny, g.nz};
  side["voxel_order"] = "x fastest, then y, then z";
  side["channels"] = {{{"name", "intensity"}, {"dtype", "uint8"}},
                      {{"name", "bone"}, {"dtype", "uint8"}},
                      {{"name", "hit_count"}, {"dtype", "uint32le"}},
                      {{"name", "filled"}, {"dtype", "uint8"}}};
  std::filesystem::path json_path = base_path;
  json_path += ".json";
  std::ofstream js(json_path, std::ios::binary);
  if (!js) throw input_error("cannot write " + json_path.string());
  js << side.dump(2) << "\n";
}

}  // namespace lamina
