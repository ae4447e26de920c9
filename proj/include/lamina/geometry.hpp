#pragma once

#include <cmath>

namespace lamina {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm_sq() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm_sq()); }

  // Leaves an already-unit quaternion untouched so that pose tables
  // written by this project re-serialize byte-identically.
  Quat normalized() const {
    const double n2 = norm_sq();
    if (std::abs(n2 - 1.0) <= 1e-12) return *this;
    const double n = std::sqrt(n2);
    return {w / n, x / n, y / n, z / n};
  }

  Vec3 rotate(const Vec3& v) const {
    const Vec3 u{x, y, z};
    const Vec3 uv = u.cross(v);
    const Vec3 uuv = u.cross(uv);
    return v + uv * (2.0 * w) + uuv * 2.0;
  }

  bool finite() const {
    return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) &&
           std::isfinite(z);
  }
};

// 6-DOF probe pose: position in mm plus orientation, tracker/world space.
struct Pose {
  Vec3 position;
  Quat orientation;

  Vec3 to_world(const Vec3& local) const {
    return orientation.rotate(local) + position;
  }
};

}  // namespace lamina
