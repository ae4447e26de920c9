#pragma once

#include <array>
#include <vector>

#include "lamina/corepoints.hpp"

namespace lamina {

struct DbscanParams {
  double eps_mm = 4.0;
  int min_pts = 5;
};

struct DbscanResult {
  std::vector<CorePoint> kept;
  std::vector<CorePoint> noise;
};

// Density clustering in the (z,y) plane, Euclidean metric, neighborhoods
// counting the point itself. Deterministic regardless of input order: points
// are ranked lexicographically by (z, y, source_frame); border points join
// the cluster of the lowest-ranked core point that reaches them. kept holds
// every clustered point, noise the rest; an empty kept set is an error.
DbscanResult dbscan_filter(std::vector<CorePoint> points,
                           const DbscanParams& params);

inline constexpr int kCurveDegree = 5;
inline constexpr int kMinFitPoints = 18;  // 3x the parameters of a quintic

// Degree-5 polynomial y(t) over the affinely normalized abscissa
// t = (z - z_mid) / z_half in [-1,1].
struct LaminaCurve {
  std::array<double, kCurveDegree + 1> coeffs{};
  double z_min = 0.0;  // domain, mm
  double z_max = 0.0;
  double z_mid = 0.0;
  double z_half = 0.0;

  std::vector<double> inflections_mm;       // sorted ascending
  std::vector<double> eval_points_mm;       // ascending z (caudal -> cranial)
  std::vector<double> tangent_angles_deg;   // at eval points
  std::vector<double> pair_angles_deg;      // signed, extension positive
  double reported_angle_deg = 0.0;

  double normalize(double z_mm) const { return (z_mm - z_mid) / z_half; }
  double evaluate(double z_mm) const;
  double slope(double z_mm) const;  // dy/dz, mm/mm
};

// Least-squares quintic through the points. Requires at least kMinFitPoints
// points and a non-degenerate z span.
LaminaCurve fit_polynomial(const std::vector<CorePoint>& points);

// Real roots of y'' inside the open domain, found in closed form and each
// confirmed by a sign change of y'' across it. Returned in mm, ascending.
std::vector<double> find_inflections(const LaminaCurve& curve);

// Populates eval points, tangent angles, signed pair angles and the reported
// angle. Evaluation points are the inflections; when fewer than two exist the
// domain endpoints are appended. Pair angles are differences of neighboring
// tangent angles taken caudal to cranial, which makes extension (lordosis)
// positive and flexion negative under the volume axis convention.
// curve.inflections_mm must already be set.
LaminaCurve measure_angles(LaminaCurve curve);

// Closed-form real roots of a*t^3 + b*t^2 + c*t + d = 0 (degenerate leading
// coefficients handled), unsorted, with multiplicity collapsed.
std::vector<double> solve_cubic_real(double a, double b, double c, double d);

}  // namespace lamina
