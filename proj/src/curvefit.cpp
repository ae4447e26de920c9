#include "lamina/curvefit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "lamina/errors.hpp"

namespace lamina {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

bool point_order(const CorePoint& a, const CorePoint& b) {
  if (a.z_mm != b.z_mm) return a.z_mm < b.z_mm;
  if (a.y_mm != b.y_mm) return a.y_mm < b.y_mm;
  return a.source_frame < b.source_frame;
}

double poly_eval(const std::array<double, kCurveDegree + 1>& c, double t) {
  double y = 0.0;
  for (int k = kCurveDegree; k >= 0; --k) y = y * t + c[k];
  return y;
}

double poly_deriv_eval(const std::array<double, kCurveDegree + 1>& c,
                       double t) {
  double y = 0.0;
  for (int k = kCurveDegree; k >= 1; --k) y = y * t + k * c[k];
  return y;
}

// y'' in the normalized abscissa.
double second_deriv_eval(const std::array<double, kCurveDegree + 1>& c,
                         double t) {
  return 2.0 * c[2] + 6.0 * c[3] * t + 12.0 * c[4] * t * t +
         20.0 * c[5] * t * t * t;
}

double newton_polish_cubic(double a, double b, double c, double d, double t) {
  for (int it = 0; it < 2; ++it) {
    const double f = ((a * t + b) * t + c) * t + d;
    const double df = (3.0 * a * t + 2.0 * b) * t + c;
    if (df == 0.0) break;
    t -= f / df;
  }
  return t;
}

}  // namespace

std::vector<double> solve_cubic_real(double a, double b, double c, double d) {
  std::vector<double> roots;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c),
                                 std::abs(d)});
  if (scale == 0.0) return roots;
  const double rel = 1e-12 * scale;

  if (std::abs(a) <= rel) {
    if (std::abs(b) <= rel) {
      if (std::abs(c) <= rel) return roots;  // constant
      roots.push_back(-d / c);
      return roots;
    }
    // quadratic, numerically stable split
    const double disc = c * c - 4.0 * b * d;
    if (disc < 0.0) return roots;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (c + (c >= 0.0 ? sq : -sq));
    roots.push_back(q / b);
    if (q != 0.0) roots.push_back(d / q);
    else roots.push_back(0.0);
    if (disc == 0.0) roots.pop_back();
    return roots;
  }

  // monic: t^3 + p t^2 + q t + r
  const double p = b / a;
  const double q = c / a;
  const double r = d / a;

  const double p2 = p * p;
  const double Q = (p2 - 3.0 * q) / 9.0;
  const double R = (p * (2.0 * p2 - 9.0 * q) + 27.0 * r) / 54.0;
  const double R2 = R * R;
  const double Q3 = Q * Q * Q;

  if (R2 < Q3) {
    // three real roots (trigonometric form)
    const double theta = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
    const double m = -2.0 * std::sqrt(Q);
    const double shift = p / 3.0;
    roots.push_back(m * std::cos(theta / 3.0) - shift);
    roots.push_back(m * std::cos((theta + 2.0 * std::numbers::pi) / 3.0) -
                    shift);
    roots.push_back(m * std::cos((theta - 2.0 * std::numbers::pi) / 3.0) -
                    shift);
  } else {
    // one real root (Cardano)
    const double u3 = -R - std::sqrt(R2 - Q3);
    const double u = std::cbrt(u3);
    const double v = (u == 0.0) ? 0.0 : Q / u;
    roots.push_back(u + v - p / 3.0);
    // a double root appears when the remaining conjugate pair is real
    const double imag = 0.5 * std::sqrt(3.0) * (u - v);
    if (std::abs(imag) <= 1e-12 * std::max(1.0, std::abs(u + v))) {
      const double t2 = -0.5 * (u + v) - p / 3.0;
      if (std::abs(t2 - roots[0]) > 1e-12 * std::max(1.0, std::abs(t2)))
        roots.push_back(t2);
    }
  }

  for (double& t : roots) t = newton_polish_cubic(a, b, c, d, t);
  return roots;
}

double LaminaCurve::evaluate(double z_mm) const {
  return poly_eval(coeffs, normalize(z_mm));
}

double LaminaCurve::slope(double z_mm) const {
  return poly_deriv_eval(coeffs, normalize(z_mm)) / z_half;
}

DbscanResult dbscan_filter(std::vector<CorePoint> points,
                           const DbscanParams& params) {
  if (!(params.eps_mm > 0.0)) throw input_error("DBSCAN eps must be > 0");
  if (params.min_pts < 1) throw input_error("DBSCAN min_pts must be >= 1");

  std::sort(points.begin(), points.end(), point_order);
  const int n = static_cast<int>(points.size());
  const double eps2 = params.eps_mm * params.eps_mm;

  std::vector<std::vector<int>> nbr(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double dz = points[i].z_mm - points[j].z_mm;
      const double dy = points[i].y_mm - points[j].y_mm;
      if (dz * dz + dy * dy <= eps2) nbr[i].push_back(j);
    }

  std::vector<char> core(n, 0);
  for (int i = 0; i < n; ++i)
    core[i] = nbr[i].size() >= static_cast<std::size_t>(params.min_pts);

  // Union-find over core points; the representative is always the lowest
  // index, which pins cluster identity deterministically.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  auto unite = [&](int i, int j) {
    int a = find(i), b = find(j);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent[b] = a;
  };
  for (int i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (int j : nbr[i])
      if (core[j]) unite(i, j);
  }

  std::vector<int> label(n, -1);
  for (int i = 0; i < n; ++i) {
    if (core[i]) {
      label[i] = find(i);
    } else {
      // border point: cluster of the lowest-ranked core point reaching it
      for (int j : nbr[i])
        if (core[j]) {
          label[i] = find(j);
          break;
        }
    }
  }

  DbscanResult result;
  for (int i = 0; i < n; ++i)
    (label[i] >= 0 ? result.kept : result.noise).push_back(points[i]);
  if (result.kept.empty())
    throw pipeline_error("DBSCAN classified every core point as noise");
  return result;
}

LaminaCurve fit_polynomial(const std::vector<CorePoint>& points) {
  const int n = static_cast<int>(points.size());
  if (n < kMinFitPoints)
    throw pipeline_error("too few points for the quintic fit (" +
                         std::to_string(n) + ", need >= " +
                         std::to_string(kMinFitPoints) + ")");

  double z_min = points[0].z_mm;
  double z_max = points[0].z_mm;
  for (const CorePoint& p : points) {
    z_min = std::min(z_min, p.z_mm);
    z_max = std::max(z_max, p.z_mm);
  }
  if (!(z_max - z_min > 1e-9))
    throw pipeline_error("degenerate fit: all points share one z");

  LaminaCurve curve;
  curve.z_min = z_min;
  curve.z_max = z_max;
  curve.z_mid = 0.5 * (z_min + z_max);
  curve.z_half = 0.5 * (z_max - z_min);

  Eigen::MatrixXd A(n, kCurveDegree + 1);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const double t = curve.normalize(points[i].z_mm);
    double tp = 1.0;
    for (int k = 0; k <= kCurveDegree; ++k) {
      A(i, k) = tp;
      tp *= t;
    }
    rhs(i) = points[i].y_mm;
  }

  const auto qr = A.colPivHouseholderQr();
  if (qr.rank() < kCurveDegree + 1)
    throw pipeline_error("rank-deficient fit: too few distinct z values");
  const Eigen::VectorXd sol = qr.solve(rhs);
  for (int k = 0; k <= kCurveDegree; ++k) curve.coeffs[k] = sol(k);
  return curve;
}

std::vector<double> find_inflections(const LaminaCurve& curve) {
  // y''(t) = 2 c2 + 6 c3 t + 12 c4 t^2 + 20 c5 t^3
  const auto& c = curve.coeffs;
  std::vector<double> roots =
      solve_cubic_real(20.0 * c[5], 12.0 * c[4], 6.0 * c[3], 2.0 * c[2]);

  std::sort(roots.begin(), roots.end());
  std::vector<double> inflections;
  for (double t : roots) {
    if (!(t > -1.0 && t < 1.0)) continue;
    const double before = second_deriv_eval(c, t - 1e-6);
    const double after = second_deriv_eval(c, t + 1e-6);
    if (!(before * after < 0.0)) continue;  // tangent touch, not an inflection
    const double z = curve.z_mid + curve.z_half * t;
    if (!inflections.empty() && std::abs(z - inflections.back()) < 1e-9)
      continue;
    inflections.push_back(z);
  }
  return inflections;
}

LaminaCurve measure_angles(LaminaCurve curve) {
  if (!(curve.z_max - curve.z_min > 1e-6))
    throw pipeline_error("degenerate curve domain");

  std::vector<double> eval = curve.inflections_mm;
  if (eval.size() < 2) {
    eval.push_back(curve.z_min);
    eval.push_back(curve.z_max);
    std::sort(eval.begin(), eval.end());
    eval.erase(std::unique(eval.begin(), eval.end(),
                           [](double a, double b) {
                             return std::abs(a - b) < 1e-12;
                           }),
               eval.end());
  }

  curve.eval_points_mm = eval;
  curve.tangent_angles_deg.clear();
  for (double z : eval)
    curve.tangent_angles_deg.push_back(std::atan(curve.slope(z)) * kRadToDeg);

  // Differences taken walking caudal -> cranial (ascending z); under the
  // y = depth convention this makes extension positive, flexion negative.
  curve.pair_angles_deg.clear();
  for (std::size_t k = 0; k + 1 < eval.size(); ++k)
    curve.pair_angles_deg.push_back(curve.tangent_angles_deg[k] -
                                    curve.tangent_angles_deg[k + 1]);

  double best = 0.0;
  for (double a : curve.pair_angles_deg)
    if (std::abs(a) > std::abs(best)) best = a;
  curve.reported_angle_deg = best;
  return curve;
}

}  // namespace lamina
