#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "lamina/curvefit.hpp"
#include "lamina/errors.hpp"
#include "oracles.hpp"

using namespace lamina;

namespace {

template <typename F>
std::vector<CorePoint> sample(int n, double z0, double z1, F f) {
  std::vector<CorePoint> pts;
  for (int i = 0; i < n; ++i) {
    const double z = z0 + (z1 - z0) * i / static_cast<double>(n - 1);
    CorePoint p;
    p.z_mm = z;
    p.y_mm = f(z);
    p.source_frame = i;
    p.weight = 1.0;
    pts.push_back(p);
  }
  return pts;
}

LaminaCurve unit_curve(std::array<double, 6> coeffs) {
  LaminaCurve c;
  c.z_min = -1.0;
  c.z_max = 1.0;
  c.z_mid = 0.0;
  c.z_half = 1.0;
  c.coeffs = coeffs;
  return c;
}

double ssr(const LaminaCurve& c, const std::vector<CorePoint>& pts) {
  double s = 0.0;
  for (const CorePoint& p : pts) {
    const double r = p.y_mm - c.evaluate(p.z_mm);
    s += r * r;
  }
  return s;
}

std::vector<CorePoint> chain(int n, double step) {
  std::vector<CorePoint> pts;
  for (int i = 0; i < n; ++i) {
    CorePoint p;
    p.z_mm = i * step;
    p.y_mm = 0.0;
    p.source_frame = i;
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_SUITE("curvefit") {

TEST_CASE("cubic solver covers all root layouts") {
  // (t-1)(t-2)(t-3)
  auto r = solve_cubic_real(1, -6, 11, -6);
  std::sort(r.begin(), r.end());
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r[2] == doctest::Approx(3.0).epsilon(1e-12));

  // one real root: t^3 + t + 1
  r = solve_cubic_real(1, 0, 1, 1);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(-0.6823278038280193).epsilon(1e-12));

  // double root: (t-1)^2 (t-3)
  r = solve_cubic_real(1, -5, 7, -3);
  std::sort(r.begin(), r.end());
  REQUIRE(r.size() >= 2);
  CHECK(r.front() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.back() == doctest::Approx(3.0).epsilon(1e-9));

  // degenerate leading coefficients
  r = solve_cubic_real(0, 2, -3, 1);  // 2t^2 - 3t + 1
  std::sort(r.begin(), r.end());
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-12));

  r = solve_cubic_real(0, 0, 4, -2);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(0.5));

  CHECK(solve_cubic_real(0, 0, 0, 5).empty());
  CHECK(solve_cubic_real(0, 0, 0, 0).empty());
  CHECK(solve_cubic_real(0, 1, 0, 1).empty());  // t^2 + 1

  // leading coefficient at rounding-noise scale is treated as zero
  r = solve_cubic_real(1e-18, 1, 0, -4);
  std::sort(r.begin(), r.end());
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(-2.0));
  CHECK(r[1] == doctest::Approx(2.0));
}

TEST_CASE("dbscan keeps dense chains and drops isolated points") {
  std::vector<CorePoint> pts = chain(20, 0.5);
  DbscanResult res = dbscan_filter(pts, {1.0, 5});
  CHECK(res.kept.size() == 20);
  CHECK(res.noise.empty());

  CorePoint far;
  far.z_mm = 100.0;
  far.source_frame = 99;
  pts.push_back(far);
  res = dbscan_filter(pts, {1.0, 5});
  CHECK(res.kept.size() == 20);
  REQUIRE(res.noise.size() == 1);
  CHECK(res.noise[0].z_mm == doctest::Approx(100.0));
}

TEST_CASE("dbscan with min_pts 1 keeps every point") {
  std::vector<CorePoint> pts = chain(5, 50.0);  // far apart
  DbscanResult res = dbscan_filter(pts, {1.0, 1});
  CHECK(res.kept.size() == 5);
  CHECK(res.noise.empty());
}

TEST_CASE("dbscan output is input-order independent") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<CorePoint> pts;
  for (int i = 0; i < 40; ++i) {
    CorePoint p;
    p.z_mm = u(rng);
    p.y_mm = u(rng);
    p.source_frame = i;
    pts.push_back(p);
  }
  const DbscanResult ref = dbscan_filter(pts, {1.2, 3});
  for (int trial = 0; trial < 6; ++trial) {
    std::shuffle(pts.begin(), pts.end(), rng);
    const DbscanResult res = dbscan_filter(pts, {1.2, 3});
    REQUIRE(res.kept.size() == ref.kept.size());
    for (std::size_t i = 0; i < res.kept.size(); ++i) {
      CHECK(res.kept[i].z_mm == ref.kept[i].z_mm);
      CHECK(res.kept[i].source_frame == ref.kept[i].source_frame);
    }
  }
}

TEST_CASE("dbscan matches the brute-force oracle") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 50)(rng);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<CorePoint> pts;
    for (int i = 0; i < n; ++i) {
      CorePoint p;
      p.z_mm = u(rng);
      p.y_mm = u(rng);
      p.source_frame = i;
      pts.push_back(p);
    }
    const double eps = std::uniform_real_distribution<double>(0.3, 3.0)(rng);
    const int min_pts = std::uniform_int_distribution<int>(1, 8)(rng);

    const auto expected = oracle::dbscan_kept(pts, eps, min_pts);
    if (expected.empty()) {
      CHECK_THROWS_AS(dbscan_filter(pts, {eps, min_pts}), pipeline_error);
      continue;
    }
    const DbscanResult res = dbscan_filter(pts, {eps, min_pts});
    REQUIRE(res.kept.size() == expected.size());
    for (const CorePoint& p : res.kept)
      CHECK(expected.count(oracle::key_of(p)) == 1);
    for (const CorePoint& p : res.noise)
      CHECK(expected.count(oracle::key_of(p)) == 0);
  }
}

TEST_CASE("dbscan parameter validation and all-noise failure") {
  std::vector<CorePoint> pts = chain(19, 100.0);
  CHECK_THROWS_AS(dbscan_filter(pts, {1.0, 5}), pipeline_error);
  CHECK_THROWS_AS(dbscan_filter(pts, {0.0, 5}), input_error);
  CHECK_THROWS_AS(dbscan_filter(pts, {1.0, 0}), input_error);
}

TEST_CASE("fit recovers an exact quintic to 1e-8") {
  const auto pts = sample(30, -1.0, 1.0, [](double z) {
    return std::pow(z, 5) - 2.0 * std::pow(z, 3) + 0.5;
  });
  LaminaCurve c = fit_polynomial(pts);
  const std::array<double, 6> want{0.5, 0.0, 0.0, -2.0, 0.0, 1.0};
  for (int k = 0; k < 6; ++k)
    CHECK(std::abs(c.coeffs[k] - want[k]) < 1e-8);
  CHECK(ssr(c, pts) < 1e-10);
}

TEST_CASE("fit of a constant keeps derivative coefficients at zero") {
  const auto pts = sample(25, 3.0, 9.0, [](double) { return 3.0; });
  LaminaCurve c = fit_polynomial(pts);
  CHECK(c.coeffs[0] == doctest::Approx(3.0).epsilon(1e-12));
  for (int k = 1; k < 6; ++k) CHECK(std::abs(c.coeffs[k]) < 1e-9);
}

TEST_CASE("noisy fit stays near truth and matches the extended-precision solve") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  auto pts = sample(60, -1.0, 1.0, [](double z) { return std::pow(z, 5); });
  for (auto& p : pts) p.y_mm += noise(rng);

  LaminaCurve c = fit_polynomial(pts);
  for (const CorePoint& p : pts) {
    const double truth = std::pow(p.z_mm, 5);
    CHECK(std::abs(c.evaluate(p.z_mm) - truth) < 0.02);
  }

  const auto reference = oracle::polyfit6(pts);
  for (int k = 0; k < 6; ++k)
    CHECK(std::abs(c.coeffs[k] - reference[k]) < 1e-10);
}

TEST_CASE("fitted coefficients are a least-squares optimum") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> noise(-0.5, 0.5);
  auto pts = sample(40, 10.0, 90.0, [](double z) {
    return 40.0 + 0.02 * (z - 50.0) + 1e-4 * (z - 50.0) * (z - 50.0);
  });
  for (auto& p : pts) p.y_mm += noise(rng);

  LaminaCurve c = fit_polynomial(pts);
  const double base = ssr(c, pts);
  for (int k = 0; k < 6; ++k)
    for (double d : {-1e-4, 1e-4}) {
      LaminaCurve bumped = c;
      bumped.coeffs[k] += d;
      CHECK(ssr(bumped, pts) >= base);
    }
}

TEST_CASE("fit rejects short, flat, or collapsed abscissae") {
  auto few = sample(17, 0.0, 1.0, [](double z) { return z; });
  CHECK_THROWS_AS(fit_polynomial(few), pipeline_error);

  std::vector<CorePoint> same_z;
  for (int i = 0; i < 20; ++i) {
    CorePoint p;
    p.z_mm = 5.0;
    p.y_mm = i;
    same_z.push_back(p);
  }
  CHECK_THROWS_AS(fit_polynomial(same_z), pipeline_error);

  // 18 points on 3 distinct abscissae cannot pin 6 coefficients
  std::vector<CorePoint> three_z;
  for (int i = 0; i < 18; ++i) {
    CorePoint p;
    p.z_mm = i % 3;
    p.y_mm = i;
    three_z.push_back(p);
  }
  CHECK_THROWS_AS(fit_polynomial(three_z), pipeline_error);
}

TEST_CASE("inflections of reference shapes") {
  // y = t^3
  auto c = unit_curve({0, 0, 0, 1, 0, 0});
  auto infl = find_inflections(c);
  REQUIRE(infl.size() == 1);
  CHECK(infl[0] == doctest::Approx(0.0));

  // y = t^5 - t^3: inflection trio at 0 and +-sqrt(0.3)
  c = unit_curve({0, 0, 0, -1, 0, 1});
  infl = find_inflections(c);
  REQUIRE(infl.size() == 3);
  CHECK(infl[0] == doctest::Approx(-std::sqrt(0.3)).epsilon(1e-10));
  CHECK(infl[1] == doctest::Approx(0.0));
  CHECK(infl[2] == doctest::Approx(std::sqrt(0.3)).epsilon(1e-10));

  // y = t^2: constant curvature
  c = unit_curve({0, 0, 1, 0, 0, 0});
  CHECK(find_inflections(c).empty());
}

TEST_CASE("inflections map back to the mm domain") {
  LaminaCurve c = unit_curve({0, 0, 0, -1, 0, 1});
  c.z_min = 10.0;
  c.z_max = 30.0;
  c.z_mid = 20.0;
  c.z_half = 10.0;
  const auto infl = find_inflections(c);
  REQUIRE(infl.size() == 3);
  CHECK(infl[0] == doctest::Approx(20.0 - 10.0 * std::sqrt(0.3)));
  CHECK(infl[1] == doctest::Approx(20.0));
  CHECK(infl[2] == doctest::Approx(20.0 + 10.0 * std::sqrt(0.3)));
}

TEST_CASE("tangent touches and boundary roots are not inflections") {
  // y'' = 3 (2t - 1)^2 touches zero at t = 0.5 without crossing
  CHECK(find_inflections(unit_curve({0, 0, 1.5, -2, 1, 0})).empty());
  // y'' = 6t - 6 vanishes exactly at the domain edge
  CHECK(find_inflections(unit_curve({0, 0, -3, 1, 0, 0})).empty());
}

TEST_CASE("pair angle of slopes 0 and 1 is 45 degrees") {
  LaminaCurve c = unit_curve({0, 0.5, 0.25, 0, 0, 0});
  c.inflections_mm = find_inflections(c);
  REQUIRE(c.inflections_mm.empty());
  c = measure_angles(c);
  REQUIRE(c.eval_points_mm.size() == 2);
  CHECK(c.tangent_angles_deg[0] == doctest::Approx(0.0));
  CHECK(c.tangent_angles_deg[1] == doctest::Approx(45.0));
  REQUIRE(c.pair_angles_deg.size() == 1);
  CHECK(std::abs(c.pair_angles_deg[0]) == doctest::Approx(45.0));
  CHECK(c.reported_angle_deg == doctest::Approx(-45.0));
}

TEST_CASE("reported angle is the max-magnitude pair") {
  // two inflections of unequal flank steepness
  LaminaCurve c = unit_curve({0, -0.3, 0.5, 1, 0, 0});
  c.inflections_mm = find_inflections(c);
  REQUIRE(c.inflections_mm.size() == 1);
  c = measure_angles(c);
  REQUIRE(c.eval_points_mm.size() == 3);
  REQUIRE(c.pair_angles_deg.size() == 2);
  CHECK(std::abs(c.pair_angles_deg[1]) > std::abs(c.pair_angles_deg[0]));
  CHECK(c.reported_angle_deg == doctest::Approx(c.pair_angles_deg[1]));
}

TEST_CASE("equal-magnitude pairs resolve to the most caudal") {
  // symmetric slopes 3, 0, 3 around a single exact inflection at t = 0
  LaminaCurve c = unit_curve({0, 0, 0, 1, 0, 0});
  c.inflections_mm = find_inflections(c);
  REQUIRE(c.inflections_mm.size() == 1);
  c = measure_angles(c);
  REQUIRE(c.pair_angles_deg.size() == 2);
  CHECK(c.pair_angles_deg[0] == -c.pair_angles_deg[1]);
  CHECK(c.reported_angle_deg == c.pair_angles_deg[0]);
  CHECK(c.reported_angle_deg == doctest::Approx(std::atan(3.0) * 180.0 / M_PI));
}

TEST_CASE("translation and isotropic scale leave pair angles unchanged") {
  auto f = [](double z) {
    return 40.0 + 3.0 * std::sin(0.15 * (z - 15.0));
  };
  const auto pts = sample(50, 5.0, 25.0, f);

  auto angles_of = [](std::vector<CorePoint> pts) {
    LaminaCurve c = fit_polynomial(pts);
    c.inflections_mm = find_inflections(c);
    c = measure_angles(c);
    return c.pair_angles_deg;
  };

  const auto base = angles_of(pts);
  REQUIRE(!base.empty());

  auto shifted = pts;
  for (auto& p : shifted) {
    p.z_mm += 17.3;
    p.y_mm += -4.2;
  }
  const auto after_shift = angles_of(shifted);
  REQUIRE(after_shift.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(std::abs(after_shift[i] - base[i]) < 1e-6);

  auto scaled = pts;
  for (auto& p : scaled) {
    p.z_mm *= 2.7;
    p.y_mm *= 2.7;
  }
  const auto after_scale = angles_of(scaled);
  REQUIRE(after_scale.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(std::abs(after_scale[i] - base[i]) < 1e-6);
}

TEST_CASE("mirroring y negates every pair angle") {
  auto f = [](double z) {
    return 40.0 + 3.0 * std::sin(0.15 * (z - 15.0));
  };
  auto pts = sample(50, 5.0, 25.0, f);
  LaminaCurve c = fit_polynomial(pts);
  c.inflections_mm = find_inflections(c);
  c = measure_angles(c);

  for (auto& p : pts) p.y_mm = -p.y_mm;
  LaminaCurve m = fit_polynomial(pts);
  m.inflections_mm = find_inflections(m);
  m = measure_angles(m);

  REQUIRE(m.pair_angles_deg.size() == c.pair_angles_deg.size());
  for (std::size_t i = 0; i < c.pair_angles_deg.size(); ++i)
    CHECK(std::abs(m.pair_angles_deg[i] + c.pair_angles_deg[i]) < 1e-9);
  CHECK(std::abs(m.reported_angle_deg + c.reported_angle_deg) < 1e-9);
}

TEST_CASE("degenerate domain is fatal") {
  LaminaCurve c = unit_curve({0, 0, 0, 0, 0, 0});
  c.z_min = 5.0;
  c.z_max = 5.0 + 1e-7;
  CHECK_THROWS_AS(measure_angles(c), pipeline_error);
}

}  // TEST_SUITE
