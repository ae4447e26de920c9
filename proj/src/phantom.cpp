#include "lamina/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "lamina/curvefit.hpp"
#include "lamina/errors.hpp"
#include "lamina/scan_model.hpp"

namespace lamina {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Margin (5 mm) plus band (4 mm) defaults of the measurement stage; a lamina
// blob closer to midline than this could be swallowed by the spinous column.
constexpr double kMinLaminaOffsetMm = 9.0;

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() {  // (0, 1)
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian() {  // Box-Muller, cosine branch
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }
};

// Lamina depth profile y(z), z in [0, L] from the caudal end.
class DepthTrack {
 public:
  DepthTrack(const PhantomSpec& spec, double length_mm)
      : length_mm_(length_mm) {
    if (const auto* arc = std::get_if<ArcModel>(&spec.curve_model)) {
      arc_ = true;
      base_ = spec.base_depth_mm;
      const double phi = std::abs(arc->subtended_deg) * kDegToRad;
      if (phi > 0.0) {
        sign_ = arc->subtended_deg > 0.0 ? 1.0 : -1.0;
        radius_ = (length_mm_ / 2.0) / std::sin(phi / 2.0);
        chord_depth_ = radius_ * std::cos(phi / 2.0);
      }
    } else {
      coeffs_ = std::get<QuinticModel>(spec.curve_model).coeffs;
    }
  }

  double depth(double z) const {
    if (!arc_) {
      double y = 0.0;
      for (int k = 5; k >= 0; --k) y = y * z + coeffs_[k];
      return y;
    }
    if (sign_ == 0.0) return base_;
    const double d = z - length_mm_ / 2.0;
    const double arg = std::max(radius_ * radius_ - d * d, 0.0);
    // ends sit at base depth; a positive arc bows deeper mid-track
    return base_ + sign_ * (std::sqrt(arg) - chord_depth_);
  }

 private:
  double length_mm_;
  bool arc_ = false;
  double base_ = 0.0;
  double sign_ = 0.0;  // 0 = straight
  double radius_ = 0.0;
  double chord_depth_ = 0.0;
  std::array<double, 6> coeffs_{};
};

void validate_spec(const PhantomSpec& spec) {
  if (spec.frame_count < kMinFitPoints)
    throw input_error("phantom frame_count must be >= " +
                      std::to_string(kMinFitPoints) +
                      " for a valid downstream fit");
  if (!(spec.blob_sigma_mm > 0.0))
    throw input_error("phantom blob_sigma must be > 0");
  if (!(spec.lamina_offset_mm > kMinLaminaOffsetMm))
    throw input_error("phantom lamina_offset must exceed 9 mm "
                      "(measurement margin 5 + band 4)");
  if (!(spec.frame_spacing_mm > 0.0))
    throw input_error("phantom frame_spacing must be > 0");
  if (!(spec.pixel_spacing_mm > 0.0))
    throw input_error("phantom pixel_spacing must be > 0");
  if (spec.frame_width < 16 || spec.frame_height < 16)
    throw input_error("phantom frame size must be at least 16x16");
  if (spec.intensity_peak < 4 || spec.intensity_peak > 255)
    throw input_error("phantom intensity_peak must be in [4, 255]");
  if (spec.pose_noise_translation_mm < 0.0 ||
      spec.pose_noise_rotation_deg < 0.0)
    throw input_error("phantom pose noise must be >= 0");
  if (const auto* arc = std::get_if<ArcModel>(&spec.curve_model))
    if (!(std::abs(arc->subtended_deg) < 180.0))
      throw input_error("phantom arc angle must be inside (-180, 180)");

  // the blobs (out to the zero-intensity cutoff) must stay inside the frame
  const double length =
      (spec.frame_count - 1) * spec.frame_spacing_mm;
  const double cutoff =
      spec.blob_sigma_mm *
      std::sqrt(2.0 * std::log(2.0 * spec.intensity_peak));
  const double width_mm = (spec.frame_width - 1) * spec.pixel_spacing_mm;
  const double height_mm = (spec.frame_height - 1) * spec.pixel_spacing_mm;
  const double cx = width_mm / 2.0;
  if (cx - spec.lamina_offset_mm - cutoff < 0.0 ||
      cx + spec.lamina_offset_mm + cutoff > width_mm)
    throw input_error("phantom lamina blobs fall outside the frame width");

  DepthTrack track(spec, length);
  double dmin = spec.spinous_depth_mm;
  double dmax = spec.spinous_depth_mm;
  for (int k = 0; k < spec.frame_count; ++k) {
    const double y = track.depth(k * spec.frame_spacing_mm);
    dmin = std::min(dmin, y);
    dmax = std::max(dmax, y);
  }
  const double mid = track.depth(length / 2.0);
  dmin = std::min(dmin, mid);
  dmax = std::max(dmax, mid);
  if (dmin - cutoff < 0.0 || dmax + cutoff > height_mm)
    throw input_error("phantom blobs fall outside the frame depth");
}

Pose frame_pose(const PhantomSpec& spec, int k) {
  Pose pose;
  pose.position = {0.0, 0.0, k * spec.frame_spacing_mm};
  pose.orientation = {1.0, 0.0, 0.0, 0.0};
  if (spec.pose_noise_translation_mm == 0.0 &&
      spec.pose_noise_rotation_deg == 0.0)
    return pose;

  // one generator stream per frame, so synthesis order never matters
  SplitMix64 rng{spec.seed ^ (0x9E3779B97F4A7C15ULL *
                              (static_cast<std::uint64_t>(k) + 1))};
  if (spec.pose_noise_translation_mm > 0.0) {
    pose.position.x += spec.pose_noise_translation_mm * rng.gaussian();
    pose.position.y += spec.pose_noise_translation_mm * rng.gaussian();
    pose.position.z += spec.pose_noise_translation_mm * rng.gaussian();
  }
  if (spec.pose_noise_rotation_deg > 0.0) {
    Vec3 axis{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    const double angle_rad =
        spec.pose_noise_rotation_deg * kDegToRad * rng.gaussian();
    if (axis.norm() > 1e-12) {
      axis = axis * (1.0 / axis.norm());
      const double h = angle_rad / 2.0;
      pose.orientation = Quat{std::cos(h), axis.x * std::sin(h),
                              axis.y * std::sin(h), axis.z * std::sin(h)};
    }
  }
  return pose;
}

TrackedFrame synthesize_frame(const PhantomSpec& spec, int k,
                              const DepthTrack& track) {
  TrackedFrame frame;
  frame.index = k;
  frame.pose = frame_pose(spec, k);
  frame.pixel_spacing_w = spec.pixel_spacing_mm;
  frame.pixel_spacing_h = spec.pixel_spacing_mm;
  frame.intensity = Grid2<std::uint8_t>(spec.frame_width, spec.frame_height);
  frame.mask = Grid2<std::uint8_t>(spec.frame_width, spec.frame_height);

  const double cx = (spec.frame_width - 1) * spec.pixel_spacing_mm / 2.0;
  const double sigma2 = spec.blob_sigma_mm * spec.blob_sigma_mm;
  const double peak = spec.intensity_peak;
  // beyond this squared distance the rounded intensity is zero
  const double cut2 = 2.0 * sigma2 * std::log(2.0 * peak);
  const double mask_level = 0.25 * peak;

  for (int j = 0; j < spec.frame_height; ++j)
    for (int i = 0; i < spec.frame_width; ++i) {
      const Vec3 w = frame.pixel_to_world(i, j);
      const double lamina_depth = track.depth(w.z);
      double best = -1.0;
      const double tube_x[3] = {cx - spec.lamina_offset_mm,
                                cx + spec.lamina_offset_mm, cx};
      const double tube_y[3] = {lamina_depth, lamina_depth,
                                spec.spinous_depth_mm};
      for (int t = 0; t < 3; ++t) {
        const double dx = w.x - tube_x[t];
        const double dy = w.y - tube_y[t];
        const double d2 = dx * dx + dy * dy;
        if (d2 <= cut2 && (best < 0.0 || d2 < best)) best = d2;
      }
      if (best < 0.0) continue;
      const long q = std::lround(peak * std::exp(-best / (2.0 * sigma2)));
      const std::uint8_t v =
          static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
      frame.intensity.at(i, j) = v;
      frame.mask.at(i, j) = v >= mask_level ? 1 : 0;
    }
  return frame;
}

}  // namespace

double analytic_truth_angle(const PhantomSpec& spec) {
  if (const auto* arc = std::get_if<ArcModel>(&spec.curve_model))
    return arc->subtended_deg;  // end tangents differ by the subtended angle

  // quintic: same angle rule the pipeline applies, on the exact model
  const auto& c = std::get<QuinticModel>(spec.curve_model).coeffs;
  const double length = (spec.frame_count - 1) * spec.frame_spacing_mm;

  auto second = [&c](double z) {
    return 2.0 * c[2] + 6.0 * c[3] * z + 12.0 * c[4] * z * z +
           20.0 * c[5] * z * z * z;
  };
  std::vector<double> roots =
      solve_cubic_real(20.0 * c[5], 12.0 * c[4], 6.0 * c[3], 2.0 * c[2]);
  std::sort(roots.begin(), roots.end());
  std::vector<double> eval;
  for (double z : roots) {
    if (!(z > 0.0 && z < length)) continue;
    if (!(second(z - 1e-6) * second(z + 1e-6) < 0.0)) continue;
    if (!eval.empty() && std::abs(z - eval.back()) < 1e-9) continue;
    eval.push_back(z);
  }
  if (eval.size() < 2) {
    eval.push_back(0.0);
    eval.push_back(length);
    std::sort(eval.begin(), eval.end());
  }

  std::vector<double> theta;
  for (double z : eval) {
    double dy = 0.0;
    for (int k = 5; k >= 1; --k) dy = dy * z + k * c[k];
    theta.push_back(std::atan(dy) * kRadToDeg);
  }
  double best = 0.0;
  for (std::size_t k = 0; k + 1 < theta.size(); ++k) {
    const double pair = theta[k] - theta[k + 1];
    if (std::abs(pair) > std::abs(best)) best = pair;
  }
  return best;
}

PhantomTruth generate(const PhantomSpec& spec,
                      const std::filesystem::path& out_dir) {
  validate_spec(spec);

  const double length = (spec.frame_count - 1) * spec.frame_spacing_mm;
  const DepthTrack track(spec, length);

  ScanDataset ds;
  ds.subject_id = spec.subject_id;

  PhantomTruth truth;
  truth.angle_deg = analytic_truth_angle(spec);
  truth.model =
      std::holds_alternative<ArcModel>(spec.curve_model) ? "arc" : "quintic";
  ds.posture = truth.angle_deg < 0.0 ? Posture::flexion : Posture::neutral;

  ds.frames.reserve(spec.frame_count);
  for (int k = 0; k < spec.frame_count; ++k)
    ds.frames.push_back(synthesize_frame(spec, k, track));

  std::filesystem::create_directories(out_dir);
  serialize_dataset(ds, out_dir);

  nlohmann::json j;
  j["model"] = truth.model;
  j["angle_deg"] = truth.angle_deg;
  if (const auto* arc = std::get_if<ArcModel>(&spec.curve_model))
    j["subtended_deg"] = arc->subtended_deg;
  else
    j["coeffs"] = std::get<QuinticModel>(spec.curve_model).coeffs;
  j["frame_count"] = spec.frame_count;
  j["frame_spacing_mm"] = spec.frame_spacing_mm;
  j["lamina_offset_mm"] = spec.lamina_offset_mm;
  j["blob_sigma_mm"] = spec.blob_sigma_mm;
  j["pose_noise_translation_mm"] = spec.pose_noise_translation_mm;
  j["pose_noise_rotation_deg"] = spec.pose_noise_rotation_deg;
  j["intensity_peak"] = spec.intensity_peak;
  j["seed"] = spec.seed;

  std::ofstream out(out_dir / "truth.json");
  if (!out)
    throw input_error("cannot write " + (out_dir / "truth.json").string());
  out << j.dump(2) << '\n';
  if (!out)
    throw input_error("failed writing " + (out_dir / "truth.json").string());
  return truth;
}

}  // namespace lamina
