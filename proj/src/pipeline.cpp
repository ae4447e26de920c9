#include "lamina/pipeline.hpp"

#include <utility>

#include <nlohmann/json.hpp>

#include "lamina/corepoints.hpp"
#include "lamina/errors.hpp"

namespace lamina {

namespace {

SideMeasurement measure_side(KeyFrame key_frame,
                             std::vector<CorePoint> points,
                             const MeasureParams& params) {
  SideMeasurement m;
  m.side = key_frame.side;
  m.key_frame = std::move(key_frame);
  m.points_extracted = static_cast<int>(points.size());

  try {
    DbscanResult filtered =
        dbscan_filter(std::move(points), {params.eps_mm, params.min_pts});
    m.kept = std::move(filtered.kept);
    m.noise = std::move(filtered.noise);

    LaminaCurve curve = fit_polynomial(m.kept);
    curve.inflections_mm = find_inflections(curve);
    m.curve = measure_angles(std::move(curve));
  } catch (const pipeline_error& e) {
    throw pipeline_error(std::string(to_string(m.side)) + " side: " +
                         e.what());
  }
  return m;
}

nlohmann::json side_to_json(const SideMeasurement& m) {
  nlohmann::json j;
  j["side"] = to_string(m.side);
  j["key_frame"] = {{"lateral_index", m.key_frame.slice.lateral_index},
                    {"lateral_mm", m.key_frame.slice.lateral_mm},
                    {"weight", m.key_frame.weight},
                    {"len_rows", m.key_frame.len_rows}};
  j["points"] = {{"extracted", m.points_extracted},
                 {"kept", m.kept.size()},
                 {"noise", m.noise.size()}};

  const LaminaCurve& c = m.curve;
  j["curve"] = {
      {"coeffs_normalized", c.coeffs},
      {"z_domain_mm", {c.z_min, c.z_max}},
      {"normalization", {{"mid_mm", c.z_mid}, {"half_mm", c.z_half}}},
      {"inflections_mm", c.inflections_mm},
      {"eval_points_mm", c.eval_points_mm},
      {"tangent_angles_deg", c.tangent_angles_deg},
      {"pair_angles_deg", c.pair_angles_deg},
      {"reported_angle_deg", c.reported_angle_deg},
  };
  return j;
}

}  // namespace

MeasureResult run_measure(const ScanDataset& ds, const MeasureParams& params) {
  if (!(params.voxel_mm > 0.0)) throw input_error("voxel size must be > 0");
  if (params.margin_mm < 0.0) throw input_error("margin must be >= 0");
  if (!(params.band_mm > 0.0)) throw input_error("band must be > 0");
  if (params.fill_mm < 0.0) throw input_error("fill radius must be >= 0");
  if (!(params.eps_mm > 0.0)) throw input_error("eps must be > 0");
  if (params.min_pts < 1) throw input_error("min_pts must be >= 1");

  MeasureResult result;
  result.params = params;

  const Vec3 spacing{params.voxel_mm, params.voxel_mm, params.voxel_mm};
  result.geometry = plan_geometry(ds, spacing);
  Volume vol = compound(ds, result.geometry);
  if (params.fill_mm > 0.0) vol = fill_holes(vol, params.fill_mm);

  result.midline_mm = find_midline(vol);
  auto [left_kf, right_kf] = select_key_frames(vol, params.margin_mm);
  CorePointSets sets =
      extract_core_points(ds, left_kf, right_kf, params.band_mm);

  result.left =
      measure_side(std::move(left_kf), std::move(sets.left), params);
  result.right =
      measure_side(std::move(right_kf), std::move(sets.right), params);
  return result;
}

nlohmann::json measurement_to_json(const MeasureResult& result) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["params"] = {{"voxel_mm", result.params.voxel_mm},
                 {"margin_mm", result.params.margin_mm},
                 {"band_mm", result.params.band_mm},
                 {"eps_mm", result.params.eps_mm},
                 {"min_pts", result.params.min_pts},
                 {"fill_mm", result.params.fill_mm}};
  const VolumeGeometry& g = result.geometry;
  j["volume"] = {
      {"origin_mm", {g.origin.x, g.origin.y, g.origin.z}},
      {"spacing_mm", {g.spacing.x, g.spacing.y, g.spacing.z}},
      {"dims", {g.nx, g.ny, g.nz}},
  };
  j["midline_mm"] = result.midline_mm;
  j["left"] = side_to_json(result.left);
  j["right"] = side_to_json(result.right);
  return j;
}

}  // namespace lamina
