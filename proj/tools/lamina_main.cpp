#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "lamina/corepoints.hpp"
#include "lamina/errors.hpp"
#include "lamina/metrics.hpp"
#include "lamina/phantom.hpp"
#include "lamina/pipeline.hpp"
#include "lamina/raster_io.hpp"
#include "lamina/scan_model.hpp"
#include "lamina/svg_report.hpp"

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw lamina::input_error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out)
    throw lamina::input_error("failed writing '" + path.string() + "'");
}

std::vector<lamina::CorePoint> merged_points(const lamina::SideMeasurement& m) {
  std::vector<lamina::CorePoint> all = m.kept;
  all.insert(all.end(), m.noise.begin(), m.noise.end());
  std::sort(all.begin(), all.end(),
            [](const lamina::CorePoint& a, const lamina::CorePoint& b) {
              if (a.z_mm != b.z_mm) return a.z_mm < b.z_mm;
              if (a.y_mm != b.y_mm) return a.y_mm < b.y_mm;
              return a.source_frame < b.source_frame;
            });
  return all;
}

void run_measure_cmd(const std::string& scan_dir, const std::string& out_dir,
                     const lamina::MeasureParams& params, bool export_vol) {
  lamina::ScanDataset ds = lamina::load_dataset(scan_dir);
  for (const std::string& warning : lamina::validate_dataset(ds))
    std::cerr << "warning: " << warning << '\n';

  lamina::MeasureResult result = lamina::run_measure(ds, params);

  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "measurement.json",
             lamina::measurement_to_json(result).dump(2) + "\n");

  lamina::CorePointSets sets;
  sets.left = merged_points(result.left);
  sets.right = merged_points(result.right);
  lamina::write_core_points_csv(fs::path(out_dir) / "core_points.csv", sets);

  lamina::write_side_svg(fs::path(out_dir) / "left.svg", result.left,
                         result.geometry.origin, result.geometry.spacing);
  lamina::write_side_svg(fs::path(out_dir) / "right.svg", result.right,
                         result.geometry.origin, result.geometry.spacing);

  if (export_vol) {
    lamina::Volume vol = lamina::compound(ds, result.geometry);
    if (params.fill_mm > 0.0) vol = lamina::fill_holes(vol, params.fill_mm);
    lamina::export_volume(vol, fs::path(out_dir) / "volume");
  }

  std::printf("left  %8.3f deg\nright %8.3f deg\n",
              result.left.curve.reported_angle_deg,
              result.right.curve.reported_angle_deg);
}

void run_agreement_cmd(const std::string& table_path,
                       const std::string& exclude) {
  lamina::AnglePairTable table = lamina::read_angle_table_csv(table_path);
  if (!exclude.empty()) {
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&exclude](const lamina::AnglePairRow& r) {
                                   return r.label == exclude;
                                 });
    if (it == table.end())
      throw lamina::input_error("label '" + exclude + "' not in table");
    table.erase(it);
  }
  lamina::AgreementReport report = lamina::agreement(table);

  nlohmann::json j;
  j["n"] = report.n;
  j["mad_deg"] = report.mad_deg;
  j["sd_deg"] = report.sd_deg;
  j["pearson_r"] = report.pearson_r;
  j["over_5deg_count"] = report.over_threshold_count;
  j["abs_diff_deg"] = report.abs_diff_deg;
  if (!exclude.empty()) j["excluded"] = exclude;
  std::cout << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lamina curve angle measurement for tracked ultrasound scans"};
  app.require_subcommand(1);

  // measure
  std::string scan_dir, out_dir;
  lamina::MeasureParams params;
  bool export_vol = false;
  CLI::App* measure =
      app.add_subcommand("measure", "run the full measurement pipeline");
  measure->add_option("scan_dir", scan_dir, "dataset directory or manifest")
      ->required();
  measure->add_option("--out", out_dir, "output directory")->required();
  measure->add_option("--voxel-mm", params.voxel_mm, "voxel edge length")
      ->capture_default_str();
  measure->add_option("--margin-mm", params.margin_mm,
                      "midline exclusion half-width")
      ->capture_default_str();
  measure->add_option("--band-mm", params.band_mm,
                      "lateral half-width around a key plane")
      ->capture_default_str();
  measure->add_option("--eps-mm", params.eps_mm, "DBSCAN radius")
      ->capture_default_str();
  measure->add_option("--min-pts", params.min_pts, "DBSCAN density minimum")
      ->capture_default_str();
  measure->add_option("--fill-mm", params.fill_mm,
                      "hole-fill radius, 0 disables")
      ->capture_default_str();
  measure->add_flag("--export-volume", export_vol,
                    "also dump the reconstructed volume");
  measure->callback([&] {
    run_measure_cmd(scan_dir, out_dir, params, export_vol);
  });

  // phantom
  lamina::PhantomSpec spec;
  std::string phantom_out;
  double arc_deg = 0.0;
  std::vector<double> quintic;
  CLI::App* phantom =
      app.add_subcommand("phantom", "generate a synthetic tracked scan");
  phantom->add_option("--out", phantom_out, "output directory")->required();
  CLI::Option* arc_opt = phantom->add_option(
      "--arc", arc_deg, "circular arc subtending this angle in degrees");
  CLI::Option* quintic_opt =
      phantom
          ->add_option("--quintic", quintic,
                       "depth polynomial c0,c1,...,c5 (mm, z in mm)")
          ->delimiter(',')
          ->expected(6);
  arc_opt->excludes(quintic_opt);
  quintic_opt->excludes(arc_opt);
  phantom->add_option("--frames", spec.frame_count, "frame count")
      ->capture_default_str();
  phantom
      ->add_option("--frame-spacing-mm", spec.frame_spacing_mm,
                   "longitudinal step between frames")
      ->capture_default_str();
  phantom
      ->add_option("--lamina-offset-mm", spec.lamina_offset_mm,
                   "lateral distance of each lamina blob from midline")
      ->capture_default_str();
  phantom->add_option("--blob-sigma-mm", spec.blob_sigma_mm, "blob radius")
      ->capture_default_str();
  phantom
      ->add_option("--pose-noise-mm", spec.pose_noise_translation_mm,
                   "translation noise sd")
      ->capture_default_str();
  phantom
      ->add_option("--pose-noise-deg", spec.pose_noise_rotation_deg,
                   "rotation noise sd")
      ->capture_default_str();
  phantom->add_option("--peak", spec.intensity_peak, "blob peak intensity")
      ->capture_default_str();
  phantom->add_option("--seed", spec.seed, "noise seed")
      ->capture_default_str();
  phantom->callback([&] {
    if (arc_opt->count())
      spec.curve_model = lamina::ArcModel{arc_deg};
    else if (quintic_opt->count()) {
      lamina::QuinticModel model;
      std::copy(quintic.begin(), quintic.end(), model.coeffs.begin());
      spec.curve_model = model;
    } else {
      throw lamina::input_error("one of --arc or --quintic is required");
    }
    const lamina::PhantomTruth truth = lamina::generate(spec, phantom_out);
    std::printf("truth %8.3f deg (%s)\n", truth.angle_deg,
                truth.model.c_str());
  });

  // agreement
  std::string table_path, exclude;
  CLI::App* agree = app.add_subcommand(
      "agreement", "between-side statistics over an angle table");
  agree->add_option("table", table_path, "CSV angle table")->required();
  agree->add_option("--exclude", exclude, "drop one row by label");
  agree->callback([&] { run_agreement_cmd(table_path, exclude); });

  // dice
  std::string mask_a, mask_b;
  CLI::App* dice_cmd =
      app.add_subcommand("dice", "Dice coefficient of two binary masks");
  dice_cmd->add_option("mask_a", mask_a, "first mask PGM")->required();
  dice_cmd->add_option("mask_b", mask_b, "second mask PGM")->required();
  dice_cmd->callback([&] {
    const auto a = lamina::read_mask_pgm(mask_a);
    const auto b = lamina::read_mask_pgm(mask_b);
    std::printf("%.6f\n", lamina::dice(a, b));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const lamina::input_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const lamina::pipeline_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
