#include "lamina/scan_model.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lamina/errors.hpp"
#include "lamina/raster_io.hpp"

namespace lamina {

namespace {

constexpr int kDefaultFrameWidth = 640;
constexpr int kDefaultFrameHeight = 480;
constexpr int kTypicalFrameCountLo = 300;
constexpr int kTypicalFrameCountHi = 600;
constexpr double kPoseJumpWarnMm = 20.0;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct PoseRow {
  Pose pose;
};

std::map<int, Pose> read_pose_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open pose file " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw input_error(path.string() + ": empty pose file");
  // header row is mandatory
  if (line.find("index") == std::string::npos)
    throw input_error(path.string() + ": missing pose CSV header row");

  std::map<int, Pose> poses;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    long long idx = -1;
    int col = 0;
    bool bad = false;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        if (col == 0) {
          idx = std::stoll(cell, &used);
        } else {
          vals.push_back(std::stod(cell, &used));
        }
        while (used < cell.size() && std::isspace(cell[used])) ++used;
        if (used != cell.size()) bad = true;
      } catch (const std::exception&) {
        bad = true;
      }
      ++col;
    }
    if (bad || col != 8 || idx < 0)
      throw input_error(path.string() + ": malformed pose row at line " +
                        std::to_string(line_no) + ": \"" + line + "\"");

    Pose p;
    p.position = {vals[0], vals[1], vals[2]};
    p.orientation = {vals[3], vals[4], vals[5], vals[6]};
    if (!p.position.finite() || !p.orientation.finite())
      throw input_error(path.string() + ": non-finite pose at line " +
                        std::to_string(line_no));
    if (p.orientation.norm() < 1e-6)
      throw input_error(path.string() + ": degenerate quaternion at line " +
                        std::to_string(line_no));
    p.orientation = p.orientation.normalized();
    if (!poses.emplace(static_cast<int>(idx), p).second)
      throw input_error(path.string() + ": duplicate pose index " +
                        std::to_string(idx));
  }
  return poses;
}

void write_pose_csv(const std::filesystem::path& path, const ScanDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write pose file " + path.string());
  out << "index,x_mm,y_mm,z_mm,qw,qx,qy,qz\n";
  for (const TrackedFrame& f : ds.frames) {
    const Pose& p = f.pose;
    out << f.index << ',' << fmt_double(p.position.x) << ','
        << fmt_double(p.position.y) << ',' << fmt_double(p.position.z) << ','
        << fmt_double(p.orientation.w) << ',' << fmt_double(p.orientation.x)
        << ',' << fmt_double(p.orientation.y) << ','
        << fmt_double(p.orientation.z) << '\n';
  }
}

std::string frame_file_name(int index, const char* kind) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "frame_%06d_%s.pgm", index, kind);
  return buf;
}

}  // namespace

const char* to_string(Posture p) {
  return p == Posture::neutral ? "neutral" : "flexion";
}

Posture posture_from_string(const std::string& s) {
  if (s == "neutral") return Posture::neutral;
  if (s == "flexion") return Posture::flexion;
  throw input_error("unknown posture \"" + s + "\"");
}

ScanDataset load_dataset(const std::filesystem::path& manifest_or_dir) {
  namespace fs = std::filesystem;
  fs::path manifest_path = manifest_or_dir;
  if (fs::is_directory(manifest_path)) manifest_path /= "manifest.json";
  if (!fs::exists(manifest_path))
    throw input_error("manifest not found: " + manifest_path.string());

  nlohmann::json m;
  {
    std::ifstream in(manifest_path);
    try {
      in >> m;
    } catch (const nlohmann::json::exception& e) {
      throw input_error(manifest_path.string() + ": invalid JSON (" +
                        e.what() + ")");
    }
  }

  const fs::path dir = manifest_path.parent_path();
  ScanDataset ds;
  try {
    if (m.value("version", 0) != 1)
      throw input_error(manifest_path.string() + ": unsupported manifest version");
    ds.subject_id = m.at("subject_id").get<std::string>();
    ds.posture = posture_from_string(m.at("posture").get<std::string>());

    const auto spacing = m.at("pixel_spacing_mm");
    if (!spacing.is_array() || spacing.size() != 2)
      throw input_error("pixel_spacing_mm must be [w,h]");
    const double sw = spacing[0].get<double>();
    const double sh = spacing[1].get<double>();
    if (!(sw > 0.0) || !(sh > 0.0))
      throw input_error("pixel_spacing_mm components must be > 0");

    int want_w = kDefaultFrameWidth;
    int want_h = kDefaultFrameHeight;
    if (m.contains("frame_size")) {
      const auto fsz = m.at("frame_size");
      if (!fsz.is_array() || fsz.size() != 2)
        throw input_error("frame_size must be [width,height]");
      want_w = fsz[0].get<int>();
      want_h = fsz[1].get<int>();
      if (want_w <= 0 || want_h <= 0)
        throw input_error("frame_size components must be > 0");
    }

    const fs::path pose_path = dir / m.at("pose_file").get<std::string>();
    std::map<int, Pose> poses = read_pose_csv(pose_path);

    if (!m.contains("frames") || !m.at("frames").is_array() ||
        m.at("frames").empty())
      throw input_error(manifest_path.string() + ": manifest lists no frames");

    for (const auto& fe : m.at("frames")) {
      TrackedFrame f;
      f.index = fe.at("index").get<int>();
      if (f.index < 0)
        throw input_error("frame index " + std::to_string(f.index) +
                          " is negative");
      const std::string tag = "frame " + std::to_string(f.index);

      f.intensity = read_pgm(dir / fe.at("intensity_file").get<std::string>());
      f.mask = read_mask_pgm(dir / fe.at("mask_file").get<std::string>());
      if (f.intensity.width() != f.mask.width() ||
          f.intensity.height() != f.mask.height())
        throw input_error(tag + ": mask " + std::to_string(f.mask.width()) +
                          "x" + std::to_string(f.mask.height()) +
                          " does not match intensity " +
                          std::to_string(f.intensity.width()) + "x" +
                          std::to_string(f.intensity.height()));
      if (f.intensity.width() != want_w || f.intensity.height() != want_h)
        throw input_error(tag + ": size " +
                          std::to_string(f.intensity.width()) + "x" +
                          std::to_string(f.intensity.height()) +
                          " differs from the declared " +
                          std::to_string(want_w) + "x" +
                          std::to_string(want_h));

      const auto it = poses.find(f.index);
      if (it == poses.end())
        throw input_error(tag + ": no pose row with this index");
      f.pose = it->second;
      f.pixel_spacing_w = sw;
      f.pixel_spacing_h = sh;
      ds.frames.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw input_error(manifest_path.string() + ": " + e.what());
  }

  std::sort(ds.frames.begin(), ds.frames.end(),
            [](const TrackedFrame& a, const TrackedFrame& b) {
              return a.index < b.index;
            });
  for (std::size_t i = 1; i < ds.frames.size(); ++i)
    if (ds.frames[i].index == ds.frames[i - 1].index)
      throw input_error("duplicate frame index " +
                        std::to_string(ds.frames[i].index));
  return ds;
}

void serialize_dataset(const ScanDataset& ds,
                       const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (ds.frames.empty()) throw input_error("cannot serialize an empty dataset");
  fs::create_directories(dir);

  const TrackedFrame& first = ds.frames.front();
  for (const TrackedFrame& f : ds.frames)
    if (f.pixel_spacing_w != first.pixel_spacing_w ||
        f.pixel_spacing_h != first.pixel_spacing_h)
      throw input_error("frames disagree on pixel spacing");

  nlohmann::json m;
  m["version"] = 1;
  m["subject_id"] = ds.subject_id;
  m["posture"] = to_string(ds.posture);
  m["pixel_spacing_mm"] = {first.pixel_spacing_w, first.pixel_spacing_h};
  if (first.intensity.width() != kDefaultFrameWidth ||
      first.intensity.height() != kDefaultFrameHeight)
    m["frame_size"] = {first.intensity.width(), first.intensity.height()};
  m["pose_file"] = "poses.csv";

  nlohmann::json frames = nlohmann::json::array();
  for (const TrackedFrame& f : ds.frames) {
    const std::string img = frame_file_name(f.index, "img");
    const std::string msk = frame_file_name(f.index, "mask");
    write_pgm(dir / img, f.intensity);
    write_pgm(dir / msk, f.mask);
    frames.push_back({{"index", f.index},
                      {"intensity_file", img},
                      {"mask_file", msk}});
  }
  m["frames"] = std::move(frames);

  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw input_error("cannot write manifest in " + dir.string());
  out << m.dump(2) << "\n";

  write_pose_csv(dir / "poses.csv", ds);
}

std::vector<std::string> validate_dataset(const ScanDataset& ds) {
  std::vector<std::string> warnings;
  const int n = static_cast<int>(ds.frames.size());
  if (n < kTypicalFrameCountLo || n > kTypicalFrameCountHi)
    warnings.push_back("frame count " + std::to_string(n) +
                       " is outside the typical 300-600 range");

  for (int i = 1; i < n; ++i) {
    const double jump = (ds.frames[i].pose.position -
                         ds.frames[i - 1].pose.position).norm();
    if (jump > kPoseJumpWarnMm) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "pose jump of %.1f mm between frames %d and %d", jump,
                    ds.frames[i - 1].index, ds.frames[i].index);
      warnings.push_back(buf);
    }
  }

  for (const TrackedFrame& f : ds.frames) {
    bool any = false;
    for (std::uint8_t v : f.mask.data())
      if (v) {
        any = true;
        break;
      }
    if (!any)
      warnings.push_back("frame " + std::to_string(f.index) +
                         " has an empty mask");
  }
  return warnings;
}

}  // namespace lamina
