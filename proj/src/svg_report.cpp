#include "lamina/svg_report.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "lamina/errors.hpp"

namespace lamina {

namespace {

void put_u32_be(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

void put_chunk(std::vector<unsigned char>& out, const char type[4],
               const std::vector<unsigned char>& data) {
  put_u32_be(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_pos = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  uLong crc = crc32(0L, nullptr, 0);
  crc = crc32(crc, out.data() + type_pos, static_cast<uInt>(4 + data.size()));
  put_u32_be(out, static_cast<std::uint32_t>(crc));
}

// 8-bit grayscale PNG; pixels row-major, top row first.
std::vector<unsigned char> encode_png_gray(int width, int height,
                                           const std::vector<unsigned char>& px) {
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(height) * (width + 1));
  for (int row = 0; row < height; ++row) {
    raw.push_back(0);  // filter: none
    raw.insert(raw.end(), px.begin() + static_cast<std::size_t>(row) * width,
               px.begin() + static_cast<std::size_t>(row + 1) * width);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> deflated(bound);
  if (compress2(deflated.data(), &bound, raw.data(),
                static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw pipeline_error("PNG deflate failed");
  deflated.resize(bound);

  std::vector<unsigned char> out;
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n',
                                       0x1A, '\n'};
  out.insert(out.end(), sig, sig + 8);

  std::vector<unsigned char> ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(width));
  put_u32_be(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", deflated);
  put_chunk(out, "IEND", {});
  return out;
}

std::string base64(const std::vector<unsigned char>& bytes) {
  static const char tbl[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) |
                            bytes[i + 2];
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out.push_back(tbl[(v >> 6) & 63]);
    out.push_back(tbl[v & 63]);
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(tbl[(v >> 18) & 63]);
    out.push_back(tbl[(v >> 12) & 63]);
    out.push_back(tbl[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

void write_side_svg(const std::filesystem::path& path,
                    const SideMeasurement& side, const Vec3& volume_origin,
                    const Vec3& volume_spacing) {
  const SagittalSlice& slice = side.key_frame.slice;
  // slice grids are at(iy, iz); the figure runs z horizontally
  const int ny = slice.intensity.width();
  const int nz = slice.intensity.height();

  std::vector<unsigned char> px(static_cast<std::size_t>(ny) * nz);
  for (int iy = 0; iy < ny; ++iy)
    for (int iz = 0; iz < nz; ++iz)
      px[static_cast<std::size_t>(iy) * nz + iz] = slice.intensity.at(iy, iz);
  const std::string underlay = base64(encode_png_gray(nz, ny, px));

  const double margin = 40.0;
  const double view_w = nz + 2 * margin;
  const double view_h = ny + 2 * margin + 60.0;

  // world mm -> figure coordinates (voxel units, +0.5 to hit pixel centers)
  auto fx = [&](double z_mm) {
    return margin + (z_mm - volume_origin.z) / volume_spacing.z + 0.5;
  };
  auto fy = [&](double y_mm) {
    return margin + (y_mm - volume_origin.y) / volume_spacing.y + 0.5;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<!-- lamina " + std::string(kToolVersion) + " -->\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(view_w) +
         "\" height=\"" + fmt(view_h) + "\" viewBox=\"0 0 " + fmt(view_w) +
         " " + fmt(view_h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#111\"/>\n";
  svg += "<image x=\"" + fmt(margin) + "\" y=\"" + fmt(margin) +
         "\" width=\"" + fmt(static_cast<double>(nz)) + "\" height=\"" +
         fmt(static_cast<double>(ny)) +
         "\" style=\"image-rendering:pixelated\" "
         "href=\"data:image/png;base64," +
         underlay + "\"/>\n";

  for (const CorePoint& p : side.noise)
    svg += "<g stroke=\"#999\" stroke-width=\"0.8\"><line x1=\"" +
           fmt(fx(p.z_mm) - 2) + "\" y1=\"" + fmt(fy(p.y_mm) - 2) +
           "\" x2=\"" + fmt(fx(p.z_mm) + 2) + "\" y2=\"" +
           fmt(fy(p.y_mm) + 2) + "\"/><line x1=\"" + fmt(fx(p.z_mm) - 2) +
           "\" y1=\"" + fmt(fy(p.y_mm) + 2) + "\" x2=\"" +
           fmt(fx(p.z_mm) + 2) + "\" y2=\"" + fmt(fy(p.y_mm) - 2) +
           "\"/></g>\n";

  for (const CorePoint& p : side.kept)
    svg += "<circle cx=\"" + fmt(fx(p.z_mm)) + "\" cy=\"" + fmt(fy(p.y_mm)) +
           "\" r=\"1.5\" fill=\"#e33\"/>\n";

  const LaminaCurve& curve = side.curve;
  svg += "<polyline fill=\"none\" stroke=\"#3c6\" stroke-width=\"1.2\" "
         "points=\"";
  const int steps = 200;
  for (int s = 0; s <= steps; ++s) {
    const double z = curve.z_min +
                     (curve.z_max - curve.z_min) * s / static_cast<double>(steps);
    if (s) svg += ' ';
    svg += fmt(fx(z)) + "," + fmt(fy(curve.evaluate(z)));
  }
  svg += "\"/>\n";

  const double tangent_half_mm = 8.0;
  for (double z : curve.eval_points_mm) {
    const double y = curve.evaluate(z);
    const double k = curve.slope(z);
    const double z0 = z - tangent_half_mm, z1 = z + tangent_half_mm;
    const double y0 = y - k * tangent_half_mm, y1 = y + k * tangent_half_mm;
    svg += "<line x1=\"" + fmt(fx(z0)) + "\" y1=\"" + fmt(fy(y0)) +
           "\" x2=\"" + fmt(fx(z1)) + "\" y2=\"" + fmt(fy(y1)) +
           "\" stroke=\"#fc0\" stroke-width=\"1\"/>\n";
    svg += "<circle cx=\"" + fmt(fx(z)) + "\" cy=\"" + fmt(fy(y)) +
           "\" r=\"2.2\" fill=\"none\" stroke=\"#fc0\" "
           "stroke-width=\"0.8\"/>\n";
  }

  const double text_y = ny + 2 * margin;
  svg += "<text x=\"" + fmt(margin) + "\" y=\"" + fmt(text_y) +
         "\" fill=\"#eee\" font-family=\"monospace\" font-size=\"12\">" +
         std::string(to_string(side.side)) + " reported angle " +
         fmt(curve.reported_angle_deg) + " deg</text>\n";
  std::string pairs;
  for (std::size_t i = 0; i < curve.pair_angles_deg.size(); ++i) {
    if (i) pairs += ", ";
    pairs += fmt(curve.pair_angles_deg[i]);
  }
  svg += "<text x=\"" + fmt(margin) + "\" y=\"" + fmt(text_y + 16) +
         "\" fill=\"#aaa\" font-family=\"monospace\" font-size=\"10\">pair "
         "angles [deg]: " + pairs + "</text>\n";
  svg += "<text x=\"" + fmt(margin) + "\" y=\"" + fmt(text_y + 32) +
         "\" fill=\"#aaa\" font-family=\"monospace\" font-size=\"10\">"
         "key frame weight " + fmt(side.key_frame.weight) + ", points kept " +
         std::to_string(side.kept.size()) + "/" +
         std::to_string(side.points_extracted) + "</text>\n";
  svg += "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write figure '" + path.string() + "'");
  out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  if (!out)
    throw input_error("failed writing figure '" + path.string() + "'");
}

}  // namespace lamina
