#include "lamina/raster_io.hpp"

#include <fstream>

#include "lamina/errors.hpp"

namespace lamina {

namespace {

// Skips whitespace and '#' comment lines, then reads one unsigned integer.
int read_pnm_int(std::istream& in, const std::filesystem::path& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c))
    throw input_error(path.string() + ": malformed PGM header");
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1000000) throw input_error(path.string() + ": absurd PGM header value");
    c = in.get();
  }
  if (c != EOF) in.unget();
  return static_cast<int>(value);
}

}  // namespace

Grid2<std::uint8_t> read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open raster file " + path.string());

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5')
    throw input_error(path.string() + ": not a binary PGM (P5) file");

  const int width = read_pnm_int(in, path);
  const int height = read_pnm_int(in, path);
  const int maxval = read_pnm_int(in, path);
  if (width <= 0 || height <= 0)
    throw input_error(path.string() + ": invalid PGM dimensions");
  if (maxval <= 0 || maxval > 255)
    throw input_error(path.string() + ": only 8-bit PGM supported");
  in.get();  // single whitespace after maxval

  Grid2<std::uint8_t> img(width, height);
  in.read(reinterpret_cast<char*>(img.data().data()),
          static_cast<std::streamsize>(img.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.size())
    throw input_error(path.string() + ": truncated PGM payload");
  return img;
}

void write_pgm(const std::filesystem::path& path,
               const Grid2<std::uint8_t>& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write raster file " + path.string());
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()),
            static_cast<std::streamsize>(img.size()));
  if (!out) throw input_error("short write to " + path.string());
}

Grid2<std::uint8_t> read_mask_pgm(const std::filesystem::path& path) {
  Grid2<std::uint8_t> mask = read_pgm(path);
  bool has_255 = false;
  bool has_1 = false;
  for (std::uint8_t v : mask.data()) {
    if (v == 0) continue;
    if (v == 1) has_1 = true;
    else if (v == 255) has_255 = true;
    else
      throw input_error(path.string() + ": non-binary mask (contains value " +
                        std::to_string(int(v)) + ")");
  }
  if (has_1 && has_255)
    throw input_error(path.string() + ": non-binary mask (mixes 1 and 255)");
  if (has_255)
    for (std::uint8_t& v : mask.data()) v = v ? 1 : 0;
  return mask;
}

}  // namespace lamina
