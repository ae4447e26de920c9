#pragma once

#include <cstdint>
#include <filesystem>

#include "lamina/grid.hpp"

namespace lamina {

// Binary PGM (P5), maxval <= 255.
Grid2<std::uint8_t> read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Grid2<std::uint8_t>& img);

// Reads a PGM mask and normalizes it to {0,1}. Accepts files whose value set
// is a subset of {0,1} or of {0,255}; anything else is a non-binary mask and
// rejected.
Grid2<std::uint8_t> read_mask_pgm(const std::filesystem::path& path);

}  // namespace lamina
