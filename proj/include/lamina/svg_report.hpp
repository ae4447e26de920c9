#pragma once

#include <filesystem>

#include "lamina/pipeline.hpp"

namespace lamina {

// Per-side measurement figure: key-frame raster underlay (embedded PNG),
// kept/noise core points, fitted curve, inflection tangents and the angle
// annotation. Longitudinal axis runs left to right (caudal -> cranial),
// depth increases downward.
void write_side_svg(const std::filesystem::path& path,
                    const SideMeasurement& side, const Vec3& volume_origin,
                    const Vec3& volume_spacing);

}  // namespace lamina
