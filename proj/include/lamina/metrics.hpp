#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lamina/grid.hpp"

namespace lamina {

enum class SubjectStatus { healthy, loss_of_lordosis, mimicked_reversal };
const char* to_string(SubjectStatus s);
SubjectStatus subject_status_from_string(const std::string& s);

struct AnglePairRow {
  std::string label;
  SubjectStatus status = SubjectStatus::healthy;
  double left_deg = 0.0;
  double right_deg = 0.0;
};

using AnglePairTable = std::vector<AnglePairRow>;

inline constexpr double kClinicalThresholdDeg = 5.0;

struct AgreementReport {
  int n = 0;
  double mad_deg = 0.0;      // mean of |L-R|
  double sd_deg = 0.0;       // sample (n-1) standard deviation of |L-R|
  double pearson_r = 0.0;    // correlation of (L,R)
  std::vector<double> abs_diff_deg;
  int over_threshold_count = 0;  // rows with |L-R| > 5 degrees
};

// Left/right agreement statistics. Requires n >= 2 and nonzero variance on
// both sides (Pearson undefined otherwise).
AgreementReport agreement(const AnglePairTable& table);

// CSV with header label,status,left_deg,right_deg. Labels must be unique.
AnglePairTable read_angle_table_csv(const std::filesystem::path& path);
void write_angle_table_csv(const std::filesystem::path& path,
                           const AnglePairTable& table);

// Dice similarity 2|a^b| / (|a|+|b|); two all-zero grids agree perfectly (1).
double dice(const Grid2<std::uint8_t>& a, const Grid2<std::uint8_t>& b);

}  // namespace lamina
