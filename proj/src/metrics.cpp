#include "lamina/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lamina/errors.hpp"

namespace lamina {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double_cell(const std::string& cell, int line_no) {
  const std::string t = trim(cell);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw input_error("angle table line " + std::to_string(line_no) +
                      ": bad number '" + t + "'");
  }
  if (used != t.size() || !std::isfinite(v))
    throw input_error("angle table line " + std::to_string(line_no) +
                      ": bad number '" + t + "'");
  return v;
}

}  // namespace

const char* to_string(SubjectStatus s) {
  switch (s) {
    case SubjectStatus::healthy: return "healthy";
    case SubjectStatus::loss_of_lordosis: return "loss_of_lordosis";
    case SubjectStatus::mimicked_reversal: return "mimicked_reversal";
  }
  throw std::logic_error("unknown subject status");
}

SubjectStatus subject_status_from_string(const std::string& s) {
  if (s == "healthy") return SubjectStatus::healthy;
  if (s == "loss_of_lordosis") return SubjectStatus::loss_of_lordosis;
  if (s == "mimicked_reversal") return SubjectStatus::mimicked_reversal;
  throw input_error("unknown subject status '" + s + "'");
}

AgreementReport agreement(const AnglePairTable& table) {
  const std::size_t n = table.size();
  if (n < 2)
    throw input_error("agreement needs at least 2 rows, got " +
                      std::to_string(n));

  AgreementReport report;
  report.n = static_cast<int>(n);
  report.abs_diff_deg.reserve(n);

  double sum_abs = 0.0;
  for (const AnglePairRow& row : table) {
    const double d = std::abs(row.left_deg - row.right_deg);
    report.abs_diff_deg.push_back(d);
    sum_abs += d;
    if (d > kClinicalThresholdDeg) ++report.over_threshold_count;
  }
  report.mad_deg = sum_abs / static_cast<double>(n);

  // sample standard deviation (n - 1) of the absolute differences
  double ss = 0.0;
  for (double d : report.abs_diff_deg) {
    const double c = d - report.mad_deg;
    ss += c * c;
  }
  report.sd_deg = std::sqrt(ss / static_cast<double>(n - 1));

  double mean_l = 0.0, mean_r = 0.0;
  for (const AnglePairRow& row : table) {
    mean_l += row.left_deg;
    mean_r += row.right_deg;
  }
  mean_l /= static_cast<double>(n);
  mean_r /= static_cast<double>(n);

  double sll = 0.0, srr = 0.0, slr = 0.0;
  for (const AnglePairRow& row : table) {
    const double a = row.left_deg - mean_l;
    const double b = row.right_deg - mean_r;
    sll += a * a;
    srr += b * b;
    slr += a * b;
  }
  if (sll <= 0.0 || srr <= 0.0)
    throw pipeline_error("Pearson correlation undefined: a side is constant");
  report.pearson_r = slr / std::sqrt(sll * srr);
  return report;
}

AnglePairTable read_angle_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open angle table '" + path.string() + "'");

  AnglePairTable table;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!saw_header) {
      if (t != "label,status,left_deg,right_deg")
        throw input_error("angle table '" + path.string() +
                          "': expected header label,status,left_deg,right_deg");
      saw_header = true;
      continue;
    }
    std::stringstream ss(t);
    std::string label, status, left, right, extra;
    if (!std::getline(ss, label, ',') || !std::getline(ss, status, ',') ||
        !std::getline(ss, left, ',') || !std::getline(ss, right, ','))
      throw input_error("angle table line " + std::to_string(line_no) +
                        ": expected 4 columns");
    if (std::getline(ss, extra, ','))
      throw input_error("angle table line " + std::to_string(line_no) +
                        ": expected 4 columns");
    AnglePairRow row;
    row.label = trim(label);
    if (row.label.empty())
      throw input_error("angle table line " + std::to_string(line_no) +
                        ": empty label");
    row.status = subject_status_from_string(trim(status));
    row.left_deg = parse_double_cell(left, line_no);
    row.right_deg = parse_double_cell(right, line_no);
    for (const AnglePairRow& prev : table)
      if (prev.label == row.label)
        throw input_error("angle table: duplicate label '" + row.label + "'");
    table.push_back(row);
  }
  if (!saw_header)
    throw input_error("angle table '" + path.string() + "' is empty");
  return table;
}

void write_angle_table_csv(const std::filesystem::path& path,
                           const AnglePairTable& table) {
  std::ofstream out(path);
  if (!out)
    throw input_error("cannot write angle table '" + path.string() + "'");
  out << "label,status,left_deg,right_deg\n";
  for (const AnglePairRow& row : table)
    out << row.label << ',' << to_string(row.status) << ','
        << fmt_double(row.left_deg) << ',' << fmt_double(row.right_deg)
        << '\n';
  if (!out)
    throw input_error("failed writing angle table '" + path.string() + "'");
}

double dice(const Grid2<std::uint8_t>& a, const Grid2<std::uint8_t>& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw input_error("dice: mask dimensions differ");
  std::size_t na = 0, nb = 0, ni = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const bool va = a.data()[i] != 0;
    const bool vb = b.data()[i] != 0;
    na += va;
    nb += vb;
    ni += va && vb;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(ni) / static_cast<double>(na + nb);
}

}  // namespace lamina
