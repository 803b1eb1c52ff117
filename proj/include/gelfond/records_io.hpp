#pragma once

// CSV persistence of verification records. Column schema (schema version 1):
//
//   c_num, c_den, status, d, dprime, N, cycle_code, period, beta, delta,
//   gap, threshold, epsilon, mrs_bound, runtime_ms
//
// Triple, code, β, Δ, gap, threshold and ε are empty for Untestable rows.
// Floats are written with 17 significant digits.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gelfond/verify.hpp"

namespace gelfond {

inline constexpr int kRecordSchemaVersion = 1;

class RecordParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "%.17g"
std::string format_double(double v);

std::string csv_header();
/// runtime_ms is written as 0 unless `timing` is set, so reruns are byte-identical.
std::string to_csv_row(const VerificationRecord& r, bool timing = false);
VerificationRecord parse_csv_row(std::string_view line);

void write_csv(std::ostream& os, const std::vector<VerificationRecord>& records, bool timing = false);
void write_csv(const std::filesystem::path& path, const std::vector<VerificationRecord>& records,
               bool timing = false);
/// Skips the header and blank lines.
std::vector<VerificationRecord> read_csv(std::istream& is);
std::vector<VerificationRecord> read_csv(const std::filesystem::path& path);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

}  // namespace gelfond
