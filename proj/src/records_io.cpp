#include "gelfond/records_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gelfond {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, const char* name) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw RecordParseError(std::string("bad ") + name + " field '" + std::string(field) + "'");
  }
  return value;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header() {
  return "c_num,c_den,status,d,dprime,N,cycle_code,period,beta,delta,gap,threshold,epsilon,"
         "mrs_bound,runtime_ms";
}

std::string to_csv_row(const VerificationRecord& r, bool timing) {
  const bool certified = r.status == Status::Certified;
  std::ostringstream os;
  os << r.c.numerator() << ',' << r.c.denominator() << ',' << to_string(r.status) << ',';
  if (r.triple) {
    os << r.triple->d << ',' << r.triple->dprime << ',' << r.triple->N << ',';
  } else {
    os << ",,,";
  }
  os << (r.cycle_code ? r.cycle_code->to_string() : std::string()) << ',' << r.period << ','
     << optional_field(r.beta) << ',' << optional_field(r.delta) << ','
     << (certified ? format_double(r.gap) : std::string()) << ','
     << (certified ? format_double(r.threshold) : std::string()) << ','
     << (certified ? format_double(r.epsilon) : std::string()) << ',' << format_double(r.mrs_bound)
     << ',' << format_double(timing ? r.runtime_ms : 0.0);
  return os.str();
}

VerificationRecord parse_csv_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto f = split(line, ',');
  if (f.size() != 15) {
    throw RecordParseError("expected 15 columns, got " + std::to_string(f.size()) + " in '" +
                           std::string(line) + "'");
  }
  VerificationRecord r;
  const auto num = parse_number<std::uint64_t>(f[0], "c_num");
  const auto den = parse_number<std::uint64_t>(f[1], "c_den");
  if (!std::has_single_bit(den) || num >= den) {
    throw RecordParseError("parameter " + std::string(f[0]) + "/" + std::string(f[1]) +
                           " is not a dyadic rational in [0, 1)");
  }
  r.c = DyadicRational(num, static_cast<unsigned>(std::countr_zero(den)));
  try {
    r.status = parse_status(f[2]);
  } catch (const std::exception& e) {
    throw RecordParseError(e.what());
  }
  if (!f[3].empty()) {
    r.triple = Triple{parse_number<int>(f[3], "d"), parse_number<int>(f[4], "dprime"),
                      parse_number<int>(f[5], "N")};
  }
  if (!f[6].empty()) r.cycle_code = BinaryWord::parse(f[6]);
  r.period = parse_number<int>(f[7], "period");
  if (!f[8].empty()) r.beta = parse_number<double>(f[8], "beta");
  if (!f[9].empty()) r.delta = parse_number<double>(f[9], "delta");
  if (!f[10].empty()) r.gap = parse_number<double>(f[10], "gap");
  if (!f[11].empty()) r.threshold = parse_number<double>(f[11], "threshold");
  if (!f[12].empty()) r.epsilon = parse_number<double>(f[12], "epsilon");
  r.mrs_bound = parse_number<double>(f[13], "mrs_bound");
  r.runtime_ms = parse_number<double>(f[14], "runtime_ms");
  if ((r.status == Status::Certified) != (r.period > 0)) {
    throw RecordParseError("status and period disagree in '" + std::string(line) + "'");
  }
  return r;
}

void write_csv(std::ostream& os, const std::vector<VerificationRecord>& records, bool timing) {
  os << csv_header() << '\n';
  for (const auto& r : records) os << to_csv_row(r, timing) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<VerificationRecord>& records,
               bool timing) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_csv(os, records, timing);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::vector<VerificationRecord> read_csv(std::istream& is) {
  std::vector<VerificationRecord> out;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    if (first) {
      first = false;
      if (line.rfind("c_num,", 0) == 0) continue;
    }
    out.push_back(parse_csv_row(line));
  }
  return out;
}

std::vector<VerificationRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_csv(is);
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gelfond
