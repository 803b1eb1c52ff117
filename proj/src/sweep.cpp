#include "gelfond/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "gelfond/records_io.hpp"

namespace gelfond {

namespace {

constexpr std::string_view kCheckpointTag = "# gelfond-checkpoint ";

struct CLess {
  bool operator()(const DyadicRational& a, const DyadicRational& b) const { return a < b; }
};

/// Records from an existing checkpoint of the same configuration. A torn
/// final line (interrupted write) is discarded.
std::vector<VerificationRecord> load_checkpoint(const std::filesystem::path& path,
                                                const std::string& hash) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return {};
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();
  if (text.empty()) return {};

  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find('\n', start)) != std::string::npos; start = pos + 1) {
    lines.push_back(text.substr(start, pos - start));
  }
  if (lines.empty() || lines.front().rfind(kCheckpointTag, 0) != 0) {
    throw std::runtime_error("checkpoint " + path.string() + " has no header");
  }
  if (lines.front().substr(kCheckpointTag.size()) != hash) {
    throw std::runtime_error("checkpoint " + path.string() +
                             " belongs to a different configuration");
  }
  std::vector<VerificationRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (!lines[i].empty()) out.push_back(parse_csv_row(lines[i]));
  }
  return out;
}

}  // namespace

int default_worker_count() {
  if (const char* env = std::getenv("GELFOND_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0 && n <= 1024) return static_cast<int>(n);
    throw std::invalid_argument("GELFOND_WORKERS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void SweepConfig::validate() const {
  if (L < 0 || L > 20) throw std::invalid_argument("L must be in [0, 20]");
  range.validate();
  if (range.n_max > verify.base_level) throw std::invalid_argument("n_max exceeds the base level");
  if (workers < 0) throw std::invalid_argument("worker count must be non-negative");
  if (window) {
    const auto [a, b] = *window;
    if (!(a >= 0 && a <= b && b < 1)) throw std::invalid_argument("window must satisfy 0 <= a <= b < 1");
    if (zoom_level <= L) throw std::invalid_argument("zoom level must exceed L");
    if (zoom_level > 40) throw std::invalid_argument("zoom level must be at most 40");
  }
}

nlohmann::json SweepConfig::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kRecordSchemaVersion;
  j["L"] = L;
  j["range"] = {{"d_min", range.d_min},
                {"d_max", range.d_max},
                {"dprime_max", range.dprime_max},
                {"n_max", range.n_max}};
  j["tail_constant"] = format_double(verify.tail_constant);
  j["base_level"] = verify.base_level;
  j["mirror"] = verify.mirror;
  if (window) {
    j["window"] = {format_double(window->first), format_double(window->second)};
    j["zoom_level"] = zoom_level;
  }
  return j;
}

std::string SweepConfig::hash() const { return fnv1a_hex(to_json().dump()); }

std::vector<DyadicRational> sweep_parameters(const SweepConfig& config) {
  config.validate();
  std::vector<DyadicRational> out;
  if (!config.window) {
    const std::uint64_t n = std::uint64_t{1} << config.L;
    for (std::uint64_t i = 0; i < n; ++i) out.emplace_back(i, static_cast<unsigned>(config.L));
    return out;
  }
  const int level = config.zoom_level;
  const long double scale = std::ldexp(1.0L, level);
  const auto lo = static_cast<std::uint64_t>(std::ceil(config.window->first * scale));
  const auto hi = std::min(static_cast<std::uint64_t>(std::floor(config.window->second * scale)),
                           (std::uint64_t{1} << level) - 1);
  for (std::uint64_t k = lo; k <= hi; ++k) out.emplace_back(k, static_cast<unsigned>(level));
  return out;
}

std::vector<VerificationRecord> run_sweep(const SweepConfig& config) {
  const auto params = sweep_parameters(config);
  const std::string hash = config.hash();

  std::map<DyadicRational, VerificationRecord, CLess> done;
  if (config.checkpoint) {
    for (auto& r : load_checkpoint(*config.checkpoint, hash)) {
      done.emplace(r.c, std::move(r));
    }
  }

  std::ofstream log;
  if (config.checkpoint) {
    // Rewrite rather than append so a torn trailing line is dropped.
    log.open(*config.checkpoint, std::ios::binary | std::ios::trunc);
    if (!log) throw std::runtime_error("cannot write checkpoint " + config.checkpoint->string());
    log << kCheckpointTag << hash << '\n';
    for (const auto& [c, r] : done) log << to_csv_row(r, true) << '\n';
    log.flush();
  }

  std::vector<DyadicRational> todo;
  for (const auto& c : params) {
    if (!done.count(c)) todo.push_back(c);
  }

  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::size_t finished = params.size() - todo.size();

  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= todo.size()) return;
      try {
        VerificationRecord r = certify(todo[i], config.range, config.verify);
        std::lock_guard lock(mutex);
        if (log.is_open()) {
          log << to_csv_row(r, true) << '\n';
          log.flush();
          if (!log) throw std::runtime_error("checkpoint write failed");
        }
        ++finished;
        if (config.progress) config.progress(r, finished, params.size());
        done.emplace(r.c, std::move(r));
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const int workers = std::max(1, std::min<int>(config.workers ? config.workers : default_worker_count(),
                                                 static_cast<int>(std::max<std::size_t>(todo.size(), 1))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<VerificationRecord> out;
  out.reserve(params.size());
  for (const auto& c : params) out.push_back(done.at(c));
  return out;
}

ZoomReport zoom(const SweepConfig& config) {
  if (!config.window) throw std::invalid_argument("zoom needs a window");
  ZoomReport report;
  report.records = run_sweep(config);
  const std::uint64_t level = static_cast<std::uint64_t>(config.zoom_level);
  std::map<std::uint64_t, Status> by_index;
  for (const auto& r : report.records) {
    by_index[r.c.at_level(static_cast<unsigned>(level)).numerator()] = r.status;
  }
  for (const auto& r : report.records) {
    if (r.status != Status::Untestable) continue;
    report.untestable.push_back(r.c);
    const std::uint64_t k = r.c.at_level(static_cast<unsigned>(level)).numerator();
    int neighbours = 0;
    bool all_certified = true;
    for (std::uint64_t n : {k - 1, k + 1}) {
      if (k == 0 && n == k - 1) continue;
      auto it = by_index.find(n);
      if (it == by_index.end()) continue;
      ++neighbours;
      all_certified = all_certified && it->second == Status::Certified;
    }
    if (neighbours > 0 && all_certified) report.isolated.push_back(r.c);
  }
  report.all_testable = report.untestable.empty();
  return report;
}

int totient(int p) {
  if (p < 1) throw std::invalid_argument("totient needs p >= 1");
  int result = p;
  int n = p;
  for (int q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    while (n % q == 0) n /= q;
    result -= result / q;
  }
  if (n > 1) result -= result / n;
  return result;
}

AnalysisReport analyze(std::vector<VerificationRecord> records) {
  if (records.empty()) throw EmptyInput("no records to analyze");
  std::sort(records.begin(), records.end(),
            [](const VerificationRecord& a, const VerificationRecord& b) { return a.c < b.c; });

  AnalysisReport report;
  report.count = records.size();
  std::map<int, std::size_t> counts;
  for (const auto& r : records) {
    const int period = r.status == Status::Certified ? r.period : 0;
    report.h.emplace_back(r.c, period);
    if (period == 0) {
      report.untestable.push_back(r.c);
    } else {
      ++counts[period];
    }
  }
  for (const auto& [p, n] : counts) {
    report.rho[p] = static_cast<double>(n) / static_cast<double>(records.size());
  }

  for (std::size_t i = 0; i < records.size();) {
    if (records[i].status != Status::Certified) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < records.size() && records[j + 1].status == Status::Certified &&
           records[j + 1].period == records[i].period) {
      ++j;
    }
    report.gamma_intervals.push_back({records[i].c, records[j].c, records[i].period});
    i = j + 1;
  }

  if (report.rho.size() >= 2) {
    const auto n = static_cast<Eigen::Index>(report.rho.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd y(n);
    Eigen::Index row = 0;
    for (const auto& [p, rho] : report.rho) {
      A(row, 0) = p;
      A(row, 1) = 1.0;
      y[row] = std::log(rho / (static_cast<double>(p) * totient(p)));
      ++row;
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd residual = y - A * coef;
    const double ss_tot = (y.array() - y.mean()).square().sum();
    LinearFit fit;
    fit.slope = coef[0];
    fit.intercept = coef[1];
    fit.r_squared = ss_tot > 0 ? 1.0 - residual.squaredNorm() / ss_tot : 1.0;
    fit.p_min = report.rho.begin()->first;
    fit.p_max = report.rho.rbegin()->first;
    fit.points = static_cast<int>(n);
    report.fit = fit;
  }
  return report;
}

nlohmann::json to_json(const AnalysisReport& report) {
  nlohmann::json j;
  j["count"] = report.count;
  j["untestable"] = nlohmann::json::array();
  for (const auto& c : report.untestable) j["untestable"].push_back(c.to_string());
  j["rho"] = nlohmann::json::object();
  for (const auto& [p, rho] : report.rho) j["rho"][std::to_string(p)] = format_double(rho);
  j["gamma_intervals"] = nlohmann::json::array();
  for (const auto& g : report.gamma_intervals) {
    j["gamma_intervals"].push_back({{"a", g.a.to_string()}, {"b", g.b.to_string()}, {"period", g.period}});
  }
  if (report.fit) {
    const auto& f = *report.fit;
    j["fit"] = {{"slope", format_double(f.slope)},
                {"intercept", format_double(f.intercept)},
                {"r_squared", format_double(f.r_squared)},
                {"p_min", f.p_min},
                {"p_max", f.p_max},
                {"points", f.points}};
  } else {
    j["fit"] = nullptr;
  }
  return j;
}

nlohmann::json sweep_summary(const SweepConfig& config, const AnalysisReport& report) {
  nlohmann::json j;
  j["schema_version"] = kRecordSchemaVersion;
  j["config"] = config.to_json();
  j["config_hash"] = config.hash();
  j["analysis"] = to_json(report);
  return j;
}

}  // namespace gelfond
