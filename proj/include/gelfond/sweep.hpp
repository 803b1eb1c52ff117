#pragma once

// Parameter sweeps over Λ_L = {i/2^L}, zoom refinement, and the period
// statistics of a completed sweep (h, ρ, Γ-intervals, totient fit).

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gelfond/verify.hpp"

namespace gelfond {

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Worker count from GELFOND_WORKERS, else the hardware concurrency.
int default_worker_count();

struct SweepConfig {
  int L = 10;
  TripleRange range{};
  VerifyConfig verify{};
  /// 0 means default_worker_count().
  int workers = 0;
  /// Completed records are appended here and reused on restart.
  std::optional<std::filesystem::path> checkpoint;
  /// Zoom: certify every level-zoom_level point in [a, b].
  std::optional<std::pair<double, double>> window;
  int zoom_level = 12;
  std::function<void(const VerificationRecord&, std::size_t done, std::size_t total)> progress;

  void validate() const;
  /// Deterministic description of everything that affects the records.
  nlohmann::json to_json() const;
  std::string hash() const;
};

/// The parameters a sweep or zoom covers, ascending.
std::vector<DyadicRational> sweep_parameters(const SweepConfig& config);

/// One record per parameter, sorted by c. Resumes from the checkpoint when
/// it exists and belongs to the same configuration.
std::vector<VerificationRecord> run_sweep(const SweepConfig& config);

struct ZoomReport {
  std::vector<VerificationRecord> records;
  std::vector<DyadicRational> untestable;
  /// Untestable points whose refined-grid neighbours inside the window are all certified.
  std::vector<DyadicRational> isolated;
  bool all_testable = false;
};

/// run_sweep over the window at zoom_level, plus the isolation summary.
ZoomReport zoom(const SweepConfig& config);

struct GammaInterval {
  DyadicRational a;
  DyadicRational b;
  int period = 0;
};

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  int p_min = 0;
  int p_max = 0;
  int points = 0;
};

struct AnalysisReport {
  std::size_t count = 0;
  /// h(c): period, 0 when untestable.
  std::vector<std::pair<DyadicRational, int>> h;
  std::vector<DyadicRational> untestable;
  std::map<int, double> rho;
  std::vector<GammaInterval> gamma_intervals;
  /// log(ρ(p) / (p Φ(p))) against p over every p with ρ(p) > 0.
  std::optional<LinearFit> fit;
};

int totient(int p);

/// Throws EmptyInput on an empty record set.
AnalysisReport analyze(std::vector<VerificationRecord> records);

nlohmann::json to_json(const AnalysisReport& report);

/// {schema_version, config, config_hash, analysis}
nlohmann::json sweep_summary(const SweepConfig& config, const AnalysisReport& report);

}  // namespace gelfond
