#pragma once

// Gap-criterion certification of a single parameter c: enumerate triples
// (d, d', N), build Haar weights and G_N, compare the MCM gap with the tail
// threshold plus error terms, check the orbit avoids the modified regions,
// and report the Gelfond exponent.

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gelfond/debruijn.hpp"
#include "gelfond/dyadic.hpp"
#include "gelfond/maxplus.hpp"
#include "gelfond/potential.hpp"
#include "gelfond/word.hpp"

namespace gelfond {

class InapplicableTriple : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PoleOnOrbit : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Triple {
  int d = 0;
  int dprime = 0;
  int N = 0;
  friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleRange {
  int d_min = 3;
  int d_max = 15;
  int dprime_max = 22;
  int n_max = 22;

  /// Throws std::invalid_argument on an empty or out-of-bounds range.
  void validate() const;
  /// All triples in search order: d, then d' ∈ [d, dprime_max], then N ∈ [d', n_max].
  std::vector<Triple> enumerate() const;
};

struct VerifyConfig {
  double tail_constant = kDefaultTailConstant;
  int base_level = kDefaultBaseLevel;
  /// When the tail condition fails for c at (d, d'), try it for 1 − c and
  /// map the result back through x ↦ 1 − x.
  bool mirror = true;
  HowardOptions howard{};
  /// Stop resolving λ2 once the gap inequality is known to fail. Verdicts
  /// are unchanged; failing checks then report an upper bound on the gap.
  bool early_exit = true;
};

enum class Status { Certified, Untestable };

std::string to_string(Status s);
Status parse_status(std::string_view text);

/// How c relates to the parameter whose potential was actually integrated.
struct ResolvedSpec {
  PotentialSpec spec;
  bool mirrored = false;
};

/// The spec for (c, d, d') or, if allowed and needed, for (1 − c, d, d').
std::optional<ResolvedSpec> resolve_spec(const DyadicRational& c, int d, int dprime, bool mirror);

struct TripleCheck {
  Triple triple;
  bool passed = false;
  double lambda1 = 0;
  double lambda2 = 0;
  double gap = 0;
  double threshold = 0;
  double epsilon = 0;
  /// threshold + 2ε + (threshold + gap)·ε_m
  double required = 0;
  CycleResult<double> gamma1;
  /// Code of the runner-up cycle, when the gap was resolved exactly.
  std::optional<BinaryWord> gamma2_code;
  long iterations = 0;
  /// False when λ2 was only bounded from below (gap is an upper bound).
  bool exact = true;
};

/// Gap inequality at level N on a graph built from `cells` (level ≥ N).
/// Throws InapplicableTriple if the spec lacks a valid tail condition.
/// Speed-only inputs to check_triple.
struct TripleHints {
  /// Periodic codes tried as runner-up candidates before any deletion run.
  std::vector<BinaryWord> codes;
  /// Starting policy for G_N.
  const Policy* policy = nullptr;
};

TripleCheck check_triple(const PotentialSpec& spec, int N, const CylinderIntegrals& cells,
                         const VerifyConfig& config = {}, const TripleHints& hints = {});

/// Convenience form: resolves the spec, integrates, and checks one triple.
/// The returned cycle code refers to the resolved parameter.
TripleCheck check_triple(const DyadicRational& c, const Triple& t, const VerifyConfig& config = {});

/// Every orbit point p has |cos π(p + c)| > sin(π/2^d) and p < 1 − 2^−d'.
/// Decided in exact integer arithmetic.
bool coincidence_check(const DyadicRational& c, int d, int dprime,
                       const std::vector<OrbitPoint>& orbit);

struct Exponent {
  double beta = 0;
  double delta = 0;
};

/// β = mean of log|cos π(p + c)| over the orbit, Δ = 1 + β / log 2.
Exponent exponent_from_orbit(const DyadicRational& c, const std::vector<OrbitPoint>& orbit);

/// 1 − π²‖c‖² / (20 log 2), the Mauduit–Rivat–Sárközy upper bound.
double mrs_bound(const DyadicRational& c);

struct VerificationRecord {
  DyadicRational c;
  Status status = Status::Untestable;
  std::optional<Triple> triple;
  std::optional<BinaryWord> cycle_code;
  int period = 0;
  double gap = 0;
  double threshold = 0;
  double epsilon = 0;
  std::optional<double> beta;
  std::optional<double> delta;
  double mrs_bound = 0;
  long iterations = 0;
  double runtime_ms = 0;
  /// Certified through the potential of 1 − c.
  bool mirrored = false;
  /// Triples whose gap passed but whose orbit failed the coincidence check
  /// or did not close up into a periodic code.
  int rejected_triples = 0;
  /// (d, d') pairs skipped because neither c nor 1 − c meets the tail condition.
  int skipped_pairs = 0;
};

struct CertifyObserver {
  std::function<void(const Triple&, const TripleCheck&)> on_triple;
  std::function<void(int d, int dprime)> on_skip;
};

/// First triple in search order that passes both the gap inequality and
/// the coincidence check; Untestable if none does.
VerificationRecord certify(const DyadicRational& c, const TripleRange& range = {},
                           const VerifyConfig& config = {}, const CertifyObserver& observer = {});

}  // namespace gelfond
