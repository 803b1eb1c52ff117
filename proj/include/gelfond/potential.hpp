#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "gelfond/dyadic.hpp"
#include "gelfond/word.hpp"

namespace gelfond {

/// binary64 unit roundoff used in every error term.
inline constexpr double kMachineEpsilon = 0x1p-52;

/// Tail-sum constants for the Haar remainder bound. Σ_{k≥N}(k−N+1)2^−k is
/// exactly 4·2^−N, which is the default; 5/2 is the constant as printed in
/// the published threshold and is kept selectable.
inline constexpr double kPaperTailConstant = 2.5;
inline constexpr double kStrictTailConstant = 4.0;
inline constexpr double kDefaultTailConstant = kStrictTailConstant;

inline constexpr int kDefaultBaseLevel = 26;

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters of the truncated and tail-reflected potential g_{d,d'}^(c).
struct PotentialSpec {
  DyadicRational c;
  int d = 3;
  int dprime = 3;
  /// Result of check_tail_condition; eval_g_dd refuses specs without it.
  bool tail_valid = false;

  /// Throws std::invalid_argument unless 2 <= d <= dprime <= 62.
  static PotentialSpec make(const DyadicRational& c, int d, int dprime);

  /// log sin(π / 2^d), the plateau value of g_d.
  double floor_level() const;
};

/// log|sin(π t)| for t ∈ [0, 1/2], evaluated in extended precision.
double log_sin_pi(long double t);

/// log|cos π(x + c)|; bottom exactly at the pole x + c ≡ 1/2.
ExtendedReal eval_g(const DyadicRational& c, double x);

/// max{g(x), log sin(π/2^d)}.
double eval_g_d(const PotentialSpec& spec, double x);

/// g_d on [0, 1 − 2^−d'), g_d(1 − x) on the tail. Throws InvalidSpec when
/// the tail condition does not hold.
double eval_g_dd(const PotentialSpec& spec, double x);

/// inf g_d|[0, 2^−d') >= sup g_d|[1 − 2^−d', 1), decided in exact arithmetic.
bool check_tail_condition(const PotentialSpec& spec);

struct IntegralValue {
  double lower_sum = 0.0;  // I_L
  double upper_sum = 0.0;  // I_R
  double value = 0.0;      // = I_L
  double epsilon = 0.0;    // bound on |value − exact integral|
};

/// Rectangle-rule integrals of g_{d,d'} over every dyadic cylinder of one level.
///
/// Cell sums are accumulated from monotone pieces of width at most
/// 2^−base_level; pieces are cut at every breakpoint of the integrand so the
/// left/right sums bracket the exact integral.
struct CylinderIntegrals {
  int level = 0;
  int base_level = 0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd epsilon;

  Eigen::Index size() const { return lower.size(); }
  IntegralValue at(Eigen::Index i) const {
    return {lower[i], upper[i], lower[i], epsilon[i]};
  }
};

/// Every base-level cell, materialised. Memory is 32 bytes per cell, so use
/// integrate_cylinders for base levels beyond ~22.
std::vector<IntegralValue> integrate_base_cells(const PotentialSpec& spec,
                                                int base_level = kDefaultBaseLevel);

/// Base cells aggregated on the fly into cylinders of the given level.
CylinderIntegrals integrate_cylinders(const PotentialSpec& spec, int base_level,
                                      int level);

/// Same result as integrate_cylinders(spec, base_level, level), reusing the
/// cells of `prev` (integrated for `prev_spec`, same c) wherever neither
/// truncation reaches. Falls back to a full integration otherwise.
CylinderIntegrals reintegrate_cylinders(const PotentialSpec& spec, int base_level, int level,
                                        const PotentialSpec& prev_spec,
                                        const CylinderIntegrals& prev);

CylinderIntegrals to_cylinders(const std::vector<IntegralValue>& base_cells,
                               int base_level);

/// Pairwise merge down to a coarser level.
CylinderIntegrals coarsen(const CylinderIntegrals& cells, int level);

/// Level-N Haar truncation A_N: 2^N times the cylinder integrals, indexed by
/// the integer value of the word.
struct CylinderAverages {
  int level = 0;
  Eigen::VectorXd weight;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd epsilon;

  Eigen::Index size() const { return weight.size(); }
  IntegralValue at(const BinaryWord& w) const;
  /// Worst case over all cylinders.
  double uniform_epsilon() const { return epsilon.size() ? epsilon.maxCoeff() : 0.0; }
};

CylinderAverages haar_average(const CylinderIntegrals& cells, int N);
CylinderAverages haar_average(const std::vector<IntegralValue>& base_cells,
                              int base_level, int N);

/// c_ω = 2^{|ω|+1}(∫_[ω0] − ∫_[ω1]).
double haar_coefficient(const CylinderIntegrals& cells, const BinaryWord& w);
/// All coefficients with |ω| = k, indexed by int(ω).
Eigen::VectorXd haar_coefficients(const CylinderIntegrals& cells, int k);

/// constant · π · cot(π/2^d) · 2^−N
double tail_bound(int d, int N, double constant = kDefaultTailConstant);

}  // namespace gelfond
