#include "gelfond/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

namespace gelfond {

namespace {

using u128 = unsigned __int128;

/// dist(p + c, 1/2 + Z) as an exact fraction num / den.
struct PoleOffset {
  u128 num = 0;
  u128 den = 1;
};

PoleOffset pole_offset(const DyadicRational& c, const OrbitPoint& p, int min_level) {
  if (p.period < 1 || p.period > 62) throw std::invalid_argument("orbit period out of range");
  const int L = static_cast<int>(c.level());
  const int M = std::max({L, min_level, 1});
  const u128 Q = p.denominator();
  const u128 D = Q << M;
  const u128 y = ((static_cast<u128>(p.numerator) << M) +
                  ((static_cast<u128>(c.numerator()) * Q) << (M - L))) % D;
  const u128 half = Q << (M - 1);
  return {y > half ? y - half : half - y, D};
}

}  // namespace

void TripleRange::validate() const {
  if (d_min < 2) throw std::invalid_argument("d_min must be at least 2");
  if (d_max < d_min) throw std::invalid_argument("d_max must be at least d_min");
  if (dprime_max < d_min) throw std::invalid_argument("dprime_max must be at least d_min");
  if (dprime_max > 62) throw std::invalid_argument("dprime_max must be at most 62");
  if (n_max < d_min) throw std::invalid_argument("n_max must be at least d_min");
  if (n_max > 30) throw std::invalid_argument("n_max must be at most 30");
}

std::vector<Triple> TripleRange::enumerate() const {
  validate();
  std::vector<Triple> out;
  for (int d = d_min; d <= d_max; ++d) {
    for (int dp = d; dp <= dprime_max; ++dp) {
      for (int N = dp; N <= n_max; ++N) out.push_back({d, dp, N});
    }
  }
  return out;
}

std::string to_string(Status s) { return s == Status::Certified ? "Certified" : "Untestable"; }

Status parse_status(std::string_view text) {
  if (text == "Certified") return Status::Certified;
  if (text == "Untestable") return Status::Untestable;
  throw std::invalid_argument("unknown status '" + std::string(text) + "'");
}

std::optional<ResolvedSpec> resolve_spec(const DyadicRational& c, int d, int dprime, bool mirror) {
  PotentialSpec spec = PotentialSpec::make(c, d, dprime);
  // At c ∈ {0, 1/2} the potential is symmetric about 1/2, so the reflected
  // tail coincides with g_d itself and no ordering is needed.
  if (!spec.tail_valid && c == c.complement()) spec.tail_valid = true;
  if (spec.tail_valid) return ResolvedSpec{spec, false};
  if (!mirror) return std::nullopt;
  PotentialSpec flipped = PotentialSpec::make(c.complement(), d, dprime);
  if (flipped.tail_valid) return ResolvedSpec{flipped, true};
  return std::nullopt;
}

TripleCheck check_triple(const PotentialSpec& spec, int N, const CylinderIntegrals& cells,
                         const VerifyConfig& config, const TripleHints& hints) {
  if (!spec.tail_valid) {
    throw InapplicableTriple("tail condition fails for c=" + spec.c.to_string() +
                             " at d=" + std::to_string(spec.d) +
                             ", d'=" + std::to_string(spec.dprime));
  }
  if (N < spec.dprime) throw std::invalid_argument("N must be at least d'");
  if (N > cells.level) throw std::invalid_argument("cylinder integrals are coarser than N");

  const CylinderAverages averages = haar_average(cells, N);
  const WeightedDigraph<double> graph = build_graph(averages);
  const double threshold = tail_bound(spec.d, N, config.tail_constant);
  const double epsilon = std::max(averages.uniform_epsilon(), graph.epsilon.maxCoeff());

  // gap > thr + 2ε + (thr + gap)·u  ⇔  gap > (thr(1+u) + 2ε)/(1−u). Shrunk a
  // little so summation-order rounding cannot flip a verdict.
  std::optional<GapTarget<double>> target;
  if (config.early_exit) {
    target.emplace();
    target->target = (threshold * (1 + kMachineEpsilon) + 2 * epsilon) / (1 - kMachineEpsilon) *
                     (1 - 0x1p-40);
    for (const auto& code : hints.codes) target->candidates.push_back(code_to_walk(code, N));
  }
  const auto result = gap(DigraphView<double>(graph), config.howard, target ? &*target : nullptr,
                          hints.policy);

  TripleCheck out;
  out.triple = {spec.d, spec.dprime, N};
  out.lambda1 = result.lambda1;
  out.lambda2 = result.lambda2;
  out.gap = result.gap;
  out.exact = result.exact;
  if (result.exact && result.gamma2.periodic) out.gamma2_code = result.gamma2.code;
  out.threshold = threshold;
  out.epsilon = epsilon;
  out.required = out.threshold + 2 * out.epsilon + (out.threshold + out.gap) * kMachineEpsilon;
  out.passed = out.exact && out.gap > out.required;
  out.gamma1 = result.gamma1;
  out.iterations = result.iterations;
  return out;
}

TripleCheck check_triple(const DyadicRational& c, const Triple& t, const VerifyConfig& config) {
  const auto resolved = resolve_spec(c, t.d, t.dprime, config.mirror);
  if (!resolved) {
    throw InapplicableTriple("tail condition fails for c=" + c.to_string() +
                             " at d=" + std::to_string(t.d) + ", d'=" + std::to_string(t.dprime));
  }
  if (t.N > config.base_level) throw std::invalid_argument("N exceeds the base level");
  const CylinderIntegrals cells = integrate_cylinders(resolved->spec, config.base_level, t.N);
  return check_triple(resolved->spec, t.N, cells, config);
}

bool coincidence_check(const DyadicRational& c, int d, int dprime,
                       const std::vector<OrbitPoint>& orbit) {
  if (d < 1 || d > 62 || dprime < 1 || dprime > 62) throw std::invalid_argument("d, d' out of range");
  for (const auto& p : orbit) {
    const PoleOffset off = pole_offset(c, p, d);
    // off.den = Q·2^M with M ≥ d, so 2^−d is Q·2^(M−d) / den.
    const u128 floor_num = off.den >> d;
    if (off.num <= floor_num) return false;
    const u128 Q = p.denominator();
    const u128 scale = u128{1} << dprime;
    if (static_cast<u128>(p.numerator) * scale >= (scale - 1) * Q) return false;
  }
  return true;
}

Exponent exponent_from_orbit(const DyadicRational& c, const std::vector<OrbitPoint>& orbit) {
  if (orbit.empty()) throw std::invalid_argument("empty orbit");
  long double sum = 0;
  for (const auto& p : orbit) {
    const PoleOffset off = pole_offset(c, p, 1);
    if (off.num == 0) {
      throw PoleOnOrbit("orbit point " + std::to_string(p.numerator) + "/" +
                        std::to_string(p.denominator()) + " hits the pole of g at c=" + c.to_string());
    }
    const long double t = static_cast<long double>(off.num) / static_cast<long double>(off.den);
    sum += std::log(std::sin(std::numbers::pi_v<long double> * t));
  }
  const long double beta = sum / static_cast<long double>(orbit.size());
  return {static_cast<double>(beta),
          static_cast<double>(1 + beta / std::numbers::ln2_v<long double>)};
}

double mrs_bound(const DyadicRational& c) {
  const long double x = c.to_long_double();
  const long double norm = std::min(x, 1 - x);
  const long double pi = std::numbers::pi_v<long double>;
  return static_cast<double>(1 - pi * pi * norm * norm / (20 * std::numbers::ln2_v<long double>));
}

VerificationRecord certify(const DyadicRational& c, const TripleRange& range,
                           const VerifyConfig& config, const CertifyObserver& observer) {
  range.validate();
  if (range.n_max > config.base_level) throw std::invalid_argument("n_max exceeds the base level");
  const auto start = std::chrono::steady_clock::now();

  VerificationRecord record;
  record.c = c;
  record.mrs_bound = mrs_bound(c);
  auto finish = [&] {
    record.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return record;
  };

  // Runner-up cycles seen so far usually bound λ2 well at the next level,
  // and the optimal policy for G_N barely moves between neighbouring (d, d').
  TripleHints hints;
  std::map<int, Policy> policies;
  // Consecutive (d, d') share most cells; only the truncated ones are redone.
  std::optional<PotentialSpec> last_spec;
  CylinderIntegrals last_cells;
  auto remember = [&](const TripleCheck& check) {
    policies[check.triple.N] = check.gamma1.policy;
    for (const auto& code : {std::optional<BinaryWord>(check.gamma1.code), check.gamma2_code}) {
      if (!code || code->empty()) continue;
      auto& codes = hints.codes;
      if (std::find(codes.begin(), codes.end(), *code) != codes.end()) continue;
      codes.push_back(*code);
      if (codes.size() > 8) codes.erase(codes.begin());
    }
  };

  for (int d = range.d_min; d <= range.d_max; ++d) {
    for (int dp = d; dp <= std::min(range.dprime_max, range.n_max); ++dp) {
      const auto resolved = resolve_spec(c, d, dp, config.mirror);
      if (!resolved) {
        ++record.skipped_pairs;
        if (observer.on_skip) observer.on_skip(d, dp);
        continue;
      }
      const PotentialSpec& spec = resolved->spec;

      // Integrate once at the finest N, then coarsen level by level.
      std::map<int, CylinderIntegrals> pyramid;
      if (last_spec && last_spec->c == spec.c) {
        last_cells = reintegrate_cylinders(spec, config.base_level, range.n_max, *last_spec, last_cells);
      } else {
        last_cells = integrate_cylinders(spec, config.base_level, range.n_max);
      }
      last_spec = spec;
      pyramid[range.n_max] = last_cells;
      for (int level = range.n_max - 1; level >= dp; --level) {
        pyramid[level] = coarsen(pyramid[level + 1], level);
      }

      for (int N = dp; N <= range.n_max; ++N) {
        Policy lifted;
        hints.policy = nullptr;
        if (auto it = policies.find(N); it != policies.end()) {
          hints.policy = &it->second;
        } else if (auto prev = policies.find(N - 1); prev != policies.end() && N >= 3) {
          lifted = lift_policy(prev->second, N);
          hints.policy = &lifted;
        }
        const TripleCheck check = check_triple(spec, N, pyramid[N], config, hints);
        remember(check);
        record.iterations += check.iterations;
        if (observer.on_triple) observer.on_triple(check.triple, check);
        if (!check.passed) continue;
        if (!check.gamma1.periodic) {
          ++record.rejected_triples;
          continue;
        }
        const auto orbit = code_to_orbit(check.gamma1.code);
        if (!coincidence_check(spec.c, d, dp, orbit)) {
          ++record.rejected_triples;
          continue;
        }

        BinaryWord code = check.gamma1.code;
        std::vector<OrbitPoint> own_orbit = orbit;
        if (resolved->mirrored) {
          code = code.length() == 1 ? BinaryWord::zeros(1) : code.complement().least_rotation();
          for (auto& p : own_orbit) p = p.reflected();
          std::sort(own_orbit.begin(), own_orbit.end());
        }
        const Exponent e = exponent_from_orbit(c, own_orbit);
        record.status = Status::Certified;
        record.triple = check.triple;
        record.cycle_code = code;
        record.period = code.length();
        record.gap = check.gap;
        record.threshold = check.threshold;
        record.epsilon = check.epsilon;
        record.beta = e.beta;
        record.delta = e.delta;
        record.mirrored = resolved->mirrored;
        return finish();
      }
    }
  }
  return finish();
}

}  // namespace gelfond
