#include "gelfond/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace gelfond {

namespace {

using i128 = __int128;

/// All positions are integers at a common dyadic level; the integrand is a
/// monotone function of the distance t from y = x + c to the pole 1/2.
struct Grid {
  int fine = 0;             // level of every position below
  std::uint64_t modulus = 0;  // 2^fine
  std::uint64_t half = 0;
  std::uint64_t c = 0;        // c at level fine
  std::uint64_t floor_t = 0;  // 2^(fine − d)
  std::uint64_t tail_start = 0;
  double floor_value = 0.0;

  Grid(const PotentialSpec& spec, int level) : fine(level) {
    modulus = std::uint64_t{1} << fine;
    half = modulus >> 1;
    c = spec.c.at_level(static_cast<unsigned>(fine)).numerator();
    floor_t = std::uint64_t{1} << (fine - spec.d);
    tail_start = modulus - (std::uint64_t{1} << (fine - spec.dprime));
    floor_value = spec.floor_level();
  }

  std::uint64_t distance(std::uint64_t pos) const {
    std::uint64_t y = (pos + c) & (modulus - 1);
    return y > half ? y - half : half - y;
  }
};

const std::vector<double>& log_sin_table(int level) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<std::vector<double>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[level];
  if (!slot) {
    const std::size_t n = (std::size_t{1} << (level - 1)) + 1;
    slot = std::make_unique<std::vector<double>>(n);
    auto& table = *slot;
    // Double-precision sin/log: |error| <= 2^-51 + 2^-53|value|, covered by
    // the absolute term in CellAccumulator::add_piece.
    const double step = std::numbers::pi * std::ldexp(1.0, -level);
    for (std::size_t k = 0; k < n; ++k) {
      table[k] = std::log(std::sin(static_cast<double>(k) * step));
    }
  }
  return *slot;
}

/// Above this base level the lookup table is not worth its memory for a
/// single integration; below it evaluation is cheap anyway.
constexpr int kTableMaxLevel = 28;

long double pole_distance(const DyadicRational& c, double x) {
  long double y = static_cast<long double>(x) + c.to_long_double();
  y -= std::floor(y);
  return std::fabs(y - 0.5L);
}

std::uint64_t wrap(i128 v, std::uint64_t modulus) {
  i128 m = static_cast<i128>(modulus);
  return static_cast<std::uint64_t>(((v % m) + m) % m);
}

struct CellAccumulator {
  double lower = 0.0;
  double upper = 0.0;
  double eps = 0.0;
  double abs_sum = 0.0;
  int terms = 0;

  void add_piece(double v0, double v1, double len) {
    lower += v0 * len;
    upper += v1 * len;
    eps += std::fabs(v0 - v1) * len * (1.0 + kMachineEpsilon) +
           2.0 * kMachineEpsilon * (std::fabs(v0) + std::fabs(v1) + 2.0) * len;
    abs_sum += std::fabs(v0) * len + std::fabs(v1) * len;
    ++terms;
  }

  IntegralValue finish() const {
    double rounding = static_cast<double>(terms) * kMachineEpsilon * abs_sum;
    return {lower, upper, lower, eps + rounding};
  }
};

/// Runs the integration and hands every finished output cell to `sink`.
/// Output cells for which `keep(o)` holds are skipped (fast path only).
template <typename Sink, typename Keep>
void integrate_impl(const PotentialSpec& spec, int base_level, int out_level, Sink&& sink,
                    Keep&& keep) {
  if (!spec.tail_valid) {
    throw InvalidSpec("tail condition fails for c=" + spec.c.to_string() + ", d=" +
                      std::to_string(spec.d) + ", d'=" + std::to_string(spec.dprime));
  }
  if (base_level < 1 || out_level < 0 || out_level > base_level) {
    throw std::invalid_argument("integration levels out of range");
  }
  const int fine = std::max({base_level, static_cast<int>(spec.c.reduced().level()),
                             spec.d, spec.dprime});
  if (fine > 62) throw std::invalid_argument("integration level exceeds 62");

  const Grid grid(spec, fine);
  const std::uint64_t cells = std::uint64_t{1} << base_level;
  const std::uint64_t per_out = std::uint64_t{1} << (base_level - out_level);
  const std::uint64_t step = std::uint64_t{1} << (fine - base_level);

  if (fine == base_level && base_level <= kTableMaxLevel) {
    // Every breakpoint is a grid point, so each base cell is one monotone piece.
    const auto& table = log_sin_table(base_level);
    const double len = std::ldexp(1.0, -base_level);
    auto value = [&](std::uint64_t pos, bool tail) {
      std::uint64_t t = grid.distance(tail ? grid.modulus - pos : pos);
      return t <= grid.floor_t ? grid.floor_value : table[t];
    };
    for (std::uint64_t o = 0; o < (cells / per_out); ++o) {
      if (keep(o)) continue;
      CellAccumulator acc;
      const std::uint64_t first = o * per_out;
      bool tail = first >= grid.tail_start;
      double v0 = value(first, tail);
      for (std::uint64_t j = first; j < first + per_out; ++j) {
        bool cell_tail = j >= grid.tail_start;
        if (cell_tail != tail) {
          tail = cell_tail;
          v0 = value(j, tail);
        }
        double v1 = value(j + 1, tail);
        acc.add_piece(v0, v1, len);
        v0 = v1;
      }
      sink(o, acc.finish());
    }
    return;
  }

  // General path: cut cells at breakpoints that fall strictly inside them.
  std::vector<std::uint64_t> breaks;
  const i128 c = grid.c;
  const i128 h = grid.half;
  const i128 f = grid.floor_t;
  for (i128 v : {-c, h - c, h - c - f, h - c + f, c, c + h, c + h - f, c + h + f}) {
    breaks.push_back(wrap(v, grid.modulus));
  }
  breaks.push_back(grid.tail_start);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto value = [&](std::uint64_t pos, bool tail) {
    std::uint64_t t = grid.distance(tail ? grid.modulus - pos : pos);
    if (t <= grid.floor_t) return grid.floor_value;
    return log_sin_pi(std::ldexp(static_cast<long double>(t), -fine));
  };

  std::size_t next_break = 0;
  for (std::uint64_t o = 0; o < (cells / per_out); ++o) {
    CellAccumulator acc;
    for (std::uint64_t j = o * per_out; j < (o + 1) * per_out; ++j) {
      std::uint64_t lo = j * step;
      const std::uint64_t hi = lo + step;
      while (next_break < breaks.size() && breaks[next_break] <= lo) ++next_break;
      std::size_t b = next_break;
      while (lo < hi) {
        std::uint64_t cut = (b < breaks.size() && breaks[b] < hi) ? breaks[b++] : hi;
        bool tail = lo >= grid.tail_start;
        double len = std::ldexp(static_cast<double>(cut - lo), -fine);
        acc.add_piece(value(lo, tail), value(cut, tail), len);
        lo = cut;
      }
    }
    sink(o, acc.finish());
  }
}

template <typename Sink>
void integrate_impl(const PotentialSpec& spec, int base_level, int out_level, Sink&& sink) {
  integrate_impl(spec, base_level, out_level, std::forward<Sink>(sink),
                 [](std::uint64_t) { return false; });
}

CylinderIntegrals make_cylinders(int level, int base_level) {
  CylinderIntegrals out;
  out.level = level;
  out.base_level = base_level;
  const Eigen::Index n = Eigen::Index{1} << level;
  out.lower.resize(n);
  out.upper.resize(n);
  out.epsilon.resize(n);
  return out;
}

}  // namespace

PotentialSpec PotentialSpec::make(const DyadicRational& c, int d, int dprime) {
  if (d < 2 || dprime < d || dprime > 62) {
    throw std::invalid_argument("potential spec needs 2 <= d <= d' <= 62");
  }
  PotentialSpec spec{c, d, dprime, false};
  spec.tail_valid = check_tail_condition(spec);
  return spec;
}

double PotentialSpec::floor_level() const {
  return log_sin_pi(std::ldexp(1.0L, -d));
}

double log_sin_pi(long double t) {
  return static_cast<double>(std::log(std::sin(std::numbers::pi_v<long double> * t)));
}

ExtendedReal eval_g(const DyadicRational& c, double x) {
  long double t = pole_distance(c, x);
  if (t == 0.0L) return ExtendedReal::bottom();
  return log_sin_pi(t);
}

double eval_g_d(const PotentialSpec& spec, double x) {
  long double t = pole_distance(spec.c, x);
  if (t <= std::ldexp(1.0L, -spec.d)) return spec.floor_level();
  return log_sin_pi(t);
}

double eval_g_dd(const PotentialSpec& spec, double x) {
  if (!spec.tail_valid) {
    throw InvalidSpec("tail condition fails for c=" + spec.c.to_string());
  }
  if (x >= 1.0 - std::ldexp(1.0, -spec.dprime)) return eval_g_d(spec, 1.0 - x);
  return eval_g_d(spec, x);
}

bool check_tail_condition(const PotentialSpec& spec) {
  const int fine = std::max({static_cast<int>(spec.c.reduced().level()), spec.d,
                             spec.dprime}) + 1;
  const i128 M = i128{1} << fine;
  const i128 half = M / 2;
  const i128 c = spec.c.at_level(static_cast<unsigned>(fine)).numerator();
  const i128 len = i128{1} << (fine - spec.dprime);
  const i128 floor_t = i128{1} << (fine - spec.d);

  auto dist = [&](i128 y) {
    i128 r = ((y % M) + M) % M;
    return r > half ? r - half : half - r;
  };
  // Does [lo, hi] contain a point congruent to `target` mod M?
  auto contains = [&](i128 lo, i128 hi, i128 target) {
    i128 r = ((target - lo) % M + M) % M;
    return lo + r <= hi;
  };
  auto min_t = [&](i128 lo, i128 hi) {
    return contains(lo, hi, half) ? i128{0} : std::min(dist(lo), dist(hi));
  };
  auto max_t = [&](i128 lo, i128 hi) {
    return contains(lo, hi, 0) ? half : std::max(dist(lo), dist(hi));
  };

  // x ∈ [0, 2^−d'] and x ∈ [1 − 2^−d', 1], shifted by c; closures give inf/sup.
  i128 head_min = min_t(c, c + len);
  i128 tail_max = max_t(c - len, c);
  return tail_max <= floor_t || head_min >= tail_max;
}

std::vector<IntegralValue> integrate_base_cells(const PotentialSpec& spec, int base_level) {
  if (base_level < spec.dprime) {
    throw std::invalid_argument("base level must be at least d'");
  }
  std::vector<IntegralValue> cells(std::size_t{1} << base_level);
  integrate_impl(spec, base_level, base_level,
                 [&](std::uint64_t i, const IntegralValue& v) { cells[i] = v; });
  return cells;
}

CylinderIntegrals integrate_cylinders(const PotentialSpec& spec, int base_level, int level) {
  if (base_level < spec.dprime) {
    throw std::invalid_argument("base level must be at least d'");
  }
  CylinderIntegrals out = make_cylinders(level, base_level);
  integrate_impl(spec, base_level, level, [&](std::uint64_t i, const IntegralValue& v) {
    auto k = static_cast<Eigen::Index>(i);
    out.lower[k] = v.lower_sum;
    out.upper[k] = v.upper_sum;
    out.epsilon[k] = v.epsilon;
  });
  return out;
}

CylinderIntegrals reintegrate_cylinders(const PotentialSpec& spec, int base_level, int level,
                                        const PotentialSpec& prev_spec,
                                        const CylinderIntegrals& prev) {
  const int fine = std::max({base_level, static_cast<int>(spec.c.reduced().level()), spec.d,
                             spec.dprime, prev_spec.d, prev_spec.dprime});
  const bool reusable = spec.c == prev_spec.c && prev.level == level &&
                        prev.base_level == base_level && fine == base_level &&
                        base_level <= kTableMaxLevel && prev_spec.tail_valid &&
                        level <= base_level && base_level >= spec.dprime;
  if (!reusable) return integrate_cylinders(spec, base_level, level);

  const Grid now(spec, fine);
  const Grid old(prev_spec, fine);
  const std::uint64_t per_out = std::uint64_t{1} << (base_level - level);
  const std::uint64_t floor_t = std::max(now.floor_t, old.floor_t);
  const std::uint64_t tail_start = std::min(now.tail_start, old.tail_start);
  const std::uint64_t pole = (now.half + now.modulus - now.c) & (now.modulus - 1);

  // A cell [first, first + per_out] is unchanged unless some sample point
  // is within floor_t of the pole or it touches either tail region.
  auto keep = [&](std::uint64_t o) {
    const std::uint64_t first = o * per_out;
    const std::uint64_t last = first + per_out;
    if (last > tail_start) return false;
    if (pole >= first && pole <= last) return false;
    return std::min(now.distance(first), now.distance(last)) > floor_t;
  };

  CylinderIntegrals out = prev;
  integrate_impl(
      spec, base_level, level,
      [&](std::uint64_t i, const IntegralValue& v) {
        auto k = static_cast<Eigen::Index>(i);
        out.lower[k] = v.lower_sum;
        out.upper[k] = v.upper_sum;
        out.epsilon[k] = v.epsilon;
      },
      keep);
  return out;
}

CylinderIntegrals to_cylinders(const std::vector<IntegralValue>& base_cells, int base_level) {
  if (base_cells.size() != (std::size_t{1} << base_level)) {
    throw std::invalid_argument("base cell count does not match base level");
  }
  CylinderIntegrals out = make_cylinders(base_level, base_level);
  for (std::size_t i = 0; i < base_cells.size(); ++i) {
    auto k = static_cast<Eigen::Index>(i);
    out.lower[k] = base_cells[i].lower_sum;
    out.upper[k] = base_cells[i].upper_sum;
    out.epsilon[k] = base_cells[i].epsilon;
  }
  return out;
}

CylinderIntegrals coarsen(const CylinderIntegrals& cells, int level) {
  if (level > cells.level || level < 0) {
    throw std::invalid_argument("coarsen target level out of range");
  }
  CylinderIntegrals cur = cells;
  while (cur.level > level) {
    CylinderIntegrals next = make_cylinders(cur.level - 1, cur.base_level);
    const Eigen::Index n = next.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      double lo = cur.lower[2 * i] + cur.lower[2 * i + 1];
      next.lower[i] = lo;
      next.upper[i] = cur.upper[2 * i] + cur.upper[2 * i + 1];
      next.epsilon[i] = cur.epsilon[2 * i] + cur.epsilon[2 * i + 1] +
                        kMachineEpsilon * std::fabs(lo);
    }
    cur = std::move(next);
  }
  return cur;
}

IntegralValue CylinderAverages::at(const BinaryWord& w) const {
  if (w.length() != level) throw std::invalid_argument("word length differs from level");
  auto i = static_cast<Eigen::Index>(w.bits());
  return {lower[i], upper[i], weight[i], epsilon[i]};
}

CylinderAverages haar_average(const CylinderIntegrals& cells, int N) {
  if (N > cells.level) throw std::invalid_argument("haar level exceeds cell level");
  CylinderIntegrals merged = coarsen(cells, N);
  const double scale = std::ldexp(1.0, N);
  CylinderAverages out;
  out.level = N;
  out.weight = merged.lower * scale;
  out.lower = out.weight;
  out.upper = merged.upper * scale;
  out.epsilon = merged.epsilon * scale;
  return out;
}

CylinderAverages haar_average(const std::vector<IntegralValue>& base_cells, int base_level,
                              int N) {
  return haar_average(to_cylinders(base_cells, base_level), N);
}

double haar_coefficient(const CylinderIntegrals& cells, const BinaryWord& w) {
  const int k = w.length();
  if (k + 1 > cells.level) throw std::invalid_argument("haar coefficient needs finer cells");
  const Eigen::Index span = Eigen::Index{1} << (cells.level - k - 1);
  const Eigen::Index left = static_cast<Eigen::Index>(w.bits()) * 2 * span;
  double a = cells.lower.segment(left, span).sum();
  double b = cells.lower.segment(left + span, span).sum();
  return std::ldexp(a - b, k + 1);
}

Eigen::VectorXd haar_coefficients(const CylinderIntegrals& cells, int k) {
  if (k + 1 > cells.level) throw std::invalid_argument("haar coefficient needs finer cells");
  CylinderIntegrals merged = coarsen(cells, k + 1);
  const Eigen::Index n = Eigen::Index{1} << k;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = std::ldexp(merged.lower[2 * i] - merged.lower[2 * i + 1], k + 1);
  }
  return out;
}

double tail_bound(int d, int N, double constant) {
  const double angle = std::numbers::pi / std::ldexp(1.0, d);
  return constant * std::numbers::pi / std::tan(angle) * std::ldexp(1.0, -N);
}

}  // namespace gelfond
