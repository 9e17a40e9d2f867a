#pragma once

// Brute-force oracle. Builds truncated distributions of the single-level
// hitting time T and of N_d = T_1 + ... + T_d from the first-step
// decomposition T = 1 (w.p. p) or T = 1 + T' + T'' (w.p. q), i.e. pure
// self-convolution of the pmf -- deliberately independent of the closed-form
// algebra it is used to validate. All masses are doubles; certified bounds
// absorb rounding by inflating the tail mass by n_max * 1e-16.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "fplab/walk.hpp"

namespace fplab {

// Truncated pmf of N_d on its parity-strided support n = d, d+2, ..., n_max.
struct PmfTable {
  BiasParams params;
  int level = 1;
  std::uint64_t n_max = 0;
  std::vector<double> mass;  // mass[j] = P[N = level + 2j]
  double tail_mass = 0.0;    // certified upper bound on P[N > n_max]

  std::uint64_t support_at(std::size_t j) const { return level + 2 * j; }
  double sum_mass() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
  }
  double mass_at(std::uint64_t n) const {
    if (n < static_cast<std::uint64_t>(level) || (n - level) % 2 != 0)
      return 0.0;
    const std::uint64_t j = (n - level) / 2;
    return j < mass.size() ? mass[j] : 0.0;
  }
};

namespace detail {

inline double certified_tail(double sum, std::uint64_t n_max) {
  double tail = 1.0 - sum;
  if (tail < 0.0) tail = 0.0;
  return tail + static_cast<double>(n_max) * 1e-16;
}

}  // namespace detail

// Coefficients of phi(t) = E[t^T] up to t^n_max via the first-step
// recurrence P[T=1] = p, P[T = 2j+1] = q * sum_{a+b=j-1} P[T=2a+1] P[T=2b+1].
inline PmfTable single_step_pmf(const BiasParams& bp, std::uint64_t n_max) {
  if (n_max < 1) throw std::invalid_argument("single_step_pmf: n_max >= 1");
  PmfTable t;
  t.params = bp;
  t.level = 1;
  t.n_max = n_max;
  const std::size_t count = (n_max - 1) / 2 + 1;  // odd n in [1, n_max]
  t.mass.resize(count);
  t.mass[0] = bp.p;
  for (std::size_t j = 1; j < count; ++j) {
    // symmetric self-convolution over a + b = j - 1
    double acc = 0.0;
    const std::size_t top = j - 1;
    for (std::size_t a = 0; 2 * a < top; ++a) acc += t.mass[a] * t.mass[top - a];
    acc *= 2.0;
    if (top % 2 == 0) acc += t.mass[top / 2] * t.mass[top / 2];
    t.mass[j] = bp.q * acc;
  }
  t.tail_mass = detail::certified_tail(t.sum_mass(), n_max);
  return t;
}

// d-fold convolution of the level-1 pmf, truncated at n_max; N_d is the sum
// of d independent copies of T.
inline PmfTable convolve_power(const PmfTable& base, Threshold d,
                               std::uint64_t n_max) {
  if (base.level != 1)
    throw std::invalid_argument("convolve_power: base must be level 1");
  if (base.n_max < n_max)
    throw std::invalid_argument("convolve_power: base.n_max < n_max");
  PmfTable cur;
  cur.params = base.params;
  cur.level = 1;
  cur.n_max = n_max;
  const std::size_t count1 = (n_max - 1) / 2 + 1;
  cur.mass.assign(base.mass.begin(),
                  base.mass.begin() +
                      std::min(count1, base.mass.size()));
  cur.mass.resize(count1, 0.0);
  for (int lvl = 2; lvl <= d.d; ++lvl) {
    // support of N_lvl: n = lvl + 2j <= n_max
    if (static_cast<std::uint64_t>(lvl) > n_max) {
      cur.mass.clear();
    }
    const std::size_t count =
        static_cast<std::uint64_t>(lvl) > n_max
            ? 0
            : (n_max - lvl) / 2 + 1;
    std::vector<double> next(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
      double acc = 0.0;
      const std::size_t limit = std::min(j + 1, cur.mass.size());
      for (std::size_t a = 0; a < limit; ++a) {
        const std::size_t b = j - a;
        if (b < base.mass.size()) acc += cur.mass[a] * base.mass[b];
      }
      next[j] = acc;
    }
    cur.mass = std::move(next);
    cur.level = lvl;
  }
  cur.tail_mass = detail::certified_tail(cur.sum_mass(), n_max);
  return cur;
}

// Sum_n mass(n) n^order for order in {-1, -2}, with the certified truncation
// bound tail_mass * n_max^order (n^order <= n_max^order beyond the horizon).
struct TruncatedMoment {
  double value = 0.0;
  double error_bound = 0.0;
};

inline TruncatedMoment truncated_moment(const PmfTable& t, int order) {
  if (order != -1 && order != -2)
    throw std::invalid_argument("truncated_moment: order must be -1 or -2");
  double value = 0.0;
  for (std::size_t j = t.mass.size(); j-- > 0;) {  // small terms first
    const double n = static_cast<double>(t.support_at(j));
    value += t.mass[j] * (order == -1 ? 1.0 / n : 1.0 / (n * n));
  }
  const double nm = static_cast<double>(t.n_max);
  const double tail_term =
      t.tail_mass * (order == -1 ? 1.0 / nm : 1.0 / (nm * nm));
  const double rounding =
      2.3e-16 * value * (1.0 + std::log2(double(t.mass.size()) + 1.0));
  return {value, tail_term + rounding};
}

// CSV dump: one (n, mass) row per support point, header comment carrying
// p, d, n_max and the certified tail mass.
inline void write_pmf_csv(const PmfTable& t, std::ostream& os) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "# p=%.17g d=%d n_max=%llu tail_mass=%.17g\n",
                t.params.p, t.level,
                static_cast<unsigned long long>(t.n_max), t.tail_mass);
  os << buf << "n,mass\n";
  for (std::size_t j = 0; j < t.mass.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g\n",
                  static_cast<unsigned long long>(t.support_at(j)),
                  t.mass[j]);
    os << buf;
  }
}

}  // namespace fplab
