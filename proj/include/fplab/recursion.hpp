#pragma once

// Stable evaluation of the integral sequences
//   F_k = int_0^1 u^{2k} / (1 + r u^2) du
//   G_m = int_1^{1+r} (x - 1)^m / x dx
// behind the odd/even closed forms. The three-term forms
//   F_k = 1/(r(2k-1)) - F_{k-1}/r        (base F_0 = atan(sqrt(r))/sqrt(r))
//   G_m = r^m/m - G_{m-1}                (base G_0 = ln(1+r))
// amplify error when run forward for r < 1, so both sequences are evaluated
// BACKWARD from a padded start index seeded by the midpoint of the two-sided
// bounds
//   1/((1+r)(2k+1)) <= F_k <= 1/(2k+1)
//   r^(m+1)/((1+r)(m+1)) <= G_m <= r^(m+1)/(m+1).
// Each backward F step damps the seed error by r; the seed error itself is
// killed by padding. When r is so close to 1 that padding cannot help
// (damping factor ~1), forward iteration from the exact base is error-neutral
// and is used instead; the crossover is amplification (1/r)^m <= 2.
// Iterations run in long double; certified bounds are tracked alongside.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fplab {

struct RecursionTable {
  double r = 1.0;
  std::vector<double> values;      // F_0..F_m or G_0..G_m
  int start_index = 0;             // padded backward start K (0 if forward)
  double certified_abs_error = 0;  // bound for values[m]; see notes above
  bool backward = false;
};

namespace detail {

inline constexpr double kEpsD = std::numeric_limits<double>::epsilon();
inline constexpr long double kEpsL =
    std::numeric_limits<long double>::epsilon();

inline bool use_forward(double r, int m) {
  // amplification (1/r)^m stays below 2
  return r >= 1.0 || m * std::log1p((1.0 - r) / r) <= std::numeric_limits<
             double>::epsilon() + 0.6931471805599453;
}

inline int backward_pad(double r) {
  // r^pad * (half-width <= 1/4) <= 1e-16
  return static_cast<int>(std::ceil(std::log(4e-16) / std::log(r))) + 1;
}

inline void check_f_bounds(const std::vector<double>& values, double r) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double upper = 1.0 / (2.0 * k + 1.0);
    const double lower = upper / (1.0 + r);
    const double slack = 16 * kEpsD * upper + 1e-300;
    if (!(values[k] >= lower - slack && values[k] <= upper + slack))
      throw std::logic_error("f_sequence: two-sided bound violated");
  }
}

}  // namespace detail

inline RecursionTable f_sequence(double r, int m) {
  if (!(r > 0.0) || m < 0)
    throw std::invalid_argument("f_sequence: need r > 0, m >= 0");
  RecursionTable table;
  table.r = r;
  table.values.resize(m + 1);
  const long double rl = r;
  if (detail::use_forward(r, m)) {
    long double f = std::atan(std::sqrt(rl)) / std::sqrt(rl);
    if (r == 1.0) f = std::atan(1.0L);  // pi/4 without the 0/0-adjacent form
    double err = 4 * detail::kEpsD * static_cast<double>(f);
    table.values[0] = static_cast<double>(f);
    for (int k = 1; k <= m; ++k) {
      const long double term = 1.0L / (rl * (2 * k - 1));
      f = term - f / rl;
      err = err / r +
            4 * detail::kEpsL * (static_cast<double>(term) + std::abs(
                static_cast<double>(f)));
      table.values[k] = static_cast<double>(f);
    }
    table.certified_abs_error =
        err + 0.5 * detail::kEpsD / (2.0 * m + 1.0);
  } else {
    table.backward = true;
    const int pad = detail::backward_pad(r);
    const int start = m + pad;
    table.start_index = start;
    const double upper = 1.0 / (2.0 * start + 1.0);
    long double f = 0.5L * (upper + upper / (1.0 + rl));
    double err = 0.5 * (upper - upper / (1.0 + r));
    double err_at_m = 0;
    for (int k = start; k >= 1; --k) {
      const long double term = 1.0L / (2 * k - 1);
      f = term - rl * f;
      err = err * r +
            4 * detail::kEpsL * (static_cast<double>(term) +
                                 std::abs(static_cast<double>(f)));
      if (k - 1 <= m) table.values[k - 1] = static_cast<double>(f);
      if (k - 1 == m) err_at_m = err;
    }
    table.certified_abs_error =
        err_at_m + 0.5 * detail::kEpsD / (2.0 * m + 1.0);
  }
  detail::check_f_bounds(table.values, r);
  return table;
}

inline RecursionTable g_sequence(double r, int m) {
  if (!(r > 0.0) || m < 0)
    throw std::invalid_argument("g_sequence: need r > 0, m >= 0");
  RecursionTable table;
  table.r = r;
  table.values.resize(m + 1);
  const long double rl = r;
  if (detail::use_forward(r, m)) {
    long double g = std::log1p(rl);
    double err = 4 * detail::kEpsD * static_cast<double>(g);
    table.values[0] = static_cast<double>(g);
    for (int j = 1; j <= m; ++j) {
      const long double term = std::pow(rl, j) / j;
      g = term - g;
      err += 4 * detail::kEpsL * (static_cast<double>(term) +
                                  std::abs(static_cast<double>(g)));
      table.values[j] = static_cast<double>(g);
    }
    table.certified_abs_error =
        err + 0.5 * detail::kEpsD * std::abs(table.values[m]);
  } else {
    table.backward = true;
    const int pad = detail::backward_pad(r);
    const int start = m + pad;
    table.start_index = start;
    const long double top = std::pow(rl, start + 1) / (start + 1);
    long double g = 0.5L * (top + top / (1.0 + rl));
    double err = 0.5 * static_cast<double>(top - top / (1.0 + rl));
    double err_at_m = 0;
    for (int j = start; j >= 1; --j) {
      const long double term = std::pow(rl, j) / j;
      g = term - g;
      err += 4 * detail::kEpsL * (static_cast<double>(term) +
                                  std::abs(static_cast<double>(g)));
      if (j - 1 <= m) table.values[j - 1] = static_cast<double>(g);
      if (j - 1 == m) err_at_m = err;
    }
    table.certified_abs_error =
        err_at_m + 0.5 * detail::kEpsD * std::abs(table.values[m]);
  }
  // entrywise two-sided bound
  for (std::size_t j = 0; j < table.values.size(); ++j) {
    const double upper = std::pow(r, static_cast<double>(j) + 1.0) / (j + 1.0);
    const double lower = upper / (1.0 + r);
    const double slack = 64 * detail::kEpsD * upper + 1e-300;
    if (!(table.values[j] >= lower - slack && table.values[j] <= upper + slack))
      throw std::logic_error("g_sequence: two-sided bound violated");
  }
  return table;
}

}  // namespace fplab
