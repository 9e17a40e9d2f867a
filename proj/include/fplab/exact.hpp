#pragma once

// Exact first and second moments of the win rate R_{N_d}/N_d:
//   E[1/N_d]   = int_0^1 u^(d-1) h_p(u) du
//   E[1/N_d^2] = int_0^1 u^(d-1) h_p(u) l_p(u) du
//   E[R/N]     = 1/2 + (d/2) E[1/N_d]
//   Var[R/N]   = (d^2/4) (E[1/N_d^2] - E[1/N_d]^2)
// with h_p(u) = (p - q u^2)/(p + q u^2) and l_p(u) = ln((p + q u^2)/u),
// computed by quadrature, by the odd/even closed forms (alternating sums in
// exact arithmetic behind a cancellation guard), or by the backward
// recursions. p = 1 is excluded from the formula paths; the analytically
// forced limits (E = 1, Var = 0) are returned directly.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fplab/numeric.hpp"
#include "fplab/quadrature.hpp"
#include "fplab/recursion.hpp"
#include "fplab/walk.hpp"

namespace fplab {

enum class Method { quadrature, closed_form, recursion };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::quadrature: return "quadrature";
    case Method::closed_form: return "closed_form";
    case Method::recursion: return "recursion";
  }
  return "?";
}

struct MomentReport {
  double e_inv_n = 0;         // E[1/N_d]
  double e_inv_n_sq = 0;      // E[1/N_d^2]
  double mean_win_rate = 0;   // E[R/N]
  double var_win_rate = 0;    // Var[R/N]
  Method method = Method::quadrature;
  double abs_error_estimate = 0;  // upper bound on mean_win_rate error
  double e_inv_n_err = 0;
  double e_inv_n_sq_err = 0;
};

class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double eval_h(const BiasParams& bp, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("eval_h: u not in [0,1]");
  const double uu = u * u;
  return (bp.p - bp.q * uu) / (bp.p + bp.q * uu);
}

inline double eval_ell(const BiasParams& bp, double u) {
  if (!(u > 0.0) || u > 1.0)
    throw std::domain_error("eval_ell: u not in (0,1]");
  // (p + q u^2)/u = 1 + (1-u)(p - q u)/u, cancellation-free near u = 1
  return std::log1p((1.0 - u) * (bp.p - bp.q * u) / u);
}

namespace detail {

// Initial panel boundaries clustered toward u = 1 where u^(d-1) peaks.
inline std::vector<double> unit_panels(int d) {
  std::vector<double> pts{0.0};
  double gap = 0.5;
  while (gap * 4.0 * d > 1.0 && pts.size() < 64) {
    pts.push_back(1.0 - gap);
    gap *= 0.5;
  }
  pts.push_back(1.0);
  return pts;
}

inline constexpr double kQuadTol = 2.5e-13;

}  // namespace detail

// E[1/N_d] with a certified absolute error bound (target <= 1e-12).
inline QuadResult moment_inv_n(const BiasParams& bp, Threshold d) {
  if (bp.always_up) return {1.0 / d.d, 0.0};  // limit p -> 1
  const auto pts = detail::unit_panels(d.d);
  const auto f = [&](double u) {
    return std::pow(u, d.d - 1) * eval_h(bp, u);
  };
  return integrate_gk(f, std::span<const double>(pts), detail::kQuadTol);
}

// E[1/N_d^2] with a certified absolute error bound. The ln(1/u) part of
// l_p is integrated through u = e^{-s}, which removes the endpoint
// singularity (material only for d = 1) and yields a certified exponential
// tail bound.
inline QuadResult moment_inv_n_sq(const BiasParams& bp, Threshold d) {
  if (bp.always_up) return {1.0 / (double(d.d) * d.d), 0.0};
  const auto pts = detail::unit_panels(d.d);
  const auto smooth = [&](double u) {
    // ln(p + q u^2) = log1p(-q (1-u)(1+u))
    return std::pow(u, d.d - 1) * eval_h(bp, u) *
           std::log1p(-bp.q * (1.0 - u) * (1.0 + u));
  };
  const QuadResult a =
      integrate_gk(smooth, std::span<const double>(pts), detail::kQuadTol);

  const double s_max = 44.0 / d.d;
  const double tail_bound =
      (s_max / d.d + 1.0 / (double(d.d) * d.d)) * std::exp(-44.0);
  const auto singular = [&](double s) {
    return s * std::exp(-d.d * s) * eval_h(bp, std::exp(-s));
  };
  const double spts[5] = {0.0, s_max / 64, s_max / 16, s_max / 4, s_max};
  const QuadResult b =
      integrate_gk(singular, std::span<const double>(spts), detail::kQuadTol);

  return {a.value + b.value, a.abs_error + b.abs_error + tail_bound};
}

namespace detail {

inline void require_formula_p(const BiasParams& bp) {
  if (bp.always_up)
    throw std::domain_error("closed form rejects p = 1; use the limit value");
}

inline double cancellation_digits(const BiasParams& bp, int d) {
  return 0.5 * d * std::log10(bp.p / bp.q);
}

// Exact odds ratio r = q/p = 1/p - 1.
inline QuadSurd exact_odds(const QuadSurd& p_exact) {
  return p_exact.inverse() - QuadSurd(Rational(1));
}

template <class F>
double closed_form_odd_float(const BiasParams& bp, int d) {
  const int m = (d - 1) / 2;
  F r;
  QuadSurd sum_exact(Rational(0));
  const bool exact = bp.p_exact.has_value();
  if (exact) {
    const QuadSurd r_ex = exact_odds(*bp.p_exact);
    r = r_ex.template to_float<F>();
    for (int k = 0; k <= m; ++k) {
      QuadSurd term = r_ex.pow(-k) * QuadSurd(Rational(1, d - 2 * k));
      sum_exact = (k % 2 == 0) ? sum_exact + term : sum_exact - term;
    }
  } else {
    r = F(bp.q) / F(bp.p);
  }
  F sum;
  if (exact) {
    sum = sum_exact.template to_float<F>();
  } else {
    sum = F(0);
    for (int k = 0; k <= m; ++k) {
      const F term = pow(r, -k) / F(d - 2 * k);
      sum = (k % 2 == 0) ? sum + term : sum - term;
    }
  }
  const int sign = (m % 2 == 0) ? 1 : -1;
  const F arc = F(sign * d) * pow(r, -m) / sqrt(r) * atan(sqrt(r));
  const F value = arc + F(1) - F(d) * sum;
  return value.template convert_to<double>();
}

template <class F>
double closed_form_even_float(const BiasParams& bp, int d) {
  const int m = d / 2;
  const bool exact = bp.p_exact.has_value();
  F r, log_p, big_sum;
  if (exact) {
    const QuadSurd& p_ex = *bp.p_exact;
    const QuadSurd r_ex = exact_odds(p_ex);
    r = r_ex.template to_float<F>();
    log_p = log(p_ex.template to_float<F>());
    QuadSurd s(Rational(0));
    for (int k = 1; k <= m; ++k) {
      QuadSurd term = QuadSurd(Rational(binomial(m, k), k)) *
                      (p_ex.pow(-k) - QuadSurd(Rational(1)));
      s = ((m + k) % 2 == 0) ? s + term : s - term;
    }
    // (d/2) r^{-m} * sum, still exact
    const QuadSurd full = QuadSurd(Rational(m)) * r_ex.pow(-m) * s;
    big_sum = full.template to_float<F>();
  } else {
    r = F(bp.q) / F(bp.p);
    const F p = F(bp.p);
    log_p = log(p);
    F s(0);
    for (int k = 1; k <= m; ++k) {
      const F term = F(binomial(m, k)) / F(k) * (pow(p, -k) - F(1));
      s = ((m + k) % 2 == 0) ? s + term : s - term;
    }
    big_sum = F(m) * pow(r, -m) * s;
  }
  const int sign = (m % 2 == 0) ? 1 : -1;
  const F value = F(sign * m) * pow(r, -m) * log_p + F(1) - big_sum;
  return value.template convert_to<double>();
}

}  // namespace detail

// Plain double evaluation of the odd closed form; suffers cancellation for
// (d/2) log10(p/q) beyond a couple of digits.
inline double closed_form_odd_naive(const BiasParams& bp, Threshold d) {
  detail::require_formula_p(bp);
  if (d.parity() != Parity::odd)
    throw std::invalid_argument("closed_form_odd: d must be odd");
  const int m = (d.d - 1) / 2;
  const double pq = bp.p / bp.q;
  double sum = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double term = std::pow(pq, k) / (d.d - 2 * k);
    sum = (k % 2 == 0) ? sum + term : sum - term;
  }
  const int sign = (m % 2 == 0) ? 1 : -1;
  return sign * d.d * std::pow(pq, 0.5 * d.d) * std::atan(std::sqrt(bp.r)) +
         1.0 - d.d * sum;
}

inline double closed_form_even_naive(const BiasParams& bp, Threshold d) {
  detail::require_formula_p(bp);
  if (d.parity() != Parity::even)
    throw std::invalid_argument("closed_form_even: d must be even");
  const int m = d.d / 2;
  const double pq = bp.p / bp.q;
  double sum = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double term = to_double(Rational(binomial(m, k))) / k *
                        (std::pow(bp.p, -k) - 1.0);
    sum = ((m + k) % 2 == 0) ? sum + term : sum - term;
  }
  const int sign = (m % 2 == 0) ? 1 : -1;
  const double scale = std::pow(pq, m);
  return sign * m * scale * std::log(bp.p) + 1.0 - m * scale * sum;
}

// Guarded closed forms. precision_digits = 0 lets the cancellation guard
// pick the working precision; explicit values force at least that tier.
inline double closed_form_odd(const BiasParams& bp, Threshold d,
                              int precision_digits = 0) {
  detail::require_formula_p(bp);
  if (d.parity() != Parity::odd)
    throw std::invalid_argument("closed_form_odd: d must be odd");
  const double cancel = detail::cancellation_digits(bp, d.d);
  const int needed =
      std::max(precision_digits, static_cast<int>(std::ceil(2 * cancel)) + 16);
  if (precision_digits == 0 && cancel <= 1.9) return closed_form_odd_naive(bp, d);
  if (needed <= 50) return detail::closed_form_odd_float<Float50>(bp, d.d);
  if (needed <= 100) return detail::closed_form_odd_float<Float100>(bp, d.d);
  if (needed <= 200) return detail::closed_form_odd_float<Float200>(bp, d.d);
  throw PrecisionError("closed_form_odd: needs more than 200 digits");
}

inline double closed_form_even(const BiasParams& bp, Threshold d,
                               int precision_digits = 0) {
  detail::require_formula_p(bp);
  if (d.parity() != Parity::even)
    throw std::invalid_argument("closed_form_even: d must be even");
  const double cancel = detail::cancellation_digits(bp, d.d);
  const int needed =
      std::max(precision_digits, static_cast<int>(std::ceil(2 * cancel)) + 16);
  if (precision_digits == 0 && cancel <= 1.9)
    return closed_form_even_naive(bp, d);
  if (needed <= 50) return detail::closed_form_even_float<Float50>(bp, d.d);
  if (needed <= 100) return detail::closed_form_even_float<Float100>(bp, d.d);
  if (needed <= 200) return detail::closed_form_even_float<Float200>(bp, d.d);
  throw PrecisionError("closed_form_even: needs more than 200 digits");
}

namespace detail {

inline double recursion_win_rate(const BiasParams& bp, Threshold d,
                                 double* err_out = nullptr) {
  const long double r = bp.r;
  double value, err;
  if (d.parity() == Parity::odd) {
    const int m = (d.d - 1) / 2;
    const RecursionTable t = f_sequence(bp.r, m + 1);
    value = static_cast<double>(1.0L - d.d * r * t.values[m + 1]);
    err = d.d * bp.r * t.certified_abs_error;
  } else {
    const int m = d.d / 2;
    const RecursionTable t = g_sequence(bp.r, m);
    value = static_cast<double>(1.0L - 0.5L * d.d * t.values[m] /
                                           std::pow(r, m));
    err = 0.5 * d.d * t.certified_abs_error / std::pow(bp.r, m);
  }
  if (err_out) *err_out = err + 2 * std::numeric_limits<double>::epsilon();
  return value;
}

// Bound for the guarded closed form: ~4 ulp on the extended-precision tiers;
// 10^cancel amplification of the term roundoff on the plain-double path.
inline double closed_form_err_bound(const BiasParams& bp, int d) {
  const double cancel = cancellation_digits(bp, d);
  const double eps = std::numeric_limits<double>::epsilon();
  if (cancel <= 1.9)
    return std::pow(10.0, cancel) * 4 * (d / 2 + 1) * eps + 2 * eps;
  return 4 * eps;
}

}  // namespace detail

// E[R_{N_d}/N_d] by the chosen route. The closed form falls back to the
// backward recursion if its precision demand exceeds the supported tiers.
inline double expect_win_rate(const BiasParams& bp, Threshold d,
                              Method method = Method::recursion) {
  if (bp.always_up) return 1.0;  // limit p -> 1
  switch (method) {
    case Method::quadrature:
      return 0.5 + 0.5 * d.d * moment_inv_n(bp, d).value;
    case Method::recursion:
      return detail::recursion_win_rate(bp, d);
    case Method::closed_form:
      try {
        return d.parity() == Parity::odd ? closed_form_odd(bp, d)
                                         : closed_form_even(bp, d);
      } catch (const PrecisionError&) {
        return detail::recursion_win_rate(bp, d);
      }
  }
  throw std::logic_error("expect_win_rate: bad method");
}

// Var[R_{N_d}/N_d] from the two quadratures; nonnegative.
inline double var_win_rate(const BiasParams& bp, Threshold d) {
  if (bp.always_up) return 0.0;
  const QuadResult e1 = moment_inv_n(bp, d);
  const QuadResult e2 = moment_inv_n_sq(bp, d);
  const double v = 0.25 * d.d * d.d * (e2.value - e1.value * e1.value);
  return v < 0.0 ? 0.0 : v;
}

// E[N_d] = d/(2p-1); infinite for p = 1/2 (documented return, not an error).
inline double expected_hitting_time(const BiasParams& bp, Threshold d) {
  if (bp.drift == 0.0) return std::numeric_limits<double>::infinity();
  return d.d / bp.drift;
}

inline MomentReport moment_report(const BiasParams& bp, Threshold d,
                                  Method method = Method::quadrature) {
  MomentReport rep;
  rep.method = method;
  if (bp.always_up) {
    rep.e_inv_n = 1.0 / d.d;
    rep.e_inv_n_sq = 1.0 / (double(d.d) * d.d);
    rep.mean_win_rate = 1.0;
    rep.var_win_rate = 0.0;
    return rep;
  }
  const QuadResult e2 = moment_inv_n_sq(bp, d);
  rep.e_inv_n_sq = e2.value;
  rep.e_inv_n_sq_err = e2.abs_error;
  if (method == Method::quadrature) {
    const QuadResult e1 = moment_inv_n(bp, d);
    rep.e_inv_n = e1.value;
    rep.e_inv_n_err = e1.abs_error;
  } else {
    double mean, mean_err;
    if (method == Method::recursion) {
      mean = detail::recursion_win_rate(bp, d, &mean_err);
    } else {
      mean = expect_win_rate(bp, d, Method::closed_form);
      mean_err = detail::closed_form_err_bound(bp, d.d);
    }
    rep.e_inv_n = (mean - 0.5) * 2.0 / d.d;
    rep.e_inv_n_err = 2.0 * mean_err / d.d +
                      2 * std::numeric_limits<double>::epsilon() / d.d;
  }
  rep.mean_win_rate = 0.5 + 0.5 * d.d * rep.e_inv_n;
  const double v =
      0.25 * d.d * d.d * (rep.e_inv_n_sq - rep.e_inv_n * rep.e_inv_n);
  rep.var_win_rate = v < 0.0 ? 0.0 : v;
  rep.abs_error_estimate = 0.5 * d.d * rep.e_inv_n_err;
  return rep;
}

}  // namespace fplab
