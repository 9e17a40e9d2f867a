#pragma once

// Unbiased coin-flip estimators of pi and ln 2 built from the odd/even
// closed forms: estimate = scale * (R_N/N - offset) with
//   pi (parameter k >= 4):  r_k = tan^2(pi/k), p_k = 1/(1 + r_k), d odd,
//     scale  = (-1)^((d-1)/2) k r_k^(d/2) / d
//     offset = 1 - d sum_{j=0}^{(d-1)/2} (-1)^j r_k^(-j) / (d - 2j)
//   ln 2 (p = 1/2, d even):
//     scale  = (-1)^(d/2+1) 2/d
//     offset = 1 - (d/2) sum_{k=1}^{d/2} (-1)^(d/2+k) C(d/2,k) (2^k - 1)/k
// Coefficients are carried exactly -- rational times a quadratic surd for
// k in {4, 6, 8, 12}, extended precision (>= 40 digits) otherwise -- since
// scale and offset individually dwarf double precision near d = 45 while
// their combination is O(1).

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fplab/exact.hpp"
#include "fplab/numeric.hpp"
#include "fplab/walk.hpp"

namespace fplab {

enum class EstimatorKind { pi, ln2 };

// r_k = tan^2(pi/k) and p_k = 1/(1+r_k); exact for k in {4, 6, 8, 12},
// 50-digit floats otherwise.
struct OddsForK {
  int k = 0;
  bool exact = false;
  QuadSurd r;        // valid when exact
  QuadSurd sqrt_r;   // valid when exact
  QuadSurd p;        // valid when exact
  BigFloat r_big;    // always valid
  BigFloat p_big;    // always valid
};

inline OddsForK r_for_k(int k) {
  if (k < 4) throw std::invalid_argument("r_for_k: k must be >= 4");
  OddsForK out;
  out.k = k;
  switch (k) {
    case 4:  // tan^2(pi/4) = 1
      out.exact = true;
      out.r = QuadSurd(Rational(1));
      out.sqrt_r = QuadSurd(Rational(1));
      break;
    case 6:  // tan^2(pi/6) = 1/3, sqrt = sqrt(3)/3
      out.exact = true;
      out.r = QuadSurd(Rational(1, 3));
      out.sqrt_r = QuadSurd(Rational(0), Rational(1, 3), 3);
      break;
    case 8:  // tan^2(pi/8) = (sqrt(2)-1)^2 = 3 - 2 sqrt(2)
      out.exact = true;
      out.r = QuadSurd(Rational(3), Rational(-2), 2);
      out.sqrt_r = QuadSurd(Rational(-1), Rational(1), 2);
      break;
    case 12:  // tan^2(pi/12) = (2 - sqrt(3))^2 = 7 - 4 sqrt(3)
      out.exact = true;
      out.r = QuadSurd(Rational(7), Rational(-4), 3);
      out.sqrt_r = QuadSurd(Rational(2), Rational(-1), 3);
      break;
    default:
      break;
  }
  if (out.exact) {
    out.r_big = out.r.to_float<BigFloat>();
    out.p = (QuadSurd(Rational(1)) + out.r).inverse();
    out.p_big = out.p.to_float<BigFloat>();
  } else {
    const BigFloat pi_big = 4 * atan(BigFloat(1));
    const BigFloat t = tan(pi_big / k);
    out.r_big = t * t;
    out.p_big = 1 / (1 + out.r_big);
  }
  return out;
}

// Affine map sample -> estimate with exactly represented coefficients.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::pi;
  int k = 0;  // pi only
  int d = 1;
  BiasParams p_implied;
  bool exact_coeffs = false;
  QuadSurd scale_exact;   // valid when exact_coeffs
  QuadSurd offset_exact;  // valid when exact_coeffs
  BigFloat scale_big;     // always valid
  BigFloat offset_big;    // always valid
  double scale = 0;
  double offset = 0;
  double affine_c0 = 0;  // double(-scale * offset), reduced exactly first
  double target = 0;     // pi or ln 2
};

inline EstimatorSpec estimator_coefficients(EstimatorKind kind, int k,
                                            Threshold d) {
  EstimatorSpec spec;
  spec.kind = kind;
  spec.d = d.d;
  if (kind == EstimatorKind::pi) {
    if (d.parity() != Parity::odd)
      throw std::invalid_argument("pi estimator requires odd d");
    spec.k = k;
    const OddsForK odds = r_for_k(k);
    const int m = (d.d - 1) / 2;
    const int sign = (m % 2 == 0) ? 1 : -1;
    spec.target = std::numbers::pi;
    spec.exact_coeffs = odds.exact;
    if (odds.exact) {
      spec.p_implied = BiasParams::from_surd(odds.p);
      // r^(d/2) = r^m * sqrt(r)
      spec.scale_exact = QuadSurd(Rational(sign * k, d.d)) * odds.r.pow(m) *
                         odds.sqrt_r;
      QuadSurd sum(Rational(0));
      for (int j = 0; j <= m; ++j) {
        QuadSurd term = odds.r.pow(-j) * QuadSurd(Rational(1, d.d - 2 * j));
        sum = (j % 2 == 0) ? sum + term : sum - term;
      }
      spec.offset_exact = QuadSurd(Rational(1)) - QuadSurd(Rational(d.d)) * sum;
      spec.scale_big = spec.scale_exact.to_float<BigFloat>();
      spec.offset_big = spec.offset_exact.to_float<BigFloat>();
      spec.affine_c0 = (-(spec.scale_exact * spec.offset_exact))
                           .to_float<Float100>()
                           .convert_to<double>();
    } else {
      spec.p_implied = BiasParams::from_bigfloat(odds.p_big);
      const BigFloat r = odds.r_big;
      spec.scale_big = BigFloat(sign * k) / d.d * pow(r, m) * sqrt(r);
      BigFloat sum(0);
      for (int j = 0; j <= m; ++j) {
        const BigFloat term = pow(r, -j) / (d.d - 2 * j);
        sum = (j % 2 == 0) ? sum + term : sum - term;
      }
      spec.offset_big = 1 - d.d * sum;
      spec.affine_c0 =
          BigFloat(-spec.scale_big * spec.offset_big).convert_to<double>();
    }
  } else {
    if (d.parity() != Parity::even)
      throw std::invalid_argument("ln2 estimator requires even d");
    spec.p_implied = BiasParams::from_fraction(1, 2);
    spec.target = std::numbers::ln2;
    spec.exact_coeffs = true;
    const int m = d.d / 2;
    const int sign = (m % 2 == 0) ? -1 : 1;  // (-1)^(m+1)
    spec.scale_exact = QuadSurd(Rational(sign, m));
    Rational sum(0);
    BigInt two_k(1);
    for (int j = 1; j <= m; ++j) {
      two_k *= 2;
      const Rational term = Rational(binomial(m, j) * (two_k - 1), j);
      sum = ((m + j) % 2 == 0) ? sum + term : sum - term;
    }
    spec.offset_exact = QuadSurd(Rational(1) - Rational(m) * sum);
    spec.scale_big = spec.scale_exact.to_float<BigFloat>();
    spec.offset_big = spec.offset_exact.to_float<BigFloat>();
    spec.affine_c0 = (-(spec.scale_exact * spec.offset_exact))
                         .to_float<Float100>()
                         .convert_to<double>();
  }
  spec.scale = spec.scale_big.convert_to<double>();
  spec.offset = spec.offset_big.convert_to<double>();
  return spec;
}

// scale * (win_rate - offset) as a double affine map; the exact-coefficient
// reduction keeps the representation error within a few ulp.
inline double evaluate_estimator(const EstimatorSpec& spec,
                                 const FirstPassageSample& sample) {
  return std::fma(spec.scale, win_rate(sample), spec.affine_c0);
}

// scale * (E[R/N] - offset): telescopes to k*arctan(sqrt(r_k)) = pi (or to
// ln 2), whatever route computes the expectation.
inline double expected_value_identity(const EstimatorSpec& spec,
                                      Method method = Method::recursion) {
  const double mean =
      expect_win_rate(spec.p_implied, Threshold(spec.d), method);
  const BigFloat value = spec.scale_big * (BigFloat(mean) - spec.offset_big);
  return value.convert_to<double>();
}

// Variance of the estimator at threshold d, from the exact engine.
inline double estimator_variance(EstimatorKind kind, int k, Threshold d) {
  const EstimatorSpec spec = estimator_coefficients(kind, k, d);
  return spec.scale * spec.scale * var_win_rate(spec.p_implied, d);
}

// Budget-normalized variance d * Var[estimator]: variance at equal expected
// coin-flip cost across thresholds.
inline double budget_normalized_variance(EstimatorKind kind, int k,
                                         Threshold d) {
  return d.d * estimator_variance(kind, k, d);
}

struct PlanResult {
  int d_chosen = 1;
  double chebyshev_bound = 0;  // Var[estimator]/eps^2 at d_chosen
  double eps = 0;
  double delta = 0;
  double expected_cost = 0;  // E[N_d] = d/(2 p_k - 1); infinite at p = 1/2
};

// Minimal parity-valid d with Var[estimator]/eps^2 <= delta (Chebyshev).
// The scan compares in log space so that far-underflowing variances still
// order correctly; it gives up past d = 10^4.
inline PlanResult choose_threshold(EstimatorKind kind, int k, double eps,
                                   double delta) {
  if (!(eps > 0) || !(delta > 0) || !(delta < 1))
    throw std::invalid_argument("choose_threshold: need eps > 0, delta in (0,1)");
  PlanResult plan;
  plan.eps = eps;
  plan.delta = delta;
  const int d0 = kind == EstimatorKind::pi ? 1 : 2;
  for (int d = d0; d <= 10000; d += 2) {
    const EstimatorSpec spec =
        estimator_coefficients(kind, k, Threshold(d));
    const double var = var_win_rate(spec.p_implied, Threshold(d));
    const double log_bound =
        2 * BigFloat(log(abs(spec.scale_big))).convert_to<double>() +
        std::log(var) - 2 * std::log(eps);
    if (log_bound <= std::log(delta)) {
      plan.d_chosen = d;
      plan.chebyshev_bound = std::exp(log_bound);
      plan.expected_cost =
          expected_hitting_time(spec.p_implied, Threshold(d));
      return plan;
    }
  }
  throw std::runtime_error("choose_threshold: no d <= 10^4 satisfies the bound");
}

inline const char* kind_name(EstimatorKind kind) {
  return kind == EstimatorKind::pi ? "pi" : "ln2";
}

}  // namespace fplab
