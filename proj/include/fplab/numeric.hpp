#pragma once

// Exact and extended-precision scalar types used by the closed-form and
// estimator-coefficient paths: arbitrary-precision rationals, decimal big
// floats, and quadratic surds a + b*sqrt(s) over the rationals.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace fplab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Float50 = boost::multiprecision::cpp_bin_float_50;
using Float100 = boost::multiprecision::cpp_bin_float_100;
using Float200 =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

// Default extended-precision float (>= 40 decimal digits).
using BigFloat = Float50;

// Exact dyadic rational equal to the given double.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::domain_error("exact_rational: non-finite");
  if (x == 0.0) return Rational(0);
  int e = 0;
  const double m = std::frexp(x, &e);  // x = m * 2^e, |m| in [1/2, 1)
  const auto mant = static_cast<long long>(std::ldexp(m, 53));
  Rational out(mant);
  const int shift = e - 53;
  if (shift >= 0) {
    out *= Rational(BigInt(1) << shift);
  } else {
    out /= Rational(BigInt(1) << (-shift));
  }
  return out;
}

inline Rational rational_pow(const Rational& base, long n) {
  using boost::multiprecision::pow;
  if (n == 0) return Rational(1);
  if (base == 0 && n < 0) throw std::domain_error("rational_pow: 0^negative");
  const auto e = static_cast<unsigned>(n < 0 ? -n : n);
  BigInt num = pow(numerator(base), e);
  BigInt den = pow(denominator(base), e);
  return n < 0 ? Rational(den, num) : Rational(num, den);
}

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return BigInt(0);
  if (k > n - k) k = n - k;
  BigInt c(1);
  for (unsigned i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;  // exact at every step
  }
  return c;
}

template <class F>
F to_float(const Rational& r) {
  return F(numerator(r)) / F(denominator(r));
}

inline double to_double(const Rational& r) {
  return to_float<Float100>(r).template convert_to<double>();
}

// Element of Q(sqrt(s)): a + b*sqrt(s) with rational a, b and a small
// non-square integer s. s is normalized away whenever b vanishes or s is a
// perfect square, so pure rationals always compare equal regardless of how
// they were produced. Mixed-base arithmetic is a logic error.
class QuadSurd {
 public:
  QuadSurd() : a_(0), b_(0), s_(0) {}
  QuadSurd(Rational rational)  // NOLINT: implicit by design
      : a_(std::move(rational)), b_(0), s_(0) {}
  QuadSurd(long long rational) : a_(rational), b_(0), s_(0) {}
  QuadSurd(Rational a, Rational b, unsigned s)
      : a_(std::move(a)), b_(std::move(b)), s_(s) {
    normalize();
  }

  static QuadSurd sqrt_of(unsigned s) { return QuadSurd(0, 1, s); }

  const Rational& rational_part() const { return a_; }
  const Rational& surd_coeff() const { return b_; }
  unsigned surd_base() const { return s_; }
  bool is_rational() const { return b_ == 0; }

  friend QuadSurd operator+(const QuadSurd& x, const QuadSurd& y) {
    const unsigned s = merged_base(x, y);
    return QuadSurd(x.a_ + y.a_, x.b_ + y.b_, s);
  }
  friend QuadSurd operator-(const QuadSurd& x, const QuadSurd& y) {
    const unsigned s = merged_base(x, y);
    return QuadSurd(x.a_ - y.a_, x.b_ - y.b_, s);
  }
  QuadSurd operator-() const { return QuadSurd(-a_, -b_, s_); }
  friend QuadSurd operator*(const QuadSurd& x, const QuadSurd& y) {
    const unsigned s = merged_base(x, y);
    return QuadSurd(x.a_ * y.a_ + x.b_ * y.b_ * s, x.a_ * y.b_ + x.b_ * y.a_,
                    s);
  }
  QuadSurd inverse() const {
    if (is_rational()) {
      if (a_ == 0) throw std::domain_error("QuadSurd: division by zero");
      return QuadSurd(Rational(1) / a_);
    }
    const Rational norm = a_ * a_ - b_ * b_ * s_;  // nonzero: s non-square
    return QuadSurd(a_ / norm, -b_ / norm, s_);
  }
  friend QuadSurd operator/(const QuadSurd& x, const QuadSurd& y) {
    return x * y.inverse();
  }
  QuadSurd pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    QuadSurd acc(Rational(1));
    QuadSurd base = *this;
    auto e = static_cast<unsigned long>(n);
    while (e != 0) {
      if (e & 1u) acc = acc * base;
      base = base * base;
      e >>= 1u;
    }
    return acc;
  }

  friend bool operator==(const QuadSurd& x, const QuadSurd& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.s_ == y.s_;
  }

  template <class F>
  F to_float() const {
    F out = fplab::to_float<F>(a_);
    if (b_ != 0) out += fplab::to_float<F>(b_) * sqrt(F(s_));
    return out;
  }
  double to_double() const {
    return to_float<Float100>().template convert_to<double>();
  }

  std::string str() const {
    if (is_rational()) return a_.str();
    return a_.str() + " + " + b_.str() + "*sqrt(" + std::to_string(s_) + ")";
  }

 private:
  void normalize() {
    if (b_ == 0) {
      s_ = 0;
      return;
    }
    const auto root = static_cast<unsigned>(std::lround(std::sqrt(double(s_))));
    if (root * root == s_) {  // covers s = 0 and s = 1
      a_ += b_ * root;
      b_ = 0;
      s_ = 0;
    }
  }

  static unsigned merged_base(const QuadSurd& x, const QuadSurd& y) {
    if (x.s_ == 0) return y.s_;
    if (y.s_ == 0 || x.s_ == y.s_) return x.s_;
    throw std::logic_error("QuadSurd: mixed surd bases");
  }

  Rational a_, b_;
  unsigned s_;
};

}  // namespace fplab
