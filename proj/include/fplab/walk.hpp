#pragma once

// Walk model: biased +/-1 random walk, one-sided hitting times, and
// reproducible first-passage sampling.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fplab/numeric.hpp"
#include "fplab/rng.hpp"

namespace fplab {

enum class Parity { odd, even };

// Positive integer level d of the one-sided hitting time N_d.
struct Threshold {
  int d;

  explicit Threshold(int level) : d(level) {
    if (d < 1) throw std::invalid_argument("Threshold: d must be >= 1");
  }
  Parity parity() const { return d % 2 != 0 ? Parity::odd : Parity::even; }
};

// The coin. Doubles are all derived from the rounded p so that
// q = 1 - p, r = q/p and drift = 2p - 1 hold exactly in double arithmetic;
// p_exact carries the true value for the exact evaluation paths.
// The Bernoulli draw compares one uniform 64-bit word against
// floor(p * 2^64), so sampling uses the stated p exactly whenever
// p * 2^64 is integral (in particular for p = 3/4 and every p_k surd
// rounded at 2^-64).
struct BiasParams {
  double p = 0.5;
  double q = 0.5;
  double r = 1.0;
  double drift = 0.0;
  bool always_up = false;
  std::uint64_t up_threshold = 0;
  std::optional<QuadSurd> p_exact;

  static BiasParams from_double(double p) {
    BiasParams bp = base_from(p);
    bp.up_threshold = threshold_from_double(p);
    bp.p_exact = QuadSurd(exact_rational(p));
    return bp;
  }

  static BiasParams from_fraction(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num <= 0 || num > den || num < den - num)
      throw std::invalid_argument("BiasParams: fraction must be in [1/2, 1]");
    BiasParams bp = base_from(static_cast<double>(num) / den);
    bp.up_threshold = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(num) << 64) / den);
    bp.p_exact = QuadSurd(Rational(num, den));
    return bp;
  }

  static BiasParams from_surd(const QuadSurd& p) {
    BiasParams bp = base_from(p.to_double());
    bp.up_threshold = threshold_from_big(p.to_float<Float100>());
    bp.p_exact = p;
    return bp;
  }

  // Irrational p with no surd form; exactness is limited to the 2^-64
  // rounding of the sampling threshold.
  static BiasParams from_bigfloat(const BigFloat& p) {
    BiasParams bp = base_from(p.convert_to<double>());
    bp.up_threshold = threshold_from_big(Float100(p));
    return bp;
  }

 private:
  static BiasParams base_from(double p) {
    if (!(p >= 0.5 && p <= 1.0))
      throw std::invalid_argument("BiasParams: p must be in [1/2, 1]");
    BiasParams bp;
    bp.p = p;
    bp.q = 1.0 - p;
    bp.r = bp.q / bp.p;
    bp.drift = 2.0 * p - 1.0;
    bp.always_up = p == 1.0;
    return bp;
  }

  static std::uint64_t threshold_from_double(double p) {
    if (p == 1.0) return 0;  // unused: always_up
    return static_cast<std::uint64_t>(p * 0x1.0p64);
  }

  template <class F>
  static std::uint64_t threshold_from_big(const F& p) {
    if (p >= 1) return 0;
    const F scaled = floor(p * pow(F(2), 64));
    return scaled.template convert_to<BigInt>().template convert_to<
        std::uint64_t>();
  }
};

// One simulated run stopped at S_n = d (or at the step cap).
// For uncapped samples: n_steps >= d, n_steps == d (mod 2) and
// right_steps = (n_steps + d) / 2, from S_N = 2R - N = d.
struct FirstPassageSample {
  std::uint64_t n_steps = 0;
  std::uint64_t right_steps = 0;
  std::uint64_t stream_id = 0;
  bool capped = false;

  // Current level S_n; equals d for uncapped samples.
  std::int64_t level() const {
    return 2 * static_cast<std::int64_t>(right_steps) -
           static_cast<std::int64_t>(n_steps);
  }

  bool operator==(const FirstPassageSample&) const = default;
};

inline FirstPassageSample sample_first_passage(
    const BiasParams& bp, Threshold d, SplitMix64& stream,
    std::optional<std::uint64_t> step_cap = std::nullopt,
    std::uint64_t stream_id = 0) {
  const auto target = static_cast<std::int64_t>(d.d);
  std::int64_t pos = 0;
  std::uint64_t n = 0;
  std::uint64_t right = 0;
  const std::uint64_t cap =
      step_cap.value_or(std::numeric_limits<std::uint64_t>::max());
  const bool always_up = bp.always_up;
  const std::uint64_t threshold = bp.up_threshold;
  while (pos != target) {
    if (n >= cap) return {n, right, stream_id, true};
    ++n;
    if (always_up || stream.next() < threshold) {
      ++right;
      ++pos;
    } else {
      --pos;
    }
  }
  return {n, right, stream_id, false};
}

// Exactly `count` samples; sample i is drawn from substream(master_seed, i),
// so the output is bit-identical for a fixed master_seed regardless of the
// worker count.
inline std::vector<FirstPassageSample> sample_batch(
    const BiasParams& bp, Threshold d, std::uint64_t count,
    std::uint64_t master_seed, unsigned workers = 1,
    std::optional<std::uint64_t> step_cap = std::nullopt) {
  if (count < 1) throw std::invalid_argument("sample_batch: count must be >= 1");
  std::vector<FirstPassageSample> out(count);
  auto run = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      SplitMix64 g = substream(master_seed, i);
      out[i] = sample_first_passage(bp, d, g, step_cap, i);
    }
  };
  if (workers <= 1 || count < 2 * workers) {
    run(0, count);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::uint64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = std::min<std::uint64_t>(w * chunk, count);
    const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, count);
    if (lo < hi) pool.emplace_back(run, lo, hi);
  }
  for (auto& t : pool) t.join();
  return out;
}

// R_N / N = 1/2 + d/(2N); in (1/2, 1] for any valid sample.
inline double win_rate(const FirstPassageSample& s) {
  if (s.capped || s.n_steps == 0)
    throw std::invalid_argument("win_rate: sample is capped or empty");
  return static_cast<double>(s.right_steps) / static_cast<double>(s.n_steps);
}

}  // namespace fplab
