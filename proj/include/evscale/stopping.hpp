#pragma once

// Optional-stopping engine: Monte Carlo for the first time a fair-coin walk
// exits the +/- c-sigma boundary after m initial tosses, plus the analytic
// Brownian-motion moments E(T^mu) via Kummer's function, their finiteness
// thresholds, and the expected LR at stopping.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "evscale/errors.hpp"
#include "evscale/rng.hpp"
#include "evscale/special.hpp"

namespace evscale {

struct StoppingConfig {
  std::int64_t m = 1;          // initial toss count
  double c = 1.0;              // boundary in null standard deviations
  std::int64_t trials = 1;
  std::int64_t max_tosses = 1; // truncation cap per trial
  std::uint64_t seed = 0;

  void validate() const {
    if (m < 1) throw domain_error("StoppingConfig: m must be positive");
    if (!(c > 0.0) || c > 1000.0)
      throw domain_error("StoppingConfig: c must lie in (0, 1000]");
    if (trials < 1) throw domain_error("StoppingConfig: trials must be >= 1");
    if (max_tosses < m)
      throw domain_error("StoppingConfig: max_tosses must be >= m");
    if (max_tosses > (std::int64_t{1} << 40))
      throw domain_error("StoppingConfig: max_tosses above 2^40 unsupported");
  }
};

struct HistogramBucket {
  std::uint64_t lo = 0; // inclusive; bucket j holds N in [m*2^j, m*2^(j+1))
  std::uint64_t hi = 0; // exclusive
  std::uint64_t count = 0;
};

struct StoppingResult {
  StoppingConfig config;
  double mean_inv_sqrt_n = 0.0; // estimate of E(N^{-1/2})
  double mean_inv_sqrt_n_se = 0.0;
  double mean_lr = 0.0; // estimate of E(LR) at stopping, u = c
  double mean_lr_se = 0.0;
  double truncated_fraction = 0.0;
  double truncation_bias_bound = 0.0; // on mean_inv_sqrt_n
  std::uint64_t trials_truncated = 0;
  std::uint64_t min_stopped_n = 0; // 0 when no trial stopped
  std::uint64_t max_stopped_n = 0;
  std::vector<HistogramBucket> stopped_n_histogram;
};

namespace detail {

inline constexpr int kBoundaryScaleBits = 20;

// One trial of the stopping walk. S tracks heads minus tails; the boundary
// |S| >= c sqrt(n) is decided as S^2 * 2^(2*scale) >= c_scaled^2 * n in
// 128-bit integers, with c snapped to the 2^-20 grid, so stopping decisions
// are exact and platform independent. Between checks the walk is advanced in
// blind popcount batches across windows certified (again in exact integers)
// to contain no possible boundary crossing: (d+j)^2 - c^2(n+j) is convex in
// j, so checking the window end suffices.
struct TrialOutcome {
  std::int64_t n;
  bool truncated;
};

inline TrialOutcome run_trial(const StoppingConfig& cfg, std::uint64_t trial) {
  using u128 = unsigned __int128;
  const std::int64_t cap = cfg.max_tosses;
  const std::int64_t c_scaled =
      std::llround(std::ldexp(cfg.c, kBoundaryScaleBits));
  const u128 c2 = static_cast<u128>(c_scaled) * static_cast<u128>(c_scaled);
  const double c2d = std::ldexp(static_cast<double>(c_scaled), -kBoundaryScaleBits);
  const double c_sq = c2d * c2d;

  auto beyond = [&](std::int64_t dev, std::int64_t n) {
    u128 lhs = static_cast<u128>(dev) * static_cast<u128>(dev);
    return (lhs << (2 * kBoundaryScaleBits)) >= c2 * static_cast<u128>(n);
  };

  CoinStream cs(cfg.seed, trial);
  std::int64_t n = cfg.m;
  std::int64_t s =
      2 * static_cast<std::int64_t>(cs.take_heads(
              static_cast<std::uint64_t>(cfg.m))) -
      cfg.m;

  while (n < cap) {
    const std::int64_t d = std::llabs(s);
    // earliest conceivable crossing: smallest j with (d+j)^2 >= c^2 (n+j)
    const double b = 2.0 * static_cast<double>(d) - c_sq;
    const double cc = static_cast<double>(d) * static_cast<double>(d) -
                      c_sq * static_cast<double>(n);
    double root = 0.0;
    if (cc < 0.0) {
      double disc = b * b - 4.0 * cc;
      root = 0.5 * (-b + std::sqrt(disc));
    }
    std::int64_t blind = std::min<std::int64_t>(
        static_cast<std::int64_t>(root) - 8, cap - n);
    while (blind >= 32 && beyond(d + blind, n + blind)) blind >>= 1;

    if (blind >= 32) {
      std::uint64_t h = cs.take_heads(static_cast<std::uint64_t>(blind));
      s += 2 * static_cast<std::int64_t>(h) - blind;
      n += blind;
      continue;
    }

    // near the boundary: advance one toss at a time with exact checks
    std::int64_t steps = std::min<std::int64_t>(64, cap - n);
    for (std::int64_t i = 0; i < steps; ++i) {
      s += cs.next_bit() ? 1 : -1;
      ++n;
      if (beyond(std::llabs(s), n)) return TrialOutcome{n, false};
    }
  }
  return TrialOutcome{cap, true};
}

// Order-independent pairwise reduction over per-trial values.
template <class F>
double pairwise_sum(const std::vector<std::uint64_t>& slots, std::size_t lo,
                    std::size_t hi, const F& f) {
  if (hi - lo <= 8) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += f(slots[i]);
    return acc;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(slots, lo, mid, f) + pairwise_sum(slots, mid, hi, f);
}

inline constexpr std::uint64_t kTruncatedBit = 1ull << 63;

} // namespace detail

// Runs the boundary-stopping Monte Carlo. Trials are distributed over
// `workers` threads (0 = hardware concurrency); every per-trial toss stream
// is a pure function of (seed, trial index) and the reduction is a fixed
// pairwise tree, so the result is bit-identical for any worker count.
inline StoppingResult simulate_stopping(const StoppingConfig& cfg,
                                        int workers = 0) {
  cfg.validate();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::uint64_t> slots(trials);

  unsigned nworkers = workers > 0
                          ? static_cast<unsigned>(workers)
                          : std::max(1u, std::thread::hardware_concurrency());
  nworkers = std::min<unsigned>(nworkers, 256);

  std::atomic<std::size_t> next{0};
  constexpr std::size_t kChunk = 32;
  auto body = [&] {
    for (;;) {
      std::size_t begin = next.fetch_add(kChunk);
      if (begin >= trials) return;
      std::size_t end = std::min(begin + kChunk, trials);
      for (std::size_t i = begin; i < end; ++i) {
        auto out = detail::run_trial(cfg, static_cast<std::uint64_t>(i));
        slots[i] = static_cast<std::uint64_t>(out.n) |
                   (out.truncated ? detail::kTruncatedBit : 0);
      }
    }
  };
  if (nworkers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (unsigned w = 0; w < nworkers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }

  // deterministic aggregation pass
  const double lr_scale =
      std::sqrt(kPi / 2.0) * std::exp(0.5 * cfg.c * cfg.c);
  auto n_of = [](std::uint64_t slot) {
    return static_cast<double>(slot & ~detail::kTruncatedBit);
  };
  auto f_inv_sqrt = [&](std::uint64_t slot) {
    return 1.0 / std::sqrt(n_of(slot));
  };
  auto f_lr = [&](std::uint64_t slot) { return lr_scale / std::sqrt(n_of(slot)); };

  const double td = static_cast<double>(trials);
  const double mean_inv =
      detail::pairwise_sum(slots, 0, trials, f_inv_sqrt) / td;
  const double mean_lr = detail::pairwise_sum(slots, 0, trials, f_lr) / td;
  auto se = [&](auto&& f, double mean) {
    if (trials < 2) return 0.0;
    double ss = detail::pairwise_sum(slots, 0, trials, [&](std::uint64_t s) {
      double d = f(s) - mean;
      return d * d;
    });
    return std::sqrt(ss / (td - 1.0)) / std::sqrt(td);
  };

  StoppingResult res;
  res.config = cfg;
  res.mean_inv_sqrt_n = mean_inv;
  res.mean_inv_sqrt_n_se = se(f_inv_sqrt, mean_inv);
  res.mean_lr = mean_lr;
  res.mean_lr_se = se(f_lr, mean_lr);

  std::uint64_t truncated = 0;
  std::uint64_t min_n = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max_n = 0;
  std::vector<std::uint64_t> bucket_counts(64, 0);
  for (std::uint64_t slot : slots) {
    if (slot & detail::kTruncatedBit) {
      ++truncated;
      continue;
    }
    min_n = std::min(min_n, slot);
    max_n = std::max(max_n, slot);
    std::uint64_t q = slot / static_cast<std::uint64_t>(cfg.m);
    unsigned j = static_cast<unsigned>(std::bit_width(q)) - 1;
    ++bucket_counts[j];
  }
  res.trials_truncated = truncated;
  res.truncated_fraction = static_cast<double>(truncated) / td;
  res.truncation_bias_bound =
      res.truncated_fraction / std::sqrt(static_cast<double>(cfg.max_tosses));
  res.min_stopped_n = (min_n == std::numeric_limits<std::uint64_t>::max())
                          ? 0
                          : min_n;
  res.max_stopped_n = max_n;
  for (unsigned j = 0; j < bucket_counts.size(); ++j) {
    if (bucket_counts[j] == 0) continue;
    std::uint64_t lo = static_cast<std::uint64_t>(cfg.m) << j;
    std::uint64_t hi = static_cast<std::uint64_t>(cfg.m) << (j + 1);
    res.stopped_n_histogram.push_back(HistogramBucket{lo, hi, bucket_counts[j]});
  }
  return res;
}

// E(T^mu) for the Brownian analogue T = inf{t >= m : |W_t| >= c sqrt(t)}:
//   m^mu (2 Phi(-c) + sqrt(2/pi) * M(1-mu,3/2,c^2/2)/M(-mu,1/2,c^2/2)
//         * c e^{-c^2/2}),
// +infinity once M(-mu,1/2,c^2/2) <= 0 (past its smallest positive root the
// moment diverges).
inline double shepp_moment(std::int64_t m, double mu, double c) {
  if (m < 1) throw domain_error("shepp_moment: m must be positive");
  if (!(c > 0.0)) throw domain_error("shepp_moment: c must be positive");
  const double z = 0.5 * c * c;
  const double denom = kummer_m(-mu, 0.5, z);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  const double numer = kummer_m(1.0 - mu, 1.5, z);
  const double bracket = 2.0 * phi_cdf(-c) +
                         std::sqrt(2.0 / kPi) * (numer / denom) * c *
                             std::exp(-z);
  return std::pow(static_cast<double>(m), mu) * bracket;
}

// Boundary level c* = sqrt(2 z*) below which E(T^mu) is finite; z* is the
// smallest positive root of z -> M(-mu, 1/2, z), located by a bracket scan
// plus bisection.
inline double finiteness_threshold(double mu) {
  if (!(mu > 0.0))
    throw domain_error("finiteness_threshold: mu must be positive");
  auto f = [mu](double z) { return kummer_m(-mu, 0.5, z); };
  constexpr double kStep = 0.01;
  double prev = f(0.0); // = 1
  for (double z = kStep; z <= 50.0 + 1e-9; z += kStep) {
    double cur = f(z);
    if (cur == 0.0) return std::sqrt(2.0 * z);
    if ((cur > 0.0) != (prev > 0.0)) {
      double root = find_root(f, z - kStep, z);
      return std::sqrt(2.0 * root);
    }
    prev = cur;
  }
  throw numeric_error("finiteness_threshold: no root of M(-mu,1/2,z) in (0,50]");
}

// The paper-simplified expectation (1/sqrt(m)) (1+c^2)/c of the LR when the
// c-sigma boundary is first attained.
inline double expected_lr_at_stopping(std::int64_t m, double c) {
  if (m < 1) throw domain_error("expected_lr_at_stopping: m must be positive");
  if (!(c > 0.0))
    throw domain_error("expected_lr_at_stopping: c must be positive");
  return (1.0 + c * c) / (c * std::sqrt(static_cast<double>(m)));
}

// The un-simplified composition sqrt(pi/2) e^{c^2/2} E(T^{-1/2}); differs
// from the simplified formula exactly by the Mills-ratio error in
// approximating 2 Phi(-c).
inline double expected_lr_at_stopping_analytic(std::int64_t m, double c) {
  return std::sqrt(kPi / 2.0) * std::exp(0.5 * c * c) *
         shepp_moment(m, -0.5, c);
}

} // namespace evscale
