#pragma once

// Runtime-checkable forms of the five auxiliary inequalities behind the
// minimax and superharmonicity bounds, plus a seeded fuzz harness.

#include "matnorm/errors.hpp"
#include "matnorm/linalg.hpp"
#include "matnorm/parallel.hpp"
#include "matnorm/rng.hpp"
#include "matnorm/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace matnorm {

inline constexpr double kLemmaTolerance = 1e-12;

struct LemmaCheckResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double margin = 0.0;  // >= 0 when the inequality holds exactly
  double scale = 1.0;   // max(|lhs|, |rhs|, 1)
};

namespace detail {

inline LemmaCheckResult lemma_result(double lhs, double rhs, double margin) {
  LemmaCheckResult r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = margin;
  r.scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  r.holds = margin >= -kLemmaTolerance * r.scale;
  return r;
}

inline void require_distinct_descending(const Vector& sigma, const char* who) {
  if (sigma.size() < 1) throw InvalidInput(std::string(who) + ": empty sequence");
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (!(sigma(i) > 0.0) || !std::isfinite(sigma(i)))
      throw InvalidInput(std::string(who) + ": values must be positive and finite");
    if (i > 0 && !(sigma(i) < sigma(i - 1)))
      throw InvalidInput(std::string(who) + ": values must be distinct and descending");
  }
}

inline double pair_sum(const Vector& sigma, double q) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    for (Eigen::Index j = i + 1; j < sigma.size(); ++j) acc += power_divided_difference(sigma(i), sigma(j), q);
  return acc;
}

inline double power_sum(const Vector& sigma, double q) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) acc += std::pow(sigma(i), q);
  return acc;
}

}  // namespace detail

/// r(x) = (x^p - 1)/(x^2 - 1) is non-increasing on (0,1) and on (1,inf),
/// with r > p/2 below 1 and r < p/2 above 1. lhs = r(x1), rhs = r(x2).
inline LemmaCheckResult check_ratio_monotone(double p, double x1, double x2) {
  if (!(p > 0.0 && p <= 2.0)) throw InvalidInput("check_ratio_monotone: p must lie in (0, 2]");
  if (!(x1 > 0.0) || !(x1 < x2) || !std::isfinite(x2))
    throw InvalidInput("check_ratio_monotone: need 0 < x1 < x2");
  const bool above = x1 > 1.0;
  if (x1 == 1.0 || x2 == 1.0 || (!above && x2 > 1.0))
    throw InvalidInput("check_ratio_monotone: x1, x2 must lie on the same side of 1");
  const double r1 = power_divided_difference(x1, 1.0, p);
  const double r2 = power_divided_difference(x2, 1.0, p);
  const double half = 0.5 * p;
  double margin = r1 - r2;
  if (above) margin = std::min({margin, half - r1, half - r2});
  else margin = std::min({margin, r1 - half, r2 - half});
  return detail::lemma_result(r1, r2, margin);
}

/// (si^2p - sj^2p)/(si^2 - sj^2) >= (p/2)(si^(2p-2) + sj^(2p-2)) for p in [1,2].
inline LemmaCheckResult check_power_mean_bound(double p, double si, double sj) {
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidInput("check_power_mean_bound: p must lie in [1, 2]");
  if (!(si >= 0.0) || !(sj >= 0.0) || !std::isfinite(si) || !std::isfinite(sj))
    throw InvalidInput("check_power_mean_bound: values must be finite and non-negative");
  if (si == sj) throw InvalidInput("check_power_mean_bound: values must differ");
  const double lhs = power_divided_difference(si, sj, 2.0 * p);
  const double rhs = 0.5 * p * (std::pow(si, 2.0 * p - 2.0) + std::pow(sj, 2.0 * p - 2.0));
  return detail::lemma_result(lhs, rhs, lhs - rhs);
}

/// (sum a)(sum b) >= m sum a_i b_i for a non-increasing and b non-decreasing.
inline LemmaCheckResult check_chebyshev_sum(const Vector& a, const Vector& b) {
  if (a.size() != b.size() || a.size() == 0) throw InvalidInput("check_chebyshev_sum: need equal, non-zero lengths");
  if (!a.allFinite() || !b.allFinite()) throw InvalidInput("check_chebyshev_sum: non-finite entry");
  for (Eigen::Index i = 1; i < a.size(); ++i)
    if (a(i) > a(i - 1) || b(i) < b(i - 1))
      throw InvalidInput("check_chebyshev_sum: a must be non-increasing and b non-decreasing");
  const double lhs = a.sum() * b.sum();
  const double rhs = static_cast<double>(a.size()) * a.dot(b);
  return detail::lemma_result(lhs, rhs, lhs - rhs);
}

/// (sum s^p) sum_{i<j} D(s_i, s_j; p) >= (m/2) sum_{i<j} D(s_i, s_j; 2p),
/// D(a, b; q) = (a^q - b^q)/(a^2 - b^2), for p in (0,2].
inline LemmaCheckResult check_cross_term_bound(double p, const Vector& sigma) {
  if (!(p > 0.0 && p <= 2.0)) throw InvalidInput("check_cross_term_bound: p must lie in (0, 2]");
  detail::require_distinct_descending(sigma, "check_cross_term_bound");
  const double lhs = detail::power_sum(sigma, p) * detail::pair_sum(sigma, p);
  const double rhs = 0.5 * static_cast<double>(sigma.size()) * detail::pair_sum(sigma, 2.0 * p);
  return detail::lemma_result(lhs, rhs, lhs - rhs);
}

/// (sum s^p) sum_{i<j} D(s_i, s_j; p) >= p m (m-1)/4 sum s^(2p-2) for p in [1,2].
inline LemmaCheckResult check_main_bound(double p, const Vector& sigma) {
  if (!(p >= 1.0 && p <= 2.0)) throw InvalidInput("check_main_bound: p must lie in [1, 2]");
  detail::require_distinct_descending(sigma, "check_main_bound");
  const double m = static_cast<double>(sigma.size());
  const double lhs = detail::power_sum(sigma, p) * detail::pair_sum(sigma, p);
  const double rhs = 0.25 * p * m * (m - 1.0) * detail::power_sum(sigma, 2.0 * p - 2.0);
  return detail::lemma_result(lhs, rhs, lhs - rhs);
}

struct LemmaFuzzStats {
  std::string name;
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  double worst_relative_margin = std::numeric_limits<double>::infinity();  // min of margin / scale
};

struct FuzzSummary {
  std::array<LemmaFuzzStats, 5> lemmas;
  bool clean() const {
    return std::all_of(lemmas.begin(), lemmas.end(), [](const auto& l) { return l.failed == 0; });
  }
};

namespace detail {

inline double log_uniform(Stream& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
}

// Descending sequence of m distinct values. With gap > 0 the values form a
// near-tie cluster c(1 - gap)^i instead of independent log-uniform draws.
inline Vector fuzz_sigma(Stream& rng, int m, double gap) {
  Vector s(m);
  if (gap > 0.0) {
    const double c = log_uniform(rng, 1e-3, 1e3);
    for (int i = 0; i < m; ++i) s(i) = c * std::pow(1.0 - gap, i);
    return s;
  }
  for (int i = 0; i < m; ++i) s(i) = log_uniform(rng, 1e-3, 1e3);
  std::sort(s.data(), s.data() + m, std::greater<>());
  for (int i = 1; i < m; ++i)
    if (!(s(i) < s(i - 1))) s(i) = std::nextafter(s(i - 1), 0.0);
  return s;
}

inline LemmaCheckResult fuzz_one(int lemma, Stream& rng, double gap) {
  switch (lemma) {
    case 0: {
      const double p = 2.0 * rng.uniform();
      const bool above = rng.uniform() < 0.5;
      double x1, x2;
      if (gap > 0.0) {
        x1 = above ? 1.0 + gap * (1.0 + rng.uniform()) : 1.0 - gap * (2.0 + rng.uniform());
        x2 = x1 + gap;
      } else {
        x1 = log_uniform(rng, 1.0 + 1e-12, 1e3);
        x2 = log_uniform(rng, 1.0 + 1e-12, 1e3);
        if (!above) {
          x1 = 1.0 / x1;
          x2 = 1.0 / x2;
        }
        if (x1 > x2) std::swap(x1, x2);
        if (x1 == x2) x2 = std::nextafter(x1, above ? 2e3 : 1.0);
      }
      return check_ratio_monotone(p, x1, x2);
    }
    case 1: {
      const double p = 1.0 + rng.uniform();
      const double si = log_uniform(rng, 1e-3, 1e3);
      double sj = rng.uniform() < 0.05 ? 0.0 : log_uniform(rng, 1e-3, 1e3);
      if (gap > 0.0) sj = si * (1.0 - gap);
      if (sj == si) sj = std::nextafter(si, 0.0);
      return check_power_mean_bound(p, si, sj);
    }
    case 2: {
      const int m = 1 + static_cast<int>(rng.uniform() * 8.0);
      Vector a(m), b(m);
      for (int i = 0; i < m; ++i) {
        a(i) = rng.normal() * 10.0;
        b(i) = rng.normal() * 10.0;
      }
      std::sort(a.data(), a.data() + m, std::greater<>());
      std::sort(b.data(), b.data() + m);
      if (gap > 0.0) b = a.reverse() + gap * b;
      return check_chebyshev_sum(a, b);
    }
    case 3: {
      const double p = 2.0 * rng.uniform();
      const int m = 2 + static_cast<int>(rng.uniform() * 7.0);
      return check_cross_term_bound(p, fuzz_sigma(rng, m, gap));
    }
    default: {
      const double p = 1.0 + rng.uniform();
      const int m = 2 + static_cast<int>(rng.uniform() * 7.0);
      return check_main_bound(p, fuzz_sigma(rng, m, gap));
    }
  }
}

inline FuzzSummary run_fuzz(std::uint64_t count, std::uint64_t seed, double gap, unsigned threads) {
  if (count < 1) throw InvalidInput("fuzz: count must be >= 1");
  static constexpr const char* kNames[5] = {"ratio_monotone", "power_mean_bound", "chebyshev_sum",
                                            "cross_term_bound", "main_bound"};
  FuzzSummary summary;
  for (int lemma = 0; lemma < 5; ++lemma) {
    std::vector<LemmaCheckResult> results(count);
    const std::uint64_t lemma_seed = derive_seed(seed, static_cast<std::uint64_t>(lemma));
    parallel_for(count, threads, [&](std::size_t k) {
      Stream rng(lemma_seed, k, lanes::kFuzz);
      results[k] = fuzz_one(lemma, rng, gap);
    });
    auto& stats = summary.lemmas[static_cast<std::size_t>(lemma)];
    stats.name = kNames[lemma];
    for (const auto& r : results) {
      (r.holds ? stats.passed : stats.failed) += 1;
      stats.worst_relative_margin = std::min(stats.worst_relative_margin, r.margin / r.scale);
    }
  }
  return summary;
}

}  // namespace detail

/// `count` seeded random draws per inequality.
inline FuzzSummary fuzz_all(std::uint64_t count, std::uint64_t seed, unsigned threads = 0) {
  return detail::run_fuzz(count, seed, 0.0, threads);
}

/// Same checks on clusters whose neighbouring values differ by a relative 1e-8.
inline FuzzSummary fuzz_near_ties(std::uint64_t count, std::uint64_t seed, unsigned threads = 0) {
  return detail::run_fuzz(count, seed, 1e-8, threads);
}

}  // namespace matnorm
