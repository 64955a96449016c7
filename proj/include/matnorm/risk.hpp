#pragma once

// Frobenius risk: Stein's unbiased risk estimate for equivariant estimators,
// the minimax parameter regions, and the seeded Monte Carlo harness.

#include "matnorm/errors.hpp"
#include "matnorm/estimators.hpp"
#include "matnorm/linalg.hpp"
#include "matnorm/parallel.hpp"
#include "matnorm/rng.hpp"
#include "matnorm/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace matnorm {

/// phi_i(s) and the own partials d phi_i / d s_i for sigma_hat_i = (1 - phi_i(s)) s_i.
struct PhiProfile {
  Vector phi;
  Vector dphi_ds;
};

namespace detail {

// Every supported family has s_i^2 phi_i = coef * s_i^power + const, which
// lets the pairwise SURE term be evaluated as coef * a divided difference
// without cancellation.
struct PhiForm {
  PhiProfile profile;
  double coef = 0.0;
  double power = 2.0;
};

inline double sure_tuned_alpha_partial(const Vector& s, double p, int n, int m, int k) {
  const double c = n - m + p - 1.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < m; ++i) {
    num += c * std::pow(s(i), p - 2.0);
    den += std::pow(s(i), 2.0 * p - 2.0);
    for (int j = i + 1; j < m; ++j) num += 2.0 * power_divided_difference(s(i), s(j), p);
  }
  double dnum = c * (p - 2.0) * std::pow(s(k), p - 3.0);
  for (int j = 0; j < m; ++j)
    if (j != k) dnum += 2.0 * power_divided_difference_da(s(k), s(j), p);
  const double dden = (2.0 * p - 2.0) * std::pow(s(k), 2.0 * p - 3.0);
  return (dnum * den - num * dden) / (den * den);
}

inline PhiForm phi_form(const EstimatorSpec& spec, const Vector& s, int n, int m) {
  validate_singular_values(s, n, m, "phi_profile");
  if (spec.positive_part)
    throw Unsupported("positive-part not supported by SURE: the shrinkage map is not smooth");
  if (s(m - 1) <= 0.0) throw DegenerateInput("phi_profile: all singular values must be positive");

  PhiForm out;
  out.profile.phi.resize(m);
  out.profile.dphi_ds.resize(m);
  Vector& phi = out.profile.phi;
  Vector& dphi = out.profile.dphi_ds;
  const double nm = static_cast<double>(n) * m;

  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, JamesStein>) {
          const double total = s.squaredNorm();
          const double c = nm - 2.0;
          phi.setConstant(c / total);
          dphi = (-2.0 * c / (total * total)) * s;
          out.coef = c / total;
          out.power = 2.0;
        } else if constexpr (std::is_same_v<F, EfronMorris> || std::is_same_v<F, ModifiedEfronMorris>) {
          const double c = n - m - 1.0;
          if (!(c > 0.0)) throw InvalidInput("efron-morris: requires n - m - 1 > 0");
          const double d = std::is_same_v<F, ModifiedEfronMorris> ? (m - 1.0) * (m + 2.0) : 0.0;
          const double total = s.squaredNorm();
          for (int i = 0; i < m; ++i) {
            phi(i) = c / (s(i) * s(i)) + d / total;
            dphi(i) = -2.0 * c / (s(i) * s(i) * s(i)) - 2.0 * d * s(i) / (total * total);
          }
          out.coef = d / total;
          out.power = 2.0;
        } else if constexpr (std::is_same_v<F, MatrixNorm>) {
          const double alpha = resolved_alpha(f, n, m);
          const double p = f.p;
          double total = 0.0;
          for (int i = 0; i < m; ++i) total += std::pow(s(i), p);
          for (int i = 0; i < m; ++i) {
            phi(i) = alpha * std::pow(s(i), p - 2.0) / total;
            dphi(i) = alpha *
                      ((p - 2.0) * std::pow(s(i), p - 3.0) * total - p * std::pow(s(i), 2.0 * p - 3.0)) /
                      (total * total);
          }
          out.coef = alpha / total;
          out.power = p;
        } else {
          const double p = f.p;
          const double alpha = sure_optimal_alpha(s, p, n, m);
          for (int i = 0; i < m; ++i) {
            phi(i) = alpha * std::pow(s(i), p - 2.0);
            dphi(i) = sure_tuned_alpha_partial(s, p, n, m, i) * std::pow(s(i), p - 2.0) +
                      alpha * (p - 2.0) * std::pow(s(i), p - 3.0);
          }
          out.coef = alpha;
          out.power = p;
        }
      },
      spec.family);
  return out;
}

}  // namespace detail

inline PhiProfile phi_profile(const EstimatorSpec& spec, const Vector& s, int n, int m) {
  return detail::phi_form(spec, s, n, m).profile;
}

/// Unbiased estimate of E||M_hat - M||_F^2:
///   nm + sum_i { s_i^2 phi_i^2 - 2(n-m+1) phi_i - 2 s_i dphi_i/ds_i }
///      - 4 sum_{i<j} (s_i^2 phi_i - s_j^2 phi_j) / (s_i^2 - s_j^2).
inline double sure(const EstimatorSpec& spec, const Vector& s, int n, int m) {
  const auto form = detail::phi_form(spec, s, n, m);
  const Vector& phi = form.profile.phi;
  const Vector& dphi = form.profile.dphi_ds;
  double value = static_cast<double>(n) * m;
  for (int i = 0; i < m; ++i)
    value += s(i) * s(i) * phi(i) * phi(i) - 2.0 * (n - m + 1.0) * phi(i) - 2.0 * s(i) * dphi(i);
  if (form.coef != 0.0) {
    double cross = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) cross += power_divided_difference(s(i), s(j), form.power);
    value -= 4.0 * form.coef * cross;
  }
  return value;
}

/// Largest alpha for which the matrix-norm estimator with exponent p is minimax.
inline double minimax_alpha_upper_bound(double p, int n, int m) {
  if (!(p > 0.0 && p <= 2.0)) throw InvalidInput("minimax_alpha_upper_bound: p must lie in (0, 2]");
  validate_dimensions(n, m, "minimax_alpha_upper_bound");
  const double nm = static_cast<double>(n) * m;
  const double mm = m * (m + 1.0);
  if (p >= 1.0) return 2.0 * nm - (2.0 - p) * mm - 2.0 * p;
  return 2.0 * nm - 2.0 * mm + 2.0 * (m - 1.0) * p;
}

/// Sufficient condition n - m >= 5 - 3p for the SURE-tuned estimator to be minimax.
inline bool sure_minimax_condition(double p, int n, int m) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("sure_minimax_condition: p must lie in (0, 1]");
  validate_dimensions(n, m, "sure_minimax_condition");
  return static_cast<double>(n - m) >= 5.0 - 3.0 * p;
}

struct RiskReport {
  double mean = 0.0;
  double stderr = 0.0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
};

inline RiskReport make_report(std::span<const double> samples, std::uint64_t seed) {
  const auto summary = summarize(samples);
  return {summary.mean, summary.stderr, samples.size(), seed};
}

/// X_k = M + Z_k with Z_k drawn from stream (seed, k).
inline Matrix noisy_observation(const Matrix& mean, std::uint64_t seed, std::uint64_t k) {
  Stream rng(seed, k, lanes::kRisk);
  Matrix z(mean.rows(), mean.cols());
  rng.fill_normal(z);
  return mean + z;
}

namespace detail {

inline void validate_mean(const Matrix& mean, std::uint64_t replicates, const char* who) {
  require_tall(mean, who);
  require_finite(mean, who);
  if (replicates < 2) throw InvalidInput(std::string(who) + ": need at least 2 replicates");
}

// losses[s][k] = ||apply(specs[s], X_k) - M||_F^2; one SVD per replicate.
inline std::vector<std::vector<double>> replicate_losses(const std::vector<EstimatorSpec>& specs,
                                                         const Matrix& mean, std::uint64_t replicates,
                                                         std::uint64_t seed, unsigned threads) {
  std::vector<std::vector<double>> losses(specs.size(), std::vector<double>(replicates));
  parallel_for(replicates, threads, [&](std::size_t k) {
    const SvdFactors f = svd(noisy_observation(mean, seed, k));
    for (std::size_t i = 0; i < specs.size(); ++i)
      losses[i][k] = frobenius_distance_sq(apply_estimator(specs[i], f), mean);
  });
  return losses;
}

}  // namespace detail

/// Per-replicate losses ||M_hat(X_k) - M||_F^2, indexed [spec][k]. All specs
/// see the same draws.
inline std::vector<std::vector<double>> mc_frobenius_losses(const std::vector<EstimatorSpec>& specs,
                                                            const Matrix& mean, std::uint64_t replicates,
                                                            std::uint64_t seed, unsigned threads = 0) {
  detail::validate_mean(mean, replicates, "mc_frobenius_losses");
  return detail::replicate_losses(specs, mean, replicates, seed, threads);
}

/// Monte Carlo Frobenius risk of `spec` at mean matrix M.
inline RiskReport mc_frobenius_risk(const EstimatorSpec& spec, const Matrix& mean, std::uint64_t replicates,
                                    std::uint64_t seed, unsigned threads = 0) {
  return make_report(mc_frobenius_losses({spec}, mean, replicates, seed, threads).front(), seed);
}

/// Unbiased risk estimates on the draws mc_frobenius_losses uses for (M, seed).
inline std::vector<double> mc_sure_values(const EstimatorSpec& spec, const Matrix& mean, std::uint64_t replicates,
                                          std::uint64_t seed, unsigned threads = 0) {
  detail::validate_mean(mean, replicates, "mc_sure_values");
  const int n = static_cast<int>(mean.rows());
  const int m = static_cast<int>(mean.cols());
  std::vector<double> values(replicates);
  parallel_for(replicates, threads, [&](std::size_t k) {
    values[k] = sure(spec, singular_values(noisy_observation(mean, seed, k)), n, m);
  });
  return values;
}

inline RiskReport mc_sure_mean(const EstimatorSpec& spec, const Matrix& mean, std::uint64_t replicates,
                               std::uint64_t seed, unsigned threads = 0) {
  return make_report(mc_sure_values(spec, mean, replicates, seed, threads), seed);
}

/// Mean and standard error of a_k - b_k for two series computed on common draws.
inline RiskReport paired_difference(std::span<const double> a, std::span<const double> b, std::uint64_t seed) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidInput("paired_difference: need two equal series of length >= 2");
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = a[k] - b[k];
  return make_report(d, seed);
}

/// Maps a grid value to the singular-value profile of the mean matrix.
struct SingularValueScenario {
  std::string name;
  int n = 0;
  int m = 0;
  std::function<Vector(double)> profile;
  std::string grid_parameter = "sigma1";
};

inline Matrix scenario_mean(const SingularValueScenario& scenario, double grid_value) {
  const Vector sigma = scenario.profile(grid_value);
  if (sigma.size() != scenario.m) throw InvalidInput("scenario profile has the wrong length");
  return diag_embed(sigma, scenario.n, scenario.m);
}

struct RiskRow {
  std::string scenario;
  std::string estimator;
  double grid_value = 0.0;
  RiskReport report;
};

/// One RiskReport per (grid point, spec), grid-major. Every grid point reuses
/// `seed`, so curves share their noise draws.
inline std::vector<RiskRow> risk_sweep(const std::vector<EstimatorSpec>& specs,
                                       const SingularValueScenario& scenario, const std::vector<double>& grid,
                                       std::uint64_t replicates, std::uint64_t seed, unsigned threads = 0) {
  std::vector<RiskRow> rows;
  for (double g : grid) {
    const Matrix mean = scenario_mean(scenario, g);
    detail::validate_mean(mean, replicates, "risk_sweep");
    const auto losses = detail::replicate_losses(specs, mean, replicates, seed, threads);
    for (std::size_t i = 0; i < specs.size(); ++i)
      rows.push_back({scenario.name, to_string(specs[i]), g, make_report(losses[i], seed)});
  }
  return rows;
}

}  // namespace matnorm
