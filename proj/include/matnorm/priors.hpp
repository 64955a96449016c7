#pragma once

// Schatten-norm shrinkage priors (improper, unnormalized): log-densities,
// the Laplacian in singular-value coordinates, and a numerical
// superharmonicity scanner.

#include "matnorm/errors.hpp"
#include "matnorm/estimators.hpp"
#include "matnorm/format.hpp"
#include "matnorm/linalg.hpp"
#include "matnorm/parallel.hpp"
#include "matnorm/rng.hpp"
#include "matnorm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace matnorm {

struct UniformPrior {};
struct SteinPrior {};
struct SvsPrior {};

/// pi(M) = ||M||_p^(-alpha). An absent alpha resolves to the superharmonic
/// bound at evaluation time, which for p = 1 is the NNS prior.
struct MatrixNormPrior {
  double p = 1.0;
  std::optional<double> alpha;
};

using PriorFamily = std::variant<UniformPrior, SteinPrior, SvsPrior, MatrixNormPrior>;

struct PriorSpec {
  PriorFamily family;

  static PriorSpec uniform() { return {UniformPrior{}}; }
  static PriorSpec stein() { return {SteinPrior{}}; }
  static PriorSpec svs() { return {SvsPrior{}}; }
  static PriorSpec matrix_norm(double p, std::optional<double> alpha) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("matrix-norm prior: p must be positive");
    if (alpha && !(*alpha >= 0.0 && std::isfinite(*alpha)))
      throw InvalidInput("matrix-norm prior: alpha must be finite and non-negative");
    return {MatrixNormPrior{p, alpha}};
  }
  static PriorSpec nns() { return matrix_norm(1.0, std::nullopt); }
};

/// Largest alpha for which pi_{p,alpha} is superharmonic (sufficient region).
inline double superharmonic_alpha_upper_bound(double p, int n, int m) {
  if (!(p > 0.0 && p <= 2.0)) throw InvalidInput("superharmonic_alpha_upper_bound: p must lie in (0, 2]");
  validate_dimensions(n, m, "superharmonic_alpha_upper_bound");
  const double nm = static_cast<double>(n) * m;
  const double mm = m * (m + 1.0);
  if (p >= 1.0) return nm - (1.0 - 0.5 * p) * mm - p;
  return nm - mm + (m - 1.0) * p;
}

inline double resolved_prior_alpha(const MatrixNormPrior& f, int n, int m) {
  if (f.alpha) return *f.alpha;
  if (!(f.p >= 1.0 && f.p <= 2.0))
    throw InvalidInput("matrix-norm prior: alpha must be given explicitly when p is outside [1, 2]");
  return superharmonic_alpha_upper_bound(f.p, n, m);
}

namespace detail {

// -(alpha/p) log sum_i sigma_i^p. For p = 2 the sum is the entrywise squared
// norm, so Stein's prior goes through exactly the same arithmetic.
inline double matrix_norm_log_density(double p, double alpha, const Matrix& x) {
  if (alpha == 0.0) return 0.0;
  double log_sum;
  if (p == 2.0) {
    const double total = x.squaredNorm();
    if (!(total > 0.0)) throw DegenerateInput("prior density: M = 0 is a singularity");
    log_sum = std::log(total);
  } else {
    const Vector s = singular_values(x);
    const double top = s(0);
    if (!(top > 0.0)) throw DegenerateInput("prior density: M = 0 is a singularity");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / top, p);
    log_sum = p * std::log(top) + std::log(acc);
  }
  return -(alpha / p) * log_sum;
}

}  // namespace detail

/// log pi(M) up to an additive constant (the densities are improper).
inline double log_prior_density(const PriorSpec& spec, const Matrix& x) {
  require_tall(x, "log_prior_density");
  require_finite(x, "log_prior_density");
  const int n = static_cast<int>(x.rows());
  const int m = static_cast<int>(x.cols());
  return std::visit(
      [&](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, UniformPrior>) {
          return 0.0;
        } else if constexpr (std::is_same_v<F, SteinPrior>) {
          if (n * m < 3) throw InvalidInput("stein prior: requires nm >= 3");
          return detail::matrix_norm_log_density(2.0, n * m - 2.0, x);
        } else if constexpr (std::is_same_v<F, SvsPrior>) {
          if (n - m < 2) throw InvalidInput("svs prior: requires n - m >= 2");
          // log det(M^T M)^(1/2) = sum_i log L_ii for the Cholesky factor L.
          const Eigen::LLT<Matrix> llt(x.transpose() * x);
          if (llt.info() != Eigen::Success) throw DegenerateInput("svs prior: M is rank deficient");
          const Vector diag = llt.matrixLLT().diagonal();
          double log_det_half = 0.0;
          for (Eigen::Index i = 0; i < diag.size(); ++i) {
            if (!(diag(i) > 0.0)) throw DegenerateInput("svs prior: M is rank deficient");
            log_det_half += std::log(diag(i));
          }
          return -(n - m - 1.0) * log_det_half;
        } else {
          return detail::matrix_norm_log_density(f.p, resolved_prior_alpha(f, n, m), x);
        }
      },
      spec.family);
}

inline std::string to_string(const PriorSpec& spec) {
  return std::visit(
      [](const auto& f) -> std::string {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, UniformPrior>) return "uniform";
        else if constexpr (std::is_same_v<F, SteinPrior>) return "stein";
        else if constexpr (std::is_same_v<F, SvsPrior>) return "svs";
        else {
          if (!f.alpha && f.p == 1.0) return "nns";
          std::string out = "mn:p=" + format_double(f.p);
          if (f.alpha) out += ",alpha=" + format_double(*f.alpha);
          return out;
        }
      },
      spec.family);
}

/// Grammar: uniform | stein | svs | nns | mn:p=<f>[,alpha=<f>]
inline PriorSpec parse_prior_spec(std::string_view text) {
  const std::string_view t = trim(text);
  if (t == "uniform" || t == "jeffreys") return PriorSpec::uniform();
  if (t == "stein") return PriorSpec::stein();
  if (t == "svs") return PriorSpec::svs();
  if (t == "nns") return PriorSpec::nns();
  if (t.substr(0, 3) != "mn:") throw InvalidInput("unknown prior spec '" + std::string(t) + "'");
  std::optional<double> p, alpha;
  for (std::string_view part : split(t.substr(3), ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw InvalidInput("prior spec: expected key=value in '" + std::string(t) + "'");
    const std::string_view key = trim(part.substr(0, eq));
    const double value = parse_double(part.substr(eq + 1));
    if (key == "p" && !p) p = value;
    else if (key == "alpha" && !alpha) alpha = value;
    else throw InvalidInput("prior spec: unexpected key '" + std::string(key) + "'");
  }
  if (!p) throw InvalidInput("prior spec: mn requires p");
  return PriorSpec::matrix_norm(*p, alpha);
}

namespace detail {

inline void validate_sigma(const Vector& sigma, int n, int m, const char* who) {
  validate_dimensions(n, m, who);
  if (sigma.size() != m) throw InvalidInput(std::string(who) + ": expected m singular values");
  if (!sigma.allFinite()) throw InvalidInput(std::string(who) + ": non-finite singular value");
  for (int i = 0; i < m; ++i)
    if (!(sigma(i) > 0.0)) throw DegenerateInput(std::string(who) + ": singular values must be positive");
}

}  // namespace detail

/// Laplacian of f(M) = g(sigma(M)) from the sigma-partials of g:
///   2 sum_{i<j} (s_i g_i - s_j g_j)/(s_i^2 - s_j^2) + (n-m) sum g_i/s_i + sum g_ii.
/// The caller's partials carry no symmetry information, so tied singular
/// values are rejected rather than resolved by a limit.
inline double laplacian_singular(const Vector& gradient, const Vector& hessian_diag, const Vector& sigma, int n,
                                 int m) {
  detail::validate_sigma(sigma, n, m, "laplacian_singular");
  if (gradient.size() != m || hessian_diag.size() != m)
    throw InvalidInput("laplacian_singular: partials must have length m");
  double cross = 0.0, radial = 0.0, second = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (tied(sigma(i), sigma(j))) throw DegenerateInput("laplacian_singular: tied singular values");
      cross += (sigma(i) * gradient(i) - sigma(j) * gradient(j)) /
               ((sigma(i) - sigma(j)) * (sigma(i) + sigma(j)));
    }
    radial += gradient(i) / sigma(i);
    second += hessian_diag(i);
  }
  return 2.0 * cross + (n - m) * radial + second;
}

/// Laplacian of pi_{p,alpha} divided by pi itself, together with the
/// magnitude of the terms it is built from (the rounding scale).
struct NormalizedLaplacian {
  double value = 0.0;
  double scale = 0.0;
};

/// With f = sum s^p and beta = -alpha/p:
///   Delta pi / pi = beta p f^-2 { 2f sum_{i<j} (s_i^p - s_j^p)/(s_i^2 - s_j^2)
///                                 + (n-m+p-1) f sum s^(p-2) + (beta-1) p sum s^(2p-2) }.
inline NormalizedLaplacian matrix_norm_prior_laplacian_ratio(double p, double alpha, const Vector& sigma, int n,
                                                             int m) {
  if (!(p > 0.0)) throw InvalidInput("matrix_norm_prior_laplacian: p must be positive");
  if (!(alpha >= 0.0)) throw InvalidInput("matrix_norm_prior_laplacian: alpha must be non-negative");
  detail::validate_sigma(sigma, n, m, "matrix_norm_prior_laplacian");
  const double beta = -alpha / p;
  double f = 0.0, sum_pm2 = 0.0, sum_2pm2 = 0.0, cross = 0.0;
  for (int i = 0; i < m; ++i) {
    f += std::pow(sigma(i), p);
    sum_pm2 += std::pow(sigma(i), p - 2.0);
    sum_2pm2 += std::pow(sigma(i), 2.0 * p - 2.0);
    for (int j = i + 1; j < m; ++j) cross += power_divided_difference(sigma(i), sigma(j), p);
  }
  const double t1 = 2.0 * f * cross;
  const double t2 = (n - m + p - 1.0) * f * sum_pm2;
  const double t3 = (beta - 1.0) * p * sum_2pm2;
  const double lead = beta * p / (f * f);
  return {lead * (t1 + t2 + t3), std::abs(lead) * (std::abs(t1) + std::abs(t2) + std::abs(t3))};
}

/// Closed-form Laplacian of pi_{p,alpha}(M) = (sum s^p)^(-alpha/p).
inline double matrix_norm_prior_laplacian(double p, double alpha, const Vector& sigma, int n, int m) {
  const auto ratio = matrix_norm_prior_laplacian_ratio(p, alpha, sigma, n, m);
  double f = 0.0;
  for (int i = 0; i < m; ++i) f += std::pow(sigma(i), p);
  return ratio.value * std::pow(f, -alpha / p);
}

/// Relative tolerance before a positive Laplacian counts as a violation.
inline constexpr double kSuperharmonicTolerance = 1e-9;

struct ScanReport {
  double max_laplacian = -std::numeric_limits<double>::infinity();  // of Delta pi / pi
  Vector argmax_sigma;
  std::uint64_t violations = 0;
  std::uint64_t evaluated = 0;
};

namespace detail {

// m log-uniform magnitudes on [1e-2, 1e3], sorted descending, nudged apart
// wherever two would count as tied.
inline Vector random_sigma_profile(Stream& rng, int m) {
  Vector s(m);
  const double lo = std::log(1e-2), hi = std::log(1e3);
  for (int i = 0; i < m; ++i) s(i) = std::exp(lo + (hi - lo) * rng.uniform());
  std::sort(s.data(), s.data() + m, std::greater<>());
  for (int i = 1; i < m; ++i)
    if (tied(s(i - 1), s(i)) || s(i) >= s(i - 1)) s(i) = s(i - 1) * (1.0 - 1e-6);
  return s;
}

}  // namespace detail

/// Evaluates Delta pi / pi at `samples` random profiles plus sigma_i = N - i
/// for N in {10, 1e3, 1e6} (members with a non-positive entry are skipped).
inline ScanReport scan_superharmonicity(double p, double alpha, int n, int m, std::uint64_t samples,
                                        std::uint64_t seed, unsigned threads = 0) {
  if (samples < 1) throw InvalidInput("scan_superharmonicity: samples must be >= 1");
  if (!(p > 0.0) || !(alpha >= 0.0)) throw InvalidInput("scan_superharmonicity: need p > 0 and alpha >= 0");
  validate_dimensions(n, m, "scan_superharmonicity");

  std::vector<Vector> structured;
  for (double big : {10.0, 1e3, 1e6}) {
    if (big - m <= 0.0) continue;
    Vector s(m);
    for (int i = 0; i < m; ++i) s(i) = big - (i + 1.0);
    structured.push_back(s);
  }

  const std::size_t total = samples + structured.size();
  std::vector<Vector> points(total);
  std::vector<NormalizedLaplacian> values(total);
  parallel_for(total, threads, [&](std::size_t k) {
    if (k < samples) {
      Stream rng(seed, k, lanes::kScan);
      points[k] = detail::random_sigma_profile(rng, m);
    } else {
      points[k] = structured[k - samples];
    }
    values[k] = matrix_norm_prior_laplacian_ratio(p, alpha, points[k], n, m);
  });

  ScanReport report;
  report.evaluated = total;
  for (std::size_t k = 0; k < total; ++k) {
    if (values[k].value > kSuperharmonicTolerance * values[k].scale) ++report.violations;
    if (values[k].value > report.max_laplacian) {
      report.max_laplacian = values[k].value;
      report.argmax_sigma = points[k];
    }
  }
  return report;
}

}  // namespace matnorm
