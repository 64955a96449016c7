#pragma once

// Generalized Bayes estimators and predictive densities under the shrinkage
// priors by importance sampling from the likelihood-matched Gaussian, plus the
// Kullback-Leibler risk experiment.
//
// Every prior here is homogeneous, pi(r u) = r^-kappa pi(u) for unit u. For a
// Gaussian N(t, I) written in polar form around the origin, the radial
// integral along a direction u is then the one-dimensional
//   J(nu, b) = int_0^inf r^nu exp(-r^2/2 + b r) dr,   b = <u, t>,
// and the direction of a Gaussian draw has density proportional to
// J(d-1, b). Averaging pi(u) J(d-1-kappa, b) / J(d-1, b) over the directions
// of ordinary draws therefore estimates E[pi] without the heavy tails that
// pi(t + Z) itself has near the origin (a share of uniform directions is mixed
// in, see radial_direction). This is the default; the plain
// estimators (weights pi(X + Z_k)) remain available and are always used for
// the uniform prior, whose weights are exactly one.

#include "matnorm/errors.hpp"
#include "matnorm/format.hpp"
#include "matnorm/linalg.hpp"
#include "matnorm/parallel.hpp"
#include "matnorm/priors.hpp"
#include "matnorm/risk.hpp"
#include "matnorm/rng.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace matnorm {

enum class PredictiveMethod {
  // p(Y|X) = N(Y; X, 2I) E_{N((X+Y)/2, I/2)}[pi] / E_{N(X, I)}[pi], both
  // expectations estimated from the same standard normal draws.
  MarginalRatio,
  // Self-normalized sum_k pi(M_k) p(Y|M_k) / sum_k pi(M_k), M_k = X + Z_k.
  Direct,
};

struct ISConfig {
  std::uint64_t num_samples = 10000;
  std::uint64_t seed = 0;
  double ess_floor = 0.01;
  PredictiveMethod method = PredictiveMethod::MarginalRatio;
  // Integrate the radius analytically (see the top of this file). Ignored by
  // the Direct method.
  bool radial = true;
  unsigned threads = 0;  // used when a call is not already inside a parallel loop
};

struct PosteriorMean {
  Matrix mean;
  Matrix stderr;  // entrywise delta-method standard error
  double ess_fraction = 0.0;
};

struct PredictiveEstimate {
  double log_density = 0.0;
  double stderr = 0.0;  // of log_density
  double ess_fraction = 0.0;
};

/// log J(nu, b) with J(nu, b) = int_0^inf r^nu exp(-r^2/2 + b r) dr, nu > -1.
inline double log_radial_moment(double nu, double b) {
  if (!(nu > -1.0)) throw InvalidInput("log_radial_moment: nu must exceed -1");
  // With r = e^x the integrand exp(h(x)) is unimodal, peaking at e^x = y.
  const double c = nu + 1.0;
  const double root = std::sqrt(b * b + 4.0 * c);
  const double y = b >= 0.0 ? 0.5 * (b + root) : 2.0 * c / (root - b);
  const double x0 = std::log(y);
  const double width = 1.0 / std::sqrt(y * y + c);
  auto h = [&](double x) {
    const double e = std::exp(x);
    if (e > 1e150) return -std::numeric_limits<double>::infinity();
    return c * x - 0.5 * e * e + b * e;
  };
  const double h0 = h(x0);
  boost::math::quadrature::sinh_sinh<double> integrator;
  const double integral =
      integrator.integrate([&](double s) { return std::exp(h(x0 + width * s) - h0); }, 1e-13);
  return h0 + std::log(width * integral);
}

namespace detail {

inline void validate_is(const ISConfig& cfg, const char* who) {
  if (cfg.num_samples < 2) throw InvalidInput(std::string(who) + ": num_samples must be >= 2");
  if (!(cfg.ess_floor > 0.0 && cfg.ess_floor <= 1.0))
    throw InvalidInput(std::string(who) + ": ess_floor must lie in (0, 1]");
}

// log J(nu, .) tabulated on [-reach, reach] and interpolated by cubics;
// arguments outside the table are integrated directly.
class RadialMomentTable {
 public:
  RadialMomentTable(double nu, double reach) : nu_(nu), reach_(std::max(reach, 1.0)) {
    const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * reach_ / kStep));
    step_ = 2.0 * reach_ / static_cast<double>(intervals);
    values_.resize(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) values_[i] = log_radial_moment(nu_, -reach_ + step_ * i);
  }

  double operator()(double b) const {
    if (!(std::abs(b) <= reach_)) return log_radial_moment(nu_, b);
    const double pos = (b + reach_) / step_;
    const auto last = static_cast<std::ptrdiff_t>(values_.size()) - 1;
    const auto i = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(pos) - 1, 0, last - 3);
    const double t = pos - static_cast<double>(i);
    const double* v = values_.data() + i;
    // Cubic through nodes i..i+3 evaluated at offset t in [0, 3].
    return -v[0] * (t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0 + v[1] * t * (t - 2.0) * (t - 3.0) / 2.0 -
           v[2] * t * (t - 1.0) * (t - 3.0) / 2.0 + v[3] * t * (t - 1.0) * (t - 2.0) / 6.0;
  }

 private:
  static constexpr double kStep = 0.02;
  double nu_;
  double reach_;
  double step_ = 0.0;
  std::vector<double> values_;
};

// Tables keyed by nu, built before any parallel loop and then read-only.
class RadialMoments {
 public:
  RadialMoments(const std::vector<double>& nus, double reach) {
    for (double nu : nus)
      if (!tables_.count(nu)) tables_.emplace(nu, RadialMomentTable(nu, reach));
  }
  double operator()(double nu, double b) const { return tables_.at(nu)(b); }

 private:
  std::map<double, RadialMomentTable> tables_;
};

// log pi evaluated many times on small matrices. For m <= 3 the singular
// values come from the eigenvalues of the Gram matrix, which is an order of
// magnitude cheaper than the SVD and accurate enough for a weight.
class LogPrior {
 public:
  LogPrior(const PriorSpec& spec, int n, int m) : spec_(spec), m_(m) {
    if (const auto* mn = std::get_if<MatrixNormPrior>(&spec.family)) {
      degree_ = resolved_prior_alpha(*mn, n, m);
      if (mn->p != 2.0) {
        p_ = mn->p;
        alpha_ = degree_;
      }
    } else if (std::holds_alternative<SteinPrior>(spec.family)) {
      degree_ = n * m - 2.0;
    } else if (std::holds_alternative<SvsPrior>(spec.family)) {
      degree_ = m * (n - m - 1.0);
    }
    if (!(degree_ < static_cast<double>(n) * m))
      throw InvalidInput("prior is not integrable at the origin (degree >= nm); the posterior does not exist");
    // Validates dimension requirements once, up front.
    if (!std::holds_alternative<UniformPrior>(spec.family)) {
      Matrix probe = Matrix::Zero(n, m);
      for (int i = 0; i < m; ++i) probe(i, i) = 1.0;
      (void)log_prior_density(spec, probe);
    }
  }

  bool is_uniform() const { return std::holds_alternative<UniformPrior>(spec_.family); }

  /// kappa with pi(c M) = c^-kappa pi(M).
  double degree() const { return degree_; }

  double operator()(const Matrix& x) const {
    if (!p_ || m_ > 3) return log_prior_density(spec_, x);
    if (*alpha_ == 0.0) return 0.0;
    double lambda[3] = {0.0, 0.0, 0.0};
    if (m_ == 1) {
      lambda[0] = x.squaredNorm();
    } else if (m_ == 2) {
      Eigen::Matrix2d g = x.transpose() * x;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
      es.computeDirect(g, Eigen::EigenvaluesOnly);
      lambda[0] = es.eigenvalues()(0);
      lambda[1] = es.eigenvalues()(1);
    } else {
      Eigen::Matrix3d g = x.transpose() * x;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
      es.computeDirect(g, Eigen::EigenvaluesOnly);
      for (int i = 0; i < 3; ++i) lambda[i] = es.eigenvalues()(i);
    }
    double total = 0.0;
    for (int i = 0; i < m_; ++i) total += std::pow(std::max(lambda[i], 0.0), 0.5 * *p_);
    if (!(total > 0.0)) throw DegenerateInput("prior density: M = 0 is a singularity");
    return -(*alpha_ / *p_) * std::log(total);
  }

 private:
  PriorSpec spec_;
  int m_;
  double degree_ = 0.0;
  std::optional<double> p_;
  std::optional<double> alpha_;
};

// Normalized weights exp(lw - max) and their effective sample size fraction.
struct Weights {
  std::vector<double> w;
  double log_shift = 0.0;
  double sum = 0.0;
  double ess_fraction = 0.0;
};

inline Weights normalize_log_weights(const std::vector<double>& log_w) {
  Weights out;
  double top = -std::numeric_limits<double>::infinity();
  for (double v : log_w) {
    if (std::isnan(v)) throw DegenerateWeights("importance weights: NaN log-weight", 0.0);
    top = std::max(top, v);
  }
  if (!std::isfinite(top)) throw DegenerateWeights("importance weights: no finite weight", 0.0);
  out.log_shift = top;
  out.w.resize(log_w.size());
  std::vector<double> sq(log_w.size());
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    out.w[k] = std::exp(log_w[k] - top);
    sq[k] = out.w[k] * out.w[k];
  }
  out.sum = pairwise_sum(out.w);
  out.ess_fraction = out.sum * out.sum / pairwise_sum(sq) / static_cast<double>(log_w.size());
  return out;
}

inline void require_ess(double fraction, double floor, const char* who) {
  if (fraction < floor)
    throw DegenerateWeights(std::string(who) + ": effective sample size fraction " + format_double(fraction) +
                                " is below the floor " + format_double(floor) + "; increase num_samples",
                            fraction);
}

inline double log_normal_density(const Matrix& y, const Matrix& mean, double variance) {
  const double count = static_cast<double>(y.size());
  return -0.5 * count * std::log(2.0 * std::numbers::pi * variance) - (y - mean).squaredNorm() / (2.0 * variance);
}

inline Matrix importance_draw(std::uint64_t seed, std::uint64_t k, Eigen::Index n, Eigen::Index m) {
  Stream rng(seed, k, lanes::kImportance);
  Matrix z(n, m);
  rng.fill_normal(z);
  return z;
}

inline bool use_radial(const LogPrior& prior, const ISConfig& cfg) { return cfg.radial && !prior.is_uniform(); }

// Directions come from a fixed mixture: draw k uses the direction of
// centre/scale + Z_k, except every fourth draw, which uses the uniformly
// distributed Z_k / |Z_k|. The uniform share keeps weights bounded when the
// posterior is far more diffuse in direction than the likelihood.
inline constexpr double kUniformDirectionShare = 0.25;

inline bool uniform_direction(std::size_t k) { return k % 4 == 3; }

inline Matrix radial_direction(const Matrix& centre, double scale, const Matrix& z, std::size_t k) {
  const Matrix w = uniform_direction(k) ? z : Matrix(centre / scale + z);
  return w / w.norm();
}

// Unbiased log weight of draw k (direction u) for E_{M ~ N(centre, s^2 I)}[pi(M)].
inline double log_weight(const LogPrior& prior, const Matrix& centre, double scale, const Matrix& z,
                         std::size_t k, const RadialMoments* moments, bool radial) {
  if (prior.is_uniform()) return 0.0;
  if (!radial) return prior(centre + scale * z);
  const double d = static_cast<double>(z.size());
  const Matrix t = centre / scale;
  const Matrix u = radial_direction(centre, scale, z, k);
  const double b = t.cwiseProduct(u).sum();
  const double kappa = prior.degree();
  const double log_j = (*moments)(d - 1.0, b);
  // log of (Gaussian direction density) / (uniform direction density).
  const double log_ratio = std::log(2.0) + 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d) -
                           0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * t.squaredNorm() + log_j;
  const double a = std::log1p(-kUniformDirectionShare);
  const double c = std::log(kUniformDirectionShare) - log_ratio;
  const double log_mixture = std::max(a, c) + std::log1p(std::exp(-std::abs(a - c)));
  return -kappa * std::log(scale) + prior(u) + (*moments)(d - 1.0 - kappa, b) - log_j - log_mixture;
}

inline std::vector<double> radial_orders(const std::vector<LogPrior>& priors, Eigen::Index size, bool with_mean) {
  const double d = static_cast<double>(size);
  std::vector<double> nus = {d - 1.0};
  for (const auto& p : priors) {
    if (p.is_uniform()) continue;
    nus.push_back(d - 1.0 - p.degree());
    if (with_mean) nus.push_back(d - p.degree());
  }
  return nus;
}

// Per-sample log weights at the two proposal centres of every draw.
struct PredictiveDraws {
  std::vector<std::vector<double>> at_midpoint;  // [prior][k], centre (X+Y)/2, scale 1/sqrt2
  std::vector<std::vector<double>> at_x;         // [prior][k], centre X, scale 1
  std::vector<double> log_lik;                   // [k], log p(Y | X + Z_k); Direct only
};

inline PredictiveDraws predictive_draws(const std::vector<LogPrior>& priors, const Matrix& x, const Matrix& y,
                                        const ISConfig& cfg, const RadialMoments* moments, unsigned threads) {
  const std::size_t count = cfg.num_samples;
  const bool direct = cfg.method == PredictiveMethod::Direct;
  PredictiveDraws d;
  d.at_midpoint.assign(priors.size(), std::vector<double>(direct ? 0 : count));
  d.at_x.assign(priors.size(), std::vector<double>(count));
  d.log_lik.assign(direct ? count : 0, 0.0);
  const Matrix mid = 0.5 * (x + y);
  const double half = std::numbers::sqrt2 / 2.0;
  parallel_for(count, threads, [&](std::size_t k) {
    const Matrix z = importance_draw(cfg.seed, k, x.rows(), x.cols());
    if (direct) d.log_lik[k] = log_normal_density(y, x + z, 1.0);
    for (std::size_t j = 0; j < priors.size(); ++j) {
      const bool radial = !direct && use_radial(priors[j], cfg);
      d.at_x[j][k] = log_weight(priors[j], x, 1.0, z, k, moments, radial);
      if (!direct) d.at_midpoint[j][k] = log_weight(priors[j], mid, half, z, k, moments, radial);
    }
  });
  return d;
}

inline PredictiveEstimate predictive_from_draws(const PredictiveDraws& d, std::size_t j, const Matrix& x,
                                                const Matrix& y, const ISConfig& cfg) {
  const double count = static_cast<double>(cfg.num_samples);
  if (cfg.method == PredictiveMethod::MarginalRatio) {
    const Weights a = normalize_log_weights(d.at_midpoint[j]);
    const Weights b = normalize_log_weights(d.at_x[j]);
    const double ess = std::min(a.ess_fraction, b.ess_fraction);
    require_ess(ess, cfg.ess_floor, "log_predictive_density");
    const double a_mean = a.sum / count, b_mean = b.sum / count;
    std::vector<double> r2(cfg.num_samples);
    for (std::size_t k = 0; k < r2.size(); ++k) {
      const double r = a.w[k] / a_mean - b.w[k] / b_mean;
      r2[k] = r * r;
    }
    PredictiveEstimate out;
    out.log_density = log_normal_density(y, x, 2.0) + (a.log_shift + std::log(a_mean)) -
                      (b.log_shift + std::log(b_mean));
    out.stderr = std::sqrt(pairwise_sum(r2) / (count * (count - 1.0)));
    out.ess_fraction = ess;
    return out;
  }

  const Weights w = normalize_log_weights(d.at_x[j]);
  require_ess(w.ess_fraction, cfg.ess_floor, "log_predictive_density");
  // h_k = p(Y | M_k) rescaled by its largest value.
  const auto& ll = d.log_lik;
  const double h_top = *std::max_element(ll.begin(), ll.end());
  std::vector<double> wh(ll.size());
  for (std::size_t k = 0; k < ll.size(); ++k) wh[k] = w.w[k] * std::exp(ll[k] - h_top);
  const double mu = pairwise_sum(wh) / w.sum;
  std::vector<double> dev(ll.size());
  for (std::size_t k = 0; k < ll.size(); ++k) {
    const double e = std::exp(ll[k] - h_top) - mu;
    dev[k] = w.w[k] * e * e;
  }
  const double var = pairwise_sum(dev) / w.sum;
  PredictiveEstimate out;
  out.log_density = h_top + std::log(mu);
  out.stderr = std::sqrt(var / (w.ess_fraction * count)) / mu;
  out.ess_fraction = w.ess_fraction;
  return out;
}

inline std::vector<LogPrior> make_log_priors(const std::vector<PriorSpec>& priors, int n, int m) {
  std::vector<LogPrior> out;
  out.reserve(priors.size());
  for (const auto& p : priors) out.emplace_back(p, n, m);
  return out;
}

}  // namespace detail

/// E[M | X] under `prior` by self-normalized importance sampling over draws
/// M_k = X + Z_k.
inline PosteriorMean posterior_mean(const PriorSpec& prior, const Matrix& x, const ISConfig& cfg,
                                    const detail::RadialMoments* moments = nullptr) {
  require_tall(x, "posterior_mean");
  require_finite(x, "posterior_mean");
  detail::validate_is(cfg, "posterior_mean");
  const int n = static_cast<int>(x.rows()), m = static_cast<int>(x.cols());
  const detail::LogPrior log_prior(prior, n, m);
  const std::size_t count = cfg.num_samples;
  const bool radial = detail::use_radial(log_prior, cfg);
  std::optional<detail::RadialMoments> own;
  if (radial && moments == nullptr) {
    own.emplace(detail::radial_orders({log_prior}, x.size(), true), x.norm() + 1.0);
    moments = &*own;
  }

  // Column k: the contribution of draw k to E[pi M] / (its weight), so that
  // the estimate is X + sum_k w_k c_k / sum_k w_k in both modes.
  Matrix contrib(x.size(), static_cast<Eigen::Index>(count));
  std::vector<double> log_w(count, 0.0);
  parallel_for(count, cfg.threads, [&](std::size_t k) {
    const Matrix z = detail::importance_draw(cfg.seed, k, n, m);
    const auto col = static_cast<Eigen::Index>(k);
    log_w[k] = detail::log_weight(log_prior, x, 1.0, z, k, moments, radial);
    if (!radial) {
      contrib.col(col) = z.reshaped();
      return;
    }
    // E[r | u] under the radial law r^(d-1-kappa) exp(-r^2/2 + b r).
    const double d = static_cast<double>(x.size());
    const Matrix u = detail::radial_direction(x, 1.0, z, k);
    const double b = x.cwiseProduct(u).sum();
    const double nu = d - 1.0 - log_prior.degree();
    const double radius = std::exp((*moments)(nu + 1.0, b) - (*moments)(nu, b));
    contrib.col(col) = (radius * u - x).reshaped();
  });
  const detail::Weights w = detail::normalize_log_weights(log_w);
  detail::require_ess(w.ess_fraction, cfg.ess_floor, "posterior_mean");

  const Eigen::Map<const Vector> weights(w.w.data(), static_cast<Eigen::Index>(count));
  const Vector shift = contrib * weights / w.sum;
  const Vector second = contrib.cwiseAbs2() * weights / w.sum;
  const Vector var = (second - shift.cwiseAbs2()).cwiseMax(0.0);
  const double ess = w.ess_fraction * static_cast<double>(count);

  PosteriorMean out;
  out.mean = x + shift.reshaped(n, m);
  out.stderr = (var / ess).cwiseSqrt().reshaped(n, m);
  out.ess_fraction = w.ess_fraction;
  return out;
}

/// log p_hat(Y | X) for the Bayesian predictive density under `prior`.
inline PredictiveEstimate log_predictive_density(const PriorSpec& prior, const Matrix& x, const Matrix& y,
                                                 const ISConfig& cfg) {
  require_tall(x, "log_predictive_density");
  require_finite(x, "log_predictive_density");
  require_finite(y, "log_predictive_density");
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw InvalidInput("log_predictive_density: shape mismatch");
  detail::validate_is(cfg, "log_predictive_density");
  const auto priors = detail::make_log_priors({prior}, static_cast<int>(x.rows()), static_cast<int>(x.cols()));
  std::optional<detail::RadialMoments> moments;
  if (cfg.method == PredictiveMethod::MarginalRatio && detail::use_radial(priors.front(), cfg))
    moments.emplace(detail::radial_orders(priors, x.size(), false),
                    std::max(x.norm(), std::numbers::sqrt2 * (0.5 * (x + y)).norm()) + 1.0);
  const auto draws = detail::predictive_draws(priors, x, y, cfg, moments ? &*moments : nullptr, cfg.threads);
  return detail::predictive_from_draws(draws, 0, x, y, cfg);
}

struct KlRiskReport {
  RiskReport risk;
  double min_ess_fraction = 1.0;
  std::vector<double> losses;  // per replicate, for paired comparisons
};

/// KL risk of the predictive density for each prior, sharing the (X, Y) and
/// importance draws across priors. Each entry equals kl_risk for that prior
/// alone under the same arguments.
inline std::vector<KlRiskReport> kl_risk(const std::vector<PriorSpec>& priors, const Matrix& mean,
                                         std::uint64_t replicates, const ISConfig& cfg, std::uint64_t seed,
                                         unsigned threads = 0) {
  require_tall(mean, "kl_risk");
  require_finite(mean, "kl_risk");
  if (replicates < 2) throw InvalidInput("kl_risk: replicates must be >= 2");
  if (priors.empty()) throw InvalidInput("kl_risk: no priors given");
  detail::validate_is(cfg, "kl_risk");
  const int n = static_cast<int>(mean.rows()), m = static_cast<int>(mean.cols());
  const auto log_priors = detail::make_log_priors(priors, n, m);
  // Directions b = <u, t> satisfy |b| <= |t|; the reach covers all but
  // astronomically unlikely draws, which fall back to direct integration.
  const double noise = std::sqrt(static_cast<double>(mean.size())) + 10.0;
  const detail::RadialMoments moments(detail::radial_orders(log_priors, mean.size(), false),
                                      std::numbers::sqrt2 * (mean.norm() + noise));

  std::vector<std::vector<double>> losses(priors.size(), std::vector<double>(replicates));
  std::vector<std::vector<double>> ess(priors.size(), std::vector<double>(replicates));
  parallel_for(replicates, threads, [&](std::size_t k) {
    Stream rng(seed, k, lanes::kPrediction);
    Matrix zx(n, m), zy(n, m);
    rng.fill_normal(zx);
    rng.fill_normal(zy);
    const Matrix x = mean + zx, y = mean + zy;
    const double log_truth = detail::log_normal_density(y, mean, 1.0);

    ISConfig inner = cfg;
    inner.seed = derive_seed(cfg.seed, k);
    const auto draws = detail::predictive_draws(log_priors, x, y, inner, &moments, 1);
    for (std::size_t j = 0; j < priors.size(); ++j) {
      PredictiveEstimate est;
      try {
        est = detail::predictive_from_draws(draws, j, x, y, inner);
      } catch (const DegenerateWeights&) {
        ISConfig retry = inner;
        retry.num_samples *= 4;
        const auto again = detail::predictive_draws({log_priors[j]}, x, y, retry, &moments, 1);
        est = detail::predictive_from_draws(again, 0, x, y, retry);
      }
      losses[j][k] = log_truth - est.log_density;
      ess[j][k] = est.ess_fraction;
    }
  });

  std::vector<KlRiskReport> out(priors.size());
  for (std::size_t j = 0; j < priors.size(); ++j) {
    out[j].risk = make_report(losses[j], seed);
    out[j].min_ess_fraction = *std::min_element(ess[j].begin(), ess[j].end());
    out[j].losses = std::move(losses[j]);
  }
  return out;
}

inline KlRiskReport kl_risk(const PriorSpec& prior, const Matrix& mean, std::uint64_t replicates,
                            const ISConfig& cfg, std::uint64_t seed, unsigned threads = 0) {
  return kl_risk(std::vector<PriorSpec>{prior}, mean, replicates, cfg, seed, threads).front();
}

/// Frobenius risk of the generalized Bayes estimator, on the same X draws as
/// mc_frobenius_risk for (M, seed).
inline RiskReport mc_bayes_frobenius_risk(const PriorSpec& prior, const Matrix& mean, std::uint64_t replicates,
                                          const ISConfig& cfg, std::uint64_t seed, unsigned threads = 0) {
  detail::validate_mean(mean, replicates, "mc_bayes_frobenius_risk");
  detail::validate_is(cfg, "mc_bayes_frobenius_risk");
  const detail::LogPrior log_prior(prior, static_cast<int>(mean.rows()), static_cast<int>(mean.cols()));
  std::optional<detail::RadialMoments> moments;
  if (detail::use_radial(log_prior, cfg))
    moments.emplace(detail::radial_orders({log_prior}, mean.size(), true),
                    mean.norm() + std::sqrt(static_cast<double>(mean.size())) + 10.0);
  std::vector<double> losses(replicates);
  parallel_for(replicates, threads, [&](std::size_t k) {
    const Matrix x = noisy_observation(mean, seed, k);
    ISConfig inner = cfg;
    inner.seed = derive_seed(cfg.seed, k);
    inner.threads = 1;
    Matrix estimate;
    try {
      estimate = posterior_mean(prior, x, inner, moments ? &*moments : nullptr).mean;
    } catch (const DegenerateWeights&) {
      inner.num_samples *= 4;
      estimate = posterior_mean(prior, x, inner, moments ? &*moments : nullptr).mean;
    }
    losses[k] = frobenius_distance_sq(estimate, mean);
  });
  return make_report(losses, seed);
}

}  // namespace matnorm
