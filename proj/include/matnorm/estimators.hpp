#pragma once

// Orthogonally equivariant shrinkage estimators of a normal mean matrix.
//
// Every estimator here has the form  M_hat = U diag(sigma_hat(s)) V^T  where
// X = U diag(s) V^T, so each family is fully described by its map from the
// singular values s to sigma_hat:
//
//   JamesStein           sigma_hat_i = (1 - (nm-2) / sum_j s_j^2) s_i
//   EfronMorris          sigma_hat_i = s_i - (n-m-1) / s_i
//   ModifiedEfronMorris  sigma_hat_i = s_i - (n-m-1) / s_i - (m-1)(m+2) s_i / sum_j s_j^2
//   MatrixNorm(p, a)     sigma_hat_i = s_i - a s_i^(p-1) / sum_j s_j^p
//   SureTuned(p)         sigma_hat_i = s_i - a(s, p) s_i^(p-1)
//
// with a(s, p) the minimiser of the unbiased risk estimate (sure_optimal_alpha).
// The positive-part variant clamps each sigma_hat_i at zero.

#include "matnorm/errors.hpp"
#include "matnorm/format.hpp"
#include "matnorm/linalg.hpp"
#include "matnorm/spectral.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace matnorm {

struct JamesStein {};
struct EfronMorris {};
struct ModifiedEfronMorris {};

struct MatrixNorm {
  double p = 1.0;
  /// Unset means default_alpha(p, n, m) for the dimensions at hand.
  std::optional<double> alpha;
};

struct SureTuned {
  double p = 1.0;
};

using EstimatorFamily =
    std::variant<JamesStein, EfronMorris, ModifiedEfronMorris, MatrixNorm, SureTuned>;

struct EstimatorSpec {
  EstimatorFamily family;
  bool positive_part = false;

  static EstimatorSpec james_stein(bool positive_part = false) { return {JamesStein{}, positive_part}; }
  static EstimatorSpec efron_morris(bool positive_part = false) { return {EfronMorris{}, positive_part}; }
  static EstimatorSpec modified_efron_morris(bool positive_part = false) {
    return {ModifiedEfronMorris{}, positive_part};
  }

  static EstimatorSpec matrix_norm(double p, std::optional<double> alpha, bool positive_part = false) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("matrix-norm estimator: p must be positive");
    if (alpha && (!(*alpha >= 0.0) || !std::isfinite(*alpha)))
      throw InvalidInput("matrix-norm estimator: alpha must be nonnegative");
    return {MatrixNorm{p, alpha}, positive_part};
  }

  /// Nuclear-norm shrinkage: p = 1 with the default alpha nm - m(m+1)/2 - 1.
  static EstimatorSpec nns(bool positive_part = false) {
    return matrix_norm(1.0, std::nullopt, positive_part);
  }

  static EstimatorSpec sure_tuned(double p, bool positive_part = false) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("sure-tuned estimator: p must lie in (0, 1]");
    return {SureTuned{p}, positive_part};
  }
};

inline void validate_dimensions(int n, int m, const char* who) {
  if (m < 1 || n < m)
    throw InvalidInput(std::string(who) + ": need n >= m >= 1, got n=" + std::to_string(n) +
                       ", m=" + std::to_string(m));
}

/// Checks that s has length m, is finite, nonnegative and non-increasing.
inline void validate_singular_values(const Vector& s, int n, int m, const char* who) {
  validate_dimensions(n, m, who);
  if (s.size() != m) throw InvalidInput(std::string(who) + ": expected m singular values");
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s(i)) || s(i) < 0.0)
      throw InvalidInput(std::string(who) + ": singular values must be finite and nonnegative");
    if (i > 0 && s(i) > s(i - 1))
      throw InvalidInput(std::string(who) + ": singular values must be non-increasing");
  }
}

/// nm - (1 - p/2) m(m+1) - p, the alpha minimising the p in [1, 2] risk bound.
inline double default_alpha(double p, int n, int m) {
  if (!(p >= 1.0 && p <= 2.0))
    throw InvalidInput("default_alpha: defined for p in [1, 2] only; pass alpha explicitly");
  validate_dimensions(n, m, "default_alpha");
  const double nm = static_cast<double>(n) * m;
  return nm - (1.0 - p / 2.0) * m * (m + 1.0) - p;
}

inline double resolved_alpha(const MatrixNorm& f, int n, int m) {
  return f.alpha ? *f.alpha : default_alpha(f.p, n, m);
}

/// Alpha minimising the unbiased risk estimate of s_i - alpha s_i^(p-1):
///   [ (n-m+p-1) sum s_i^(p-2) + 2 sum_{i<j} (s_i^p - s_j^p)/(s_i^2 - s_j^2) ] / sum s_i^(2p-2).
/// p = 0 is accepted (it reproduces n-m-1).
inline double sure_optimal_alpha(const Vector& s, double p, int n, int m) {
  validate_singular_values(s, n, m, "sure_optimal_alpha");
  if (!(p >= 0.0 && p <= 2.0)) throw InvalidInput("sure_optimal_alpha: p must lie in [0, 2]");
  const double c = n - m + p - 1.0;
  if (!(c > 0.0)) throw InvalidInput("sure_optimal_alpha: requires n - m + p - 1 > 0");
  if (s(m - 1) <= 0.0) throw DegenerateInput("sure_optimal_alpha: all singular values must be positive");

  double lower = 0.0, cross = 0.0, denom = 0.0;
  for (int i = 0; i < m; ++i) {
    lower += std::pow(s(i), p - 2.0);
    denom += std::pow(s(i), 2.0 * p - 2.0);
    for (int j = i + 1; j < m; ++j) cross += power_divided_difference(s(i), s(j), p);
  }
  return (c * lower + 2.0 * cross) / denom;
}

namespace detail {

inline Vector zero_like(const Vector& s) { return Vector::Zero(s.size()); }

[[noreturn]] inline void degenerate(const char* family) {
  throw DegenerateInput(std::string(family) +
                        ": undefined at a zero singular value (use the positive-part variant)");
}

}  // namespace detail

/// Shrunk singular values sigma_hat(s) for `spec`. See the header comment for
/// the per-family formulas. Zero singular values: positive-part variants take
/// the continuous limit (0); raw variants raise DegenerateInput where the
/// formula is undefined.
inline Vector shrink_singular_values(const EstimatorSpec& spec, const Vector& s, int n, int m) {
  validate_singular_values(s, n, m, "shrink_singular_values");
  const bool pp = spec.positive_part;
  const double nm = static_cast<double>(n) * m;
  Vector out(m);

  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, JamesStein>) {
          if (n * m < 3) throw InvalidInput("james-stein: requires nm >= 3");
          const double total = s.squaredNorm();
          if (total == 0.0) {
            if (!pp) detail::degenerate("james-stein");
            out = detail::zero_like(s);
            return;
          }
          out = (1.0 - (nm - 2.0) / total) * s;
        } else if constexpr (std::is_same_v<F, EfronMorris> || std::is_same_v<F, ModifiedEfronMorris>) {
          const double c = n - m - 1.0;
          if (!(c > 0.0)) throw InvalidInput("efron-morris: requires n - m - 1 > 0");
          const double total = s.squaredNorm();
          const double d = std::is_same_v<F, ModifiedEfronMorris> ? (m - 1.0) * (m + 2.0) : 0.0;
          for (int i = 0; i < m; ++i) {
            if (s(i) == 0.0) {
              if (!pp) detail::degenerate("efron-morris");
              out(i) = 0.0;
              continue;
            }
            out(i) = s(i) - c / s(i) - (d != 0.0 ? d * s(i) / total : 0.0);
          }
        } else if constexpr (std::is_same_v<F, MatrixNorm>) {
          const double alpha = resolved_alpha(f, n, m);
          if (alpha == 0.0) {
            out = s;
            return;
          }
          double total = 0.0;
          for (int i = 0; i < m; ++i) total += std::pow(s(i), f.p);
          if (total == 0.0) {
            if (!pp) detail::degenerate("matrix-norm");
            out = detail::zero_like(s);
            return;
          }
          for (int i = 0; i < m; ++i) {
            if (s(i) == 0.0 && f.p < 1.0) {
              if (!pp) detail::degenerate("matrix-norm");
              out(i) = 0.0;
              continue;
            }
            out(i) = s(i) - alpha * std::pow(s(i), f.p - 1.0) / total;
          }
        } else {
          if (!(n - m + f.p - 1.0 > 0.0)) throw InvalidInput("sure-tuned: requires n - m + p - 1 > 0");
          if (s(m - 1) == 0.0) {
            // alpha(s, p) diverges as the smallest value tends to zero, driving
            // every coordinate to -infinity; the positive part is identically 0.
            if (!pp) detail::degenerate("sure-tuned");
            out = detail::zero_like(s);
            return;
          }
          const double alpha = sure_optimal_alpha(s, f.p, n, m);
          for (int i = 0; i < m; ++i) out(i) = s(i) - alpha * std::pow(s(i), f.p - 1.0);
        }
      },
      spec.family);

  if (pp) out = out.cwiseMax(0.0);
  return out;
}

inline Matrix apply_estimator(const EstimatorSpec& spec, const SvdFactors& f) {
  const int n = static_cast<int>(f.u.rows());
  const int m = static_cast<int>(f.s.size());
  return reconstruct(f.u, shrink_singular_values(spec, f.s, n, m), f.v);
}

inline Matrix apply_estimator(const EstimatorSpec& spec, const Matrix& x) {
  return apply_estimator(spec, svd(x));
}

/// Canonical text form; parse_estimator_spec(to_string(s)) == s.
inline std::string to_string(const EstimatorSpec& spec) {
  std::string out = std::visit(
      [](const auto& f) -> std::string {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, JamesStein>) {
          return "js";
        } else if constexpr (std::is_same_v<F, EfronMorris>) {
          return "em";
        } else if constexpr (std::is_same_v<F, ModifiedEfronMorris>) {
          return "mem";
        } else if constexpr (std::is_same_v<F, MatrixNorm>) {
          if (f.p == 1.0 && !f.alpha) return "nns";
          std::string text = "mn:p=" + format_double(f.p);
          if (f.alpha) text += ",alpha=" + format_double(*f.alpha);
          return text;
        } else {
          return "sure:p=" + format_double(f.p);
        }
      },
      spec.family);
  if (spec.positive_part) out += '+';
  return out;
}

/// Grammar: js | em | mem | nns | mn:p=<f>[,alpha=<f>] | sure:p=<f>, each with
/// an optional trailing '+' selecting the positive-part rule.
inline EstimatorSpec parse_estimator_spec(std::string_view text) {
  const std::string original(text);
  text = trim(text);
  bool pp = false;
  if (!text.empty() && text.back() == '+') {
    pp = true;
    text.remove_suffix(1);
  }
  if (text == "js") return EstimatorSpec::james_stein(pp);
  if (text == "em") return EstimatorSpec::efron_morris(pp);
  if (text == "mem") return EstimatorSpec::modified_efron_morris(pp);
  if (text == "nns") return EstimatorSpec::nns(pp);

  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw InvalidInput("unknown estimator spec '" + original + "'");
  const auto head = text.substr(0, colon);
  std::optional<double> p, alpha;
  for (auto item : split(text.substr(colon + 1), ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidInput("malformed parameter in '" + original + "'");
    const auto key = trim(item.substr(0, eq));
    const double value = parse_double(item.substr(eq + 1));
    auto& slot = key == "p" ? p : key == "alpha" ? alpha : throw InvalidInput(
        "unknown parameter '" + std::string(key) + "' in '" + original + "'");
    if (slot) throw InvalidInput("duplicate parameter in '" + original + "'");
    slot = value;
  }
  if (!p) throw InvalidInput("missing p in '" + original + "'");
  if (head == "mn") return EstimatorSpec::matrix_norm(*p, alpha, pp);
  if (head == "sure") {
    if (alpha) throw InvalidInput("sure-tuned takes no alpha: '" + original + "'");
    return EstimatorSpec::sure_tuned(*p, pp);
  }
  throw InvalidInput("unknown estimator spec '" + original + "'");
}

}  // namespace matnorm
