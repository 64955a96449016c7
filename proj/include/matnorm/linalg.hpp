#pragma once

// Dense matrices, thin SVD and the norms used throughout.
//
// Convention: X = U diag(s) V^T with U n x m, V m x m, s non-increasing.

#include "matnorm/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace matnorm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SvdFactors {
  Matrix u;  // n x m, orthonormal columns
  Vector s;  // length m, non-increasing, >= 0
  Matrix v;  // m x m, orthogonal
};

inline void require_finite(const Matrix& x, const char* who) {
  if (!x.allFinite()) throw InvalidInput(std::string(who) + ": matrix has non-finite entries");
}

inline void require_tall(const Matrix& x, const char* who) {
  if (x.rows() < 1 || x.cols() < 1)
    throw InvalidInput(std::string(who) + ": matrix must be non-empty");
  if (x.rows() < x.cols())
    throw InvalidInput(std::string(who) + ": expected n >= m, got " + std::to_string(x.rows()) +
                       "x" + std::to_string(x.cols()));
}

namespace detail {

inline constexpr int kMaxJacobiSweeps = 60;

// Hestenes one-sided Jacobi: rotates column pairs of `a` until all pairs are
// numerically orthogonal. When `v` is non-null the same rotations are
// accumulated into it. Returns the number of sweeps used.
inline int orthogonalize_columns(Matrix& a, Matrix* v) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  constexpr double tol = 4.0 * std::numeric_limits<double>::epsilon();

  for (int sweep = 1; sweep <= kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < cols; ++i) {
      for (Eigen::Index j = i + 1; j < cols; ++j) {
        double* ci = a.col(i).data();
        double* cj = a.col(j).data();
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (Eigen::Index k = 0; k < rows; ++k) {
          alpha += ci[k] * ci[k];
          beta += cj[k] * cj[k];
          gamma += ci[k] * cj[k];
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (Eigen::Index k = 0; k < rows; ++k) {
          const double x = ci[k], y = cj[k];
          ci[k] = c * x - s * y;
          cj[k] = s * x + c * y;
        }
        if (v != nullptr) {
          double* vi = v->col(i).data();
          double* vj = v->col(j).data();
          for (Eigen::Index k = 0; k < v->rows(); ++k) {
            const double x = vi[k], y = vj[k];
            vi[k] = c * x - s * y;
            vj[k] = s * x + c * y;
          }
        }
      }
    }
    if (!rotated) return sweep;
  }
  throw NumericalFailure("svd: one-sided Jacobi did not converge", kMaxJacobiSweeps);
}

// Square factor whose singular values (and right vectors) match those of x.
// For tall x this is the R of a Householder QR; `q` receives the thin Q.
inline Matrix square_factor(const Matrix& x, Matrix* q) {
  const Eigen::Index n = x.rows(), m = x.cols();
  if (n == m) {
    if (q != nullptr) *q = Matrix::Identity(n, m);
    return x;
  }
  Eigen::HouseholderQR<Matrix> qr(x);
  if (q != nullptr) *q = qr.householderQ() * Matrix::Identity(n, m);
  return qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
}

inline std::vector<Eigen::Index> descending_order(const Vector& s) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(s.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return s(a) > s(b); });
  return order;
}

}  // namespace detail

/// Thin SVD by QR preconditioning followed by one-sided Jacobi on the
/// square factor. Singular values are not truncated.
inline SvdFactors svd(const Matrix& x) {
  require_tall(x, "svd");
  require_finite(x, "svd");
  const Eigen::Index m = x.cols();

  Matrix q;
  Matrix w = detail::square_factor(x, &q);
  Matrix v = Matrix::Identity(m, m);
  detail::orthogonalize_columns(w, &v);

  Vector norms = w.colwise().norm().transpose();
  const auto order = detail::descending_order(norms);

  SvdFactors out{Matrix(m, m), Vector(m), Matrix(m, m)};
  Matrix& ur = out.u;  // left vectors of the square factor; mapped through q below
  const double top = norms(order.front());
  const double negligible = top * static_cast<double>(m) * std::numeric_limits<double>::epsilon();
  std::vector<Eigen::Index> null_columns;
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.s(k) = norms(src);
    out.v.col(k) = v.col(src);
    if (norms(src) > negligible && norms(src) > 0.0) {
      ur.col(k) = w.col(src) / norms(src);
    } else {
      null_columns.push_back(k);
    }
  }

  // Complete the basis for numerically-null directions by Gram-Schmidt
  // (applied twice) against the columns already fixed.
  std::vector<bool> fixed(static_cast<std::size_t>(m), true);
  for (Eigen::Index k : null_columns) fixed[static_cast<std::size_t>(k)] = false;
  for (Eigen::Index k : null_columns) {
    Vector best;
    double best_norm = -1.0;
    for (Eigen::Index e = 0; e < m; ++e) {
      Vector cand = Vector::Unit(m, e);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j < m; ++j)
          if (fixed[static_cast<std::size_t>(j)]) cand -= ur.col(j).dot(cand) * ur.col(j);
      const double nrm = cand.norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = cand;
      }
    }
    ur.col(k) = best / best_norm;
    fixed[static_cast<std::size_t>(k)] = true;
  }

  out.u = q * ur;
  return out;
}

/// Singular values only, non-increasing.
inline Vector singular_values(const Matrix& x) {
  require_tall(x, "singular_values");
  require_finite(x, "singular_values");
  Matrix w = detail::square_factor(x, nullptr);
  detail::orthogonalize_columns(w, nullptr);
  Vector s = w.colwise().norm().transpose();
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

inline Matrix reconstruct(const Matrix& u, const Vector& s, const Matrix& v) {
  if (u.cols() != s.size() || v.cols() != s.size() || v.rows() != s.size())
    throw InvalidInput("reconstruct: inconsistent factor shapes");
  return u * s.asDiagonal() * v.transpose();
}

inline Matrix reconstruct(const SvdFactors& f) { return reconstruct(f.u, f.s, f.v); }

inline double frobenius_distance_sq(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInput("frobenius_distance_sq: shape mismatch");
  return (a - b).squaredNorm();
}

/// (sum_i s_i^p)^(1/p), evaluated relative to the largest value so that large
/// or tiny magnitudes do not overflow.
inline double schatten_norm_of(const Vector& s, double p) {
  if (!(p > 0.0)) throw InvalidInput("schatten_norm: p must be positive");
  const double top = s.size() > 0 ? s.maxCoeff() : 0.0;
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / top, p);
  return top * std::pow(acc, 1.0 / p);
}

inline double schatten_norm(const Matrix& x, double p) {
  if (!(p > 0.0)) throw InvalidInput("schatten_norm: p must be positive");
  return schatten_norm_of(singular_values(x), p);
}

/// n x m zero matrix with `values` on the leading diagonal.
inline Matrix diag_embed(const Vector& values, Eigen::Index n, Eigen::Index m) {
  if (values.size() != m || n < m) throw InvalidInput("diag_embed: expected m values with n >= m");
  Matrix out = Matrix::Zero(n, m);
  for (Eigen::Index i = 0; i < m; ++i) out(i, i) = values(i);
  return out;
}

}  // namespace matnorm
