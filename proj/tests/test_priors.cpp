#include "matnorm/priors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace matnorm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix random_orthogonal(Stream& rng, Eigen::Index k) {
  Matrix g(k, k);
  rng.fill_normal(g);
  return Eigen::HouseholderQR<Matrix>(g).householderQ();
}

// Entrywise central second differences of pi = exp(log pi), normalized by pi(M).
double fd_laplacian_ratio(const PriorSpec& prior, const Matrix& x) {
  const double h = 1e-3 * x.norm() / std::sqrt(static_cast<double>(x.size()));
  const double centre = log_prior_density(prior, x);
  double total = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Matrix up = x, down = x;
    up.data()[k] += h;
    down.data()[k] -= h;
    total += std::exp(log_prior_density(prior, up) - centre) + std::exp(log_prior_density(prior, down) - centre) - 2.0;
  }
  return total / (h * h);
}

}  // namespace

TEST(Density, ClosedForms) {
  Stream rng(1, 0);
  const Vector s = vec({4, 2, 0.5});
  const Matrix x = random_orthogonal(rng, 6) * diag_embed(s, 6, 3) * random_orthogonal(rng, 3);
  EXPECT_EQ(log_prior_density(PriorSpec::uniform(), x), 0.0);
  EXPECT_NEAR(log_prior_density(PriorSpec::stein(), x), -8.0 * std::log(s.squaredNorm()), 1e-12);
  EXPECT_NEAR(log_prior_density(PriorSpec::svs(), x), -2.0 * std::log(4.0), 1e-12);
  // NNS alpha at (6,3) is 18 - 6 - 1 = 11
  EXPECT_NEAR(log_prior_density(PriorSpec::nns(), x), -11.0 * std::log(6.5), 1e-12);
  EXPECT_NEAR(log_prior_density(PriorSpec::matrix_norm(0.5, 2.0), x),
              -4.0 * std::log(2.0 + std::sqrt(2.0) + std::sqrt(0.5)), 1e-12);
}

TEST(Density, Singularities) {
  EXPECT_THROW(log_prior_density(PriorSpec::stein(), Matrix::Zero(5, 3)), DegenerateInput);
  EXPECT_THROW(log_prior_density(PriorSpec::nns(), Matrix::Zero(5, 3)), DegenerateInput);
  EXPECT_THROW(log_prior_density(PriorSpec::svs(), diag_embed(vec({1, 1, 0}), 5, 3)), DegenerateInput);
  EXPECT_THROW(log_prior_density(PriorSpec::svs(), Matrix::Ones(4, 3)), InvalidInput);
  EXPECT_THROW(log_prior_density(PriorSpec::matrix_norm(0.5, std::nullopt), Matrix::Ones(5, 3)), InvalidInput);
}

TEST(Density, OrthogonallyInvariant) {
  Stream rng(2, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x(6, 3);
    rng.fill_normal(x);
    const Matrix y = random_orthogonal(rng, 6) * x * random_orthogonal(rng, 3);
    for (const char* text : {"stein", "svs", "nns", "mn:p=1.5", "mn:p=0.5,alpha=3"}) {
      const auto prior = parse_prior_spec(text);
      ASSERT_NEAR(log_prior_density(prior, x), log_prior_density(prior, y), 1e-10) << text;
    }
  }
}

TEST(Superharmonic, Bounds) {
  EXPECT_DOUBLE_EQ(superharmonic_alpha_upper_bound(1.0, 5, 3), 8.0);
  EXPECT_DOUBLE_EQ(superharmonic_alpha_upper_bound(2.0, 5, 3), 13.0);
  EXPECT_DOUBLE_EQ(superharmonic_alpha_upper_bound(0.5, 3, 2), 0.5);
  EXPECT_THROW(superharmonic_alpha_upper_bound(3.0, 5, 3), InvalidInput);
}

TEST(Laplacian, SymbolicOracles) {
  // tests/oracles/sure_oracle.py
  EXPECT_NEAR(matrix_norm_prior_laplacian(1.0, 8.0, vec({3, 2, 1}), 5, 3), -5.8214364341479110569e-7, 1e-19);
  EXPECT_NEAR(matrix_norm_prior_laplacian(1.5, 4.0, vec({3, 2, 0.5}), 5, 3), -0.010734134588605174705, 1e-15);
  EXPECT_NEAR(matrix_norm_prior_laplacian(0.5, 1.0, vec({2, 1}), 3, 2), -0.0014880572784187148682, 1e-15);
}

TEST(Laplacian, SteinPriorIsHarmonic) {
  Stream rng(3, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector s = detail::random_sigma_profile(rng, 4);
    const auto r = matrix_norm_prior_laplacian_ratio(2.0, 7.0 * 4.0 - 2.0, s, 7, 4);
    ASSERT_LE(std::abs(r.value), 1e-12 * r.scale);
  }
}

TEST(Laplacian, MatchesEntrywiseFiniteDifferences) {
  Stream rng(4, 0);
  const int n = 3, m = 2;
  for (int trial = 0; trial < 100; ++trial) {
    Vector s(2);
    s(0) = 0.5 + 3.0 * rng.uniform();
    s(1) = s(0) * (0.1 + 0.8 * rng.uniform());
    const double p = 0.5 + 1.5 * rng.uniform();
    const double alpha = 0.2 + 3.0 * rng.uniform();
    const Matrix x = random_orthogonal(rng, n) * diag_embed(s, n, m) * random_orthogonal(rng, m);
    const double closed = matrix_norm_prior_laplacian_ratio(p, alpha, s, n, m).value;
    const double fd = fd_laplacian_ratio(PriorSpec::matrix_norm(p, alpha), x);
    ASSERT_NEAR(closed, fd, 1e-3 * std::abs(closed) + 1e-9) << "p=" << p << " alpha=" << alpha;
  }
}

TEST(Laplacian, GenericFormulaAgreesWithClosedForm) {
  // g(s) = (sum s^p)^(-alpha/p)
  const double p = 1.3, alpha = 2.5;
  const Vector s = vec({5, 2, 0.7});
  const double f = s.array().pow(p).sum();
  const double beta = -alpha / p;
  Vector grad(3), hess(3);
  for (int i = 0; i < 3; ++i) {
    grad(i) = beta * std::pow(f, beta - 1) * p * std::pow(s(i), p - 1);
    hess(i) = beta * (beta - 1) * std::pow(f, beta - 2) * p * p * std::pow(s(i), 2 * p - 2) +
              beta * std::pow(f, beta - 1) * p * (p - 1) * std::pow(s(i), p - 2);
  }
  EXPECT_NEAR(laplacian_singular(grad, hess, s, 6, 3), matrix_norm_prior_laplacian(p, alpha, s, 6, 3), 1e-14);
  EXPECT_THROW(laplacian_singular(grad, hess, vec({2, 2, 1}), 6, 3), DegenerateInput);
}

TEST(Scan, CleanOnBoundaryAndViolatedBeyond) {
  for (double p : {1.0, 1.5, 2.0}) {
    const double bound = superharmonic_alpha_upper_bound(p, 5, 3);
    EXPECT_EQ(scan_superharmonicity(p, bound, 5, 3, 2000, 1).violations, 0u) << p;
  }
  const auto beyond = scan_superharmonicity(1.0, superharmonic_alpha_upper_bound(1.0, 5, 3) + 1.0, 5, 3, 100, 1);
  EXPECT_GT(beyond.violations, 0u);
  EXPECT_GT(beyond.max_laplacian, 0.0);
}

TEST(Scan, ReproducibleAcrossThreadCounts) {
  const auto a = scan_superharmonicity(1.25, 9.0, 5, 3, 500, 7, 1);
  const auto b = scan_superharmonicity(1.25, 9.0, 5, 3, 500, 7, 3);
  EXPECT_EQ(a.max_laplacian, b.max_laplacian);
  EXPECT_EQ(a.evaluated, 503u);
}

TEST(Spec, ParseAndPrint) {
  EXPECT_EQ(to_string(parse_prior_spec("stein")), "stein");
  EXPECT_EQ(to_string(parse_prior_spec("jeffreys")), "uniform");
  EXPECT_EQ(to_string(parse_prior_spec("nns")), "nns");
  EXPECT_EQ(to_string(parse_prior_spec("mn:p=1")), "nns");
  EXPECT_EQ(to_string(parse_prior_spec("mn:p=0.5,alpha=1")), "mn:p=0.5,alpha=1");
  for (const char* bad : {"", "svd", "mn:p=0", "mn:p=1,alpha=-1", "mn:alpha=1"})
    EXPECT_THROW(parse_prior_spec(bad), InvalidInput) << bad;
}
