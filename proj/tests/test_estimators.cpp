#include "matnorm/estimators.hpp"
#include "matnorm/rng.hpp"

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

std::vector<EstimatorSpec> all_specs() {
  std::vector<EstimatorSpec> out;
  for (bool pp : {false, true}) {
    out.push_back(EstimatorSpec::james_stein(pp));
    out.push_back(EstimatorSpec::efron_morris(pp));
    out.push_back(EstimatorSpec::modified_efron_morris(pp));
    out.push_back(EstimatorSpec::nns(pp));
    out.push_back(EstimatorSpec::matrix_norm(1.5, std::nullopt, pp));
    out.push_back(EstimatorSpec::matrix_norm(0.5, 3.0, pp));
    out.push_back(EstimatorSpec::sure_tuned(1.0, pp));
    out.push_back(EstimatorSpec::sure_tuned(0.5, pp));
  }
  return out;
}

}  // namespace

TEST(Shrink, ClosedForms) {
  const Vector s = vec({10, 5, 1});
  const int n = 5, m = 3;
  EXPECT_LT((shrink_singular_values(EstimatorSpec::james_stein(), s, n, m) - (1.0 - 13.0 / 126.0) * s).norm(), 1e-14);
  EXPECT_LT((shrink_singular_values(EstimatorSpec::efron_morris(), s, n, m) - vec({9.9, 4.8, 0.0})).norm(), 1e-14);
  const Vector mem = shrink_singular_values(EstimatorSpec::modified_efron_morris(), s, n, m);
  EXPECT_NEAR(mem(0), 10.0 - 0.1 - 10.0 * 10.0 / 126.0, 1e-14);
  // NNS: alpha = 15 - 6 - 1 = 8, sigma_i - 8 / 16.
  EXPECT_LT((shrink_singular_values(EstimatorSpec::nns(), s, n, m) - (s.array() - 0.5).matrix()).norm(), 1e-14);
  EXPECT_EQ(shrink_singular_values(EstimatorSpec::matrix_norm(2.0, 0.0), s, n, m), s);
}

TEST(Shrink, DefaultAlpha) {
  EXPECT_DOUBLE_EQ(default_alpha(1.0, 5, 3), 8.0);
  EXPECT_DOUBLE_EQ(default_alpha(2.0, 5, 3), 13.0);
  EXPECT_DOUBLE_EQ(default_alpha(1.5, 20, 15), 300.0 - 0.25 * 240.0 - 1.5);
  EXPECT_THROW(default_alpha(0.5, 5, 3), InvalidInput);
}

TEST(Shrink, SureOptimalAlphaOracle) {
  // sympy: 157/90
  EXPECT_NEAR(sure_optimal_alpha(vec({3, 2, 1}), 1.0, 5, 3), 157.0 / 90.0, 1e-14);
  // p = 0 reduces to n - m - 1
  EXPECT_NEAR(sure_optimal_alpha(vec({7, 2, 0.3}), 0.0, 6, 3), 2.0, 1e-12);
  EXPECT_THROW(sure_optimal_alpha(vec({3, 2, 0}), 1.0, 5, 3), DegenerateInput);
}

TEST(Shrink, PositivePartIsClampedRaw) {
  Stream rng(3, 0);
  for (int trial = 0; trial < 200; ++trial) {
    Vector s(3);
    for (int i = 0; i < 3; ++i) s(i) = std::exp(4.0 * rng.uniform() - 2.0);
    std::sort(s.data(), s.data() + 3, std::greater<>());
    for (const auto& spec : all_specs()) {
      if (!spec.positive_part) continue;
      EstimatorSpec raw = spec;
      raw.positive_part = false;
      const Vector a = shrink_singular_values(spec, s, 6, 3);
      const Vector b = shrink_singular_values(raw, s, 6, 3).cwiseMax(0.0);
      ASSERT_LT((a - b).norm(), 1e-12) << to_string(spec);
    }
  }
}

TEST(Shrink, ZeroSingularValues) {
  const Vector s = vec({2, 1, 0});
  EXPECT_THROW(shrink_singular_values(EstimatorSpec::efron_morris(), s, 5, 3), DegenerateInput);
  EXPECT_THROW(shrink_singular_values(EstimatorSpec::sure_tuned(1.0), s, 5, 3), DegenerateInput);
  EXPECT_EQ(shrink_singular_values(EstimatorSpec::efron_morris(true), s, 5, 3)(2), 0.0);
  EXPECT_EQ(shrink_singular_values(EstimatorSpec::sure_tuned(1.0, true), s, 5, 3).norm(), 0.0);
  EXPECT_EQ(shrink_singular_values(EstimatorSpec::james_stein(true), Vector::Zero(3), 5, 3).norm(), 0.0);
  EXPECT_THROW(shrink_singular_values(EstimatorSpec::james_stein(), Vector::Zero(3), 5, 3), DegenerateInput);
}

TEST(Shrink, InvalidInputs) {
  EXPECT_THROW(EstimatorSpec::matrix_norm(-1.0, std::nullopt), InvalidInput);
  EXPECT_THROW(EstimatorSpec::sure_tuned(1.5), InvalidInput);
  EXPECT_THROW(shrink_singular_values(EstimatorSpec::efron_morris(), vec({2, 1}), 3, 2), InvalidInput);
  EXPECT_THROW(shrink_singular_values(EstimatorSpec::nns(), vec({1, 2, 3}), 5, 3), InvalidInput);
  EXPECT_THROW(shrink_singular_values(EstimatorSpec::nns(), vec({3, 2}), 5, 3), InvalidInput);
}

TEST(Apply, OrthogonallyEquivariant) {
  Stream rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x(7, 4);
    rng.fill_normal(x);
    x *= 3.0;
    const Matrix p = random_orthogonal(rng, 7), q = random_orthogonal(rng, 4);
    for (const auto& spec : all_specs()) {
      const Matrix lhs = apply_estimator(spec, Matrix(p * x * q));
      const Matrix rhs = p * apply_estimator(spec, x) * q;
      ASSERT_LT((lhs - rhs).norm(), 1e-10 * (1.0 + rhs.norm())) << to_string(spec);
    }
  }
}

TEST(Apply, ShrinksTowardZeroInNorm) {
  Stream rng(12, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x(6, 3);
    rng.fill_normal(x);
    for (const auto& spec : all_specs()) {
      if (!spec.positive_part) continue;
      ASSERT_LE(apply_estimator(spec, x).norm(), x.norm() * (1 + 1e-12)) << to_string(spec);
    }
  }
}

TEST(Spec, RoundTrip) {
  for (const auto& spec : all_specs()) {
    const auto text = to_string(spec);
    EXPECT_EQ(to_string(parse_estimator_spec(text)), text);
  }
  EXPECT_EQ(to_string(parse_estimator_spec(" mn:p=1.5,alpha=2 ")), "mn:p=1.5,alpha=2");
  EXPECT_EQ(to_string(parse_estimator_spec("mn:p=1")), "nns");
  for (const char* bad : {"", "foo", "mn:", "mn:p=x", "sure:p=2", "mn:p=1,beta=2", "js++"})
    EXPECT_THROW(parse_estimator_spec(bad), InvalidInput) << bad;
}
