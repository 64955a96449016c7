#include "matnorm/inequalities.hpp"

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

}  // namespace

TEST(Lemmas, RatioMonotoneHandValues) {
  // r(x) = (x - 1)/(x^2 - 1) = 1/(x + 1) for p = 1.
  const auto above = check_ratio_monotone(1.0, 2.0, 3.0);
  EXPECT_DOUBLE_EQ(above.lhs, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(above.rhs, 0.25);
  EXPECT_TRUE(above.holds);
  EXPECT_TRUE(check_ratio_monotone(0.5, 0.1, 0.9).holds);
  // p = 2 makes r constant, the equality case.
  const auto flat = check_ratio_monotone(2.0, 1.5, 7.0);
  EXPECT_TRUE(flat.holds);
  EXPECT_NEAR(flat.margin, 0.0, 1e-15);
  EXPECT_THROW(check_ratio_monotone(1.0, 0.5, 2.0), InvalidInput);
  EXPECT_THROW(check_ratio_monotone(1.0, 3.0, 2.0), InvalidInput);
}

TEST(Lemmas, PowerMeanBound) {
  // p = 1: (si^2 - sj^2)/(si^2 - sj^2) = 1 = (1/2)(1 + 1).
  const auto eq = check_power_mean_bound(1.0, 3.0, 2.0);
  EXPECT_NEAR(eq.margin, 0.0, 1e-15);
  EXPECT_TRUE(eq.holds);
  const auto r = check_power_mean_bound(1.5, 4.0, 1.0);
  EXPECT_NEAR(r.lhs, (64.0 - 1.0) / 15.0, 1e-14);
  EXPECT_NEAR(r.rhs, 0.75 * (4.0 + 1.0), 1e-14);
  EXPECT_TRUE(r.holds);
  EXPECT_THROW(check_power_mean_bound(0.5, 2.0, 1.0), InvalidInput);
  EXPECT_THROW(check_power_mean_bound(1.5, 2.0, 2.0), InvalidInput);
}

TEST(Lemmas, ChebyshevSumDetectsViolation) {
  EXPECT_TRUE(check_chebyshev_sum(vec({3, 2, 1}), vec({1, 2, 3})).holds);
  const auto r = check_chebyshev_sum(vec({3, 2, 1}), vec({1, 2, 3}));
  EXPECT_DOUBLE_EQ(r.lhs, 36.0);
  EXPECT_DOUBLE_EQ(r.rhs, 30.0);
  // Same ordering of a and b reverses the inequality; the precondition guards it.
  EXPECT_THROW(check_chebyshev_sum(vec({3, 2, 1}), vec({3, 2, 1})), InvalidInput);
  EXPECT_TRUE(check_chebyshev_sum(vec({2, 2}), vec({5, 5})).holds);
}

TEST(Lemmas, CrossTermAndMainBound) {
  const Vector s = vec({3, 2, 1});
  const auto cross = check_cross_term_bound(1.0, s);
  // D(.,.;1) = 1/(a+b): 1/5 + 1/4 + 1/3; D(.,.;2) = 1.
  EXPECT_NEAR(cross.lhs, 6.0 * (1.0 / 5 + 1.0 / 4 + 1.0 / 3), 1e-14);
  EXPECT_NEAR(cross.rhs, 1.5 * 3.0, 1e-14);
  EXPECT_TRUE(cross.holds);
  const auto main = check_main_bound(1.0, s);
  EXPECT_NEAR(main.rhs, 0.25 * 3 * 2 * 3, 1e-14);
  EXPECT_TRUE(main.holds);
  EXPECT_THROW(check_main_bound(1.0, vec({1, 2})), InvalidInput);
  EXPECT_THROW(check_cross_term_bound(1.0, vec({2, 2})), InvalidInput);
  EXPECT_THROW(check_main_bound(0.5, s), InvalidInput);
}

TEST(Lemmas, ToleranceIsRelative) {
  // A violation well inside the rounding scale of a huge value still holds.
  const auto tiny = detail::lemma_result(1e20, 1e20 + 1e7, -1e7);
  EXPECT_TRUE(tiny.holds);
  const auto real = detail::lemma_result(1.0, 1.1, -0.1);
  EXPECT_FALSE(real.holds);
}

TEST(Fuzz, CleanAndReproducible) {
  const auto a = fuzz_all(20000, 3, 1);
  EXPECT_TRUE(a.clean());
  for (const auto& l : a.lemmas) {
    EXPECT_EQ(l.passed, 20000u) << l.name;
    EXPECT_GE(l.worst_relative_margin, -kLemmaTolerance) << l.name;
  }
  const auto b = fuzz_all(20000, 3, 3);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(a.lemmas[i].worst_relative_margin, b.lemmas[i].worst_relative_margin);
}

TEST(Fuzz, NearTiesClean) {
  const auto r = fuzz_near_ties(20000, 4);
  EXPECT_TRUE(r.clean());
}
