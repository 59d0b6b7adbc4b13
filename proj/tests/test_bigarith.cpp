#include <random>

#include "doctest.h"
#include "hwmf/bigarith.hpp"
#include "oracles.hpp"

using namespace hwmf;

namespace {
double ulp(const PrecisionContext& ctx) { return std::ldexp(1.0, -static_cast<int>(ctx.bits)); }
}  // namespace

TEST_CASE("make_context") {
  CHECK(make_context(40).bits >= 133 + 32);
  CHECK(make_context(20).bits >= 67);
  CHECK(make_context(28).bits == 126);
  CHECK_THROWS_AS(make_context(10), ValidationError);
  CHECK(make_context(30) == make_context(30));
}

TEST_CASE("precision mixing is rejected") {
  BigReal a(make_context(28), 1L), b(make_context(40), 1L);
  CHECK_THROWS_AS(a + b, std::logic_error);
}

TEST_CASE("decimal round trip is bit-identical") {
  auto ctx = make_context(28);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 200; ++i) {
    BigReal x = exp(BigReal(ctx, u(rng))) / BigReal(ctx, 3L);
    if (i % 2) x = -x;
    BigReal y = BigReal::parse(ctx, x.to_string());
    CHECK(mpfr_equal_p(x.raw(), y.raw()));
  }
  CHECK(BigReal::parse(ctx, "0").is_zero());
  CHECK(BigReal::parse(ctx, "1/3") == BigReal(ctx, 1L) / BigReal(ctx, 3L));
  CHECK(BigReal::parse(ctx, "-5/10").to_double() == -0.5);
  CHECK(BigReal::parse(ctx, "1e-25").to_double() == doctest::Approx(1e-25));
  CHECK_THROWS_AS(BigReal::parse(ctx, "abc"), ValidationError);
  CHECK_THROWS_AS(BigReal::parse(ctx, "1/0"), ValidationError);
}

TEST_CASE("large precision uses heap storage correctly") {
  auto ctx = make_context(200);
  BigReal a = sqrt(BigReal(ctx, 2L));
  BigReal b = a;
  BigReal c = std::move(a);
  CHECK(b == c);
  std::vector<BigReal> v(5, c);
  v.push_back(b * b);
  CHECK(oracle::rel_err(v.back(), BigReal(ctx, 2L)) < 1e-190);
}

TEST_CASE("unit_circle_exp examples") {
  auto ctx = make_context(28);
  BigComplex z0 = unit_circle_exp(BigReal(ctx, 0L));
  CHECK(z0.re.to_double() == 1.0);
  CHECK(z0.im.is_zero());
  BigComplex q = unit_circle_exp(BigReal::parse(ctx, "1/4"));
  CHECK(q.re.is_zero());
  CHECK(q.im.to_double() == 1.0);
  BigComplex t = unit_circle_exp(BigReal::parse(ctx, "1/3"));
  BigComplex expect(BigReal(ctx, -0.5), sqrt(BigReal(ctx, 3L)) / BigReal(ctx, 2L));
  CHECK(oracle::abs_err(t, expect) < 4 * ulp(ctx));
  // e(-7/3) = e(2/3) = conj(e(1/3))
  CHECK(oracle::abs_err(unit_circle_exp_ratio(ctx.bits, -7, 3), conj(expect)) < 4 * ulp(ctx));
}

TEST_CASE("unit_circle_exp is a character") {
  auto ctx = make_context(28);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 500; ++i) {
    BigReal a(ctx, u(rng)), b(ctx, u(rng));
    BigComplex lhs = unit_circle_exp(a) * unit_circle_exp(b);
    BigComplex rhs = unit_circle_exp(a + b);
    CHECK(oracle::abs_err(lhs, rhs) <= 4 * ulp(ctx));
    CHECK(std::fabs(abs(lhs).to_double() - 1.0) <= 4 * ulp(ctx));
  }
}

TEST_CASE("principal_power_halfint") {
  auto ctx = make_context(28);
  BigComplex one(BigReal(ctx, 1L));
  CHECK(oracle::abs_err(principal_power_halfint(one, 7), one) == 0.0);
  BigComplex i(BigReal(ctx, 0L), BigReal(ctx, 1L));
  BigReal r = sqrt(BigReal(ctx, 2L)) / BigReal(ctx, 2L);
  CHECK(oracle::abs_err(principal_power_halfint(i, 1), BigComplex(r, r)) < 4 * ulp(ctx));
  BigComplex m1(BigReal(ctx, -1L));
  CHECK(oracle::abs_err(principal_power_halfint(m1, 1), i) < 4 * ulp(ctx));
  // -1 - 0i still sits on the branch cut with argument +pi.
  BigComplex m1neg(BigReal(ctx, -1L), -BigReal(ctx, 0L));
  CHECK(oracle::abs_err(principal_power_halfint(m1neg, 1), i) < 4 * ulp(ctx));
  CHECK_THROWS_AS(principal_power_halfint(BigComplex(ctx), 1), ValidationError);
  // k = -1/2 is the reciprocal square root.
  BigComplex w(BigReal(ctx, 3L), BigReal(ctx, -4L));
  BigComplex s = principal_power_halfint(w, 1), t = principal_power_halfint(w, -1);
  CHECK(oracle::abs_err(s * t, one) < 8 * ulp(ctx));
}

TEST_CASE("square root squares back") {
  auto ctx = make_context(28);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 500; ++i) {
    BigComplex w(BigReal(ctx, u(rng)), BigReal(ctx, u(rng)));
    if (w.im.is_zero() && w.re.sign() < 0) continue;
    BigComplex s = principal_power_halfint(w, 1);
    BigComplex sq = s * s;
    CHECK(oracle::abs_err(sq, w) <= 4 * ulp(ctx) * abs(w).to_double());
    CHECK(s.re.sign() >= 0);
  }
}

TEST_CASE("arg convention") {
  auto ctx = make_context(28);
  BigComplex z(BigReal(ctx, -2L), BigReal(ctx, 0L));
  CHECK(arg(z) == pi(ctx.bits));
  BigComplex w(BigReal(ctx, -2L), BigReal(ctx, -1e-30));
  CHECK(arg(w).to_double() < 0);
  CHECK_THROWS_AS(arg(BigComplex(ctx)), NumericalError);
}

TEST_CASE("determinism") {
  auto ctx = make_context(30);
  BigReal f = BigReal::parse(ctx, "0.123456789");
  BigComplex a = unit_circle_exp(f), b = unit_circle_exp(f);
  CHECK(a == b);
}
