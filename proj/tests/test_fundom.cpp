#include <cmath>
#include <random>

#include "doctest.h"
#include "hwmf/fundom.hpp"
#include "oracles.hpp"

using namespace hwmf;

namespace {

const PrecisionContext kCtx = make_context(28);

BigComplex cz(double re, double im) { return BigComplex(BigReal(kCtx, re), BigReal(kCtx, im)); }

BigComplex cz(const char* re, const char* im) {
  return BigComplex(BigReal::parse(kCtx, re), BigReal::parse(kCtx, im));
}

bool in_closed_F(const BigComplex& z, const PrecisionContext& ctx) {
  double slack = std::pow(2.0, -ctx.digits / 2.0);
  double re = std::fabs(z.re.to_double());
  double r = std::sqrt(norm(z).to_double());
  return re <= 0.5 + slack && r >= 1 - slack && z.im.sign() > 0;
}

}  // namespace

TEST_CASE("pullback examples") {
  auto r = pullback(cz(0.0, 1.0), kCtx);
  CHECK(r.map == canonical_lift(Sl2z::identity()));
  CHECK(oracle::abs_err(r.z_star, cz(0.0, 1.0)) == 0.0);

  auto z = cz("1/10", "1/5");
  r = pullback(z, kCtx);
  CHECK(oracle::abs_err(r.z_star, cz(0.0, 4.0)) < 1e-26);
  // z* = T^2 S z, so the map is (T^2 S)^{-1}.
  CHECK(r.map == canonical_lift((Sl2z::T(2) * Sl2z::S()).inverse()));

  auto tau0 = cz("1/10", "2");
  r = pullback(tau0 + cz(5.0, 0.0), kCtx);
  CHECK(oracle::abs_err(r.z_star, tau0) < 1e-26);
  CHECK(r.map == canonical_lift(Sl2z::T(5)));

  CHECK_THROWS_AS(pullback(cz(0.3, -1.0), kCtx), ValidationError);
}

TEST_CASE("pullback round trip on 1000 random points") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> re(-5, 5), lg(-4, 1);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    BigComplex z = cz(re(rng), std::pow(10.0, lg(rng)));
    auto r = pullback(z, kCtx);
    CHECK(in_closed_F(r.z_star, kCtx));
    CHECK(r.map.sign == 1);
    BigComplex back = mobius(r.map.m, r.z_star);
    double err = oracle::abs_err(back, z) / std::max(1.0, std::sqrt(norm(z).to_double()));
    worst = std::max(worst, err);
    CHECK(r.z_star.im.to_double() >= z.im.to_double() - std::pow(2.0, -kCtx.digits / 2.0));
  }
  CHECK(worst < std::pow(10.0, -kCtx.digits + 6));
}

TEST_CASE("automorphy factor") {
  WeightParam half = WeightParam::parse("1/2");
  BigComplex z = cz(0.2, 1.3);
  auto one = automorphy_j2k(canonical_lift(Sl2z::identity()), z, half, kCtx);
  CHECK(oracle::abs_err(one, cz(1.0, 0.0)) < 1e-27);

  auto js = automorphy_j2k(canonical_lift(Sl2z::S()), cz(0.0, 1.0), half, kCtx);
  CHECK(oracle::abs_err(js, unit_circle_exp_ratio(kCtx.bits, 1, 8)) < 1e-27);

  // sign -1 flips the factor for half-integral weight only
  MetaplecticElement neg{Sl2z::S(), -1};
  CHECK(oracle::abs_err(automorphy_j2k(neg, cz(0.0, 1.0), half, kCtx), -js) < 1e-27);
  CHECK(oracle::abs_err(automorphy_j2k(neg, cz(0.0, 1.0), WeightParam::parse("2"), kCtx),
                        automorphy_j2k(canonical_lift(Sl2z::S()), cz(0.0, 1.0), WeightParam::parse("2"), kCtx)) ==
        0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5), v(0.8, 3);
  std::uniform_int_distribution<int> tk(-7, 7);
  for (int i = 0; i < 50; ++i) {
    Sl2z m = Sl2z::T(tk(rng)) * Sl2z::S() * Sl2z::T(tk(rng)) * Sl2z::S();
    int twice = tk(rng);
    WeightParam k = WeightParam::from_twice(twice);
    BigComplex zz = cz(u(rng), v(rng));
    auto f = automorphy_j2k(canonical_lift(m), zz, k, kCtx);
    BigComplex w(zz.re * BigReal(kCtx, static_cast<long>(m.c)) + BigReal(kCtx, static_cast<long>(m.d)),
                 zz.im * BigReal(kCtx, static_cast<long>(m.c)));
    // |phi^{2k}|^2 = |cz + d|^{2k}
    BigReal lhs = norm(f);
    BigReal rhs(kCtx);
    mpfr_pow_si(rhs.raw(), abs(w).raw(), twice, MPFR_RNDN);
    CHECK(oracle::rel_err(lhs, rhs) < 1e-25);
  }
}
