#include "hwmf/fundom.hpp"

#include <cmath>
#include <string>

namespace hwmf {

BigComplex mobius(const Sl2z& m, const BigComplex& z) {
  mpfr_prec_t p = z.precision();
  auto big = [p](long long v) {
    BigReal r(p);
    mpfr_set_si(r.raw(), v, MPFR_RNDN);
    return r;
  };
  BigComplex num(z.re * big(m.a) + big(m.b), z.im * big(m.a));
  BigComplex den(z.re * big(m.c) + big(m.d), z.im * big(m.c));
  return num / den;
}

PullbackResult pullback(const BigComplex& z, const PrecisionContext& ctx) {
  if (!z.re.is_finite() || !z.im.is_finite()) throw NumericalError("pullback: non-finite point");
  if (z.im.sign() <= 0) throw ValidationError("pullback: Im z must be positive");
  const mpfr_prec_t wp = ctx.bits;
  BigComplex w = z.rounded(wp);
  double log_im = std::fabs(std::log2(z.im.to_double()));
  long cap = static_cast<long>(10.0 * (ctx.digits + log_im));

  // Points with |w|^2 >= 1 - tol count as inside (closed domain).
  BigReal one(wp), tol(wp);
  mpfr_set_ui(one.raw(), 1, MPFR_RNDN);
  mpfr_set_ui_2exp(tol.raw(), 1, -(wp - ctx.guard_bits), MPFR_RNDN);
  BigReal limit = one - tol;

  Sl2z W = Sl2z::identity();
  BigReal n(wp), r2(wp), t(wp);
  for (long it = 0;; ++it) {
    if (it > cap) throw NumericalError("pullback: no convergence after " + std::to_string(cap) + " steps");
    mpfr_rint(n.raw(), w.re.raw(), MPFR_RNDN);
    if (!n.is_zero()) {
      w.re -= n;
      if (!mpfr_fits_slong_p(n.raw(), MPFR_RNDN)) throw ValidationError("pullback: Re z out of range");
      long long shift = mpfr_get_si(n.raw(), MPFR_RNDN);
      W = Sl2z::T(-shift) * W;
    }
    kernel::norm(r2.raw(), w, t.raw());
    if (!(r2 < limit)) break;
    // -1/w = -conj(w)/|w|^2
    w.re = -w.re / r2;
    w.im = w.im / r2;
    W = Sl2z::S() * W;
  }

  // Recompute z* = W z from the input with extra bits so rounding in the
  // loop does not accumulate.
  BigComplex z_hi = z.rounded(wp + 64);
  BigComplex z_star = mobius(W, z_hi).rounded(wp);
  return {z_star, canonical_lift(W.inverse())};
}

BigComplex automorphy_j2k(const MetaplecticElement& map, const BigComplex& z_star, const WeightParam& k,
                          const PrecisionContext& ctx) {
  if (!z_star.re.is_finite() || !z_star.im.is_finite()) throw NumericalError("automorphy_j2k: non-finite point");
  if (z_star.im.sign() <= 0) throw ValidationError("automorphy_j2k: Im z must be positive");
  BigComplex zz = z_star.rounded(ctx.bits);
  BigReal c(ctx.bits), d(ctx.bits);
  mpfr_set_si(c.raw(), map.m.c, MPFR_RNDN);
  mpfr_set_si(d.raw(), map.m.d, MPFR_RNDN);
  BigComplex w(zz.re * c + d, zz.im * c);
  BigComplex r = principal_power_halfint(w, k.twice());
  bool odd = k.twice() % 2 != 0;
  if (odd && map.sign < 0) r = -r;
  return r;
}

}  // namespace hwmf
