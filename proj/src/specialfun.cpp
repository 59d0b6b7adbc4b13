#include "hwmf/specialfun.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace hwmf {

WeightParam WeightParam::parse(std::string_view text) {
  std::string s(text);
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      long p = std::stol(s.substr(0, slash));
      long q = std::stol(s.substr(slash + 1));
      if (q == 1) return WeightParam(static_cast<int>(2 * p));
      if (q == 2) return WeightParam(static_cast<int>(p));
      if (q == -2) return WeightParam(static_cast<int>(-p));
    } else {
      double d = std::stod(s);
      double twice = 2 * d;
      if (twice == std::round(twice)) return WeightParam(static_cast<int>(twice));
    }
  } catch (const std::logic_error&) {
  }
  throw ValidationError("weight must be an integer or half-integer, got '" + s + "'");
}

std::string WeightParam::to_string() const {
  if (twice_k_ % 2 == 0) return std::to_string(twice_k_ / 2);
  return std::to_string(twice_k_) + "/2";
}

namespace {

// Below this argument the lower series is used, above it the continued fraction.
double series_limit(const PrecisionContext& ctx) {
  return std::max(30.0, ctx.digits * std::log(10.0) / 2);
}

mpfr_prec_t bit_length(double x) { return x > 1 ? static_cast<mpfr_prec_t>(std::ceil(std::log2(x))) : 0; }

// x^(twice_b/2)
BigReal half_power(const BigReal& sqrt_x, int twice_b) { return pow_si(sqrt_x, twice_b); }

// e^x Gamma(a, x) by the Legendre continued fraction (modified Lentz).
BigReal scaled_gamma_cf(int twice_a, const BigReal& x, mpfr_prec_t wp) {
  BigReal xx = x.rounded(wp);
  BigReal a = ratio(wp, twice_a, 2);
  BigReal tiny(wp);
  mpfr_set_ui_2exp(tiny.raw(), 1, -4 * wp, MPFR_RNDN);
  BigReal tol(wp);
  mpfr_set_ui_2exp(tol.raw(), 1, -wp + 2, MPFR_RNDN);

  BigReal one(wp);
  mpfr_set_ui(one.raw(), 1, MPFR_RNDN);
  BigReal f = xx + one - a;  // b_0
  if (f.is_zero()) f = tiny;
  BigReal C = f, D(wp), bj(wp), aj(wp), delta(wp), t(wp);
  for (long j = 1;; ++j) {
    if (j > 200000) throw NumericalError("incomplete gamma continued fraction did not converge");
    // a_j = -j (j - a), b_j = x + 2j + 1 - a
    mpfr_set_si(t.raw(), j, MPFR_RNDN);
    mpfr_sub(aj.raw(), t.raw(), a.raw(), MPFR_RNDN);
    mpfr_mul_si(aj.raw(), aj.raw(), -j, MPFR_RNDN);
    mpfr_add_si(bj.raw(), xx.raw(), 2 * j + 1, MPFR_RNDN);
    mpfr_sub(bj.raw(), bj.raw(), a.raw(), MPFR_RNDN);

    mpfr_mul(D.raw(), aj.raw(), D.raw(), MPFR_RNDN);
    mpfr_add(D.raw(), D.raw(), bj.raw(), MPFR_RNDN);
    if (D.is_zero()) D = tiny;
    mpfr_div(t.raw(), aj.raw(), C.raw(), MPFR_RNDN);
    mpfr_add(C.raw(), bj.raw(), t.raw(), MPFR_RNDN);
    if (C.is_zero()) C = tiny;
    mpfr_ui_div(D.raw(), 1, D.raw(), MPFR_RNDN);
    mpfr_mul(delta.raw(), C.raw(), D.raw(), MPFR_RNDN);
    mpfr_mul(f.raw(), f.raw(), delta.raw(), MPFR_RNDN);
    mpfr_sub_ui(t.raw(), delta.raw(), 1, MPFR_RNDN);
    mpfr_abs(t.raw(), t.raw(), MPFR_RNDN);
    if (t < tol) break;
  }
  BigReal sx = sqrt(xx);
  return half_power(sx, twice_a) / f;
}

// e^x Gamma(1/2, x) from the lower series: sqrt(pi) e^x - 2 sqrt(x) sum (2x)^n / (2n+1)!!.
BigReal scaled_gamma_half_series(const BigReal& x, mpfr_prec_t wp) {
  BigReal xx = x.rounded(wp);
  BigReal two_x = xx * 2L;
  BigReal term(wp), sum(wp), tol(wp);
  mpfr_set_ui(term.raw(), 1, MPFR_RNDN);
  mpfr_set_ui(sum.raw(), 1, MPFR_RNDN);
  for (long n = 1;; ++n) {
    if (n > 1000000) throw NumericalError("incomplete gamma series did not converge");
    mpfr_mul(term.raw(), term.raw(), two_x.raw(), MPFR_RNDN);
    mpfr_div_si(term.raw(), term.raw(), 2 * n + 1, MPFR_RNDN);
    mpfr_add(sum.raw(), sum.raw(), term.raw(), MPFR_RNDN);
    if (static_cast<double>(n) > 2 * xx.to_double() + 2) {
      mpfr_mul_2si(tol.raw(), sum.raw(), -wp - 2, MPFR_RNDN);
      if (term < tol) break;
    }
  }
  BigReal lead = sqrt(pi(wp)) * exp(xx);
  BigReal tail = sqrt(xx) * sum * 2L;
  return lead - tail;
}

// e^x Gamma(a, x) at (at least) `target` bits, x > 0.
BigReal scaled_gamma(int twice_a, const BigReal& x, mpfr_prec_t target, const PrecisionContext& ctx) {
  double xd = x.to_double();
  if (xd > series_limit(ctx)) return scaled_gamma_cf(twice_a, x, target + 16 + bit_length(xd));
  int steps = std::abs(twice_a - 1) / 2;
  mpfr_prec_t wp = target + 24 + static_cast<mpfr_prec_t>(std::ceil(xd * 1.4427)) +
                   steps * (bit_length(series_limit(ctx)) + 3);
  BigReal g = scaled_gamma_half_series(x, wp);
  BigReal xx = x.rounded(wp);
  BigReal sx = sqrt(xx);
  if (twice_a > 1) {
    for (int tb = 1; tb < twice_a; tb += 2) {  // G(b+1) = b G(b) + x^b
      g *= ratio(wp, tb, 2);
      g += half_power(sx, tb);
    }
  } else {
    for (int tb = -1; tb >= twice_a; tb -= 2) {  // G(b) = (G(b+1) - x^b) / b
      g -= half_power(sx, tb);
      g /= ratio(wp, tb, 2);
    }
  }
  return g;
}

}  // namespace

BigReal erfc_big(const BigReal& x, const PrecisionContext& ctx) {
  x.require_finite("erfc_big");
  if (x.is_zero()) return BigReal(ctx, 1L);
  if (x.sign() < 0) {
    PrecisionContext w = widened(ctx, 8);
    BigReal r = BigReal(w, 2L) - erfc_big((-x).rounded(w.bits), w);
    return r.rounded(ctx.bits);
  }
  mpfr_exp_t e = mpfr_get_exp(x.raw());
  mpfr_prec_t wp = ctx.bits + 16 + 2 * (e > 0 ? e : 0);
  BigReal xx = x.rounded(wp);
  BigReal t = xx * xx;
  BigReal g = scaled_gamma(1, t, wp, ctx).rounded(wp);
  BigReal r = exp(-t) * g / sqrt(pi(wp));
  return r.rounded(ctx.bits);
}

BigReal upper_gamma_halfint(int twice_a, const BigReal& x, const PrecisionContext& ctx) {
  if (twice_a % 2 == 0) throw ValidationError("upper_gamma_halfint: a must be a half-integer");
  x.require_finite("upper_gamma_halfint");
  if (x.sign() < 0) throw ValidationError("upper_gamma_halfint: x < 0");
  if (x.is_zero()) {
    if (twice_a < 0) throw ValidationError("upper_gamma_halfint: Gamma(a, 0) diverges for a <= 0");
    BigReal a = ratio(ctx.bits + 8, twice_a, 2), r(ctx.bits + 8);
    mpfr_gamma(r.raw(), a.raw(), MPFR_RNDN);
    return r.rounded(ctx.bits);
  }
  mpfr_exp_t e = mpfr_get_exp(x.raw());
  mpfr_prec_t wp = ctx.bits + 16 + (e > 0 ? e : 0);
  BigReal g = scaled_gamma(twice_a, x, wp, ctx);
  BigReal xx = x.rounded(g.precision());
  return (exp(-xx) * g).rounded(ctx.bits);
}

BigReal w_kernel(const WeightParam& k, const BigReal& v, const PrecisionContext& ctx) {
  v.require_finite("w_kernel");
  if (v.is_zero()) throw ValidationError("w_kernel: v = 0");
  mpfr_exp_t e = mpfr_get_exp(v.raw());
  mpfr_prec_t wp = ctx.bits + 24 + (e > 0 ? e : 0);
  BigReal vv = v.rounded(wp);
  BigReal two_pi = pi(wp) * 2L;
  if (v.sign() > 0) return exp(-(two_pi * vv)).rounded(ctx.bits);
  if (!k.half_integral()) throw ValidationError("w_kernel: v < 0 needs half-integral weight");
  // W(v) = e^{-x/2} [e^x Gamma(1-k, x)] with x = 4 pi |v|.
  BigReal x = two_pi * abs(vv) * 2L;
  BigReal g = scaled_gamma(2 - k.twice(), x, wp, ctx);
  BigReal half_x = x.rounded(g.precision());
  mpfr_div_2ui(half_x.raw(), half_x.raw(), 1, MPFR_RNDN);
  return (exp(-half_x) * g).rounded(ctx.bits);
}

BigReal w_kernel_bound(const WeightParam& k, const BigReal& v) {
  v.require_finite("w_kernel_bound");
  if (v.is_zero()) throw ValidationError("w_kernel_bound: v = 0");
  mpfr_prec_t p = v.precision();
  BigReal one(p);
  mpfr_set_ui(one.raw(), 1, MPFR_RNDN);
  BigReal ck = one, g(p);
  BigReal a = one - k.value(p);
  mpfr_gamma(g.raw(), a.raw(), MPFR_RNDN);
  if (g.is_finite() && one < g) ck = g;
  // Absorbs the rounding of this evaluation so the bound also holds numerically.
  BigReal slack(p);
  mpfr_set_ui_2exp(slack.raw(), 1, -p + 8, MPFR_RNDN);
  ck *= one + slack;
  BigReal x = pi(p) * abs(v) * 4L;
  BigReal half_x = x;
  mpfr_div_2ui(half_x.raw(), half_x.raw(), 1, MPFR_RNDN);
  BigReal decay = exp(-half_x);  // e^{-2 pi |v|}
  if (v.sign() > 0) return ck * decay;
  BigReal mk = -k.value(p), xp(p);
  mpfr_pow(xp.raw(), x.raw(), mk.raw(), MPFR_RNDN);
  if (k.twice() >= 0) return ck * decay * xp;
  // k < 0: Gamma(a,x) <= 2^{max(0,a-2)} (x^{a-1} + Gamma(a)) e^{-x}.
  BigReal two_pow(p), ex = max(one, mk);
  mpfr_ui_pow(two_pow.raw(), 2, ex.raw(), MPFR_RNDN);
  return ck * two_pow * decay * max(one, xp);
}

namespace {

// Suffix sums of the modeled per-index tail terms at height y; the series is
// summed until both exponents are below log_floor past the peak.
std::vector<long double> tail_suffix(int N, const WeightParam& k, int K, long double y, long double log_floor) {
  const long double pi_l = 3.141592653589793238462643383279502884L;
  const long double four_n = 4.0L * N;
  const long double C = std::sqrt(static_cast<long double>(K)) / four_n;
  const long double kk = k.to_double();
  long double log_ck = 0;
  if (1 - kk > 0) log_ck = std::max(0.0L, std::lgamma(1 - kk));
  auto log_term = [&](long double n) {
    long double v = n * y / four_n;
    long double holo = 4 * pi_l * C * std::sqrt(n) - 2 * pi_l * v;
    long double x = 4 * pi_l * v;
    long double nonholo = kk / 2 * std::log(n) + log_ck - 2 * pi_l * v;
    if (kk >= 0)
      nonholo -= kk * std::log(x);
    else
      nonholo += std::max(1.0L, -kk) * std::log(2.0L) + std::max(0.0L, -kk * std::log(x));
    return std::pair{holo, nonholo};
  };
  // Both exponents are unimodal in n; sum far past the peak.
  const long double peak = std::max<long double>(K / (y * y), 4 * N) + 1;
  std::vector<long double> terms;
  for (long n = 1;; ++n) {
    if (n > 200000000L) throw ValidationError("truncation_M0: Y too small for a finite truncation");
    auto [h, nh] = log_term(static_cast<long double>(n));
    terms.push_back(std::exp(h) + std::exp(nh));
    if (n > peak && h < log_floor && nh < log_floor) break;
  }
  std::vector<long double> suffix(terms.size() + 1, 0.0L);
  for (size_t i = terms.size(); i-- > 0;) suffix[i] = suffix[i + 1] + terms[i];
  return suffix;
}

void check_truncation_args(int N, int K, const BigReal& Y) {
  if (N < 1) throw ValidationError("truncation_M0: N must be positive");
  if (K < 0) throw ValidationError("truncation_M0: K must be non-negative");
  long double y = Y.to_long_double();
  if (!(y > 0) || !(y < std::sqrt(3.0L) / 2)) throw ValidationError("truncation_M0: Y must lie in (0, sqrt(3)/2)");
}

constexpr long double kSafety = 1.2L;

}  // namespace

int truncation_M0(int N, const WeightParam& k, int K, const BigReal& Y, const BigReal& eps) {
  check_truncation_args(N, K, Y);
  if (eps.sign() <= 0) throw ValidationError("truncation_M0: eps must be positive");
  BigReal le(eps.precision());
  mpfr_log(le.raw(), eps.raw(), MPFR_RNDN);
  const long double log_eps = le.to_long_double();
  auto suffix = tail_suffix(N, k, K, Y.to_long_double(), log_eps - 60);
  const long double e = std::exp(log_eps);
  long M = 1;
  while (static_cast<size_t>(4 * N * M) < suffix.size() - 1 && suffix[4 * N * M] >= e) ++M;
  return static_cast<int>(std::ceil(kSafety * M));
}

BigReal truncation_tail(int N, const WeightParam& k, int K, const BigReal& Y, int M0) {
  check_truncation_args(N, K, Y);
  if (M0 < 1) throw ValidationError("truncation_tail: M0 must be >= 1");
  // Undo the safety factor, so truncation_M0(truncation_tail(M0)) <= M0.
  long M = std::max(1L, static_cast<long>(std::floor(M0 / kSafety)));
  while (M > 1 && std::ceil(kSafety * M) > M0) --M;
  auto suffix = tail_suffix(N, k, K, Y.to_long_double(), -11000.0L);
  size_t at = static_cast<size_t>(4L * N * M);
  long double t = at < suffix.size() ? suffix[at] : 0.0L;
  BigReal out(Y.precision());
  mpfr_set_ld(out.raw(), t, MPFR_RNDU);
  // truncation_M0 stops at the first M whose tail is strictly below eps, and
  // compares in long double after a log/exp round trip; stay clear of both.
  mpfr_mul_d(out.raw(), out.raw(), 1.0 + 0x1p-40, MPFR_RNDU);
  return out;
}

}  // namespace hwmf
