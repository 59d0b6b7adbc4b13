#include "hwmf/bigarith.hpp"

#include <gmp.h>

#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

namespace hwmf {

PrecisionContext make_context(int decimal_digits) {
  if (decimal_digits < 20)
    throw ValidationError("precision_digits must be >= 20, got " + std::to_string(decimal_digits));
  PrecisionContext ctx;
  ctx.digits = decimal_digits;
  ctx.guard_bits = 32;
  ctx.bits = static_cast<mpfr_prec_t>(std::ceil(decimal_digits * std::log2(10.0))) + ctx.guard_bits;
  return ctx;
}

PrecisionContext widened(const PrecisionContext& ctx, mpfr_prec_t extra) {
  PrecisionContext w = ctx;
  w.bits += extra;
  return w;
}

// ---------------------------------------------------------------- BigReal

void BigReal::init(mpfr_prec_t prec) {
  if (prec < MPFR_PREC_MIN || prec > MPFR_PREC_MAX)
    throw ValidationError("invalid precision " + std::to_string(prec));
  size_t bytes = mpfr_custom_get_size(prec);
  size_t limbs = (bytes + sizeof(mp_limb_t) - 1) / sizeof(mp_limb_t);
  mp_limb_t* storage;
  if (limbs <= static_cast<size_t>(kInlineLimbs)) {
    heap_.reset();
    storage = inline_;
  } else {
    heap_.reset(new mp_limb_t[limbs]);
    storage = heap_.get();
  }
  mpfr_custom_init(storage, prec);
  mpfr_custom_init_set(&v_, MPFR_ZERO_KIND, 0, prec, storage);
}

BigReal::BigReal(mpfr_prec_t prec) { init(prec); }

BigReal::BigReal(const PrecisionContext& ctx, long v) {
  init(ctx.bits);
  mpfr_set_si(&v_, v, MPFR_RNDN);
}

BigReal::BigReal(const PrecisionContext& ctx, double v) {
  init(ctx.bits);
  if (!std::isfinite(v)) throw ValidationError("non-finite double converted to BigReal");
  mpfr_set_d(&v_, v, MPFR_RNDN);
}

BigReal::BigReal(const PrecisionContext& ctx, std::string_view text) : BigReal(parse(ctx, text)) {}

BigReal::BigReal(mpfr_prec_t prec, mpfr_srcptr src) {
  init(prec);
  mpfr_set(&v_, src, MPFR_RNDN);
}

BigReal::BigReal(const BigReal& o) {
  init(o.precision());
  mpfr_set(&v_, o.raw(), MPFR_RNDN);
}

BigReal::BigReal(BigReal&& o) noexcept {
  if (o.heap_) {
    heap_ = std::move(o.heap_);
    v_ = o.v_;
    o.init(MPFR_PREC_MIN);
  } else {
    init(o.precision());
    mpfr_set(&v_, o.raw(), MPFR_RNDN);
  }
}

BigReal& BigReal::operator=(const BigReal& o) {
  if (this == &o) return *this;
  if (precision() != o.precision()) init(o.precision());
  mpfr_set(&v_, o.raw(), MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator=(BigReal&& o) noexcept {
  if (this == &o) return *this;
  if (o.heap_) {
    heap_ = std::move(o.heap_);
    v_ = o.v_;
    o.init(MPFR_PREC_MIN);
    return *this;
  }
  if (precision() != o.precision()) init(o.precision());
  mpfr_set(&v_, o.raw(), MPFR_RNDN);
  return *this;
}

static std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

static bool parse_decimal(mpfr_ptr out, const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  mpfr_strtofr(out, s.c_str(), &end, 10, MPFR_RNDN);
  return end == s.c_str() + s.size() && mpfr_number_p(out);
}

BigReal BigReal::parse(const PrecisionContext& ctx, std::string_view text) {
  std::string s = trim(text);
  BigReal out(ctx.bits);
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (!parse_decimal(out.raw(), s)) throw ValidationError("cannot parse number '" + s + "'");
    return out;
  }
  std::string num = trim(s.substr(0, slash)), den = trim(s.substr(slash + 1));
  mpq_t q;
  mpq_init(q);
  std::string joined = num + "/" + den;
  if (!num.empty() && num[0] == '+') joined = joined.substr(1);
  bool ok = mpq_set_str(q, joined.c_str(), 10) == 0 && mpz_sgn(mpq_denref(q)) != 0;
  if (ok) {
    mpq_canonicalize(q);
    mpfr_set_q(out.raw(), q, MPFR_RNDN);
    mpq_clear(q);
    return out;
  }
  mpq_clear(q);
  // Non-integer numerator or denominator: plain division.
  BigReal a(ctx.bits + 64), b(ctx.bits + 64);
  if (!parse_decimal(a.raw(), num) || !parse_decimal(b.raw(), den) || b.is_zero())
    throw ValidationError("cannot parse rational '" + s + "'");
  mpfr_div(out.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return out;
}

std::string BigReal::to_string(int digits) const {
  if (mpfr_nan_p(&v_)) return "nan";
  if (mpfr_inf_p(&v_)) return mpfr_sgn(&v_) > 0 ? "inf" : "-inf";
  if (mpfr_zero_p(&v_)) return mpfr_signbit(&v_) ? "-0" : "0";
  size_t n = digits > 0 ? static_cast<size_t>(digits) : mpfr_get_str_ndigits(10, precision());
  mpfr_exp_t e = 0;
  char* raw_digits = mpfr_get_str(nullptr, &e, 10, n, &v_, MPFR_RNDN);
  std::string d(raw_digits);
  mpfr_free_str(raw_digits);
  std::string out;
  if (d[0] == '-') {
    out.push_back('-');
    d.erase(0, 1);
  }
  while (d.size() > 1 && d.back() == '0') d.pop_back();
  out.push_back(d[0]);
  if (d.size() > 1) {
    out.push_back('.');
    out.append(d, 1, std::string::npos);
  }
  long ex = static_cast<long>(e) - 1;
  if (ex != 0) out += "e" + std::to_string(ex);
  return out;
}

void BigReal::check_same(const BigReal& o) const {
  if (precision() != o.precision())
    throw std::logic_error("BigReal precision mismatch: " + std::to_string(precision()) + " vs " +
                           std::to_string(o.precision()));
}

void BigReal::require_finite(const char* what) const {
  if (!mpfr_number_p(&v_)) throw NumericalError(std::string("non-finite value in ") + what);
}

BigReal& BigReal::operator+=(const BigReal& o) {
  check_same(o);
  mpfr_add(&v_, &v_, o.raw(), MPFR_RNDN);
  return *this;
}
BigReal& BigReal::operator-=(const BigReal& o) {
  check_same(o);
  mpfr_sub(&v_, &v_, o.raw(), MPFR_RNDN);
  return *this;
}
BigReal& BigReal::operator*=(const BigReal& o) {
  check_same(o);
  mpfr_mul(&v_, &v_, o.raw(), MPFR_RNDN);
  return *this;
}
BigReal& BigReal::operator/=(const BigReal& o) {
  check_same(o);
  if (o.is_zero()) throw NumericalError("division by zero");
  mpfr_div(&v_, &v_, o.raw(), MPFR_RNDN);
  return *this;
}
BigReal& BigReal::operator*=(long o) {
  mpfr_mul_si(&v_, &v_, o, MPFR_RNDN);
  return *this;
}
BigReal& BigReal::operator/=(long o) {
  if (o == 0) throw NumericalError("division by zero");
  mpfr_div_si(&v_, &v_, o, MPFR_RNDN);
  return *this;
}
BigReal BigReal::operator-() const {
  BigReal r(*this);
  mpfr_neg(r.raw(), r.raw(), MPFR_RNDN);
  return r;
}

BigReal sqrt(const BigReal& x) {
  if (x.sign() < 0) throw NumericalError("sqrt of negative number");
  BigReal r(x.precision());
  mpfr_sqrt(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}
BigReal exp(const BigReal& x) {
  BigReal r(x.precision());
  mpfr_exp(r.raw(), x.raw(), MPFR_RNDN);
  r.require_finite("exp");
  return r;
}
BigReal log(const BigReal& x) {
  if (x.sign() <= 0) throw NumericalError("log of non-positive number");
  BigReal r(x.precision());
  mpfr_log(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}
BigReal abs(const BigReal& x) {
  BigReal r(x.precision());
  mpfr_abs(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}
BigReal pi(mpfr_prec_t prec) {
  BigReal r(prec);
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}
BigReal max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }
BigReal min(const BigReal& a, const BigReal& b) { return b < a ? b : a; }
BigReal pow_si(const BigReal& x, long n) {
  BigReal r(x.precision());
  mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
  r.require_finite("pow_si");
  return r;
}
BigReal round_even(const BigReal& x) {
  BigReal r(x.precision());
  mpfr_rint(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}
BigReal ratio(mpfr_prec_t prec, long long p, long long q) {
  if (q == 0) throw ValidationError("ratio with zero denominator");
  BigReal r(prec);
  mpq_t t;
  mpq_init(t);
  mpz_set_si(mpq_numref(t), p);
  mpz_set_si(mpq_denref(t), q);
  mpq_canonicalize(t);
  mpfr_set_q(r.raw(), t, MPFR_RNDN);
  mpq_clear(t);
  return r;
}

// ------------------------------------------------------------- BigComplex

BigComplex::BigComplex(BigReal r, BigReal i) : re(std::move(r)), im(std::move(i)) {
  if (re.precision() != im.precision()) throw std::logic_error("BigComplex parts differ in precision");
}

BigComplex::BigComplex(BigReal r) : re(std::move(r)), im(re.precision()) {}

BigComplex& BigComplex::operator+=(const BigComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}
BigComplex& BigComplex::operator-=(const BigComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}
BigComplex& BigComplex::operator*=(const BigComplex& o) {
  if (o.precision() != precision()) throw std::logic_error("BigComplex precision mismatch");
  BigComplex out(precision());
  BigReal t(precision());
  kernel::mul(out, *this, o, t.raw());
  *this = std::move(out);
  return *this;
}
BigComplex& BigComplex::operator*=(const BigReal& o) {
  re *= o;
  im *= o;
  return *this;
}
BigComplex& BigComplex::operator/=(const BigComplex& o) {
  BigReal d = norm(o);
  if (d.is_zero()) throw NumericalError("complex division by zero");
  *this *= conj(o);
  re /= d;
  im /= d;
  return *this;
}
BigComplex& BigComplex::operator/=(const BigReal& o) {
  re /= o;
  im /= o;
  return *this;
}

BigComplex conj(const BigComplex& z) { return {z.re, -z.im}; }

BigReal norm(const BigComplex& z) {
  BigReal out(z.precision()), t(z.precision());
  kernel::norm(out.raw(), z, t.raw());
  return out;
}

BigReal abs(const BigComplex& z) {
  BigReal r(z.precision());
  mpfr_hypot(r.raw(), z.re.raw(), z.im.raw(), MPFR_RNDN);
  return r;
}

BigReal arg(const BigComplex& z) {
  BigReal r(z.precision());
  if (z.im.is_zero()) {
    if (z.re.is_zero()) throw NumericalError("argument of zero");
    if (z.re.sign() < 0) mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
  }
  mpfr_atan2(r.raw(), z.im.raw(), z.re.raw(), MPFR_RNDN);
  return r;
}

BigComplex unit_circle_exp(const BigReal& frac) {
  frac.require_finite("unit_circle_exp");
  mpfr_prec_t prec = frac.precision();
  mpfr_exp_t e = frac.is_zero() ? 0 : mpfr_get_exp(frac.raw());
  mpfr_prec_t wp = prec + 16 + (e > 0 ? e : 0);
  // Quarter turns are split off exactly: frac = j/4 + g/4 with |g| <= 1/2.
  BigReal f4(wp), r(wp), g(wp);
  mpfr_mul_2ui(f4.raw(), frac.raw(), 2, MPFR_RNDN);
  mpfr_rint(r.raw(), f4.raw(), MPFR_RNDN);
  mpfr_sub(g.raw(), f4.raw(), r.raw(), MPFR_RNDN);
  BigReal rm(wp), four(wp);
  mpfr_set_ui(four.raw(), 4, MPFR_RNDN);
  mpfr_fmod(rm.raw(), r.raw(), four.raw(), MPFR_RNDN);
  long j = mpfr_get_si(rm.raw(), MPFR_RNDN);
  j = ((j % 4) + 4) % 4;
  BigReal theta(wp), s(wp), c(wp);
  mpfr_const_pi(theta.raw(), MPFR_RNDN);
  mpfr_mul(theta.raw(), theta.raw(), g.raw(), MPFR_RNDN);
  mpfr_div_2ui(theta.raw(), theta.raw(), 1, MPFR_RNDN);
  mpfr_sin_cos(s.raw(), c.raw(), theta.raw(), MPFR_RNDN);
  BigComplex out(prec);
  switch (j) {
    case 0:
      mpfr_set(out.re.raw(), c.raw(), MPFR_RNDN);
      mpfr_set(out.im.raw(), s.raw(), MPFR_RNDN);
      break;
    case 1:
      mpfr_neg(out.re.raw(), s.raw(), MPFR_RNDN);
      mpfr_set(out.im.raw(), c.raw(), MPFR_RNDN);
      break;
    case 2:
      mpfr_neg(out.re.raw(), c.raw(), MPFR_RNDN);
      mpfr_neg(out.im.raw(), s.raw(), MPFR_RNDN);
      break;
    default:
      mpfr_set(out.re.raw(), s.raw(), MPFR_RNDN);
      mpfr_neg(out.im.raw(), c.raw(), MPFR_RNDN);
      break;
  }
  return out;
}

BigComplex unit_circle_exp_ratio(mpfr_prec_t prec, long long p, long long q) {
  if (q == 0) throw ValidationError("unit_circle_exp_ratio: zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  long long r = p % q;
  if (r < 0) r += q;
  BigReal f = ratio(prec + 8, r, q);
  return unit_circle_exp(f).rounded(prec);
}

BigComplex principal_power_halfint(const BigComplex& w, int twice_k) {
  if (w.is_zero()) throw ValidationError("principal_power_halfint: w = 0");
  mpfr_prec_t prec = w.precision();
  mpfr_prec_t wp = prec + 20 + static_cast<mpfr_prec_t>(std::log2(std::abs(twice_k) + 1.0));
  BigComplex ww = w.rounded(wp);
  BigReal a = arg(ww);
  BigReal r2 = norm(ww);
  BigReal s(wp);
  mpfr_sqrt(s.raw(), r2.raw(), MPFR_RNDN);
  mpfr_sqrt(s.raw(), s.raw(), MPFR_RNDN);  // |w|^{1/2}
  BigReal mod = pow_si(s, twice_k);
  BigReal phase = a * static_cast<long>(twice_k);
  mpfr_div_2ui(phase.raw(), phase.raw(), 1, MPFR_RNDN);
  BigReal sn(wp), cs(wp);
  mpfr_sin_cos(sn.raw(), cs.raw(), phase.raw(), MPFR_RNDN);
  BigComplex out(wp);
  mpfr_mul(out.re.raw(), mod.raw(), cs.raw(), MPFR_RNDN);
  mpfr_mul(out.im.raw(), mod.raw(), sn.raw(), MPFR_RNDN);
  return out.rounded(prec);
}

}  // namespace hwmf
