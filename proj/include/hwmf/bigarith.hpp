#pragma once

#include <mpfr.h>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hwmf {

// Bad user input or violated precondition. The CLI maps this to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Singular systems, precision faults, non-finite results. Exit status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PrecisionContext {
  int digits = 0;              // requested decimal digits
  mpfr_prec_t bits = 0;        // working mantissa bits, guard bits included
  mpfr_prec_t guard_bits = 32;

  bool operator==(const PrecisionContext&) const = default;
};

PrecisionContext make_context(int decimal_digits);

// Context with the same digit count and `extra` additional bits; used for
// internal compound evaluations that are rounded back afterwards.
PrecisionContext widened(const PrecisionContext& ctx, mpfr_prec_t extra);

// MPFR number with inline limb storage for precisions up to 256 bits, so
// that matrices of these are one contiguous allocation. Larger precisions
// fall back to a heap buffer.
class BigReal {
 public:
  BigReal() : BigReal(mpfr_prec_t(MPFR_PREC_MIN)) {}
  explicit BigReal(mpfr_prec_t prec);
  explicit BigReal(const PrecisionContext& ctx) : BigReal(ctx.bits) {}
  BigReal(const PrecisionContext& ctx, long v);
  BigReal(const PrecisionContext& ctx, double v);
  BigReal(const PrecisionContext& ctx, std::string_view text);
  BigReal(mpfr_prec_t prec, mpfr_srcptr src);  // rounds src to prec

  BigReal(const BigReal& o);
  BigReal(BigReal&& o) noexcept;
  BigReal& operator=(const BigReal& o);
  BigReal& operator=(BigReal&& o) noexcept;
  ~BigReal() = default;

  // Parses decimal/scientific notation or an exact rational "p/q".
  static BigReal parse(const PrecisionContext& ctx, std::string_view text);

  mpfr_ptr raw() { return &v_; }
  mpfr_srcptr raw() const { return &v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(&v_); }

  // Round-trip decimal representation ("-1.2345e-7"); digits = 0 picks the
  // smallest count that reproduces the value bit for bit.
  std::string to_string(int digits = 0) const;
  double to_double() const { return mpfr_get_d(&v_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(&v_, MPFR_RNDN); }

  bool is_zero() const { return mpfr_zero_p(&v_) != 0; }
  int sign() const { return mpfr_sgn(&v_); }
  bool is_finite() const { return mpfr_number_p(&v_) != 0; }

  // Value rounded to another precision.
  BigReal rounded(mpfr_prec_t prec) const { return BigReal(prec, raw()); }

  BigReal& operator+=(const BigReal& o);
  BigReal& operator-=(const BigReal& o);
  BigReal& operator*=(const BigReal& o);
  BigReal& operator/=(const BigReal& o);
  BigReal& operator*=(long o);
  BigReal& operator/=(long o);
  BigReal operator-() const;

  friend BigReal operator+(BigReal a, const BigReal& b) { return a += b; }
  friend BigReal operator-(BigReal a, const BigReal& b) { return a -= b; }
  friend BigReal operator*(BigReal a, const BigReal& b) { return a *= b; }
  friend BigReal operator/(BigReal a, const BigReal& b) { return a /= b; }
  friend BigReal operator*(BigReal a, long b) { return a *= b; }
  friend BigReal operator/(BigReal a, long b) { return a /= b; }

  friend bool operator<(const BigReal& a, const BigReal& b) { return mpfr_less_p(a.raw(), b.raw()); }
  friend bool operator>(const BigReal& a, const BigReal& b) { return mpfr_greater_p(a.raw(), b.raw()); }
  friend bool operator<=(const BigReal& a, const BigReal& b) { return mpfr_lessequal_p(a.raw(), b.raw()); }
  friend bool operator>=(const BigReal& a, const BigReal& b) { return mpfr_greaterequal_p(a.raw(), b.raw()); }
  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.raw(), b.raw()); }

  // Throws NumericalError naming `what` if the value is NaN or infinite.
  void require_finite(const char* what) const;

 private:
  static constexpr int kInlineLimbs = 4;
  void init(mpfr_prec_t prec);
  void check_same(const BigReal& o) const;

  __mpfr_struct v_;
  mp_limb_t inline_[kInlineLimbs];
  std::unique_ptr<mp_limb_t[]> heap_;
};

BigReal sqrt(const BigReal& x);
BigReal exp(const BigReal& x);
BigReal log(const BigReal& x);
BigReal abs(const BigReal& x);
BigReal pi(mpfr_prec_t prec);
BigReal max(const BigReal& a, const BigReal& b);
BigReal min(const BigReal& a, const BigReal& b);
BigReal pow_si(const BigReal& x, long n);
// Nearest integer, ties to even.
BigReal round_even(const BigReal& x);
// Exact integer division p/q rounded to prec.
BigReal ratio(mpfr_prec_t prec, long long p, long long q);

struct BigComplex {
  BigReal re, im;

  BigComplex() = default;
  explicit BigComplex(mpfr_prec_t prec) : re(prec), im(prec) {}
  explicit BigComplex(const PrecisionContext& ctx) : re(ctx), im(ctx) {}
  BigComplex(BigReal r, BigReal i);
  explicit BigComplex(BigReal r);

  mpfr_prec_t precision() const { return re.precision(); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  BigComplex& operator+=(const BigComplex& o);
  BigComplex& operator-=(const BigComplex& o);
  BigComplex& operator*=(const BigComplex& o);
  BigComplex& operator*=(const BigReal& o);
  BigComplex& operator/=(const BigComplex& o);
  BigComplex& operator/=(const BigReal& o);
  BigComplex operator-() const { return {-re, -im}; }

  friend BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
  friend BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
  friend BigComplex operator*(BigComplex a, const BigComplex& b) { return a *= b; }
  friend BigComplex operator*(BigComplex a, const BigReal& b) { return a *= b; }
  friend BigComplex operator*(const BigReal& b, BigComplex a) { return a *= b; }
  friend BigComplex operator/(BigComplex a, const BigComplex& b) { return a /= b; }
  friend BigComplex operator/(BigComplex a, const BigReal& b) { return a /= b; }
  friend bool operator==(const BigComplex& a, const BigComplex& b) { return a.re == b.re && a.im == b.im; }

  BigComplex rounded(mpfr_prec_t prec) const { return {re.rounded(prec), im.rounded(prec)}; }
};

BigComplex conj(const BigComplex& z);
BigReal norm(const BigComplex& z);  // |z|^2
BigReal abs(const BigComplex& z);
// Principal argument in (-pi, pi]; the negative real axis (either zero sign
// of the imaginary part) maps to +pi.
BigReal arg(const BigComplex& z);

// e(frac) = exp(2 pi i frac).
BigComplex unit_circle_exp(const BigReal& frac);
// e(p/q) with the argument reduced exactly in integers first.
BigComplex unit_circle_exp_ratio(mpfr_prec_t prec, long long p, long long q);

// exp(k Log w) for k = twice_k/2, principal branch.
BigComplex principal_power_halfint(const BigComplex& w, int twice_k);

// Hot-loop kernels. `t` is caller-owned scratch of the operands' precision;
// no allocation happens inside.
namespace kernel {
// acc += a*b
inline void mul_add(BigComplex& acc, const BigComplex& a, const BigComplex& b, mpfr_ptr t) {
  mpfr_mul(t, a.re.raw(), b.re.raw(), MPFR_RNDN);
  mpfr_add(acc.re.raw(), acc.re.raw(), t, MPFR_RNDN);
  mpfr_mul(t, a.im.raw(), b.im.raw(), MPFR_RNDN);
  mpfr_sub(acc.re.raw(), acc.re.raw(), t, MPFR_RNDN);
  mpfr_mul(t, a.re.raw(), b.im.raw(), MPFR_RNDN);
  mpfr_add(acc.im.raw(), acc.im.raw(), t, MPFR_RNDN);
  mpfr_mul(t, a.im.raw(), b.re.raw(), MPFR_RNDN);
  mpfr_add(acc.im.raw(), acc.im.raw(), t, MPFR_RNDN);
}
// acc -= a*b
inline void mul_sub(BigComplex& acc, const BigComplex& a, const BigComplex& b, mpfr_ptr t) {
  mpfr_mul(t, a.re.raw(), b.re.raw(), MPFR_RNDN);
  mpfr_sub(acc.re.raw(), acc.re.raw(), t, MPFR_RNDN);
  mpfr_mul(t, a.im.raw(), b.im.raw(), MPFR_RNDN);
  mpfr_add(acc.re.raw(), acc.re.raw(), t, MPFR_RNDN);
  mpfr_mul(t, a.re.raw(), b.im.raw(), MPFR_RNDN);
  mpfr_sub(acc.im.raw(), acc.im.raw(), t, MPFR_RNDN);
  mpfr_mul(t, a.im.raw(), b.re.raw(), MPFR_RNDN);
  mpfr_sub(acc.im.raw(), acc.im.raw(), t, MPFR_RNDN);
}
// out = a*b; out must not alias a or b.
inline void mul(BigComplex& out, const BigComplex& a, const BigComplex& b, mpfr_ptr t) {
  mpfr_mul(out.re.raw(), a.re.raw(), b.re.raw(), MPFR_RNDN);
  mpfr_mul(t, a.im.raw(), b.im.raw(), MPFR_RNDN);
  mpfr_sub(out.re.raw(), out.re.raw(), t, MPFR_RNDN);
  mpfr_mul(out.im.raw(), a.re.raw(), b.im.raw(), MPFR_RNDN);
  mpfr_mul(t, a.im.raw(), b.re.raw(), MPFR_RNDN);
  mpfr_add(out.im.raw(), out.im.raw(), t, MPFR_RNDN);
}
// |z|^2 into out.
inline void norm(mpfr_ptr out, const BigComplex& z, mpfr_ptr t) {
  mpfr_sqr(out, z.re.raw(), MPFR_RNDN);
  mpfr_sqr(t, z.im.raw(), MPFR_RNDN);
  mpfr_add(out, out, t, MPFR_RNDN);
}
}  // namespace kernel

}  // namespace hwmf
