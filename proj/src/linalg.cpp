#include <cmath>
#include <string>

#include "hwmf/parallel.hpp"
#include "hwmf/solver.hpp"

namespace hwmf {

std::vector<BigComplex> matvec(const Matrix& A, const std::vector<BigComplex>& x) {
  if (x.size() != A.cols()) throw ValidationError("matvec: dimension mismatch");
  mpfr_prec_t p = A.rows() ? A.at(0, 0).precision() : x.empty() ? MPFR_PREC_MIN : x[0].precision();
  std::vector<BigComplex> y(A.rows(), BigComplex(p));
  parallel_for(A.rows(), [&](size_t i) {
    BigReal t(p);
    const BigComplex* r = A.row(i);
    for (size_t j = 0; j < A.cols(); ++j) kernel::mul_add(y[i], r[j], x[j], t.raw());
  });
  return y;
}

BigReal inf_norm(const Matrix& A) {
  mpfr_prec_t p = A.rows() ? A.at(0, 0).precision() : MPFR_PREC_MIN;
  BigReal best(p);
  for (size_t i = 0; i < A.rows(); ++i) {
    BigReal s(p);
    for (size_t j = 0; j < A.cols(); ++j) s += abs(A.at(i, j));
    if (s > best) best = s;
  }
  return best;
}

namespace {

BigComplex reciprocal(const BigComplex& a) {
  BigReal n = norm(a);
  return BigComplex(a.re / n, -a.im / n);
}

}  // namespace

LUFactorization::LUFactorization(Matrix V, const PrecisionContext& ctx) : lu_(std::move(V)), prec_(ctx.bits) {
  const size_t n = lu_.rows();
  if (lu_.cols() != n) throw ValidationError("LU: matrix is not square");
  if (n && lu_.at(0, 0).precision() != ctx.bits) throw ValidationError("LU: matrix precision differs from context");
  perm_.resize(n);
  for (size_t i = 0; i < n; ++i) perm_[i] = i;

  // Squared max-modulus of every original column and of the whole matrix.
  std::vector<BigReal> col_max(n, BigReal(prec_));
  BigReal t(prec_), mag(prec_), vmax(prec_);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      kernel::norm(mag.raw(), lu_.at(i, j), t.raw());
      if (mag > col_max[j]) col_max[j] = mag;
    }
  for (auto& c : col_max)
    if (c > vmax) vmax = c;

  BigReal thresh(prec_);  // 2^{-bits}: squared form of 2^{-bits/2}
  mpfr_set_ui_2exp(thresh.raw(), 1, -ctx.bits, MPFR_RNDN);

  for (size_t k = 0; k < n; ++k) {
    size_t piv = k;
    BigReal best(prec_);
    for (size_t i = k; i < n; ++i) {
      kernel::norm(mag.raw(), lu_.at(i, k), t.raw());
      if (mag > best) {
        best = mag;
        piv = i;
      }
    }
    if (best.is_zero() || best < col_max[k] * thresh)
      throw NumericalError("singular system: pivot " + std::to_string(k) + " of " + std::to_string(n) +
                           " is below 2^(-bits/2) of its column norm");
    lu_.swap_rows(k, piv);
    std::swap(perm_[k], perm_[piv]);
    BigComplex inv = reciprocal(lu_.at(k, k));
    const BigComplex* pivot_row = lu_.row(k);
    parallel_for(n - k - 1, [&](size_t off) {
      size_t i = k + 1 + off;
      BigReal tt(prec_);
      BigComplex* r = lu_.row(i);
      if (r[k].is_zero()) return;
      BigComplex l(prec_);
      kernel::mul(l, r[k], inv, tt.raw());
      r[k] = l;
      for (size_t j = k + 1; j < n; ++j) kernel::mul_sub(r[j], l, pivot_row[j], tt.raw());
    });
  }

  BigReal umax(prec_);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      kernel::norm(mag.raw(), lu_.at(i, j), t.raw());
      if (mag > umax) umax = mag;
    }
  growth_ = vmax.is_zero() ? BigReal(prec_) : sqrt(umax / vmax);
}

std::vector<BigComplex> LUFactorization::solve(const std::vector<BigComplex>& b) const {
  const size_t n = size();
  if (b.size() != n) throw ValidationError("LU solve: dimension mismatch");
  std::vector<BigComplex> x(n, BigComplex(prec_));
  for (size_t i = 0; i < n; ++i) x[i] = b[perm_[i]].rounded(prec_);
  BigReal t(prec_);
  for (size_t i = 0; i < n; ++i) {
    const BigComplex* r = lu_.row(i);
    for (size_t j = 0; j < i; ++j) kernel::mul_sub(x[i], r[j], x[j], t.raw());
  }
  for (size_t i = n; i-- > 0;) {
    const BigComplex* r = lu_.row(i);
    for (size_t j = i + 1; j < n; ++j) kernel::mul_sub(x[i], r[j], x[j], t.raw());
    x[i] = x[i] / r[i];
  }
  return x;
}

std::vector<BigComplex> LUFactorization::solve_adjoint(const std::vector<BigComplex>& b) const {
  const size_t n = size();
  if (b.size() != n) throw ValidationError("LU solve: dimension mismatch");
  // V^H = U^H L^H P: solve U^H w = b, L^H z = w, then x[perm[i]] = z[i].
  std::vector<BigComplex> w(n, BigComplex(prec_));
  for (size_t i = 0; i < n; ++i) w[i] = b[i].rounded(prec_);
  BigReal t(prec_);
  for (size_t i = 0; i < n; ++i) {
    w[i] = w[i] / conj(lu_.at(i, i));
    const BigComplex ci = conj(w[i]);
    // w[j] -= conj(U_ij) w[i] for j > i, i.e. conj(w[j]) -= U_ij conj(w[i])
    const BigComplex* r = lu_.row(i);
    for (size_t j = i + 1; j < n; ++j) {
      BigComplex cj = conj(w[j]);
      kernel::mul_sub(cj, r[j], ci, t.raw());
      w[j] = conj(cj);
    }
  }
  for (size_t i = n; i-- > 0;) {
    const BigComplex ci = conj(w[i]);
    const BigComplex* r = lu_.row(i);
    for (size_t j = 0; j < i; ++j) {
      BigComplex cj = conj(w[j]);
      kernel::mul_sub(cj, r[j], ci, t.raw());
      w[j] = conj(cj);
    }
  }
  std::vector<BigComplex> x(n, BigComplex(prec_));
  for (size_t i = 0; i < n; ++i) x[perm_[i]] = w[i];
  return x;
}

std::vector<BigComplex> lu_solve(const LinearSystem& system, const PrecisionContext& ctx) {
  LUFactorization lu(system.V, ctx);
  std::vector<BigComplex> rhs(system.Wvec.size());
  for (size_t i = 0; i < rhs.size(); ++i) rhs[i] = -system.Wvec[i];
  return lu.solve(rhs);
}

namespace {

BigReal one_norm(const std::vector<BigComplex>& v, mpfr_prec_t p) {
  BigReal s(p);
  for (const auto& z : v) s += abs(z);
  return s;
}

}  // namespace

BigReal inv_norm_estimate(const LUFactorization& lu, const std::vector<BigReal>& scale, size_t exact_limit) {
  const size_t n = lu.size();
  if (n == 0) throw ValidationError("inv_norm_estimate: empty system");
  if (!scale.empty() && scale.size() != n) throw ValidationError("inv_norm_estimate: scale size mismatch");
  const mpfr_prec_t p = lu.pivot_growth().precision();
  auto s_at = [&](size_t i) {
    BigReal one(p);
    mpfr_set_ui(one.raw(), 1, MPFR_RNDN);
    return scale.empty() ? one : abs(scale[i].rounded(p));
  };

  if (n <= exact_limit) {
    std::vector<BigReal> row_sum(n, BigReal(p));
    std::vector<BigComplex> e(n, BigComplex(p));
    for (size_t j = 0; j < n; ++j) {
      mpfr_set_ui(e[j].re.raw(), 1, MPFR_RNDN);
      auto col = lu.solve(e);
      mpfr_set_zero(e[j].re.raw(), 1);
      for (size_t i = 0; i < n; ++i) row_sum[i] += abs(col[i]);
    }
    BigReal best(p);
    for (size_t i = 0; i < n; ++i) {
      BigReal v = row_sum[i] * s_at(i);
      if (v > best) best = v;
    }
    return best;
  }

  // ||B||_inf = ||B^H||_1 with B = diag(s) V^{-1}; Hager's method on A = B^H,
  // A x = V^{-H}(s x) and A^H y = s V^{-1} y.
  auto apply_A = [&](const std::vector<BigComplex>& x) {
    std::vector<BigComplex> sx(n, BigComplex(p));
    for (size_t i = 0; i < n; ++i) sx[i] = x[i] * s_at(i);
    return lu.solve_adjoint(sx);
  };
  auto apply_AH = [&](const std::vector<BigComplex>& y) {
    auto v = lu.solve(y);
    for (size_t i = 0; i < n; ++i) v[i] = v[i] * s_at(i);
    return v;
  };

  std::vector<BigComplex> x(n, BigComplex(p));
  for (auto& z : x) z = BigComplex(BigReal(p) + ratio(p, 1, static_cast<long long>(n)), BigReal(p));
  BigReal est(p);
  size_t last_j = n;
  for (int it = 0; it < 5; ++it) {
    auto y = apply_A(x);
    BigReal ny = one_norm(y, p);
    if (ny > est) est = ny;
    std::vector<BigComplex> xi(n, BigComplex(p));
    for (size_t i = 0; i < n; ++i) {
      BigReal a = abs(y[i]);
      if (a.is_zero())
        mpfr_set_ui(xi[i].re.raw(), 1, MPFR_RNDN);
      else
        xi[i] = y[i] / a;
    }
    auto z = apply_AH(xi);
    size_t j = 0;
    BigReal zmax(p);
    for (size_t i = 0; i < n; ++i) {
      BigReal a = abs(z[i]);
      if (a > zmax) {
        zmax = a;
        j = i;
      }
    }
    if (j == last_j) break;  // fixed point; later steps repeat this one
    last_j = j;
    for (auto& v : x) v = BigComplex(p);
    mpfr_set_ui(x[j].re.raw(), 1, MPFR_RNDN);
  }
  // Alternating test vector guards against the estimator's blind spots.
  for (size_t i = 0; i < n; ++i) {
    BigReal v = ratio(p, static_cast<long long>(i), static_cast<long long>(std::max<size_t>(1, n - 1)));
    mpfr_add_ui(v.raw(), v.raw(), 1, MPFR_RNDN);
    if (i % 2) v = -v;
    x[i] = BigComplex(v, BigReal(p));
  }
  BigReal alt = one_norm(apply_A(x), p) * 2L / static_cast<long>(3 * n);
  if (alt > est) est = alt;
  return est * 3L;
}

}  // namespace hwmf
