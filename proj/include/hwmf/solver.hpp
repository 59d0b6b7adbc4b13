#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "hwmf/bigarith.hpp"
#include "hwmf/maassform.hpp"
#include "hwmf/weilrep.hpp"

namespace hwmf {

struct SolveJob {
  HarmonicParams params;
  PrincipalPart principal;
  PrecisionContext ctx;
  BigReal eps, Y;
  int Q = 0;   // 0: default from M0
  int M0 = 0;  // 0: truncation_M0

  void validate() const;
};

int default_Q(int M0);
// Fills in automatic M0 and Q and validates.
SolveJob finalize_job(SolveJob job);

// z_m = x_m + iY, x_m = (1 - 2m)/(4Q), m = 1-Q .. Q.
std::vector<BigComplex> horocycle_points(const BigReal& Y, int Q);

// Dense row-major complex matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, mpfr_prec_t prec);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  BigComplex& at(size_t i, size_t j) { return d_[i * cols_ + j]; }
  const BigComplex& at(size_t i, size_t j) const { return d_[i * cols_ + j]; }
  BigComplex* row(size_t i) { return d_.data() + i * cols_; }
  const BigComplex* row(size_t i) const { return d_.data() + i * cols_; }
  void swap_rows(size_t i, size_t j);
  bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && d_ == o.d_; }

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<BigComplex> d_;
};

std::vector<BigComplex> matvec(const Matrix& A, const std::vector<BigComplex>& x);
// max_i sum_j |A_ij|
BigReal inf_norm(const Matrix& A);

struct LinearSystem {
  Matrix V;
  std::vector<BigComplex> Wvec;
  CoeffIndexSet index;
};

// One sample of the horocycle after pullback: everything assembly and
// phase 2 need per point.
struct SamplePoint {
  BigComplex z;       // x_m + iY
  BigComplex z_star;  // pulled back
  BigComplex j2k;     // phi_{T_m}(z_star)^{2k}
  std::shared_ptr<const RepMatrix> rho;
};

std::vector<SamplePoint> prepare_samples(const HarmonicParams& params, const BigReal& Y, int Q,
                                         const PrecisionContext& ctx);

LinearSystem assemble_system(const SolveJob& job);

// (1/2Q) sum_m values[m][h] e_{4N}(-n x_m): the Fourier coefficient at
// frequency n of component h from its samples on the horocycle.
BigComplex horocycle_inversion(const std::vector<std::vector<BigComplex>>& values, const CoeffIndex& idx, int N,
                               int Q);

class LUFactorization {
 public:
  // Partial pivoting by largest modulus, ties to the smallest row. Throws
  // NumericalError when a pivot falls below 2^(-bits/2) times the norm of
  // its original column.
  LUFactorization(Matrix V, const PrecisionContext& ctx);

  size_t size() const { return lu_.rows(); }
  // x with V x = b
  std::vector<BigComplex> solve(const std::vector<BigComplex>& b) const;
  // x with V^H x = b
  std::vector<BigComplex> solve_adjoint(const std::vector<BigComplex>& b) const;
  // max |U_ij| / max |V_ij|
  const BigReal& pivot_growth() const { return growth_; }

 private:
  Matrix lu_;
  std::vector<size_t> perm_;  // row i of LU is row perm_[i] of V
  BigReal growth_;
  mpfr_prec_t prec_;
};

// Solution of V D = -W.
std::vector<BigComplex> lu_solve(const LinearSystem& system, const PrecisionContext& ctx);

// Estimate of ||diag(scale) V^{-1}||_inf (scale = 1 when empty): exact from
// the explicit inverse when n <= exact_limit, else Hager's estimator (at
// least 5 steps) times 3.
BigReal inv_norm_estimate(const LUFactorization& lu, const std::vector<BigReal>& scale = {},
                          size_t exact_limit = 200);

struct ErrorReport {
  BigReal eps_effective;    // max(eps, modeled tail at M0) if M0 is below truncation_M0(eps), else eps
  BigReal residual_bound;   // 2 eps_effective max(1, Y^{-2k})
  BigReal inv_norm;         // ||V^{-1}||_inf estimate
  BigReal coeff_bound;      // residual_bound * inv_norm
  BigReal scaled_inv_norm;  // ||diag(W(nY/4N)) V^{-1}||_inf estimate
  BigReal pivot_growth;
  std::optional<BigReal> empirical_y_error;
};

struct Phase1Result {
  CoefficientTable table;
  ErrorReport report;
};

using ProgressFn = std::function<void(const std::string&)>;

Phase1Result solve_phase1(const SolveJob& job, const ProgressFn& progress = {});

// Coefficients at `targets` by Fourier inversion on a lower horocycle, using only the
// phase-1 entries of `table`. Targets are grouped into batches whose |n|
// at most doubles; each batch gets its own height and sample count.
std::map<CoeffIndex, CoeffEntry> phase2_values(const CoefficientTable& table, const std::vector<CoeffIndex>& targets,
                                               int digit_loss_budget, const ProgressFn& progress = {},
                                               std::vector<RunMetadata::Phase2Batch>* batches = nullptr);

// All (n, h) with from <= |n| <= to (n > 0 only in holomorphic mode) that are
// not phase-1 entries, added with phase = 2.
CoefficientTable extend_phase2(const CoefficientTable& table, long from, long to, int digit_loss_budget,
                               const ProgressFn& progress = {});

PrecisionContext table_context(const CoefficientTable& table);

}  // namespace hwmf
