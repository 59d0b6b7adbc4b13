#include <cmath>
#include <string>

#include "hwmf/fundom.hpp"
#include "hwmf/parallel.hpp"
#include "hwmf/solver.hpp"
#include "hwmf/specialfun.hpp"

namespace hwmf {

int default_Q(int M0) { return M0 + std::max(10, (M0 + 4) / 5); }

void SolveJob::validate() const {
  params.validate();
  principal.validate(params);
  if (ctx.bits < 64) throw ValidationError("precision context has fewer than 64 bits");
  if (eps.precision() != ctx.bits || Y.precision() != ctx.bits)
    throw ValidationError("eps and Y must carry the job's precision context");
  if (!(eps.sign() > 0)) throw ValidationError("eps must be positive");
  BigReal three(Y.precision());
  mpfr_set_ui(three.raw(), 3, MPFR_RNDN);
  BigReal y0 = sqrt(three) / 2L;
  if (!(Y.sign() > 0) || !(Y < y0)) throw ValidationError("Y must lie in (0, sqrt(3)/2), got " + Y.to_string(12));
  if (M0 < 1) throw ValidationError("M0 must be >= 1, got " + std::to_string(M0));
  if (Q <= M0) throw ValidationError("Q must exceed M0 (Q=" + std::to_string(Q) + ", M0=" + std::to_string(M0) + ")");
}

SolveJob finalize_job(SolveJob job) {
  job.eps = job.eps.rounded(job.ctx.bits);
  job.Y = job.Y.rounded(job.ctx.bits);
  if (job.M0 < 0 || job.Q < 0) throw ValidationError("M0 and Q must be non-negative");
  if (job.M0 == 0) {
    job.params.validate();
    job.principal.validate(job.params);
    job.M0 = truncation_M0(job.params.N, job.params.k, job.principal.K(), job.Y, job.eps);
  }
  if (job.Q == 0) job.Q = default_Q(job.M0);
  job.validate();
  return job;
}

std::vector<BigComplex> horocycle_points(const BigReal& Y, int Q) {
  if (!(Y.sign() > 0)) throw ValidationError("horocycle height must be positive");
  if (Q < 1) throw ValidationError("Q must be positive");
  mpfr_prec_t p = Y.precision();
  std::vector<BigComplex> pts;
  pts.reserve(2 * static_cast<size_t>(Q));
  for (int m = 1 - Q; m <= Q; ++m) pts.emplace_back(ratio(p, 1 - 2LL * m, 4LL * Q), Y);
  return pts;
}

Matrix::Matrix(size_t rows, size_t cols, mpfr_prec_t prec)
    : rows_(rows), cols_(cols), d_(rows * cols, BigComplex(prec)) {}

void Matrix::swap_rows(size_t i, size_t j) {
  if (i == j) return;
  for (size_t c = 0; c < cols_; ++c) {
    mpfr_swap(at(i, c).re.raw(), at(j, c).re.raw());
    mpfr_swap(at(i, c).im.raw(), at(j, c).im.raw());
  }
}

std::vector<SamplePoint> prepare_samples(const HarmonicParams& params, const BigReal& Y, int Q,
                                         const PrecisionContext& ctx) {
  auto pts = horocycle_points(Y.rounded(ctx.bits), Q);
  std::vector<SamplePoint> out(pts.size());
  parallel_for(pts.size(), [&](size_t i) {
    PullbackResult pb = pullback(pts[i], ctx);
    out[i].z = pts[i];
    out[i].z_star = pb.z_star;
    out[i].j2k = automorphy_j2k(pb.map, pb.z_star, params.k, ctx);
    out[i].rho = rho_evaluate(pb.map, params.N, params.conjugated, ctx);
  });
  return out;
}

LinearSystem assemble_system(const SolveJob& job) {
  job.validate();
  const HarmonicParams& P = job.params;
  const PrecisionContext& ctx = job.ctx;
  const mpfr_prec_t p = ctx.bits;
  const int N = P.N, dim = 2 * N;
  const long four_n = 4L * N;
  const int Q = job.Q;

  LinearSystem sys;
  sys.index = build_index_set(P, job.M0);
  const auto& D = sys.index.list();
  const size_t n = D.size();
  sys.V = Matrix(n, n, p);
  sys.Wvec.assign(n, BigComplex(p));

  auto samples = prepare_samples(P, job.Y, Q, ctx);
  BigReal two_pi = pi(p) * 2L;

  std::vector<BigComplex> B(n, BigComplex(p));
  Matrix G(dim, n, p);
  std::vector<BigComplex> C(n, BigComplex(p)), AP(dim, BigComplex(p)), Pm(dim, BigComplex(p));

  for (int mi = 0; mi < 2 * Q; ++mi) {
    const SamplePoint& s = samples[mi];
    const long m = 1 - Q + mi;
    // A = j^{2k} rho(T_m)
    const RepMatrix& rho = *s.rho;

    parallel_for(n, [&](size_t col) {
      BigReal v = s.z_star.im * static_cast<long>(D[col].n) / four_n;
      B[col] = unit_circle_exp(s.z_star.re * static_cast<long>(D[col].n) / four_n) * w_kernel(P.k, v, ctx);
    });

    for (auto& z : Pm) z = BigComplex(p);
    for (const auto& [idx, a] : job.principal.terms) {
      BigReal damp = exp(-(two_pi * s.z_star.im * static_cast<long>(idx.n) / four_n));
      Pm[idx.h] += a.rounded(p) * unit_circle_exp(s.z_star.re * static_cast<long>(idx.n) / four_n) * damp;
    }
    for (int h = 0; h < dim; ++h) {
      BigComplex acc(p);
      for (int hp = 0; hp < dim; ++hp) acc += rho.at(h, hp) * Pm[hp];
      AP[h] = s.j2k * acc;
    }

    parallel_for(static_cast<size_t>(dim), [&](size_t h) {
      BigReal t(p);
      std::vector<BigComplex> Ah(dim, BigComplex(p));
      for (int hp = 0; hp < dim; ++hp) kernel::mul(Ah[hp], s.j2k, rho.at(static_cast<int>(h), hp), t.raw());
      for (size_t col = 0; col < n; ++col) kernel::mul(G.at(h, col), Ah[D[col].h], B[col], t.raw());
    });

    // e_{4N}(-n x_m) with x_m = (1 - 2m)/(4Q)
    for (size_t row = 0; row < n; ++row)
      C[row] = unit_circle_exp_ratio(p, -D[row].n * (1 - 2 * m), 16L * N * Q);

    parallel_for(n, [&](size_t row) {
      BigReal t(p);
      const BigComplex* g = G.row(D[row].h);
      BigComplex* v = sys.V.row(row);
      const BigComplex& c = C[row];
      for (size_t col = 0; col < n; ++col) kernel::mul_add(v[col], c, g[col], t.raw());
      kernel::mul_add(sys.Wvec[row], c, AP[D[row].h], t.raw());
    });
  }

  // 1/(2Q), diagonal correction, principal-part rows.
  parallel_for(n, [&](size_t row) {
    BigComplex* v = sys.V.row(row);
    for (size_t col = 0; col < n; ++col) {
      mpfr_div_ui(v[col].re.raw(), v[col].re.raw(), 2UL * Q, MPFR_RNDN);
      mpfr_div_ui(v[col].im.raw(), v[col].im.raw(), 2UL * Q, MPFR_RNDN);
    }
    mpfr_div_ui(sys.Wvec[row].re.raw(), sys.Wvec[row].re.raw(), 2UL * Q, MPFR_RNDN);
    mpfr_div_ui(sys.Wvec[row].im.raw(), sys.Wvec[row].im.raw(), 2UL * Q, MPFR_RNDN);
    BigReal v_row = job.Y * static_cast<long>(D[row].n) / four_n;
    v[row].re -= w_kernel(P.k, v_row, ctx);
    auto it = job.principal.terms.find(D[row]);
    if (it != job.principal.terms.end()) {
      BigReal damp = exp(-(two_pi * v_row));
      sys.Wvec[row] -= it->second.rounded(p) * damp;
    }
  });
  return sys;
}

}  // namespace hwmf
