#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "hwmf/parallel.hpp"
#include "hwmf/solver.hpp"
#include "hwmf/specialfun.hpp"

namespace hwmf {

namespace {

void note(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

// 2 eps max(1, Y^{-2k})
BigReal residual_bound(const BigReal& eps, const BigReal& Y, const WeightParam& k) {
  BigReal y2k(Y.precision());
  mpfr_pow_si(y2k.raw(), Y.raw(), -k.twice(), MPFR_RNDU);
  BigReal one(Y.precision());
  mpfr_set_ui(one.raw(), 1, MPFR_RNDN);
  return eps * max(one, y2k) * 2L;
}

constexpr int kQCap = 4000;

}  // namespace

BigComplex horocycle_inversion(const std::vector<std::vector<BigComplex>>& values, const CoeffIndex& idx, int N,
                               int Q) {
  if (values.size() != 2 * static_cast<size_t>(Q)) throw ValidationError("horocycle_inversion: need 2Q samples");
  const mpfr_prec_t p = values.front().at(idx.h).precision();
  BigComplex acc(p);
  BigReal t(p);
  for (size_t mi = 0; mi < values.size(); ++mi) {
    long m = 1 - Q + static_cast<long>(mi);
    BigComplex c = unit_circle_exp_ratio(p, -idx.n * (1 - 2 * m), 16L * N * Q);
    kernel::mul_add(acc, c, values[mi].at(idx.h), t.raw());
  }
  mpfr_div_ui(acc.re.raw(), acc.re.raw(), 2UL * Q, MPFR_RNDN);
  mpfr_div_ui(acc.im.raw(), acc.im.raw(), 2UL * Q, MPFR_RNDN);
  return acc;
}

PrecisionContext table_context(const CoefficientTable& table) { return make_context(table.meta.digits); }

Phase1Result solve_phase1(const SolveJob& job_in, const ProgressFn& progress) {
  SolveJob job = finalize_job(job_in);
  const PrecisionContext& ctx = job.ctx;
  const mpfr_prec_t p = ctx.bits;
  note(progress, "phase1: N=" + std::to_string(job.params.N) + " M0=" + std::to_string(job.M0) +
                     " Q=" + std::to_string(job.Q) + " digits=" + std::to_string(ctx.digits));

  LinearSystem sys = assemble_system(job);
  const size_t n = sys.index.size();
  note(progress, "phase1: assembled " + std::to_string(n) + "x" + std::to_string(n));

  LUFactorization lu(std::move(sys.V), ctx);
  std::vector<BigComplex> rhs(n);
  for (size_t i = 0; i < n; ++i) rhs[i] = -sys.Wvec[i];
  std::vector<BigComplex> D = lu.solve(rhs);
  note(progress, "phase1: solved, pivot growth " + lu.pivot_growth().to_string(4));

  ErrorReport rep;
  // A hand-picked M0 below the truncation point leaves a tail larger than
  // eps; the certificate has to use that tail instead.
  rep.eps_effective = job.eps;
  const int K = job.principal.K();
  if (truncation_M0(job.params.N, job.params.k, K, job.Y, job.eps) > job.M0) {
    rep.eps_effective = max(job.eps, truncation_tail(job.params.N, job.params.k, K, job.Y, job.M0).rounded(p));
    note(progress, "phase1: M0 is below the truncation point for eps; bounds use the modeled tail " +
                       rep.eps_effective.to_string(4));
  }
  rep.residual_bound = residual_bound(rep.eps_effective, job.Y, job.params.k);
  rep.inv_norm = inv_norm_estimate(lu);
  rep.coeff_bound = rep.residual_bound * rep.inv_norm;
  rep.pivot_growth = lu.pivot_growth();

  const long four_n = 4L * job.params.N;
  std::vector<BigReal> w(n, BigReal(p));
  for (size_t i = 0; i < n; ++i)
    w[i] = w_kernel(job.params.k, job.Y * static_cast<long>(sys.index[i].n) / four_n, ctx);
  rep.scaled_inv_norm = inv_norm_estimate(lu, w);
  note(progress, "phase1: ||V^-1|| ~ " + rep.inv_norm.to_string(4) + ", scaled " + rep.scaled_inv_norm.to_string(4));

  Phase1Result out;
  CoefficientTable& t = out.table;
  t.params = job.params;
  t.principal = job.principal;
  for (size_t i = 0; i < n; ++i) {
    // |c_i - d_i| <= r ||row_i V^{-1}||_1 <= r ||diag(w) V^{-1}||_inf / w_i
    BigReal per_entry = rep.residual_bound * rep.scaled_inv_norm / w[i];
    t.entries[sys.index[i]] = CoeffEntry{D[i], min(rep.coeff_bound, per_entry), 1};
  }
  t.meta.digits = ctx.digits;
  t.meta.M0 = job.M0;
  t.meta.Q = job.Q;
  t.meta.Y = job.Y.to_string();
  t.meta.eps = job.eps.to_string();
  t.meta.eps_effective = rep.eps_effective.to_string();
  t.meta.inv_norm = rep.inv_norm.to_string();
  t.meta.residual_bound = rep.residual_bound.to_string();
  t.meta.coeff_bound = rep.coeff_bound.to_string();
  t.meta.pivot_growth = rep.pivot_growth.to_string();
  out.report = std::move(rep);
  return out;
}

std::map<CoeffIndex, CoeffEntry> phase2_values(const CoefficientTable& table, const std::vector<CoeffIndex>& targets,
                                               int budget, const ProgressFn& progress,
                                               std::vector<RunMetadata::Phase2Batch>* batches) {
  table.validate();
  const PrecisionContext ctx = table_context(table);
  const mpfr_prec_t p = ctx.bits;
  const HarmonicParams& P = table.params;
  const long four_n = 4L * P.N;
  const int dim = 2 * P.N;
  if (budget < 1 || budget >= ctx.digits)
    throw ValidationError("digit_loss_budget must lie in [1, " + std::to_string(ctx.digits - 1) + "], got " +
                          std::to_string(budget));
  BigReal eps = BigReal::parse(ctx, table.meta.eps);
  for (const auto& idx : targets) {
    if (idx.n == 0 || !P.residue_ok(idx.n, idx.h) || idx.h < 0 || idx.h >= dim)
      throw ValidationError("phase 2 target " + idx.to_string() + " violates the residue congruence");
    if (P.mode == Mode::holomorphic && idx.n < 0)
      throw ValidationError("phase 2 target " + idx.to_string() + " has n < 0 in holomorphic mode");
  }

  std::vector<std::pair<CoeffIndex, const CoeffEntry*>> p1;
  for (const auto& [idx, e] : table.entries)
    if (e.phase == 1) p1.emplace_back(idx, &e);
  if (p1.empty()) throw ValidationError("phase 2 needs phase-1 entries in the table");

  std::vector<CoeffIndex> sorted = targets;
  std::sort(sorted.begin(), sorted.end(), [](const CoeffIndex& a, const CoeffIndex& b) {
    if (std::labs(a.n) != std::labs(b.n)) return std::labs(a.n) < std::labs(b.n);
    return a < b;
  });

  BigReal limit(p);  // 10^{-budget}
  mpfr_set_si(limit.raw(), 10, MPFR_RNDN);
  mpfr_pow_si(limit.raw(), limit.raw(), -budget, MPFR_RNDN);
  BigReal y_max = ratio(p, 4, 5) * sqrt(BigReal(ctx, 3L)) / 2L;
  BigReal two_pi = pi(p) * 2L;

  std::map<CoeffIndex, CoeffEntry> out;
  size_t pos = 0;
  while (pos < sorted.size()) {
    size_t end = pos;
    long lo = std::labs(sorted[pos].n);
    while (end < sorted.size() && std::labs(sorted[end].n) <= 2 * lo) ++end;
    long n_pos = 0, n_neg = 0;
    for (size_t i = pos; i < end; ++i) {
      if (sorted[i].n > 0) n_pos = std::max(n_pos, sorted[i].n);
      else n_neg = std::max(n_neg, -sorted[i].n);
    }
    long n_max = std::max(n_pos, n_neg);

    // Height: closed form for n > 0, then shrink until every target keeps
    // W(nY/4N) >= 10^{-budget}.
    BigReal Y = BigReal(ctx, static_cast<long>(four_n * budget)) * log(BigReal(ctx, 10L)) /
                (two_pi * static_cast<long>(n_max));
    if (Y > y_max) Y = y_max;
    auto worst_w = [&](const BigReal& y) {
      std::optional<BigReal> best;
      for (long nn : {n_pos, -n_neg}) {
        if (nn == 0) continue;
        BigReal w = w_kernel(P.k, y * nn / four_n, ctx);
        if (!best || w < *best) best = w;
      }
      return *best;
    };
    int shrink = 0;
    while (worst_w(Y) < limit) {
      Y = Y * ratio(p, 19, 20);
      if (++shrink > 400) throw NumericalError("phase 2: no admissible height for |n| = " + std::to_string(n_max));
    }
    int M = truncation_M0(P.N, P.k, table.principal.K(), Y, eps);
    int need = static_cast<int>((n_max / four_n + M + 1) / 2 + 1);
    int Q = std::max(M, need) + std::max(10, (M + 4) / 5);
    if (Q > kQCap)
      throw NumericalError("phase 2: |n| = " + std::to_string(n_max) + " with budget " + std::to_string(budget) +
                           " needs Q = " + std::to_string(Q) + " > " + std::to_string(kQCap) +
                           "; rerun phase 1 at higher precision or raise the budget");
    note(progress, "phase2: batch |n| in [" + std::to_string(lo) + ", " + std::to_string(n_max) + "], Y=" +
                       Y.to_string(6) + ", Q=" + std::to_string(Q) + ", " + std::to_string(end - pos) + " targets");

    auto samples = prepare_samples(P, Y, Q, ctx);
    const size_t S = samples.size();
    // g_m = j^{2k} rho(T_m) fhat(z*_m) and the propagated phase-1 error.
    std::vector<std::vector<BigComplex>> g(S);
    std::vector<BigReal> prop(S, BigReal(p));
    parallel_for(S, [&](size_t mi) {
      const SamplePoint& s = samples[mi];
      std::vector<BigComplex> f(dim, BigComplex(p));
      BigReal err(p);
      for (const auto& [idx, a] : table.principal.terms) {
        BigReal damp = exp(-(two_pi * s.z_star.im * idx.n / four_n));
        f[idx.h] += a.rounded(p) * unit_circle_exp(s.z_star.re * idx.n / four_n) * damp;
      }
      for (const auto& [idx, e] : p1) {
        BigReal w = w_kernel(P.k, s.z_star.im * idx.n / four_n, ctx);
        f[idx.h] += e->value * unit_circle_exp(s.z_star.re * idx.n / four_n) * w;
        err += e->err_bound * w;
      }
      std::vector<BigComplex> rf = s.rho->apply(f);
      for (auto& z : rf) z = s.j2k * z;
      g[mi] = std::move(rf);
      prop[mi] = err * abs(s.j2k);
    });
    BigReal prop_max(p);
    for (auto& e : prop)
      if (e > prop_max) prop_max = e;
    BigReal base_err = residual_bound(eps, Y, P.k) + prop_max;

    for (size_t i = pos; i < end; ++i) {
      const CoeffIndex& idx = sorted[i];
      BigComplex acc = horocycle_inversion(g, idx, P.N, Q);
      BigReal v = Y * idx.n / four_n;
      auto it = table.principal.terms.find(idx);
      if (it != table.principal.terms.end()) acc -= it->second.rounded(p) * exp(-(two_pi * v));
      BigReal w = w_kernel(P.k, v, ctx);
      out[idx] = CoeffEntry{acc / w, base_err / w, 2};
    }
    if (batches) batches->push_back({lo, n_max, Q, Y.to_string()});
    pos = end;
  }
  return out;
}

CoefficientTable extend_phase2(const CoefficientTable& table, long from, long to, int budget,
                               const ProgressFn& progress) {
  if (from < 1 || to < from)
    throw ValidationError("phase 2 range must satisfy 1 <= from <= to, got [" + std::to_string(from) + ", " +
                          std::to_string(to) + "]");
  const HarmonicParams& P = table.params;
  std::vector<CoeffIndex> targets;
  for (int h = 0; h < 2 * P.N; ++h)
    for (long a = from; a <= to; ++a)
      for (long n : {a, -a}) {
        if (n < 0 && P.mode == Mode::holomorphic) continue;
        if (!P.residue_ok(n, h)) continue;
        auto it = table.entries.find({n, h});
        if (it != table.entries.end() && it->second.phase == 1) continue;
        targets.push_back({n, h});
      }
  CoefficientTable out = table;
  if (targets.empty()) return out;
  std::vector<RunMetadata::Phase2Batch> batches;
  auto vals = phase2_values(table, targets, budget, progress, &batches);
  for (auto& [idx, e] : vals) out.entries[idx] = std::move(e);
  for (auto& b : batches) out.meta.phase2.push_back(b);
  return out;
}

}  // namespace hwmf
