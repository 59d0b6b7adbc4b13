#include "hwmf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hwmf/fundom.hpp"

namespace hwmf {

namespace {

std::string delta_label(long d) { return "Delta=" + std::to_string(d); }

BigReal one(mpfr_prec_t p) {
  BigReal r(p);
  mpfr_set_ui(r.raw(), 1, MPFR_RNDN);
  return r;
}

std::string integer_string(const BigReal& x) {
  mpz_t z;
  mpz_init(z);
  mpfr_get_z(z, x.raw(), MPFR_RNDN);
  char* s = mpz_get_str(nullptr, 10, z);
  std::string out(s);
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(s, out.size() + 1);
  mpz_clear(z);
  return out;
}

}  // namespace

CheckReport compare_tables(const CoefficientTable& a, const CoefficientTable& b, const BigReal& threshold) {
  if (!(a.params == b.params)) throw ValidationError("compare_tables: tables have different parameters");
  CheckReport r;
  r.name = "y_independence";
  const mpfr_prec_t p = threshold.precision();
  BigReal worst(p);
  std::optional<CoeffIndex> at;
  size_t common = 0;
  long first_over = 0;  // smallest |n| whose difference exceeds the threshold
  for (const auto& [idx, ea] : a.entries) {
    if (ea.phase != 1) continue;
    auto it = b.entries.find(idx);
    if (it == b.entries.end() || it->second.phase != 1) continue;
    ++common;
    BigReal d = abs(ea.value.rounded(p) - it->second.value.rounded(p));
    if (!at || d > worst) {
      worst = d;
      at = idx;
    }
    if (d > threshold && (first_over == 0 || std::labs(idx.n) < first_over)) first_over = std::labs(idx.n);
  }
  if (common == 0) throw ValidationError("compare_tables: no common phase-1 entries");
  r.discrepancy = worst.to_string(6);
  r.threshold = threshold.to_string(6);
  r.passed = worst <= threshold;
  r.detail = "max at " + at->to_string() + " over " + std::to_string(common) + " entries";
  if (first_over > 0) r.detail += "; within threshold for |n| < " + std::to_string(first_over);
  return r;
}

CheckReport y_independence(const SolveJob& job_in, const BigReal& Y1, const BigReal& Y2,
                           std::optional<BigReal> threshold, const Phase1Result* first, const ProgressFn& progress) {
  SolveJob j1 = job_in;
  j1.Y = Y1.rounded(job_in.ctx.bits);
  j1 = finalize_job(j1);
  SolveJob j2 = j1;
  j2.Y = Y2.rounded(job_in.ctx.bits);
  j2.validate();
  std::optional<Phase1Result> own;
  if (!first) {
    own = solve_phase1(j1, progress);
    first = &*own;
  } else if (first->table.meta.M0 != j1.M0 || first->table.meta.Q != j1.Q ||
             !(BigReal::parse(j1.ctx, first->table.meta.Y) == j1.Y)) {
    throw ValidationError("y_independence: supplied run does not match the Y1 job");
  }
  Phase1Result second = solve_phase1(j2, progress);
  BigReal thr(j1.ctx.bits);
  if (threshold) {
    thr = threshold->rounded(j1.ctx.bits);
  } else {
    mpfr_set_ui(thr.raw(), 10, MPFR_RNDN);
    mpfr_pow_si(thr.raw(), thr.raw(), -(j1.ctx.digits / 2), MPFR_RNDN);
  }
  CheckReport r = compare_tables(first->table, second.table, thr);
  r.detail += ", Y = " + Y1.to_string(6) + " vs " + Y2.to_string(6);
  return r;
}

CheckReport cminus_ratio_report(const CoefficientTable& table, long delta0, const std::vector<long>& deltas,
                                double threshold) {
  const HarmonicParams& P = table.params;
  if (P.mode != Mode::harmonic) throw ValidationError("cminus_ratio_report: table has no non-holomorphic part");
  const PrecisionContext ctx = table_context(table);
  const mpfr_prec_t p = ctx.bits;
  CoeffIndex i0 = delta_to_index(P, delta0);
  if (i0.n >= 0) throw ValidationError("cminus_ratio_report: normalizer " + delta_label(delta0) + " is not a c^- entry");
  auto it0 = table.entries.find(i0);
  if (it0 == table.entries.end()) throw ValidationError("cminus_ratio_report: normalizer " + i0.to_string() + " missing");
  BigComplex norm0 = it0->second.value.rounded(p) * sqrt(BigReal(ctx, std::labs(delta0)));
  if (norm0.is_zero()) throw ValidationError("cminus_ratio_report: normalizer " + delta_label(delta0) + " is zero");

  std::vector<long> list = deltas;
  if (list.empty()) {
    for (const auto& [idx, e] : table.entries) {
      if (idx.n >= 0) continue;
      long d = index_to_delta(P, idx);
      if (delta_to_index(P, d) == idx) list.push_back(d);
    }
    std::sort(list.begin(), list.end(), [](long a, long b) {
      return std::labs(a) < std::labs(b) || (std::labs(a) == std::labs(b) && a < b);
    });
  }

  CheckReport r;
  r.name = "cminus_ratios";
  r.threshold = BigReal(ctx, threshold).to_string(3);
  r.detail = "normalized by sqrt(" + std::to_string(std::labs(delta0)) + ") c^-(" + std::to_string(delta0) + ")";
  BigReal worst(p);
  for (long d : list) {
    CoeffIndex idx = delta_to_index(P, d);
    if (idx.n >= 0) throw ValidationError("cminus_ratio_report: " + delta_label(d) + " is not a c^- entry");
    const CoeffEntry& e = table.at(idx);
    BigComplex ratio = e.value.rounded(p) * sqrt(BigReal(ctx, std::labs(d))) / norm0;
    BigReal nearest = round_even(ratio.re);
    BigReal dist = abs(ratio - BigComplex(nearest, BigReal(p)));
    bool bad = !(dist.to_double() < threshold);
    if (bad && r.passed) r.detail += "; first failure at " + delta_label(d);
    r.passed = r.passed && !bad;
    worst = max(worst, dist);
    r.rows.push_back({delta_label(d), ratio.re.to_string(20), dist.to_string(3), bad});
  }
  r.discrepancy = worst.to_string(3);
  return r;
}

IntegerProximity integer_proximity(const BigComplex& c, const BigReal& err_bound, int digits) {
  const mpfr_prec_t p = c.precision();
  IntegerProximity out;
  BigReal nearest = round_even(c.re);
  out.nearest = integer_string(nearest);
  out.distance = abs(c - BigComplex(nearest, BigReal(p)));
  BigReal limit(p);
  mpfr_set_ui(limit.raw(), 10, MPFR_RNDN);
  mpfr_pow_si(limit.raw(), limit.raw(), -(digits / 3), MPFR_RNDN);
  limit = min(limit, err_bound.rounded(p));
  BigReal half = one(p) / 2L;
  out.candidate = out.distance < limit && !(out.distance == half);
  return out;
}

CheckReport integer_proximity(const CoefficientTable& table, const std::vector<CoeffIndex>& indices) {
  CheckReport r;
  r.name = "integer_proximity";
  const int digits = table.meta.digits;
  BigReal limit(table_context(table));
  mpfr_set_ui(limit.raw(), 10, MPFR_RNDN);
  mpfr_pow_si(limit.raw(), limit.raw(), -(digits / 3), MPFR_RNDN);
  r.threshold = "min(err_bound, " + limit.to_string(3) + ")";
  size_t flagged = 0;
  for (const auto& idx : indices) {
    const CoeffEntry& e = table.at(idx);
    IntegerProximity ip = integer_proximity(e.value, e.err_bound, digits);
    flagged += ip.candidate;
    r.rows.push_back(
        {delta_label(index_to_delta(table.params, idx)), ip.nearest, ip.distance.to_string(3), ip.candidate});
  }
  r.discrepancy = std::to_string(flagged) + " of " + std::to_string(indices.size()) + " flagged";
  return r;
}

std::vector<AutomorphySample> random_automorphy_samples(size_t count, const BigReal& min_height,
                                                        std::mt19937_64& rng) {
  const mpfr_prec_t p = min_height.precision();
  const double h = min_height.to_double();
  if (!(h > 0) || h > 1) throw ValidationError("random_automorphy_samples: min_height must lie in (0, 1]");
  std::uniform_real_distribution<double> unit(0, 1);
  std::uniform_int_distribution<int> small(-3, 3), kind(0, 2);
  std::vector<AutomorphySample> out;
  while (out.size() < count) {
    // Im(A tau) = Im tau / |c tau + d|^2, so c is 0 or +-1 and tau sits
    // within reach of -d/c.
    int c = kind(rng) - 1, d = small(rng), a = small(rng);
    Sl2z A = Sl2z::identity();
    double x, y;
    if (c == 0) {
      A = Sl2z::make(1, small(rng), 0, 1);
      if (unit(rng) < 0.5) A = Sl2z::make(-1, -A.b, 0, -1);
      x = unit(rng) - 0.5;
      y = h + unit(rng);
    } else {
      // a d - b c = 1 with c = +-1
      A = Sl2z::make(a, c * (a * d - 1), c, d);
      double u = 0.8 * unit(rng) - 0.4;
      double r = std::sqrt(1 / (4 * h * h) - u * u);
      double lo = std::max(h, 1 / (2 * h) - r), hi = 1 / (2 * h) + r;
      if (!(hi > lo)) continue;
      x = -static_cast<double>(d) / c + u;
      y = lo + (hi - lo) * (0.05 + 0.9 * unit(rng));
    }
    BigComplex tau(p);
    mpfr_set_d(tau.re.raw(), x, MPFR_RNDN);
    mpfr_set_d(tau.im.raw(), y, MPFR_RNDN);
    BigComplex at = mobius(A, tau);
    if (tau.im < min_height || at.im < min_height) continue;
    out.push_back({tau, A});
  }
  return out;
}

CheckReport automorphy_residual(const CoefficientTable& table, const std::vector<AutomorphySample>& samples) {
  table.validate();
  const PrecisionContext ctx = table_context(table);
  const mpfr_prec_t p = ctx.bits;
  const HarmonicParams& P = table.params;
  BigReal Y = BigReal::parse(ctx, table.meta.Y);
  BigReal eps = BigReal::parse(ctx, table.meta.eps_effective.empty() ? table.meta.eps : table.meta.eps_effective);
  BigReal y2k(p);
  mpfr_pow_si(y2k.raw(), Y.raw(), -P.k.twice(), MPFR_RNDU);
  BigReal bound = eps * max(one(p), y2k) * 2L;

  CheckReport r;
  r.name = "automorphy_residual";
  r.threshold = bound.to_string(4);
  BigReal worst(p);
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    BigComplex tau = s.tau.rounded(p);
    BigComplex at = mobius(s.A, tau);
    if (tau.im < Y || at.im < Y)
      throw ValidationError("automorphy_residual: sample " + std::to_string(i) + " (A = " + s.A.to_string() +
                            ") has a height below Y = " + Y.to_string(6));
    MetaplecticElement m = canonical_lift(s.A);
    BigComplex j = automorphy_j2k(m, tau, P.k, ctx);
    auto rho = rho_evaluate(m, P.N, P.conjugated, ctx);
    auto lhs = evaluate_truncated(table, at, ctx, true);
    auto rhs = rho->apply(evaluate_truncated(table, tau, ctx, true));
    BigReal res(p);
    for (size_t h = 0; h < lhs.size(); ++h) res += norm(lhs[h] - j * rhs[h]);
    bool bad = res > bound;
    if (bad && r.passed) r.detail = "first failure at sample " + std::to_string(i);
    r.passed = r.passed && !bad;
    worst = max(worst, res);
    r.rows.push_back({"tau=" + tau.re.to_string(8) + "+" + tau.im.to_string(8) + "i A=" + s.A.to_string(), "",
                      res.to_string(3), bad});
  }
  r.discrepancy = worst.to_string(4);
  return r;
}

std::vector<LValueRecord> load_lvalue_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open L-value file " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("L-value file " + path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "Delta,value,source") throw ValidationError("L-value file " + path + ": header must be Delta,value,source");
  std::vector<LValueRecord> out;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t c1 = line.find(','), c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw ValidationError("L-value file " + path + ":" + std::to_string(lineno) + ": expected three fields");
    LValueRecord rec;
    try {
      size_t used = 0;
      rec.delta = std::stol(line.substr(0, c1), &used);
      if (used != c1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("L-value file " + path + ":" + std::to_string(lineno) + ": bad Delta");
    }
    rec.value = line.substr(c1 + 1, c2 - c1 - 1);
    rec.source = line.substr(c2 + 1);
    out.push_back(std::move(rec));
  }
  return out;
}

CheckReport dichotomy_report(const CoefficientTable& table, const std::vector<LValueRecord>& records,
                             double vanish_threshold) {
  const PrecisionContext ctx = table_context(table);
  CheckReport r;
  r.name = "dichotomy";
  r.threshold = "|L'| < " + BigReal(ctx, vanish_threshold).to_string(3);
  size_t vanishing = 0, candidates = 0, skipped = 0;
  for (const auto& rec : records) {
    std::optional<CoeffIndex> idx;
    try {
      idx = delta_to_index(table.params, rec.delta);
    } catch (const ValidationError&) {
    }
    if (!idx || !table.entries.count(*idx)) {
      ++skipped;
      continue;
    }
    BigReal L = BigReal::parse(ctx, rec.value);
    bool vanish = abs(L).to_double() < vanish_threshold;
    const CoeffEntry& e = table.at(*idx);
    IntegerProximity ip = integer_proximity(e.value, e.err_bound, table.meta.digits);
    vanishing += vanish;
    candidates += ip.candidate;
    bool agree = vanish == ip.candidate;
    if (!agree && r.passed) r.detail = "first disagreement at " + delta_label(rec.delta);
    r.passed = r.passed && agree;
    r.rows.push_back({delta_label(rec.delta), ip.nearest + (vanish ? " (L' ~ 0)" : ""), ip.distance.to_string(3),
                      ip.candidate});
  }
  r.discrepancy = std::to_string(candidates) + " candidates, " + std::to_string(vanishing) + " vanishing, " +
                  std::to_string(skipped) + " records outside the table";
  return r;
}

}  // namespace hwmf
