#include "hwmf/maassform.hpp"

#include <cmath>
#include <cstdlib>

namespace hwmf {

std::string to_string(Mode m) { return m == Mode::harmonic ? "harmonic" : "holomorphic"; }

Mode parse_mode(std::string_view s) {
  if (s == "harmonic") return Mode::harmonic;
  if (s == "holomorphic") return Mode::holomorphic;
  throw ValidationError("mode must be \"harmonic\" or \"holomorphic\", got \"" + std::string(s) + "\"");
}

bool HarmonicParams::residue_ok(long n, int h) const {
  long four_n = 4L * N;
  long hh = mod_pos(static_cast<long>(h) * h, four_n);
  return mod_pos(n - sigma() * hh, four_n) == 0;
}

void HarmonicParams::validate() const {
  if (N < 1) throw ValidationError("N must be positive, got " + std::to_string(N));
  if (mode == Mode::harmonic) {
    if (!(k.twice() == 1 || k.twice() < 0))
      throw ValidationError("harmonic mode needs k = 1/2 or k < 0, got k = " + k.to_string());
  }
}

std::string CoeffIndex::to_string() const {
  return "(n=" + std::to_string(n) + ", h=" + std::to_string(h) + ")";
}

int PrincipalPart::K() const {
  long k = 0;
  for (const auto& [idx, a] : terms) k = std::max(k, std::labs(idx.n));
  return static_cast<int>(k);
}

void PrincipalPart::validate(const HarmonicParams& params) const {
  if (terms.empty()) throw ValidationError("principal part has no terms");
  for (const auto& [idx, a] : terms) {
    if (idx.n > 0) throw ValidationError("principal part term " + idx.to_string() + " has n > 0");
    if (idx.h < 0 || idx.h >= 2 * params.N)
      throw ValidationError("principal part term " + idx.to_string() + ": h outside [0, 2N)");
    if (!params.residue_ok(idx.n, idx.h))
      throw ValidationError("principal part term " + idx.to_string() + " violates n = " +
                            (params.sigma() > 0 ? "" : "-") + "h^2 mod " + std::to_string(4 * params.N));
    if (!a.re.is_finite() || !a.im.is_finite())
      throw ValidationError("principal part term " + idx.to_string() + " is not finite");
  }
}

CoeffIndexSet::CoeffIndexSet(std::vector<CoeffIndex> list) : list_(std::move(list)) {
  for (size_t i = 0; i < list_.size(); ++i) pos_.emplace(list_[i], i);
}

std::optional<size_t> CoeffIndexSet::find(const CoeffIndex& idx) const {
  auto it = pos_.find(idx);
  if (it == pos_.end()) return std::nullopt;
  return it->second;
}

CoeffIndexSet build_index_set(const HarmonicParams& params, int M0) {
  if (M0 < 1) throw ValidationError("M0 must be >= 1, got " + std::to_string(M0));
  const long four_n = 4L * params.N;
  const long bound = four_n * M0;
  std::vector<CoeffIndex> list;
  for (int h = 0; h < 2 * params.N; ++h) {
    long r = mod_pos(params.sigma() * static_cast<long>(h) * h, four_n);
    long lo = params.mode == Mode::holomorphic ? 1 : -bound;
    // first n >= lo in the class r
    long n = lo + mod_pos(r - lo, four_n);
    for (; n <= bound; n += four_n)
      if (n != 0) list.push_back({n, h});
  }
  return CoeffIndexSet(std::move(list));
}

const CoeffEntry& CoefficientTable::at(const CoeffIndex& idx) const {
  auto it = entries.find(idx);
  if (it == entries.end()) throw ValidationError("coefficient " + idx.to_string() + " not in table");
  return it->second;
}

void CoefficientTable::validate() const {
  params.validate();
  principal.validate(params);
  for (const auto& [idx, e] : entries) {
    if (!params.residue_ok(idx.n, idx.h) || idx.h < 0 || idx.h >= 2 * params.N)
      throw ValidationError("table entry " + idx.to_string() + " violates the residue congruence");
    if (!(e.err_bound.sign() > 0)) throw ValidationError("table entry " + idx.to_string() + " has err_bound <= 0");
    if (e.phase != 1 && e.phase != 2) throw ValidationError("table entry " + idx.to_string() + " has bad phase");
  }
}

CoeffIndex delta_to_index(const HarmonicParams& params, long delta) {
  const long four_n = 4L * params.N;
  long target = mod_pos(delta, four_n);
  for (int r = 0; r < 2 * params.N; ++r) {
    if (mod_pos(static_cast<long>(r) * r, four_n) == target) return {params.sigma() * delta, r};
  }
  throw ValidationError("discriminant " + std::to_string(delta) + " not represented: not a square mod " +
                        std::to_string(four_n));
}

long index_to_delta(const HarmonicParams& params, const CoeffIndex& idx) {
  if (!params.residue_ok(idx.n, idx.h)) throw ValidationError("index " + idx.to_string() + " violates the congruence");
  return params.sigma() * idx.n;
}

std::vector<BigComplex> evaluate_truncated(const CoefficientTable& table, const BigComplex& tau,
                                           const PrecisionContext& ctx, bool phase1_only) {
  if (tau.im.sign() <= 0) throw ValidationError("evaluate_truncated: Im tau must be positive");
  const int N = table.params.N;
  const long four_n = 4L * N;
  const mpfr_prec_t p = ctx.bits;
  BigComplex z = tau.rounded(p);
  std::vector<BigComplex> out(2 * N, BigComplex(p));
  BigReal two_pi = pi(p) * 2L;
  // e_{4N}(n u) = e(n u / 4N); u is not rational here so use unit_circle_exp.
  auto phase = [&](long n) { return unit_circle_exp(z.re * static_cast<long>(n) / four_n); };
  for (const auto& [idx, a] : table.principal.terms) {
    BigReal damp = exp(-(two_pi * z.im * static_cast<long>(idx.n) / four_n));
    out[idx.h] += a.rounded(p) * phase(idx.n) * damp;
  }
  for (const auto& [idx, e] : table.entries) {
    if (phase1_only && e.phase != 1) continue;
    BigReal v = z.im * static_cast<long>(idx.n) / four_n;
    out[idx.h] += e.value.rounded(p) * phase(idx.n) * w_kernel(table.params.k, v, ctx);
  }
  return out;
}

BigComplex pairing(const PrincipalPart& principal, const std::map<CoeffIndex, BigComplex>& cusp_coeffs,
                   const PrecisionContext& ctx) {
  BigComplex sum(ctx);
  for (const auto& [idx, a] : principal.terms) {
    CoeffIndex dual{-idx.n, idx.h};
    auto it = cusp_coeffs.find(dual);
    if (it == cusp_coeffs.end()) {
      if (idx.n == 0) continue;  // cusp forms have no constant term
      throw ValidationError("pairing: cusp coefficient " + dual.to_string() + " missing");
    }
    sum += a.rounded(ctx.bits) * it->second.rounded(ctx.bits);
  }
  return sum;
}

}  // namespace hwmf
