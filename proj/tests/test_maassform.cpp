#include <random>

#include "doctest.h"
#include "hwmf/maassform.hpp"
#include "oracles.hpp"

using namespace hwmf;

namespace {

const PrecisionContext kCtx = make_context(28);

HarmonicParams params(int N, bool conj, Mode mode = Mode::harmonic) {
  HarmonicParams p;
  p.N = N;
  p.k = WeightParam::parse("1/2");
  p.conjugated = conj;
  p.mode = mode;
  return p;
}

BigComplex cval(double re, double im = 0) { return BigComplex(BigReal(kCtx, re), BigReal(kCtx, im)); }

}  // namespace

TEST_CASE("index set enumeration") {
  auto D = build_index_set(params(1, false), 2);
  std::vector<CoeffIndex> expect = {{-8, 0}, {-4, 0}, {4, 0}, {8, 0}, {-7, 1}, {-3, 1}, {1, 1}, {5, 1}};
  CHECK(D.list() == expect);
  CHECK(D.size() == 8);

  auto D11 = build_index_set(params(11, true), 42);
  CHECK(D11.size() == 1848);
  long max_n = 0;
  for (auto& i : D11.list()) {
    max_n = std::max(max_n, i.n);
    CHECK(params(11, true).residue_ok(i.n, i.h));
  }
  CHECK(max_n <= 4 * 11 * 42);

  auto H = build_index_set(params(11, true, Mode::holomorphic), 42);
  CHECK(H.size() == 924);
  for (auto& i : H.list()) CHECK(i.n > 0);

  for (size_t i = 1; i < D11.size(); ++i) CHECK(D11[i - 1] < D11[i]);
  CHECK(*D11.find(D11[17]) == 17);
  CHECK(!D11.find({0, 0}).has_value());
  CHECK_THROWS_AS(build_index_set(params(1, false), 0), ValidationError);
}

TEST_CASE("harmonic parameter validation") {
  auto p = params(11, true);
  CHECK_NOTHROW(p.validate());
  p.k = WeightParam::parse("3/2");
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p.k = WeightParam::parse("-1/2");
  CHECK_NOTHROW(p.validate());
  p.mode = Mode::holomorphic;
  p.k = WeightParam::parse("5/2");
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("principal part congruence") {
  auto p = params(11, true);
  PrincipalPart pp;
  pp.terms[{-5, 7}] = cval(1);
  pp.terms[{-5, 15}] = cval(-1);
  CHECK_NOTHROW(pp.validate(p));
  CHECK(pp.K() == 5);
  pp.terms[{-5, 8}] = cval(1);
  CHECK_THROWS_AS(pp.validate(p), ValidationError);
  PrincipalPart empty;
  CHECK_THROWS_AS(empty.validate(p), ValidationError);
}

TEST_CASE("discriminant labels") {
  auto p11 = params(11, true);
  CHECK(delta_to_index(p11, -7) == CoeffIndex{7, 9});
  auto p37 = params(37, false);
  CHECK(delta_to_index(p37, 12) == CoeffIndex{12, 30});
  CHECK_THROWS_AS(delta_to_index(p11, -1), ValidationError);

  // c^- labels: 11a1 uses Delta = 1 for n = -1.
  CHECK(delta_to_index(p11, 1) == CoeffIndex{-1, 1});

  for (auto* p : {&p11, &p37}) {
    long lim = 4L * p->N * 6;
    int represented = 0;
    for (long d = -lim; d <= lim; ++d) {
      if (d == 0) continue;
      CoeffIndex idx;
      try {
        idx = delta_to_index(*p, d);
      } catch (const ValidationError&) {
        continue;
      }
      ++represented;
      CHECK(p->residue_ok(idx.n, idx.h));
      CHECK(index_to_delta(*p, idx) == d);
    }
    CHECK(represented > 0);
  }
}

TEST_CASE("truncated evaluation") {
  CoefficientTable t;
  t.params = params(1, false);
  t.principal.terms[{-3, 1}] = cval(1);
  BigComplex tau = cval(0.17, 1.1);

  // no stored coefficients: principal part alone
  auto v0 = evaluate_truncated(t, tau, kCtx);
  BigReal two_pi = pi(kCtx.bits) * 2L;
  BigComplex expect = unit_circle_exp(tau.re * -3L / 4L) * exp(two_pi * tau.im * 3L / 4L);
  CHECK(oracle::abs_err(v0[1], expect) < 1e-25);
  CHECK(v0[0].is_zero());

  // single-term table at tau = i: W(5/4) e_4(0)
  CoefficientTable s;
  s.params = params(1, false);
  s.entries[{5, 1}] = CoeffEntry{cval(1), BigReal(kCtx, 1e-30), 1};
  auto v1 = evaluate_truncated(s, cval(0, 1), kCtx);
  BigReal w = w_kernel(s.params.k, BigReal::parse(kCtx, "5/4"), kCtx);
  CHECK(oracle::abs_err(v1[1], BigComplex(w)) < 1e-27);

  // linearity in the entries
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CoefficientTable a = t, b = t, ab = t;
  a.principal.terms.clear();
  b.principal.terms.clear();
  ab.principal.terms.clear();
  auto D = build_index_set(t.params, 2);
  for (auto idx : D.list()) {
    BigComplex x = cval(g(rng), g(rng)), y = cval(g(rng), g(rng));
    a.entries[idx] = {x, BigReal(kCtx, 1.0), 1};
    b.entries[idx] = {y, BigReal(kCtx, 1.0), 1};
    ab.entries[idx] = {x * BigReal(kCtx, 2.0) + y, BigReal(kCtx, 1.0), 1};
  }
  auto fa = evaluate_truncated(a, tau, kCtx), fb = evaluate_truncated(b, tau, kCtx),
       fab = evaluate_truncated(ab, tau, kCtx);
  for (int h = 0; h < 2; ++h) CHECK(oracle::abs_err(fab[h], fa[h] * BigReal(kCtx, 2.0) + fb[h]) < 1e-25);

  // phase-1 filter
  ab.entries.begin()->second.phase = 2;
  auto f1 = evaluate_truncated(ab, tau, kCtx, true);
  CHECK(oracle::abs_err(f1[0], fab[0]) > 0);
}

TEST_CASE("pairing") {
  PrincipalPart none;
  CHECK(pairing(none, {}, kCtx).is_zero());

  PrincipalPart pp;
  pp.terms[{-5, 7}] = cval(1);
  pp.terms[{-5, 15}] = cval(-1);
  BigComplex beta = cval(0.3, 1.2), gamma = cval(-2.5, 0.25);
  std::map<CoeffIndex, BigComplex> b = {{{5, 7}, beta}, {{5, 15}, gamma}};
  CHECK(oracle::abs_err(pairing(pp, b, kCtx), beta - gamma) < 1e-27);

  b.erase({5, 15});
  CHECK_THROWS_WITH_AS(pairing(pp, b, kCtx), doctest::Contains("(n=5, h=15)"), ValidationError);

  // bilinearity
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    PrincipalPart p1, p2, p12;
    std::map<CoeffIndex, BigComplex> c1, c2, c12;
    for (int i = 0; i < 4; ++i) {
      CoeffIndex idx{-static_cast<long>(i), i};
      BigComplex x = cval(g(rng), g(rng)), y = cval(g(rng), g(rng));
      p1.terms[idx] = x;
      p2.terms[idx] = y;
      p12.terms[idx] = x + y;
      BigComplex u = cval(g(rng), g(rng)), v = cval(g(rng), g(rng));
      c1[{-idx.n, idx.h}] = u;
      c2[{-idx.n, idx.h}] = v;
      c12[{-idx.n, idx.h}] = u + v;
    }
    CHECK(oracle::abs_err(pairing(p12, c1, kCtx), pairing(p1, c1, kCtx) + pairing(p2, c1, kCtx)) < 1e-25);
    CHECK(oracle::abs_err(pairing(p1, c12, kCtx), pairing(p1, c1, kCtx) + pairing(p1, c2, kCtx)) < 1e-25);
  }
}

TEST_CASE("table validation") {
  CoefficientTable t;
  t.params = params(11, true);
  t.principal.terms[{-5, 7}] = cval(1);
  t.entries[{7, 9}] = {cval(2.8), BigReal(kCtx, 1e-20), 1};
  CHECK_NOTHROW(t.validate());
  t.entries[{7, 8}] = {cval(2.8), BigReal(kCtx, 1e-20), 1};
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t.entries.erase({7, 8});
  t.entries[{7, 9}].err_bound = BigReal(kCtx, 0.0);
  CHECK_THROWS_AS(t.validate(), ValidationError);
}
