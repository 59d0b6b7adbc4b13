#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "hwmf/fundom.hpp"
#include "hwmf/harness.hpp"
#include "oracles.hpp"

using namespace hwmf;

namespace {

const PrecisionContext kCtx = make_context(28);

BigReal R(const char* s) { return BigReal::parse(kCtx, s); }
BigComplex C(const char* re, const char* im = "0") { return BigComplex(R(re), R(im)); }

SolveJob job_11a1(const char* eps, const char* Y = "0.5") {
  SolveJob job;
  job.params.N = 11;
  job.params.k = WeightParam::parse("1/2");
  job.params.conjugated = true;
  job.ctx = kCtx;
  job.principal.terms[{-5, 7}] = C("1");
  job.principal.terms[{-5, 15}] = C("-1");
  job.eps = R(eps);
  job.Y = R(Y);
  return job;
}

const Phase1Result& run_11a1() {
  static const Phase1Result r = solve_phase1(job_11a1("1e-6"));
  return r;
}

// Hand-built table for the report plumbing: N = 1, rho, holomorphic.
CoefficientTable toy_table(const std::vector<std::pair<long, const char*>>& values) {
  CoefficientTable t;
  t.params.N = 1;
  t.params.mode = Mode::holomorphic;
  t.principal.terms[{0, 0}] = C("1");
  t.meta.digits = 28;
  t.meta.eps = "1e-20";
  t.meta.Y = "0.5";
  for (auto [delta, v] : values) t.entries[delta_to_index(t.params, delta)] = CoeffEntry{C(v), R("1e-15"), 1};
  return t;
}

}  // namespace

TEST_CASE("integer proximity") {
  auto ip = integer_proximity(C("8.999999999999"), R("1"), 28);
  CHECK(ip.nearest == "9");
  CHECK(std::fabs(ip.distance.to_double() - 1e-12) < 1e-20);
  CHECK(ip.candidate);  // below 10^(-28/3)
  CHECK(!integer_proximity(C("8.99999999"), R("1"), 28).candidate);

  ip = integer_proximity(C("8.99999999999999999999"), R("1"), 28);
  CHECK(ip.candidate);
  ip = integer_proximity(C("8.99999999999999999999"), R("1e-25"), 28);
  CHECK(!ip.candidate);  // err_bound is the tighter limit

  ip = integer_proximity(C("0.5"), R("1"), 28);
  CHECK(ip.nearest == "0");
  CHECK(ip.distance == R("0.5"));
  CHECK(!ip.candidate);
  CHECK(integer_proximity(C("1.5"), R("1"), 28).nearest == "2");
  CHECK(integer_proximity(C("-2.5"), R("1"), 28).nearest == "-2");

  ip = integer_proximity(C("-5798520.0000000000000000000003"), R("1e-10"), 28);
  CHECK(ip.nearest == "-5798520");
  CHECK(ip.candidate);
  // imaginary part counts towards the distance
  CHECK(!integer_proximity(C("3", "1e-3"), R("1"), 28).candidate);

  auto t = toy_table({{4, "2"}, {9, "2.0000001"}});
  auto rep = integer_proximity(t, {delta_to_index(t.params, 4), delta_to_index(t.params, 9)});
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].flag);
  CHECK(!rep.rows[1].flag);
  CHECK(rep.rows[1].value == "2");
}

TEST_CASE("table comparison") {
  auto a = toy_table({{1, "2"}, {4, "2"}, {9, "2"}});
  auto b = a;
  auto r = compare_tables(a, b, R("1e-12"));
  CHECK(r.passed);
  CHECK(R(r.discrepancy.c_str()).is_zero());

  b.entries[delta_to_index(b.params, 4)].value = C("2.001");
  r = compare_tables(a, b, R("1e-12"));
  CHECK(!r.passed);
  CHECK(r.detail.find(delta_to_index(b.params, 4).to_string()) != std::string::npos);
  CHECK(r.detail.find("within threshold for |n| < 4") != std::string::npos);
}

TEST_CASE("y independence with Y1 = Y2") {
  const auto& first = run_11a1();
  auto r = y_independence(job_11a1("1e-6"), R("0.5"), R("0.5"), std::nullopt, &first);
  CHECK(r.passed);
  CHECK(R(r.discrepancy.c_str()).is_zero());
  CHECK_THROWS_AS(y_independence(job_11a1("1e-6"), R("0.45"), R("0.5"), std::nullopt, &first), ValidationError);
}

TEST_CASE("c^- ratios on 11a1") {
  const auto& t = run_11a1().table;
  auto r = cminus_ratio_report(t, 1, {4, 5, 9, 12, 16, 20, 25, 36, 37, 45});
  CHECK(r.passed);
  const char* want[] = {"-3", "5", "-2", "5", "4", "5", "0", "6", "5", "0"};
  REQUIRE(r.rows.size() == 10);
  for (int i = 0; i < 10; ++i) {
    INFO(r.rows[i].label << " " << r.rows[i].value);
    CHECK(std::fabs(R(r.rows[i].value.c_str()).to_double() - std::atof(want[i])) < 1e-8);
  }
  auto all = cminus_ratio_report(t, 1);
  CHECK(all.rows.size() > 10);
  CHECK_THROWS_AS(cminus_ratio_report(t, -7), ValidationError);  // c^+ entry
}

TEST_CASE("automorphy residual") {
  const auto& t = run_11a1().table;
  BigComplex tau = C("0.1", "0.9");
  auto id = automorphy_residual(t, {{tau, Sl2z::identity()}});
  CHECK(id.passed);
  CHECK(R(id.rows[0].measure.c_str()).is_zero());

  auto tr = automorphy_residual(t, {{tau, Sl2z::T(1)}, {tau, Sl2z::T(-2)}});
  CHECK(tr.passed);
  CHECK(R(tr.discrepancy.c_str()).to_double() < 1e-40);

  std::mt19937_64 rng(2024);
  auto samples = random_automorphy_samples(20, R("0.5"), rng);
  REQUIRE(samples.size() == 20);
  int with_c = 0;
  for (const auto& s : samples) {
    CHECK(s.tau.im >= R("0.5"));
    CHECK(mobius(s.A, s.tau).im >= R("0.5"));
    with_c += s.A.c != 0;
  }
  CHECK(with_c > 5);
  auto r = automorphy_residual(t, samples);
  MESSAGE("worst residual " << r.discrepancy << " bound " << r.threshold);
  CHECK(r.passed);

  CHECK_THROWS_AS(automorphy_residual(t, {{C("0", "0.3"), Sl2z::identity()}}), ValidationError);
}

TEST_CASE("L-value records and the dichotomy report") {
  const std::string path = "test_harness_lvalues.csv";
  {
    std::ofstream out(path);
    out << "Delta,value,source\n1,0.5,a\n4,-3.7e-23,b\n9,1.25,c, with comma\n12,0,d\n";
  }
  auto recs = load_lvalue_csv(path);
  REQUIRE(recs.size() == 4);
  CHECK(recs[1].delta == 4);
  CHECK(recs[1].value == "-3.7e-23");
  CHECK(recs[2].source == "c, with comma");

  // 1: non-integer, L' != 0; 4: integer, L' ~ 0; 9: integer but L' != 0;
  // 12 has no table entry.
  auto t = toy_table({{1, "0.37"}, {4, "2"}, {9, "7"}});
  auto r = dichotomy_report(t, recs);
  CHECK(!r.passed);
  CHECK(r.detail.find("Delta=9") != std::string::npos);
  REQUIRE(r.rows.size() == 3);
  CHECK(!r.rows[0].flag);
  CHECK(r.rows[1].flag);

  t.entries[delta_to_index(t.params, 9)].value = C("7.25");
  CHECK(dichotomy_report(t, recs).passed);

  {
    std::ofstream out(path);
    out << "delta,value\n1,2\n";
  }
  CHECK_THROWS_AS(load_lvalue_csv(path), ValidationError);
  {
    std::ofstream out(path);
    out << "Delta,value,source\nx,2,s\n";
  }
  CHECK_THROWS_AS(load_lvalue_csv(path), ValidationError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_lvalue_csv(path), ValidationError);
}
