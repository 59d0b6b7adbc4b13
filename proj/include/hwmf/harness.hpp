#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hwmf/maassform.hpp"
#include "hwmf/solver.hpp"
#include "hwmf/weilrep.hpp"

namespace hwmf {

// One line of a check: what was measured for which label.
struct CheckRow {
  std::string label;    // e.g. "Delta=-824" or a sample description
  std::string value;    // the quantity reported (ratio, nearest integer, ...)
  std::string measure;  // distance / discrepancy / residual
  bool flag = false;    // check-specific: failed sample, algebraic candidate, ...
};

struct CheckReport {
  std::string name;
  bool passed = true;
  std::string discrepancy;  // worst measured value
  std::string threshold;
  std::string detail;       // offending index or other context
  std::vector<CheckRow> rows;
};

// max over common phase-1 entries of |a - b|; pass iff <= threshold.
CheckReport compare_tables(const CoefficientTable& a, const CoefficientTable& b, const BigReal& threshold);

// Phase 1 at Y1 and Y2 with the same M0 and Q (fixed from the Y1 job), then
// compare_tables. Default threshold 10^(-digits/2). `first` reuses an
// existing Y1 run.
CheckReport y_independence(const SolveJob& job, const BigReal& Y1, const BigReal& Y2,
                           std::optional<BigReal> threshold = std::nullopt, const Phase1Result* first = nullptr,
                           const ProgressFn& progress = {});

// sqrt|Delta| c(Delta) / (sqrt|Delta0| c(Delta0)) over the non-holomorphic
// entries (all of them, or the listed discriminants), with nearest-integer
// distances; pass iff every distance is below threshold.
CheckReport cminus_ratio_report(const CoefficientTable& table, long delta0,
                                const std::vector<long>& deltas = {}, double threshold = 1e-8);

struct IntegerProximity {
  std::string nearest;  // decimal integer
  BigReal distance;     // |c - nearest|
  bool candidate = false;
};

// Nearest integer to Re c (ties to even) and |c - nearest|. Candidate iff
// distance < min(err_bound, 10^(-digits/3)); exact ties are never candidates.
IntegerProximity integer_proximity(const BigComplex& c, const BigReal& err_bound, int digits);
CheckReport integer_proximity(const CoefficientTable& table, const std::vector<CoeffIndex>& indices);

struct AutomorphySample {
  BigComplex tau;
  Sl2z A;
};

// Random samples with Im tau >= min_height and Im A tau >= min_height.
std::vector<AutomorphySample> random_automorphy_samples(size_t count, const BigReal& min_height,
                                                        std::mt19937_64& rng);

// |f(A tau) - phi_A(tau)^{2k} rho(A) f(tau)|^2 for the phase-1 expansion;
// pass iff every sample is <= 2 eps Y^{-2k} (eps_effective and Y of the run).
CheckReport automorphy_residual(const CoefficientTable& table, const std::vector<AutomorphySample>& samples);

struct LValueRecord {
  long delta = 0;
  std::string value;
  std::string source;
};

// CSV with header `Delta,value,source`.
std::vector<LValueRecord> load_lvalue_csv(const std::string& path);

// For each record with a table entry: vanishing iff |value| < threshold,
// candidate from integer_proximity. Pass iff the two agree on every row.
CheckReport dichotomy_report(const CoefficientTable& table, const std::vector<LValueRecord>& records,
                             double vanish_threshold = 1e-10);

}  // namespace hwmf
