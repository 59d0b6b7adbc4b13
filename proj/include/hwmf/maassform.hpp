#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hwmf/bigarith.hpp"
#include "hwmf/specialfun.hpp"

namespace hwmf {

enum class Mode { harmonic, holomorphic };

std::string to_string(Mode m);
Mode parse_mode(std::string_view s);

struct HarmonicParams {
  int N = 1;
  WeightParam k;
  bool conjugated = false;  // true: rho bar
  Mode mode = Mode::harmonic;

  // +1 for rho (n = h^2 mod 4N), -1 for rho bar.
  int sigma() const { return conjugated ? -1 : 1; }
  bool residue_ok(long n, int h) const;
  void validate() const;
  bool operator==(const HarmonicParams&) const = default;
};

// Coefficient label, ordered by (h, n).
struct CoeffIndex {
  long n = 0;
  int h = 0;

  auto operator<=>(const CoeffIndex& o) const {
    if (auto c = h <=> o.h; c != 0) return c;
    return n <=> o.n;
  }
  bool operator==(const CoeffIndex&) const = default;
  std::string to_string() const;
};

struct PrincipalPart {
  std::map<CoeffIndex, BigComplex> terms;

  // Largest |n| over the terms.
  int K() const;
  // Congruence and sign checks; throws ValidationError naming the term.
  void validate(const HarmonicParams& params) const;
};

class CoeffIndexSet {
 public:
  CoeffIndexSet() = default;
  explicit CoeffIndexSet(std::vector<CoeffIndex> list);

  size_t size() const { return list_.size(); }
  const CoeffIndex& operator[](size_t i) const { return list_[i]; }
  const std::vector<CoeffIndex>& list() const { return list_; }
  std::optional<size_t> find(const CoeffIndex& idx) const;

 private:
  std::vector<CoeffIndex> list_;
  std::map<CoeffIndex, size_t> pos_;
};

// All (n, h) with n = sigma h^2 mod 4N and 0 < |n| <= 4 N M0 (n > 0 only in
// holomorphic mode), ordered by (h, n).
CoeffIndexSet build_index_set(const HarmonicParams& params, int M0);

struct CoeffEntry {
  BigComplex value;
  BigReal err_bound;
  int phase = 1;
};

struct RunMetadata {
  int digits = 0;
  int M0 = 0;
  int Q = 0;
  std::string Y, eps;                              // decimal strings as configured
  std::string eps_effective;                       // eps raised to the modeled tail when M0 is forced low
  std::string inv_norm, residual_bound, coeff_bound;  // phase-1 error report
  std::string pivot_growth;
  struct Phase2Batch {
    long n_from = 0, n_to = 0;
    int Q = 0;
    std::string Y;
  };
  std::vector<Phase2Batch> phase2;
};

struct CoefficientTable {
  HarmonicParams params;
  PrincipalPart principal;
  std::map<CoeffIndex, CoeffEntry> entries;
  RunMetadata meta;

  const CoeffEntry& at(const CoeffIndex& idx) const;
  // Checks congruences and positive error bounds.
  void validate() const;
};

// Table label Delta <-> (n, h): n = sigma Delta and h the smallest residue in
// [0, 2N) with h^2 = Delta mod 4N.
CoeffIndex delta_to_index(const HarmonicParams& params, long delta);
long index_to_delta(const HarmonicParams& params, const CoeffIndex& idx);

// Truncated expansion f_h(tau), h = 0..2N-1, with the principal part included.
// phase1_only restricts the sum to phase-1 entries.
std::vector<BigComplex> evaluate_truncated(const CoefficientTable& table, const BigComplex& tau,
                                           const PrecisionContext& ctx, bool phase1_only = false);

// sum over principal terms a(n, h) b(-n, h).
BigComplex pairing(const PrincipalPart& principal, const std::map<CoeffIndex, BigComplex>& cusp_coeffs,
                   const PrecisionContext& ctx);

// n mod m in [0, m).
inline long mod_pos(long n, long m) {
  long r = n % m;
  return r < 0 ? r + m : r;
}

}  // namespace hwmf
