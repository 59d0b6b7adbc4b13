#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "hwmf/bigarith.hpp"

namespace hwmf {

// Integer matrix (a b; c d) with ad - bc = 1. Products are overflow checked.
struct Sl2z {
  long long a = 1, b = 0, c = 0, d = 1;

  static Sl2z make(long long a, long long b, long long c, long long d);  // validates det
  static Sl2z identity() { return {1, 0, 0, 1}; }
  static Sl2z T(long long n = 1) { return {1, n, 0, 1}; }
  static Sl2z S() { return {0, -1, 1, 0}; }

  Sl2z inverse() const { return {d, -b, -c, a}; }
  bool operator==(const Sl2z&) const = default;
  std::string to_string() const;
};

Sl2z operator*(const Sl2z& x, const Sl2z& y);

// (M, phi) with phi(tau) = sign * sqrt(c tau + d), principal branch.
struct MetaplecticElement {
  Sl2z m;
  int sign = 1;

  bool operator==(const MetaplecticElement&) const = default;
};

MetaplecticElement canonical_lift(const Sl2z& m);
MetaplecticElement mp_compose(const MetaplecticElement& A, const MetaplecticElement& B);
MetaplecticElement mp_inverse(const MetaplecticElement& A);

// phi(tau) for the element, at tau's precision.
BigComplex mp_phi(const MetaplecticElement& A, const BigComplex& tau);

// rho(M) on C[Z/2NZ]; entry (h, h') is the coefficient of e_h in rho(M) e_h'.
class RepMatrix {
 public:
  RepMatrix() = default;
  RepMatrix(int N, bool conjugated, mpfr_prec_t prec);

  int N() const { return N_; }
  int dim() const { return 2 * N_; }
  bool conjugated() const { return conjugated_; }
  mpfr_prec_t precision() const { return prec_; }

  BigComplex& at(int h, int hp) { return e_[static_cast<size_t>(h) * dim() + hp]; }
  const BigComplex& at(int h, int hp) const { return e_[static_cast<size_t>(h) * dim() + hp]; }

  std::vector<BigComplex> apply(const std::vector<BigComplex>& x) const;
  bool operator==(const RepMatrix& o) const;

 private:
  int N_ = 0;
  bool conjugated_ = false;
  mpfr_prec_t prec_ = 0;
  std::vector<BigComplex> e_;
};

// Evaluates the Weil representation through a word in S and T. Results are
// cached per (matrix, sign, N, conjugated, precision) in a bounded map
// shared by all threads.
std::shared_ptr<const RepMatrix> rho_evaluate(const MetaplecticElement& elt, int N, bool conjugated,
                                              const PrecisionContext& ctx);

// Generator matrices straight from their defining formulas.
RepMatrix rho_T(int N, bool conjugated, const PrecisionContext& ctx);
RepMatrix rho_S(int N, bool conjugated, const PrecisionContext& ctx);

void rho_cache_clear();
size_t rho_cache_size();

}  // namespace hwmf
