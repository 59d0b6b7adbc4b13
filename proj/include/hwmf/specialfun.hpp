#pragma once

#include <string>
#include <string_view>

#include "hwmf/bigarith.hpp"

namespace hwmf {

// Weight k stored as the integer 2k.
class WeightParam {
 public:
  WeightParam() = default;
  static WeightParam from_twice(int twice_k) { return WeightParam(twice_k); }
  // Accepts "1/2", "-3/2", "2", "0.5".
  static WeightParam parse(std::string_view text);

  int twice() const { return twice_k_; }
  bool half_integral() const { return twice_k_ % 2 != 0; }
  double to_double() const { return twice_k_ / 2.0; }
  BigReal value(mpfr_prec_t prec) const { return ratio(prec, twice_k_, 2); }
  std::string to_string() const;

  bool operator==(const WeightParam&) const = default;

 private:
  explicit WeightParam(int twice_k) : twice_k_(twice_k) {}
  int twice_k_ = 1;
};

BigReal erfc_big(const BigReal& x, const PrecisionContext& ctx);

// Gamma(a, x) for half-integral a = twice_a / 2.
BigReal upper_gamma_halfint(int twice_a, const BigReal& x, const PrecisionContext& ctx);

// W(v) = exp(-2 pi v) for v > 0 and exp(-2 pi v) Gamma(1-k, 4 pi |v|) for v < 0.
BigReal w_kernel(const WeightParam& k, const BigReal& v, const PrecisionContext& ctx);

// Upper bound for W(v) of the shape c_k exp(-2 pi |v|) (4 pi |v|)^(-k) on v < 0.
BigReal w_kernel_bound(const WeightParam& k, const BigReal& v);

// Smallest truncation point M0 whose modeled coefficient tail at height Y is
// below eps, times a 1.2 safety factor.
int truncation_M0(int N, const WeightParam& k, int K, const BigReal& Y, const BigReal& eps);

// Modeled tail at a given truncation point: the eps that truncation_M0 would
// need to return at most M0. Used when M0 is fixed by hand below the
// truncation point of the requested eps.
BigReal truncation_tail(int N, const WeightParam& k, int K, const BigReal& Y, int M0);

}  // namespace hwmf
