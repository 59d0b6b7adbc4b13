#pragma once

#include "hwmf/bigarith.hpp"
#include "hwmf/specialfun.hpp"
#include "hwmf/weilrep.hpp"

namespace hwmf {

struct PullbackResult {
  BigComplex z_star;      // in the closed standard fundamental domain
  MetaplecticElement map;  // z = map . z_star, canonical lift
};

// (a z + b) / (c z + d) at z's precision.
BigComplex mobius(const Sl2z& m, const BigComplex& z);

PullbackResult pullback(const BigComplex& z, const PrecisionContext& ctx);

// phi_map(z_star)^{2k}: sign^{2k} exp(k Log(c z_star + d)).
BigComplex automorphy_j2k(const MetaplecticElement& map, const BigComplex& z_star, const WeightParam& k,
                          const PrecisionContext& ctx);

}  // namespace hwmf
