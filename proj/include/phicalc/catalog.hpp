#pragma once

#include "phicalc/corner.hpp"

#include <map>
#include <string>

namespace phicalc {

struct Catalog {
    std::map<std::string, SpacePtr> spaces;
    std::map<std::string, BMap> maps;
    std::map<std::string, BaseProjection> projections;  // pi_C, pi_L, pi_R on base variables
    std::map<std::string, std::vector<BlowupCenter>> programs;

    const SpacePtr& space(const std::string& name) const;
    const BMap& map(const std::string& name) const;
};

// Spaces: M2b, M2phi, M2phi_t ([0,inf) x M2phi with tau = sqrt t), HMphi,
// M2phi_R (time-blown double space the triple projections land in),
// M2phi_Rprod (product double space used for time densities),
// M3b, M3bt, HM3phi. Maps: beta_* blowdowns, Pi_C/L/R.
const Catalog& catalog();
Catalog build_catalog();

}  // namespace phicalc
