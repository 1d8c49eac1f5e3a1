#pragma once

#include "sbd/block.hpp"

#include <functional>

namespace sbd {

struct ReactionValues {
    GridFunction f;
    GridFunction g;
};

/// f = u(u-a)(u-1) + w, g = b w - c u, pointwise.
ReactionValues fhn_reaction(const FHNParams& params, const GridFunction& u, const GridFunction& w);

/// -v^3 - 3v^2 z - 3v z^2 - z^3 + (a+1)(v^2 + 2vz + z^2): the part of
/// -f(v+z, w) not carried by the implicit block (-a v - w).
GridFunction remainder_rhs(const FHNParams& params, const GridFunction& v, const GridFunction& z);

/// Explicit source of the v equation as a function of (v, z, w) at the
/// previous step.
using Reaction =
    std::function<GridFunction(const FHNParams&, const GridFunction& v, const GridFunction& z, const GridFunction& w)>;

Reaction fhn_remainder_reaction();
Reaction zero_reaction();

}  // namespace sbd
