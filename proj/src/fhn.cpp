#include "sbd/fhn.hpp"

#include <stdexcept>

namespace sbd {

ReactionValues fhn_reaction(const FHNParams& params, const GridFunction& u, const GridFunction& w) {
    if (u.size() != w.size()) throw std::invalid_argument("u and w sizes differ");
    ReactionValues r;
    r.f = (u.array() * (u.array() - params.a) * (u.array() - 1.0) + w.array()).matrix();
    r.g = params.b * w - params.c * u;
    return r;
}

GridFunction remainder_rhs(const FHNParams& params, const GridFunction& v, const GridFunction& z) {
    if (v.size() != z.size()) throw std::invalid_argument("v and z sizes differ");
    const auto vv = v.array();
    const auto zz = z.array();
    return (-vv.cube() - 3.0 * vv.square() * zz - 3.0 * vv * zz.square() - zz.cube() +
            (params.a + 1.0) * (vv.square() + 2.0 * vv * zz + zz.square()))
        .matrix();
}

Reaction fhn_remainder_reaction() {
    return [](const FHNParams& p, const GridFunction& v, const GridFunction& z, const GridFunction&) {
        return remainder_rhs(p, v, z);
    };
}

Reaction zero_reaction() {
    return [](const FHNParams&, const GridFunction& v, const GridFunction&, const GridFunction&) {
        return GridFunction::Zero(v.size()).eval();
    };
}

}  // namespace sbd
