#pragma once

#include <functional>

#include <doctest.h>

#include "tate/alpha.hpp"

namespace tate::testing {

inline TorsionProvider& demo() {
    static TorsionProvider tp(preset_curve("demo"), 3);
    return tp;
}

inline Elem random_unit(const RingPtr& R, Rng& rng) {
    for (;;) {
        Elem u = R->random(rng);
        if (u.is_unit()) return u;
    }
}

/// 1 + p*r, inside the exp/log domain.
inline Elem random_principal(const RingPtr& R, Rng& rng) { return R->one() + R->random(rng).scale(static_cast<i64>(R->p())); }

inline Elem teich_of(const Elem& residue, const RingPtr& R) { return teichmuller(R->from_residue(residue)); }

/// Point of the formal group at v_p(z) >= 1 over the base curve at precision 3.
inline LocalPoint random_formal_point(Rng& rng) {
    for (;;) {
        LocalPoint P = scalar_mul(9, random_affine_point(demo().curve(3), rng));
        if (!P.is_infinity() && !reduce_point(P, 2).is_infinity()) return P;
    }
}

inline std::vector<ResiduePoint> torsion_points(const ResidueCurve& E, u64 N) {
    std::vector<ResiduePoint> out;
    for (const auto& P : E.enumerate_points())
        if (E.mul(static_cast<i64>(N), P).inf) out.push_back(P);
    return out;
}

}  // namespace tate::testing
