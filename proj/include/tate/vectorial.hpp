#pragma once

#include "tate/curve.hpp"

namespace tate {

/// Point of the universal vectorial extension: base point with a fiber coordinate
/// dual to dx/2y.  The identity is (O, 0).
struct ExtPoint {
    LocalPoint base;
    Elem fiber;

    bool operator==(const ExtPoint& o) const { return base == o.base && fiber == o.fiber; }
};

/// Chord or tangent slope of the line through P and Q.  Requires P, Q and P + Q to
/// reduce away from O.
Elem cocycle(const LocalPoint& P, const LocalPoint& Q);

ExtPoint ext_add(const ExtPoint& A, const ExtPoint& B);

struct ThetaValue {
    Elem value;
    int level = 0;  ///< nu, for a vector of level p^nu
    int guaranteed_precision = 0;
};

/// Ordering of the addition chain computing p^nu * (a, s) + (X, 0).
enum class ThetaChain { Linear, Split };

/// theta of a p-power level vector at precision n using the auxiliary point X.
ThetaValue theta(const TateVector& gamma, int n, const LocalPoint& X, ThetaChain chain = ThetaChain::Linear);
/// Same with an auxiliary point drawn from rng.
ThetaValue theta(const TateVector& gamma, int n, Rng& rng, ThetaChain chain = ThetaChain::Linear);

/// Auxiliary point whose residue avoids the subgroup generated by the residue of a.
LocalPoint theta_auxiliary(const LocalPoint& a, u64 order, Rng& rng, int retries = 64);

Elem theta_dual_pair(const Elem& c, const TateVector& gamma, int n, Rng& rng);

}  // namespace tate
