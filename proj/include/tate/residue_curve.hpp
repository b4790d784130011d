#pragma once

#include <optional>
#include <vector>

#include "tate/local_ring.hpp"

namespace tate {

/// Point of a Weierstrass curve over a finite field, or the point at infinity.
struct ResiduePoint {
    bool inf = true;
    Elem x, y;

    static ResiduePoint infinity() { return {}; }
    static ResiduePoint affine(Elem x, Elem y) { return {false, std::move(x), std::move(y)}; }
    bool operator==(const ResiduePoint& o) const;
    bool operator!=(const ResiduePoint& o) const { return !(*this == o); }
    std::string str() const;
};

/// y^2 = x^3 + a x + b over the finite field given as a LocalRing with m = 1.
class ResidueCurve {
public:
    ResidueCurve(RingPtr field, Elem a, Elem b);
    static ResidueCurve over(u64 p, int f, i64 a, i64 b);

    const RingPtr& field() const { return k_; }
    const Elem& a() const { return a_; }
    const Elem& b() const { return b_; }
    u64 q() const { return k_->residue_size(); }

    bool on_curve(const ResiduePoint& P) const;
    ResiduePoint neg(const ResiduePoint& P) const;
    ResiduePoint add(const ResiduePoint& P, const ResiduePoint& Q) const;
    ResiduePoint mul(i64 k, const ResiduePoint& P) const;
    ResiduePoint frobenius(const ResiduePoint& P, int power = 1) const;

    std::vector<ResiduePoint> enumerate_points(u64 cap = 1000000) const;
    /// Points whose x-coordinate is a root of the given polynomial (coefficients in the field).
    std::vector<ResiduePoint> points_with_x_in(const std::vector<Elem>& xs) const;
    u64 point_order(const ResiduePoint& P) const;
    /// Weil pairing e_N(S, T) by the two-Miller-function formula with random shifts.
    Elem weil_pairing(const ResiduePoint& S, const ResiduePoint& T, u64 N, Rng& rng, int retries = 64) const;
    ResiduePoint random_point(Rng& rng) const;

private:
    std::optional<Elem> miller_ratio(const ResiduePoint& S, u64 N, const ResiduePoint& at1,
                                     const ResiduePoint& at0) const;
    RingPtr k_;
    Elem a_, b_;
};

/// All elements of the finite field ring in index order sum c_i p^i.
Elem field_element(const RingPtr& k, u64 index);
u64 field_index(const Elem& x);
std::optional<Elem> field_sqrt(const Elem& a);

/// a_p = p + 1 - #E(F_p) by enumeration.
i64 frobenius_trace(u64 p, i64 a, i64 b);
/// #E(F_{p^k}) from the trace of Frobenius.
u64 count_over_extension(u64 p, i64 trace, int k);

}  // namespace tate
