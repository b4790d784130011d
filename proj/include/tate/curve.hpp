#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tate/local_ring.hpp"
#include "tate/poly.hpp"
#include "tate/residue_curve.hpp"

namespace tate {

class LocalCurve;
class LocalPoint;
using CurvePtr = std::shared_ptr<const LocalCurve>;

enum class Chart { Affine, Formal, Infinity };
const char* to_string(Chart c);

/// y^2 = x^3 + a x + b over a LocalRing with unit discriminant.
class LocalCurve : public std::enable_shared_from_this<LocalCurve> {
    struct Key {};

public:
    static CurvePtr make(RingPtr ring, Elem a, Elem b, std::string id = {});
    static CurvePtr make(RingPtr ring, i64 a, i64 b, std::string id = {});
    LocalCurve(Key, RingPtr ring, Elem a, Elem b, std::string id);

    const RingPtr& ring() const { return ring_; }
    const Elem& a() const { return a_; }
    const Elem& b() const { return b_; }
    const std::string& id() const { return id_; }
    CurvePtr ptr() const { return shared_from_this(); }

    Elem discriminant() const;
    /// Same equation over another ring reachable by inclusion or reduction.
    CurvePtr change_ring(const RingPtr& target) const;
    ResidueCurve residue_curve() const;

    LocalPoint infinity() const;
    LocalPoint affine(const Elem& x, const Elem& y) const;
    /// Point of the formal group with parameter z = -x/y.
    LocalPoint formal(const Elem& z) const;

    /// Fixed affine points whose residues are not 2-torsion; used to reroute
    /// additions whose complete-formula output degenerates.
    const std::vector<std::array<Elem, 3>>& auxiliary() const;

private:
    RingPtr ring_;
    Elem a_, b_;
    std::string id_;
    mutable std::once_flag aux_once_;
    mutable std::vector<std::array<Elem, 3>> aux_;
};

/// Projective point (X : Y : Z), normalized to Z = 1 when Z is a unit and to Y = 1 otherwise.
class LocalPoint {
public:
    LocalPoint() = default;
    LocalPoint(CurvePtr curve, Elem X, Elem Y, Elem Z);

    const CurvePtr& curve() const { return E_; }
    const RingPtr& ring() const { return E_->ring(); }
    const Elem& X() const { return X_; }
    const Elem& Y() const { return Y_; }
    const Elem& Z() const { return Z_; }

    Chart chart() const;
    bool is_infinity() const;
    /// True when the residue is the identity, i.e. the point is in the formal group.
    bool in_formal_group() const { return !Z_.is_unit(); }
    Elem x() const;
    Elem y() const;
    Elem z() const;
    Elem w() const;
    ResiduePoint residue() const;
    bool on_curve() const;

    bool operator==(const LocalPoint& o) const;
    bool operator!=(const LocalPoint& o) const { return !(*this == o); }
    std::string str() const;

private:
    CurvePtr E_;
    Elem X_, Y_, Z_;
};

LocalPoint point_add(const LocalPoint& P, const LocalPoint& Q);
LocalPoint point_neg(const LocalPoint& P);
LocalPoint point_sub(const LocalPoint& P, const LocalPoint& Q);
LocalPoint scalar_mul(i64 k, const LocalPoint& P);
inline LocalPoint operator+(const LocalPoint& P, const LocalPoint& Q) { return point_add(P, Q); }
inline LocalPoint operator-(const LocalPoint& P, const LocalPoint& Q) { return point_sub(P, Q); }
inline LocalPoint operator-(const LocalPoint& P) { return point_neg(P); }

/// Coordinate-wise reduction to precision n.
LocalPoint reduce_point(const LocalPoint& P, int n);
/// Image of P on the same equation over a ring into which P's ring embeds.
LocalPoint base_change(const LocalPoint& P, const CurvePtr& target);
/// Coordinate-wise Frobenius; the curve must be defined over the base.
LocalPoint frobenius(const LocalPoint& P, int power = 1);

LocalPoint random_affine_point(const CurvePtr& E, Rng& rng);

struct FactoredOrder {
    u64 prime_to_p = 1;
    int p_exponent = 0;
    u64 p = 0;
    u64 value() const;
    std::vector<PrimePower> factors() const;
};

/// Least N with N * (P mod p^n) = O.
FactoredOrder point_order_mod(const LocalPoint& P, int n, int iteration_cap = 64);

/// Line A*X + B*Y + C*Z through two points (tangent when they coincide).
struct Line {
    Elem A, B, C;
};
Line line_through(const LocalPoint& P, const LocalPoint& Q);
Elem eval_line(const Line& L, const LocalPoint& P);

/// Miller function f_{N,S} as numerator/denominator values at each point.
struct MillerValues {
    std::vector<Elem> num, den;
};
MillerValues miller(const LocalPoint& S, u64 N, const std::vector<LocalPoint>& at);

/// Division polynomials in x-only form, index n = 0..N: psi_n itself for odd n and psi_n / y for even n.
std::vector<Poly> division_polynomials(const LocalCurve& E, int N, int cap = 64);
Poly division_polynomial(const LocalCurve& E, int N, int cap = 64);
/// x^3 + a x + b.
Poly cubic(const LocalCurve& E);

/// Solves w = z^3 + a z w^2 + b w^3 for z of positive valuation.
Elem formal_w(const Elem& z, const Elem& a, const Elem& b);
/// Coefficients c_0..c_{K-1} of the invariant differential (sum c_k z^k) dz.
std::vector<Elem> invariant_differential(const RingPtr& R, const Elem& a, const Elem& b, int K);
/// Truncation mod z^D of the multiplication-by-n series in the formal group.
Poly multiplication_series(const LocalCurve& E, u64 n, int D);

Elem elliptic_log(const LocalPoint& P, PrecisionBudget& budget);
Elem elliptic_log(const LocalPoint& P);

/// Compatible torsion point of exact order `level`.
struct TateVector {
    u64 level = 1;
    LocalPoint point;
    std::string tower_tag;

    /// (level / lower) * point, same tag.
    TateVector project(u64 lower) const;
};

struct TorsionBasis {
    RingPtr ring;
    CurvePtr curve;
    TateVector first, second;
};

/// Basis of E[ell^k] over the smallest unramified extension carrying it, or over the
/// degree given by `degree` when nonzero.
TorsionBasis torsion_basis(const LocalCurve& E, u64 ell, int k, int degree = 0, u64 field_cap = 1000000);

struct PTorsionLevel {
    int nu = 1;
    TateVector etale, formal;
    RingPtr etale_ring, formal_ring;
};

/// p^nu-torsion for ordinary reduction: an etale point over an extension of the
/// unramified ring containing a residue point of order p^nu, and a formal point
/// over an Eisenstein extension of Z_p.  The rings are constructed with `guard` extra
/// digits so that later precision boosts remain available.
PTorsionLevel p_torsion_level(const LocalCurve& E, int nu, int guard = 4, u64 field_cap = 1000000);

}  // namespace tate
