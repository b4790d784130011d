#include "tate/vectorial.hpp"

namespace tate {

namespace {

constexpr const char* kMod = "vectorial_ext";

// lambda(P, t) + 1/z_t for t in the formal group, P affine.
Elem formal_term(const LocalPoint& P, const LocalPoint& t) {
    const auto& E = *P.curve();
    Elem z = t.z(), w = t.w();
    Elem tau = z * (E.ring()->one() - E.a() * z * w - E.b() * w * w).inv();
    Elem sigma = z * tau;
    Elem x = P.x(), y = P.y();
    return tau * (z * y + x) * (sigma * x - E.ring()->one()).inv();
}

ExtPoint ext_mul(u64 k, const ExtPoint& A) {
    auto bits = binary_digits(k);
    ExtPoint r = A;
    for (std::size_t i = 1; i < bits.size(); ++i) {
        r = ext_add(r, r);
        if (bits[i]) r = ext_add(r, A);
    }
    return r;
}

int level_exponent(u64 level, u64 p) {
    int nu = 0;
    while (level % p == 0) {
        level /= p;
        ++nu;
    }
    if (level != 1) fail(ErrorKind::InvalidArgument, kMod, "theta needs a p-power level vector");
    return nu;
}

}  // namespace

Elem cocycle(const LocalPoint& P, const LocalPoint& Q) {
    if (P.in_formal_group() || Q.in_formal_group())
        fail(ErrorKind::DegenerateConfiguration, kMod, "slope at a point reducing to O");
    LocalPoint S = point_add(P, Q);
    if (S.in_formal_group()) fail(ErrorKind::DegenerateConfiguration, kMod, "sum reduces to O");
    Line L = line_through(P, Q);
    if (!L.B.is_unit()) fail(ErrorKind::DegenerateConfiguration, kMod, "line through the points is vertical");
    return -(L.A * L.B.inv());
}

ExtPoint ext_add(const ExtPoint& A, const ExtPoint& B) {
    if (A.base.is_infinity()) return {B.base, B.fiber + A.fiber};
    if (B.base.is_infinity()) return {A.base, A.fiber + B.fiber};
    Elem lam = cocycle(A.base, B.base);
    return {point_add(A.base, B.base), A.fiber + B.fiber + lam};
}

LocalPoint theta_auxiliary(const LocalPoint& a, u64 order, Rng& rng, int retries) {
    const CurvePtr& E = a.curve();
    ResidueCurve Ek = E->residue_curve();
    std::vector<ResiduePoint> multiples;
    ResiduePoint ab = a.residue(), cur = ResiduePoint::infinity();
    for (u64 k = 0; k < order; ++k) {
        multiples.push_back(cur);
        cur = Ek.add(cur, ab);
    }
    for (int it = 0; it < retries; ++it) {
        LocalPoint X = random_affine_point(E, rng);
        ResiduePoint xb = Ek.neg(X.residue());
        bool ok = true;
        for (const auto& M : multiples)
            if (M == xb) ok = false;
        if (ok) return X;
    }
    fail(ErrorKind::DegenerateConfiguration, kMod, "no auxiliary point avoids the torsion subgroup");
}

ThetaValue theta(const TateVector& gamma, int n, const LocalPoint& X_in, ThetaChain chain) {
    const RingPtr& R = gamma.point.ring();
    const u64 p = R->p();
    const int nu = level_exponent(gamma.level, p);
    if (n > R->m()) fail(ErrorKind::PrecisionExhausted, kMod, "precision above the ring of the vector");
    LocalPoint a = reduce_point(gamma.point, n);
    LocalPoint X = reduce_point(base_change(X_in, gamma.point.curve()), n);
    ThetaValue out;
    out.level = nu;
    out.guaranteed_precision = std::min(nu, n);
    const RingPtr& Rn = a.ring();
    if (a.is_infinity()) {
        out.value = Rn->zero();
        return out;
    }
    if (X.in_formal_group()) fail(ErrorKind::DegenerateConfiguration, kMod, "auxiliary point reduces to O");
    const u64 N = gamma.level;
    if (a.in_formal_group()) {
        if (chain != ThetaChain::Linear)
            fail(ErrorKind::DegenerateConfiguration, kMod, "split chains need an etale vector");
        // lift (a, 1/z_a): every term lambda(T, a) + 1/z_a is integral
        Elem s = Rn->zero();
        LocalPoint T = X;
        for (u64 k = 0; k < N; ++k) {
            s += formal_term(T, a);
            T = point_add(T, a);
        }
        if (T != X) fail(ErrorKind::NotTorsion, kMod, "vector is not torsion of its level");
        out.value = s;
        return out;
    }
    ExtPoint A{a, Rn->zero()};
    ExtPoint W{X, Rn->zero()};
    if (chain == ThetaChain::Linear) {
        for (u64 k = 0; k < N; ++k) W = ext_add(W, A);
    } else {
        const u64 m = N / 2 > 0 ? N / 2 : 1;
        W = ext_add(W, ext_mul(m, A));
        if (N > m) W = ext_add(W, ext_mul(N - m, A));
    }
    if (W.base != X) fail(ErrorKind::NotTorsion, kMod, "vector is not torsion of its level");
    out.value = W.fiber;
    return out;
}

ThetaValue theta(const TateVector& gamma, int n, Rng& rng, ThetaChain chain) {
    LocalPoint X = theta_auxiliary(gamma.point, gamma.level, rng);
    return theta(gamma, n, X, chain);
}

Elem theta_dual_pair(const Elem& c, const TateVector& gamma, int n, Rng& rng) {
    ThetaValue t = theta(gamma, n, rng);
    return c.embed(t.value.ring()) * t.value;
}

}  // namespace tate
