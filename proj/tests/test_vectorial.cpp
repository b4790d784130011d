#include "support.hpp"

using namespace tate;
using namespace tate::testing;

namespace {

TateVector scaled(const TateVector& g, i64 k) { return {g.level, scalar_mul(k, g.point), g.tower_tag}; }

bool agree(const ThetaValue& a, const ThetaValue& b, const Elem& x, const Elem& y) {
    const int k = std::min(a.guaranteed_precision, b.guaranteed_precision);
    return k >= 1 && x.reduce(k) == y.reduce(k);
}

}  // namespace

TEST_SUITE("vectorial_ext") {

TEST_CASE("chord slope on the demo curve over Z/5") {
    CurvePtr E = LocalCurve::make(LocalRing::base(5, 1), 1, 1);
    const RingPtr& R = E->ring();
    LocalPoint P = E->affine(R->zero(), R->one()), Q = E->affine(R->from_int(4), R->from_int(2));
    CHECK(cocycle(P, Q) == R->from_int(4));
    CHECK(cocycle(Q, P) == R->from_int(4));
}

TEST_CASE("identity fiber") {
    CurvePtr E = demo().curve(3);
    Rng rng(41);
    ExtPoint O{E->infinity(), E->ring()->zero()};
    for (int t = 0; t < 10; ++t) {
        ExtPoint A{random_affine_point(E, rng), E->ring()->random(rng)};
        CHECK(ext_add(A, O) == A);
        ExtPoint S{E->infinity(), E->ring()->random(rng)};
        ExtPoint moved = ext_add(S, A);
        CHECK(moved.base == A.base);
        CHECK(moved.fiber == A.fiber + S.fiber);
    }
}

TEST_CASE("theta of the formal vector vanishes") {
    Rng rng(42);
    for (int nu = 1; nu <= 2; ++nu) CHECK(theta(demo().p_level(nu).formal, nu, rng).value.is_zero());
}

TEST_CASE("dual pairing is linear in c and unit at c = 1") {
    Rng rng(43);
    const TateVector& g = demo().p_level(1).etale;
    RingPtr R = g.point.ring()->at_precision(1);
    ThetaValue th = theta(g, 1, rng);
    CHECK(theta_dual_pair(R->one(), g, 1, rng) == th.value);
    for (int t = 0; t < 5; ++t) {
        Elem c1 = R->random(rng), c2 = R->random(rng);
        CHECK(theta_dual_pair(c1 + c2, g, 1, rng) == theta_dual_pair(c1, g, 1, rng) + theta_dual_pair(c2, g, 1, rng));
    }
}

TEST_CASE("property: cocycle symmetry and cocycle identity") {
    Rng rng(44);
    CurvePtr E = demo().ell_basis(3, 2).curve;
    int done = 0;
    for (int attempt = 0; attempt < 400 && done < 40; ++attempt) {
        LocalPoint P = random_affine_point(E, rng), Q = random_affine_point(E, rng), R = random_affine_point(E, rng);
        try {
            CHECK(cocycle(P, Q) == cocycle(Q, P));
            CHECK(cocycle(P, Q) + cocycle(P + Q, R) == cocycle(Q, R) + cocycle(P, Q + R));
            ++done;
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::DegenerateConfiguration);
        }
    }
    CHECK(done == 40);
}

TEST_CASE("property: extension group law") {
    Rng rng(45);
    CurvePtr E = demo().curve(3);
    const RingPtr& R = E->ring();
    int done = 0;
    for (int attempt = 0; attempt < 400 && done < 40; ++attempt) {
        ExtPoint A{random_affine_point(E, rng), R->random(rng)}, B{random_affine_point(E, rng), R->random(rng)},
            C{random_affine_point(E, rng), R->random(rng)};
        try {
            ExtPoint AB = ext_add(A, B), BA = ext_add(B, A);
            ExtPoint left = ext_add(AB, C), right = ext_add(A, ext_add(B, C));
            CHECK(AB.base == A.base + B.base);
            CHECK(AB == BA);
            CHECK(left == right);
            ++done;
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::DegenerateConfiguration);
        }
    }
    CHECK(done == 40);
}

TEST_CASE("property: theta is additive and Z_p-linear at fixed level") {
    Rng rng(46);
    for (int nu = 1; nu <= 2; ++nu) {
        const TateVector& g = demo().p_level(nu).etale;
        const i64 order = nu == 1 ? 5 : 25;
        ThetaValue base = theta(g, nu, rng);
        for (int t = 0; t < 6; ++t) {
            i64 i = rng.range(1, order - 1), j = rng.range(1, order - 1);
            if (i % 5 == 0 || j % 5 == 0 || (i + j) % 5 == 0) continue;
            ThetaValue ti = theta(scaled(g, i), nu, rng), tj = theta(scaled(g, j), nu, rng);
            ThetaValue tij = theta(scaled(g, i + j), nu, rng);
            CHECK(agree(ti, tij, tij.value, ti.value + tj.value));
            CHECK(agree(base, ti, ti.value, base.value.scale(i)));
        }
    }
}

TEST_CASE("property: theta does not depend on the auxiliary point or chain") {
    Rng rng(47);
    for (int nu = 1; nu <= 2; ++nu) {
        const TateVector& g = demo().p_level(nu).etale;
        ThetaValue ref = theta(g, nu, rng);
        for (int t = 0; t < 6; ++t) {
            LocalPoint X = theta_auxiliary(g.point, g.level, rng);
            ThetaValue th = theta(g, nu, X, t % 2 ? ThetaChain::Split : ThetaChain::Linear);
            CHECK(th.value == ref.value);
        }
    }
}

TEST_CASE("property: theta tower compatibility") {
    Rng rng(48);
    const TateVector& g2 = demo().p_level(2).etale;
    ThetaValue t2 = theta(g2, 2, rng), t1 = theta(g2.project(5), 1, rng);
    CHECK(agree(t1, t2, t1.value, t2.value));
}

}  // TEST_SUITE
