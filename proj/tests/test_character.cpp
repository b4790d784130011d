#include "support.hpp"

using namespace tate;
using namespace tate::testing;

namespace {

std::vector<Component> zhat(int r) {
    std::vector<Component> d;
    for (int i = 0; i < r; ++i) d.push_back({"g" + std::to_string(i + 1), ComponentKind::Zhat, 0, 0});
    return d;
}

Character random_char(const RingPtr& R, int r, Rng& rng) {
    std::vector<Elem> im;
    for (int i = 0; i < r; ++i) im.push_back(random_unit(R, rng));
    return char_from_images(zhat(r), im, R->m());
}

Elem non_rational_root_of_unity(const RingPtr& W, Rng& rng) {
    for (;;) {
        Elem z = teichmuller(random_unit(W, rng));
        if (frobenius(z) != z) return z;
    }
}

}  // namespace

TEST_SUITE("characters") {

TEST_CASE("character with log 5 in Z/125 is exp(5)") {
    RingPtr Z = LocalRing::base(5, 3);
    Character chi = char_with_given_log(zhat(1), {Z->from_int(5)}, 3);
    CHECK(chi.images[0] == Z->from_int(81));
    CHECK(log_star(chi).values[0] == Z->from_int(5));
}

TEST_CASE("targets outside the exp domain are refused") {
    RingPtr Z = LocalRing::base(5, 3);
    CHECK_THROWS_AS(char_with_given_log(zhat(1), {Z->from_int(1)}, 3), Error);
}

TEST_CASE("frobenius permuting images") {
    Rng rng(51);
    RingPtr W = LocalRing::unramified(5, 2, 2);
    Elem z = non_rational_root_of_unity(W, rng);
    GaloisAction swap{1, {{0, 1}, {1, 0}}};
    GaloisAction id{1, {{1, 0}, {0, 1}}};
    Character fixed = char_from_images(zhat(2), {z, frobenius(z)}, 2);
    CHECK(is_smooth_at_level(fixed, {swap}).smooth);
    CHECK(fixed.smooth_level == 1);
    Character moving = char_from_images(zhat(2), {z, z}, 2);
    CHECK_FALSE(is_smooth_at_level(moving, {id}).smooth);
    CHECK_FALSE(moving.smooth_level.has_value());
    SmoothnessCertificate c2 = is_smooth_at_level(moving, {GaloisAction{2, {{1, 0}, {0, 1}}}});
    CHECK(c2.smooth);
    CHECK(c2.level == 2);
}

TEST_CASE("ramified values are not conjugated") {
    RingPtr E = LocalRing::make(5, RingKind::Eisenstein, {5, 0, 0, 0, 1}, 2);
    Character chi = char_from_images(zhat(1), {E->one() + E->gen()}, 2);
    try {
        conjugate(chi, GaloisAction{1, {{1}}});
        FAIL("expected RamifiedAutomorphism");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RamifiedAutomorphism);
    }
}

TEST_CASE("ell-adic arguments need the component depth") {
    RingPtr R = LocalRing::unramified(5, 2, 2);
    Rng rng(52);
    Elem z = teichmuller(random_unit(R, rng)).pow(8);
    Character chi = char_from_images({{"T3", ComponentKind::Ell, 3, 3}}, {z}, 2);
    CHECK(evaluate(chi, {{4, 9}}) == z);
    try {
        evaluate(chi, {{1, 2}});
        FAIL("expected InsufficientDepth");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientDepth);
    }
}

TEST_CASE("property: evaluation is multiplicative") {
    Rng rng(53);
    for (const auto& R : {LocalRing::base(5, 3), LocalRing::unramified(5, 2, 3)})
        for (int t = 0; t < 30; ++t) {
            Character chi = random_char(R, 3, rng);
            std::vector<Arg> a, b, ab;
            for (int i = 0; i < 3; ++i) {
                i64 x = rng.range(-500, 500), y = rng.range(-500, 500);
                a.push_back({x, 0});
                b.push_back({y, 0});
                ab.push_back({x + y, 0});
            }
            CHECK(evaluate(chi, ab) == evaluate(chi, a) * evaluate(chi, b));
        }
}

TEST_CASE("property: images determine the character") {
    Rng rng(54);
    RingPtr R = LocalRing::unramified(5, 3, 2);
    for (int t = 0; t < 20; ++t) {
        Character chi = random_char(R, 2, rng);
        std::vector<Elem> read{evaluate(chi, {{1, 0}, {0, 0}}), evaluate(chi, {{0, 0}, {1, 0}})};
        CHECK(read == chi.images);
        CHECK(char_from_images(chi.domain, read, 2) == chi);
    }
}

TEST_CASE("property: group structure and reduction") {
    Rng rng(55);
    RingPtr R = LocalRing::unramified(5, 2, 3);
    for (int t = 0; t < 20; ++t) {
        Character a = random_char(R, 2, rng), b = random_char(R, 2, rng);
        CHECK(char_mul(a, b) == char_mul(b, a));
        CHECK(char_mul(a, char_inv(a)) == trivial_character(a.domain, R));
        CHECK(char_pow(a, 3) == char_mul(a, char_mul(a, a)));
        for (int n = 1; n < 3; ++n) CHECK(char_reduce(char_mul(a, b), n) == char_mul(char_reduce(a, n), char_reduce(b, n)));
    }
}

TEST_CASE("property: log_star kernel is the root-of-unity valued characters") {
    Rng rng(56);
    RingPtr R = LocalRing::unramified(5, 2, 3);
    for (int t = 0; t < 30; ++t) {
        Elem w = teichmuller(random_unit(R, rng));
        Elem u = random_principal(R, rng);
        Character chi = char_from_images(zhat(1), {w * u}, 3);
        CHECK(log_star(chi).values[0].is_zero() == u.is_one());
        Character finite = char_from_images(zhat(1), {w}, 3);
        CHECK(log_star(finite).values[0].is_zero());
    }
}

TEST_CASE("property: log_star inverts char_with_given_log") {
    Rng rng(57);
    RingPtr R = LocalRing::unramified(5, 2, 3);
    for (int t = 0; t < 20; ++t) {
        std::vector<Elem> targets{R->random(rng).scale(5), R->random(rng).scale(5)};
        Character chi = char_with_given_log(zhat(2), targets, 3);
        LogStar ls = log_star(chi);
        CHECK(ls.loss == 0);
        CHECK(ls.values == targets);
    }
}

TEST_CASE("property: ell-adic images are torsion") {
    Rng rng(58);
    auto basis = demo().ell_vectors(3, 2);
    for (int t = 0; t < 10; ++t) {
        LocalPoint a = random_affine_point(demo().curve(3), rng);
        Character chi = alpha_n(a, 2, basis, rng).character;
        for (const Elem& u : chi.images) CHECK(u.pow(9).is_one());
    }
}

}  // TEST_SUITE
