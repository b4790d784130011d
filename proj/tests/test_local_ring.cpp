#include "support.hpp"

using namespace tate;
using namespace tate::testing;

namespace {

RingPtr quartic_eisenstein(int m) { return LocalRing::make(5, RingKind::Eisenstein, {5, 0, 0, 0, 1}, m); }

std::vector<RingPtr> sample_rings() {
    return {LocalRing::base(5, 3), LocalRing::unramified(5, 2, 3), LocalRing::unramified(7, 3, 2), quartic_eisenstein(3)};
}

}  // namespace

TEST_SUITE("local_rings") {

TEST_CASE("inverse of 2 mod 125") {
    RingPtr Z = LocalRing::base(5, 3);
    Elem i = Z->from_int(2).inv();
    CHECK(i == Z->from_int(63));
    CHECK((i * Z->from_int(2)).is_one());
    CHECK_THROWS_AS(Z->from_int(10).inv(), Error);
}

TEST_CASE("teichmuller of 2 mod 25") {
    RingPtr Z = LocalRing::base(5, 2);
    Elem t = teichmuller(Z->from_int(2));
    CHECK(t == Z->from_int(7));
    CHECK(t.pow(4).is_one());
}

TEST_CASE("log and exp reference values mod 125") {
    RingPtr Z = LocalRing::base(5, 3);
    CHECK(padic_log(Z->from_int(6)) == Z->from_int(55));
    CHECK(padic_exp(Z->from_int(5)) == Z->from_int(81));
    CHECK(padic_log(Z->one()).is_zero());
    CHECK(padic_exp(Z->zero()).is_one());
}

TEST_CASE("log and exp domain errors") {
    RingPtr Z = LocalRing::base(5, 3);
    try {
        padic_log(Z->from_int(2));
        FAIL("expected OutOfDomain");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfDomain);
    }
    try {
        padic_log(Z->from_int(5));
        FAIL("expected NonUnit");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonUnit);
    }
    try {
        padic_exp(Z->from_int(1));
        FAIL("expected OutOfDomain");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfDomain);
    }
}

TEST_CASE("valuations") {
    RingPtr Z = LocalRing::base(5, 3);
    Valuation v = Z->from_int(25).valuation();
    CHECK_FALSE(v.infinite);
    CHECK(v.num == 2);
    CHECK(v.den == 1);
    RingPtr E = quartic_eisenstein(2);
    Valuation vp = E->gen().valuation();
    CHECK(vp.num == 1);
    CHECK(vp.den == 4);
    CHECK(Z->zero().valuation().infinite);
}

TEST_CASE("constructor errors") {
    auto kind_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InternalInconsistency;
    };
    CHECK(kind_of([] { LocalRing::base(3, 2); }) == ErrorKind::UnsupportedPrime);
    CHECK(kind_of([] { LocalRing::make(5, RingKind::Unramified, {1, 0, 1}, 2); }) == ErrorKind::InvalidModulus);
    CHECK(kind_of([] { LocalRing::make(5, RingKind::Eisenstein, {25, 0, 1}, 3); }) == ErrorKind::InvalidModulus);
    CHECK(kind_of([] { LocalRing::make(5, RingKind::Eisenstein, {5, 1, 1}, 3); }) == ErrorKind::InvalidModulus);
    CHECK(kind_of([] { teichmuller(quartic_eisenstein(2)->one()); }) == ErrorKind::RamifiedRing);
    CHECK(kind_of([] { LocalRing::base(5, 2)->one() + LocalRing::base(5, 3)->one(); }) == ErrorKind::RingMismatch);
}

TEST_CASE("first irreducible polynomials are irreducible") {
    for (u64 p : {5, 7, 11})
        for (int f = 2; f <= 4; ++f) {
            auto g = first_irreducible(p, f);
            CHECK(g.size() == static_cast<std::size_t>(f + 1));
            CHECK(is_irreducible_mod_p(g, p));
        }
    CHECK_FALSE(is_irreducible_mod_p({1, 0, 1}, 5));
}

TEST_CASE("property: ring axioms on random elements") {
    Rng rng(11);
    for (const auto& R : sample_rings())
        for (int t = 0; t < 50; ++t) {
            Elem a = R->random(rng), b = R->random(rng), c = R->random(rng);
            CHECK((a + b) * c == a * c + b * c);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * b == b * a);
            CHECK(a - a == R->zero());
            CHECK(a * R->one() == a);
            Elem u = random_unit(R, rng);
            CHECK((u * u.inv()).is_one());
        }
}

TEST_CASE("property: log turns products into sums") {
    Rng rng(12);
    for (const auto& R : {LocalRing::base(5, 4), LocalRing::unramified(5, 2, 3), LocalRing::unramified(7, 2, 3)})
        for (int t = 0; t < 30; ++t) {
            Elem u = random_principal(R, rng), v = random_principal(R, rng);
            PrecisionBudget bu, bv, buv;
            Elem lu = padic_log(u, bu), lv = padic_log(v, bv), luv = padic_log(u * v, buv);
            int g = std::min({bu.guaranteed(), bv.guaranteed(), buv.guaranteed()});
            REQUIRE(g >= 1);
            CHECK(luv.reduce(g) == (lu + lv).reduce(g));
        }
}

TEST_CASE("property: exp and log are inverse at guaranteed precision") {
    Rng rng(13);
    for (const auto& R : {LocalRing::base(5, 3), LocalRing::unramified(5, 3, 3)})
        for (int t = 0; t < 30; ++t) {
            Elem u = random_principal(R, rng);
            PrecisionBudget b1, b2;
            Elem back = padic_exp(padic_log(u, b1), b2);
            int g = std::min(b1.guaranteed(), b2.guaranteed());
            CHECK(back.reduce(g) == u.reduce(g));
        }
}

TEST_CASE("property: teichmuller decomposition") {
    Rng rng(14);
    for (const auto& R : {LocalRing::base(5, 3), LocalRing::unramified(5, 2, 3), LocalRing::unramified(7, 3, 2)}) {
        const u64 q1 = R->residue_size() - 1;
        for (int t = 0; t < 30; ++t) {
            Elem a = random_unit(R, rng);
            Elem w = teichmuller(a);
            CHECK(w.pow(q1).is_one());
            CHECK(w.residue() == a.residue());
            Elem v = a * w.inv();
            CHECK((v - R->one()).coeff_divisibility() >= 1);
            CHECK(w * v == a);
        }
    }
}

TEST_CASE("property: frobenius is a ring homomorphism") {
    Rng rng(15);
    for (const auto& R : {LocalRing::unramified(5, 2, 3), LocalRing::unramified(5, 4, 2), LocalRing::unramified(7, 3, 2)})
        for (int t = 0; t < 30; ++t) {
            Elem a = R->random(rng), b = R->random(rng);
            CHECK(frobenius(a + b) == frobenius(a) + frobenius(b));
            CHECK(frobenius(a * b) == frobenius(a) * frobenius(b));
            CHECK(frobenius(a).residue() == a.residue().pow(R->p()));
            CHECK(frobenius(a, R->f()) == a);
        }
}

TEST_CASE("property: reduction commutes with ring operations") {
    Rng rng(16);
    for (const auto& R : sample_rings())
        for (int k = 1; k < R->m(); ++k)
            for (int t = 0; t < 20; ++t) {
                Elem a = R->random(rng), b = R->random(rng);
                CHECK((a + b).reduce(k) == a.reduce(k) + b.reduce(k));
                CHECK((a * b).reduce(k) == a.reduce(k) * b.reduce(k));
                CHECK((a - b).reduce(k) == a.reduce(k) - b.reduce(k));
                Elem u = random_unit(R, rng);
                CHECK(u.inv().reduce(k) == u.reduce(k).inv());
            }
}

TEST_CASE("property: unit group exponent annihilates units") {
    Rng rng(17);
    for (const auto& R : {LocalRing::base(5, 3), LocalRing::unramified(5, 2, 2)}) {
        auto [tame, wild] = unit_group_exponent(*R);
        for (int t = 0; t < 20; ++t) CHECK(random_unit(R, rng).pow(tame * wild).is_one());
    }
}

}  // TEST_SUITE
