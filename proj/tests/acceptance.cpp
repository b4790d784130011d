// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tate/alpha.hpp"

#ifndef TATECHAR_PATH
#define TATECHAR_PATH "tatechar"
#endif

using namespace tate;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

TorsionProvider& demo() {
    static TorsionProvider tp(preset_curve("demo"), 3);
    return tp;
}

Elem teich_of(const Elem& residue, const RingPtr& R) { return teichmuller(R->from_residue(residue)); }

std::vector<TateVector> nine_basis() { return demo().ell_vectors(3, 2); }

LocalPoint combo(i64 i, const LocalPoint& S, i64 j, const LocalPoint& T) { return scalar_mul(i, S) + scalar_mul(j, T); }

LocalPoint random_base_point(Rng& rng) { return random_affine_point(demo().curve(3), rng); }

// Formal point with v_p(z) >= 1 on the base curve.
LocalPoint random_formal_point(Rng& rng) {
    CurvePtr E = demo().curve(3);
    for (;;) {
        LocalPoint P = scalar_mul(9, random_base_point(rng));
        if (!P.is_infinity() && !reduce_point(P, 2).is_infinity()) return P;
    }
}

Outcome c1_alpha_tors() {
    Outcome o;
    auto basis = nine_basis();
    const LocalPoint& S = basis[0].point;
    const LocalPoint& T = basis[1].point;
    ResidueCurve Ek = S.curve()->residue_curve();
    Rng rng(101), orng(102);
    int checked = 0;
    for (i64 i = 0; i < 9; ++i)
        for (i64 j = 0; j < 9; ++j) {
            LocalPoint a = combo(i, S, j, T);
            std::vector<Elem> oracle;
            for (const auto& g : basis) oracle.push_back(Ek.weil_pairing(a.residue(), g.point.residue(), 9, orng));
            for (int n = 1; n <= 3; ++n) {
                AlphaResult r = alpha_n(a, n, basis, rng);
                RingPtr Rn = basis[0].point.ring()->at_precision(n);
                for (std::size_t g = 0; g < basis.size(); ++g) {
                    Elem want = teich_of(oracle[g], Rn);
                    Elem got = evaluate(r.character, g == 0 ? std::vector<Arg>{{1, 9}, {0, 9}} : std::vector<Arg>{{0, 9}, {1, 9}});
                    o.require(got == want, "mismatch at i=" + std::to_string(i) + " j=" + std::to_string(j) +
                                               " n=" + std::to_string(n));
                    ++checked;
                }
            }
        }
    o.detail = o.pass ? std::to_string(checked) + " values" : o.detail;
    return o;
}

Outcome c2_homomorphy_tower() {
    Outcome o;
    auto basis = nine_basis();
    const auto& L = demo().p_level(2);
    basis.push_back(L.etale);
    basis.push_back(L.formal);
    Rng rng(201);
    CurvePtr E3 = demo().curve(3);
    for (int t = 0; t < 20; ++t) {
        LocalPoint a = random_base_point(rng), b = random_base_point(rng);
        std::vector<Character> prev;
        for (int n = 1; n <= 3; ++n) {
            Character ca = alpha_n(a, n, basis, rng).character;
            Character cb = alpha_n(b, n, basis, rng).character;
            Character cab = alpha_n(a + b, n, basis, rng).character;
            o.require(cab == char_mul(ca, cb), "product fails at pair " + std::to_string(t) + " n=" + std::to_string(n));
            if (n > 1) o.require(char_reduce(ca, n - 1) == prev[0], "tower fails at pair " + std::to_string(t));
            prev = {ca};
        }
    }
    if (o.pass) o.detail = "20 pairs, n<=3";
    return o;
}

Outcome c3_isogeny() {
    Outcome o;
    auto basis = nine_basis();
    const auto& L = demo().p_level(2);
    basis.push_back(L.etale);
    basis.push_back(L.formal);
    Rng rng(301);
    for (i64 m : {2, 3, 5})
        for (int t = 0; t < 4; ++t) {
            LocalPoint a = random_base_point(rng);
            VerificationReport r = isogeny_functoriality_check(a, m, 2, basis, rng);
            o.require(r.pass, "m=" + std::to_string(m) + " got " + r.got + " expected " + r.expected);
        }
    if (o.pass) o.detail = "m in {2,3,5}, 4 points each";
    return o;
}

Outcome c4_galois() {
    Outcome o;
    auto basis = nine_basis();
    auto four = demo().ell_vectors(2, 2);
    std::vector<TateVector> full = basis;
    full.push_back({four[0].level, base_change(four[0].point, basis[0].point.curve()), four[0].tower_tag});
    full.push_back({four[1].level, base_change(four[1].point, basis[0].point.curve()), four[1].tower_tag});
    Rng rng(401);
    const auto& S9 = full[0].point;
    const auto& T9 = full[1].point;
    const auto& S4 = full[2].point;
    const auto& T4 = full[3].point;
    int checked = 0;
    for (int power = 1; power <= 5; ++power) {
        GaloisAction sigma = frobenius_action(full, power);
        for (int t = 0; t < 4; ++t) {
            LocalPoint a = combo(rng.range(0, 8), S9, rng.range(0, 8), T9) + combo(rng.range(0, 3), S4, rng.range(0, 3), T4);
            for (int n = 1; n <= 3; ++n) {
                Character lhs = alpha_n(frobenius(a, power), n, full, rng).character;
                Character rhs = conjugate(alpha_n(a, n, full, rng).character, sigma);
                o.require(lhs == rhs, "equivariance fails for power " + std::to_string(power));
                ++checked;
            }
        }
    }
    GaloisAction frob = frobenius_action(full, 1);
    CurvePtr E6 = full[0].point.curve();
    for (int t = 0; t < 10; ++t) {
        LocalPoint a = base_change(random_base_point(rng), E6);
        Character chi = alpha_n(a, 3, full, rng).character;
        SmoothnessCertificate cert = is_smooth_at_level(chi, {frob});
        o.require(cert.smooth && cert.level == 1 && chi.smooth_level == 1, "base point not certified smooth");
    }
    o.require(frobenius(T9, 1) != T9, "second basis vector is rational");
    Character moving = alpha_n(T9, 2, full, rng).character;
    o.require(!is_smooth_at_level(moving, {frob}).smooth, "non-rational torsion point certified smooth");
    if (o.pass) o.detail = std::to_string(checked) + " conjugations, 10 smooth certificates";
    return o;
}

Outcome c5_character_splitting() {
    Outcome o;
    Rng rng(501);
    RingPtr W = LocalRing::unramified(5, 2, 3);
    std::vector<Component> dom{{"g1", ComponentKind::Zhat, 0, 0}, {"g2", ComponentKind::Zhat, 0, 0}};
    auto principal = [&](bool nontrivial) {
        for (;;) {
            Elem u = W->one() + W->random(rng).scale(5);
            if (!nontrivial || !u.is_one()) return u;
        }
    };
    auto unit = [&] {
        for (;;) {
            Elem u = W->random(rng);
            if (u.is_unit()) return u;
        }
    };
    for (int t = 0; t < 20; ++t) {
        Elem u1 = unit(), u2 = unit();
        Character chi = char_from_images(dom, {u1, u2}, 3);
        o.require(evaluate(chi, {{1, 0}, {0, 0}}) == u1 && evaluate(chi, {{0, 0}, {1, 0}}) == u2, "ev round trip");
        o.require(char_from_images(chi.domain, chi.images, 3) == chi, "images do not determine the character");
        i64 k = rng.range(0, 10000);
        o.require(evaluate(chi, {{k, 0}, {0, 0}}) == u1.pow(static_cast<u64>(k)), "evaluation at integers");
    }
    for (int t = 0; t < 20; ++t) {
        std::vector<Elem> targets{W->random(rng).scale(5), W->random(rng).scale(5)};
        Character chi = char_with_given_log(dom, targets, 3);
        LogStar ls = log_star(chi);
        o.require(ls.loss == 0 && ls.values == targets, "log_star o char_with_given_log is not the identity");
    }
    for (int t = 0; t < 20; ++t) {
        Elem z1 = teichmuller(unit()), z2 = teichmuller(unit());
        Character finite = char_from_images(dom, {z1, z2}, 3);
        LogStar lf = log_star(finite);
        o.require(lf.values[0].is_zero() && lf.values[1].is_zero(), "finite-order character outside the kernel");
        Character moving = char_from_images(dom, {z1 * principal(true), z2}, 3);
        o.require(!log_star(moving).values[0].is_zero(), "kernel contains a character of infinite order");
    }
    if (o.pass) o.detail = "20 round trips, 20 log targets, 20 kernel pairs";
    return o;
}

Outcome c6_log_exp() {
    Outcome o;
    RingPtr Z = LocalRing::base(5, 3);
    o.require(padic_log(Z->from_int(6)) == Z->from_int(55), "log(6) != 55");
    o.require(padic_exp(Z->from_int(5)) == Z->from_int(81), "exp(5) != 81");
    Rng rng(601);
    RingPtr W = LocalRing::unramified(5, 2, 3);
    for (int t = 0; t < 50; ++t) {
        const RingPtr& R = t % 2 ? W : Z;
        Elem u = R->one() + R->random(rng).scale(5);
        PrecisionBudget b1, b2;
        Elem l = padic_log(u, b1);
        Elem back = padic_exp(l, b2);
        int g = std::min(b1.guaranteed(), b2.guaranteed());
        o.require(back.reduce(g) == u.reduce(g), "exp(log u) != u");
        Elem z = R->random(rng).scale(5);
        PrecisionBudget b3, b4;
        Elem e = padic_exp(z, b3);
        Elem zz = padic_log(e, b4);
        g = std::min(b3.guaranteed(), b4.guaranteed());
        o.require(zz.reduce(g) == z.reduce(g), "log(exp z) != z");
    }
    if (o.pass) o.detail = "50 units";
    return o;
}

Outcome c7_vectorial() {
    Outcome o;
    Rng rng(701);
    const auto& basis = demo().ell_basis(3, 2);
    CurvePtr E = basis.curve;
    int triples = 0, attempts = 0;
    while (triples < 100 && attempts < 2000) {
        ++attempts;
        LocalPoint P = random_affine_point(E, rng), Q = random_affine_point(E, rng), R = random_affine_point(E, rng);
        try {
            Elem lhs = cocycle(P, Q) + cocycle(P + Q, R);
            Elem rhs = cocycle(Q, R) + cocycle(P, Q + R);
            o.require(cocycle(P, Q) == cocycle(Q, P), "cocycle not symmetric");
            o.require(lhs == rhs, "cocycle identity fails");
            ExtPoint A{P, E->ring()->random(rng)}, B{Q, E->ring()->random(rng)}, C{R, E->ring()->random(rng)};
            o.require(ext_add(ext_add(A, B), C) == ext_add(A, ext_add(B, C)), "ext_add not associative");
            ++triples;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateConfiguration) throw;
        }
    }
    o.require(triples == 100, "not enough nondegenerate triples");
    for (int nu = 1; nu <= 2; ++nu) {
        const TateVector& g = demo().p_level(nu).etale;
        ThetaValue ref = theta(g, nu, rng);
        for (int t = 0; t < 20; ++t) {
            ThetaValue th = theta(g, nu, rng, t % 2 ? ThetaChain::Split : ThetaChain::Linear);
            o.require(th.value == ref.value, "theta depends on the auxiliary point");
        }
    }
    const TateVector& g2 = demo().p_level(2).etale;
    ThetaValue t2 = theta(g2, 2, rng);
    ThetaValue t1 = theta(g2.project(5), 1, rng);
    const int k = std::min(t1.guaranteed_precision, t2.guaranteed_precision);
    o.require(k >= 1 && t2.value.reduce(k) == t1.value.reduce(k), "theta tower compatibility fails");
    if (o.pass) o.detail = "100 triples, 40 auxiliary trials, tower mod p^" + std::to_string(k);
    return o;
}

Outcome c8_lie() {
    Outcome o;
    Rng rng(801);
    const TateVector& g1 = demo().p_level(1).etale;
    const i64 pinned = pin_normalization(random_formal_point(rng), g1, 2, rng);
    o.require(pinned == kLieNormalization, "normalization unit is " + std::to_string(pinned));
    int checks = 0;
    for (int nu = 1; nu <= 2; ++nu) {
        const auto& L = demo().p_level(nu);
        for (const TateVector* g : {&L.etale, &L.formal})
            for (int t = 0; t < 5; ++t) {
                LocalPoint a = random_formal_point(rng);
                VerificationReport r = lie_alpha_check(a, *g, nu + 1, rng, kLieNormalization);
                o.require(r.pass && r.loss <= 1, "nu=" + std::to_string(nu) + " " + g->tower_tag + " got " + r.got +
                                                     " expected " + r.expected);
                ++checks;
            }
    }
    if (o.pass) o.detail = std::to_string(checks) + " instances, c = " + std::to_string(pinned);
    return o;
}

Outcome c9_unipotent() {
    Outcome o;
    Rng rng(901);
    const TateVector& g = demo().p_level(2).etale;
    RingPtr Rn = g.point.ring()->at_precision(2);
    auto scaled = [&](i64 k) { return TateVector{g.level, scalar_mul(k, g.point), g.tower_tag}; };
    auto unit_mod25 = [&] {
        for (;;) {
            i64 k = rng.range(1, 24);
            if (k % 5) return k;
        }
    };
    for (int t = 0; t < 20; ++t) {
        i64 i = unit_mod25(), j = unit_mod25();
        while ((i + j) % 5 == 0) j = unit_mod25();
        Elem c1 = Rn->random(rng), c2 = Rn->random(rng);
        UnipotentRep r_i = rho_unipotent(c1, scaled(i), 2, rng);
        UnipotentRep r_j = rho_unipotent(c1, scaled(j), 2, rng);
        UnipotentRep r_ij = rho_unipotent(c1, scaled(i + j), 2, rng);
        o.require(r_ij.beta == r_i.beta + r_j.beta, "beta not additive in gamma");
        o.require(mat_mul(r_i.matrix(), r_j.matrix()) == r_ij.matrix(), "matrices do not compose");
        UnipotentRep s1 = rho_unipotent(c1, scaled(i), 2, rng);
        UnipotentRep s2 = rho_unipotent(c2, scaled(i), 2, rng);
        UnipotentRep s12 = rho_unipotent(c1 + c2, scaled(i), 2, rng);
        o.require(s12.beta == s1.beta + s2.beta, "beta not additive in c");
        UnipotentRep zero = rho_unipotent(Rn->zero(), scaled(i), 2, rng);
        o.require(zero.matrix() == std::array<Elem, 4>{Rn->one(), Rn->zero(), Rn->zero(), Rn->one()}, "c = 0 is not the identity");
    }
    if (o.pass) o.detail = "20 instances";
    return o;
}

Outcome c10_pairing_oracle() {
    Outcome o;
    Rng rng(1001), orng(1002), pick(1003);
    int checked = 0;
    for (auto [ell, k] : std::vector<std::pair<u64, int>>{{2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
        const TorsionBasis& B = demo().ell_basis(ell, k);
        const u64 N = B.first.level;
        ResidueCurve Ek = B.curve->residue_curve();
        for (int t = 0; t < 30; ++t) {
            const i64 n = static_cast<i64>(N) - 1;
            LocalPoint S = t == 0 ? B.first.point : combo(pick.range(0, n), B.first.point, pick.range(0, n), B.second.point);
            LocalPoint T = t == 0 ? B.second.point : combo(pick.range(0, n), B.first.point, pick.range(0, n), B.second.point);
            Elem got = cartier_pairing_local(S, T, N, rng);
            Elem want = teich_of(Ek.weil_pairing(S.residue(), T.residue(), N, orng), B.ring);
            o.require(got == want, "N=" + std::to_string(N) + " sample " + std::to_string(t));
            o.require(got.pow(N).is_one(), "value is not an N-th root of unity");
            ++checked;
        }
    }
    if (o.pass) o.detail = std::to_string(checked) + " pairs over N in {2,3,4,9}";
    return o;
}

std::string run_cli(const std::string& args) {
    std::string cmd = std::string(TATECHAR_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {};
    std::string out;
    char buf[4096];
    std::size_t k;
    while ((k = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, k);
    pclose(pipe);
    return out;
}

Outcome c11_reproducible() {
    Outcome o;
    auto dir = std::filesystem::temp_directory_path() / "tatechar_acceptance";
    std::filesystem::create_directories(dir);
    auto cfg = dir / "job.json";
    {
        std::ofstream f(cfg);
        f << R"({"curve": "demo", "precision": 2, "seed": 11, "tasks": [
  {"kind": "pairing", "ell": 3, "k": 2},
  {"kind": "alpha", "point": [0, 1], "ell": 3, "k": 2, "p_level": 1},
  {"kind": "theta", "nu": 1},
  {"kind": "rho", "nu": 2, "c": 3},
  {"kind": "verify", "checks": ["isogeny", "lie", "galois"]}
]})";
    }
    const std::string args = "verify --config " + cfg.string() + " --seed 11";
    std::string a = run_cli(args), b = run_cli(args);
    o.require(!a.empty(), "no output from the CLI");
    o.require(a == b, "outputs differ");
    std::string csv1 = run_cli(args + " --output csv"), csv2 = run_cli(args + " --output csv");
    o.require(!csv1.empty() && csv1 == csv2, "csv outputs differ");
    if (o.pass) o.detail = std::to_string(a.size()) + " bytes identical";
    return o;
}

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    std::vector<Criterion> all{
        {1, "alpha on torsion equals the Weil pairing", 30, c1_alpha_tors},
        {2, "homomorphy and tower", 60, c2_homomorphy_tower},
        {3, "isogeny functoriality", 60, c3_isogeny},
        {4, "Galois equivariance and smoothness", 30, c4_galois},
        {5, "character evaluation and log splitting", 10, c5_character_splitting},
        {6, "p-adic log and exp", 5, c6_log_exp},
        {7, "universal vectorial extension", 60, c7_vectorial},
        {8, "Lie alpha = theta*", 300, c8_lie},
        {9, "unipotent representation", 30, c9_unipotent},
        {10, "local pairing vs finite-field oracle", 30, c10_pairing_oracle},
        {11, "reproducible CLI reports", 60, c11_reproducible},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = out.pass && dt < c.limit_s;
        if (out.pass && !ok) out.detail = "over the time limit";
        failed += ok ? 0 : 1;
        char line[512];
        std::snprintf(line, sizeof line, "[%s] %2d %-42s %7.2fs / %3.0fs  %s", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                      dt, c.limit_s, out.detail.c_str());
        std::cout << line << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
