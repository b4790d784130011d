#include "tate/alpha.hpp"

#include <sstream>

namespace tate {

namespace {

constexpr const char* kMod = "tate_alpha";

PrimePower prime_power_of(u64 level) {
    auto f = factorize(level);
    if (f.size() != 1) fail(ErrorKind::InvalidArgument, kMod, "basis levels must be prime powers");
    return f[0];
}

std::string images_str(const Character& chi) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < chi.images.size(); ++i) os << (i ? "," : "") << chi.images[i].str();
    os << "]";
    return os.str();
}

bool divisible_to(const Elem& d, int k) {
    if (k <= 0) return true;
    return d.val_units() >= d.ring()->e() * k;
}

struct LieSides {
    Elem lhs, theta_log;
    int loss = 0;
    int n = 0;
};

LieSides lie_sides(const LocalPoint& a_hat, const TateVector& gamma, int n, Rng& rng) {
    if (!a_hat.in_formal_group()) fail(ErrorKind::InvalidArgument, kMod, "Lie check needs a point of the formal group");
    const RingPtr Rg = gamma.point.ring()->at_precision(n);
    LieSides s;
    s.n = n;
    if (a_hat.is_infinity() || reduce_point(a_hat, n).is_infinity()) {
        s.lhs = Rg->zero();
        s.theta_log = Rg->zero();
        return s;
    }
    AlphaResult al = alpha_n(a_hat, n, {gamma}, rng);
    const Elem& u = al.character.images[0];
    PrecisionBudget lb;
    s.lhs = padic_log(u, lb);
    ThetaValue th = theta(gamma, n, rng);
    PrecisionBudget eb;
    Elem lg = elliptic_log(reduce_point(a_hat, n), eb);
    s.theta_log = th.value * lg.embed(th.value.ring());
    if (!(s.lhs.ring() == s.theta_log.ring() || s.lhs.ring()->same(*s.theta_log.ring())))
        s.lhs = s.lhs.embed(s.theta_log.ring());
    s.loss = std::max(lb.loss, eb.loss);
    return s;
}

}  // namespace

// ---------------------------------------------------------------- pairing

Elem cartier_pairing_local(const LocalPoint& S, const LocalPoint& T_in, u64 N, Rng& rng, int retries) {
    LocalPoint T = T_in.curve() == S.curve() ? T_in : base_change(T_in, S.curve());
    const RingPtr& R = S.ring();
    if (!scalar_mul(static_cast<i64>(N), S).is_infinity() || !scalar_mul(static_cast<i64>(N), T).is_infinity())
        fail(ErrorKind::NotTorsion, kMod, "pairing arguments must be N-torsion");
    if (S.is_infinity() || T.is_infinity()) return R->one();
    for (int it = 0; it < retries; ++it) {
        try {
            LocalPoint Rp = random_affine_point(S.curve(), rng);
            LocalPoint TR = point_add(T, Rp), SR = point_sub(S, Rp), nR = point_neg(Rp);
            MillerValues fs = miller(S, N, {TR, Rp});
            MillerValues ft = miller(T, N, {SR, nR});
            bool ok = true;
            for (int i = 0; i < 2; ++i)
                ok = ok && fs.num[i].is_unit() && fs.den[i].is_unit() && ft.num[i].is_unit() && ft.den[i].is_unit();
            if (!ok) continue;
            Elem num = fs.num[0] * fs.den[1] * ft.den[0] * ft.num[1];
            Elem den = fs.den[0] * fs.num[1] * ft.num[0] * ft.den[1];
            return num * den.inv();
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateConfiguration) throw;
        }
    }
    fail(ErrorKind::RetriesExhausted, kMod, "no admissible auxiliary shift; extend the ring");
}

// ---------------------------------------------------------------- presets and torsion data

CurveSpec preset_curve(const std::string& name) {
    if (name == "demo") return {"demo", 5, 1, 1, false, 6};
    if (name == "cm1728") return {"cm1728", 5, -1, 0, true, 8};
    fail(ErrorKind::ConfigError, kMod, "unknown curve preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"demo", "cm1728"}; }

TorsionProvider::TorsionProvider(CurveSpec spec, int max_precision) : spec_(std::move(spec)), max_m_(max_precision) {
    if (max_m_ < 1) fail(ErrorKind::InvalidArgument, kMod, "precision must be positive");
}

CurvePtr TorsionProvider::curve(int n) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = curves_.find(n);
    if (it != curves_.end()) return it->second;
    CurvePtr E = LocalCurve::make(LocalRing::base(spec_.p, n), spec_.a, spec_.b, spec_.id);
    curves_[n] = E;
    return E;
}

const TorsionBasis& TorsionProvider::ell_basis(u64 ell, int k) const {
    CurvePtr E = curve(max_m_);
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(ell, k);
    auto it = ell_.find(key);
    if (it != ell_.end()) return *it->second;
    auto B = std::make_unique<TorsionBasis>(torsion_basis(*E, ell, k, spec_.ell_degree));
    auto& ref = *B;
    ell_[key] = std::move(B);
    return ref;
}

const PTorsionLevel& TorsionProvider::p_level(int nu) const {
    CurvePtr E = curve(max_m_);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = p_.find(nu);
    if (it != p_.end()) return *it->second;
    auto T = std::make_unique<PTorsionLevel>(p_torsion_level(*E, nu));
    auto& ref = *T;
    p_[nu] = std::move(T);
    return ref;
}

std::vector<TateVector> TorsionProvider::ell_vectors(u64 ell, int k) const {
    const TorsionBasis& B = ell_basis(ell, k);
    return {B.first, B.second};
}

// ---------------------------------------------------------------- alpha

std::vector<Component> basis_domain(const std::vector<TateVector>& basis) {
    std::vector<Component> d;
    for (const auto& g : basis) {
        PrimePower pp = prime_power_of(g.level);
        const bool is_p = pp.prime == g.point.ring()->p();
        d.push_back({g.tower_tag, is_p ? ComponentKind::P : ComponentKind::Ell, pp.prime, g.level});
    }
    return d;
}

AlphaResult alpha_n(const LocalPoint& a_hat, int n, const std::vector<TateVector>& basis, Rng& rng) {
    AlphaResult out;
    out.n = n;
    out.order = point_order_mod(a_hat, n);
    LocalPoint an = reduce_point(a_hat, n);
    const u64 N = out.order.value();
    const u64 p = out.order.p;
    std::vector<Elem> images;
    for (const auto& g : basis) {
        PrimePower pp = prime_power_of(g.level);
        int k = 0;
        if (pp.prime == p) {
            k = out.order.p_exponent;
        } else {
            for (const auto& f : out.order.factors())
                if (f.prime == pp.prime) k = f.exponent;
        }
        if (k > pp.exponent) fail(ErrorKind::InvalidArgument, kMod, "basis level is below the order of the point");
        RingPtr Rg = g.point.ring()->at_precision(n);
        if (k == 0) {
            images.push_back(Rg->one());
            out.provenance.push_back(g.tower_tag + ": trivial component");
            continue;
        }
        const u64 lk = ipow_checked(pp.prime, k);
        const u64 rest = N / lk;
        const i64 c = static_cast<i64>(rest % lk == 0 ? 0 : rest * static_cast<u64>(mod_inverse(static_cast<i64>(rest % lk), static_cast<i64>(lk))));
        LocalPoint P = scalar_mul(c, an);
        LocalPoint G = reduce_point(g.project(lk).point, n);
        LocalPoint Pg = base_change(P, G.curve());
        images.push_back(cartier_pairing_local(Pg, G, lk, rng));
        out.provenance.push_back(g.tower_tag + ": e_" + std::to_string(lk) + " over " + to_string(Rg->kind()) +
                                 " ring e=" + std::to_string(Rg->e()) + " f=" + std::to_string(Rg->f()));
    }
    out.character = char_from_images(basis_domain(basis), std::move(images), n);
    return out;
}

std::vector<AlphaResult> alpha_tower(const LocalPoint& a_hat, int n_max, const std::vector<TateVector>& basis, Rng& rng) {
    std::vector<AlphaResult> out;
    for (int n = 1; n <= n_max; ++n) {
        out.push_back(alpha_n(a_hat, n, basis, rng));
        if (n > 1 && char_reduce(out[n - 1].character, n - 1) != out[n - 2].character)
            fail(ErrorKind::InternalInconsistency, kMod, "alpha_n does not reduce to alpha_{n-1}");
    }
    return out;
}

// ---------------------------------------------------------------- reports

nlohmann::ordered_json to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["check_name"] = r.check_name;
    j["curve_id"] = r.curve_id;
    j["inputs"] = r.inputs;
    j["expected"] = r.expected;
    j["got"] = r.got;
    j["precision"] = r.precision;
    j["loss"] = r.loss;
    j["pass"] = r.pass;
    return j;
}

VerificationReport isogeny_functoriality_check(const LocalPoint& a_hat, i64 m, int n, const std::vector<TateVector>& basis,
                                               Rng& rng) {
    VerificationReport r;
    r.check_name = "isogeny_functoriality";
    r.curve_id = a_hat.curve()->id();
    r.inputs["a_hat"] = a_hat.str();
    r.inputs["m"] = m;
    r.precision = n;
    Character lhs = alpha_n(scalar_mul(m, a_hat), n, basis, rng).character;
    Character rhs = char_pow(alpha_n(a_hat, n, basis, rng).character, m);
    r.expected = images_str(rhs);
    r.got = images_str(lhs);
    r.pass = lhs == rhs;
    return r;
}

VerificationReport lie_alpha_check(const LocalPoint& a_hat, const TateVector& gamma, int n, Rng& rng, i64 normalization) {
    VerificationReport r;
    r.check_name = "lie_alpha";
    r.curve_id = a_hat.curve()->id();
    r.inputs["a_hat"] = a_hat.str();
    r.inputs["gamma_level"] = gamma.level;
    r.inputs["gamma_tag"] = gamma.tower_tag;
    r.inputs["normalization"] = normalization;
    r.precision = n;
    LieSides s = lie_sides(a_hat, gamma, n, rng);
    Elem rhs = s.theta_log.scale(normalization);
    r.loss = s.loss;
    r.expected = rhs.str();
    r.got = s.lhs.str();
    r.pass = divisible_to(s.lhs - rhs, n - s.loss);
    return r;
}

i64 pin_normalization(const LocalPoint& a_hat, const TateVector& gamma, int n, Rng& rng) {
    LieSides s = lie_sides(a_hat, gamma, n, rng);
    const u64 p = s.lhs.ring()->p();
    const u64 q = ipow_checked(p, n - s.loss);
    std::vector<u64> cand;
    for (u64 c = 1; c < q; ++c) {
        if (c % p == 0) continue;
        if (divisible_to(s.lhs - s.theta_log.scale(static_cast<i64>(c)), n - s.loss)) cand.push_back(c);
    }
    if (cand.empty()) fail(ErrorKind::NormalizationUnresolved, kMod, "no unit relates the two sides");
    u64 d = q;
    for (std::size_t i = 1; i < cand.size(); ++i) d = std::min(d, cand[i] - cand[0]);
    i64 c0 = static_cast<i64>(cand[0] % d);
    if (c0 > static_cast<i64>(d / 2)) c0 -= static_cast<i64>(d);
    if (((c0 - kLieNormalization) % static_cast<i64>(d)) != 0)
        fail(ErrorKind::NormalizationUnresolved, kMod, "normalization differs from the pinned constant");
    return c0;
}

// ---------------------------------------------------------------- Galois action

GaloisAction frobenius_action(const std::vector<TateVector>& basis, int power) {
    GaloisAction g;
    g.frobenius_power = power;
    const std::size_t r = basis.size();
    g.inverse_action.assign(r, std::vector<i64>(r, 0));
    for (std::size_t i = 0; i < r; ++i) {
        const TateVector& gi = basis[i];
        if (gi.point.ring()->kind() == RingKind::Eisenstein)
            fail(ErrorKind::RamifiedAutomorphism, kMod, "Frobenius is only tracked on unramified torsion");
        const u64 ell = prime_power_of(gi.level).prime;
        std::vector<std::size_t> group;
        for (std::size_t j = 0; j < r; ++j)
            if (prime_power_of(basis[j].level).prime == ell) {
                if (basis[j].level != gi.level) fail(ErrorKind::InvalidArgument, kMod, "mixed levels for one prime");
                group.push_back(j);
            }
        ResidueCurve Ek = gi.point.curve()->residue_curve();
        ResiduePoint target = Ek.frobenius(gi.point.residue(), -power);
        std::vector<ResiduePoint> gens;
        for (std::size_t j : group) gens.push_back(basis[j].point.residue());
        const u64 L = gi.level;
        bool found = false;
        std::vector<u64> coef(group.size(), 0);
        u64 total = 1;
        for (std::size_t t = 0; t < group.size(); ++t) total *= L;
        for (u64 idx = 0; idx < total && !found; ++idx) {
            u64 v = idx;
            ResiduePoint S = ResiduePoint::infinity();
            for (std::size_t t = 0; t < group.size(); ++t) {
                coef[t] = v % L;
                v /= L;
                S = Ek.add(S, Ek.mul(static_cast<i64>(coef[t]), gens[t]));
            }
            if (S == target) {
                found = true;
                for (std::size_t t = 0; t < group.size(); ++t) g.inverse_action[i][group[t]] = static_cast<i64>(coef[t]);
            }
        }
        if (!found) fail(ErrorKind::InternalInconsistency, kMod, "Frobenius image outside the span of the basis");
    }
    return g;
}

LocalPoint cm_conjugate_search(const LocalPoint& a_hat, int frobenius_power, const std::vector<TateVector>& basis, int n,
                               Rng& rng) {
    FactoredOrder ord = point_order_mod(a_hat, n);
    if (ord.p_exponent != 0) fail(ErrorKind::InvalidArgument, kMod, "CM search needs torsion of order prime to p");
    const u64 N = ord.prime_to_p;
    if (N == 1) return a_hat.curve()->infinity();
    const int f = a_hat.ring()->f();
    if (frobenius_power % f == 0) return a_hat;
    Character target = alpha_n(a_hat, n, basis, rng).character;
    for (auto& u : target.images) u = frobenius(u, frobenius_power);
    // span of the basis projections to the primary parts of N
    std::vector<LocalPoint> gens;
    std::vector<u64> mods;
    for (const auto& pp : factorize(N)) {
        const u64 lk = ipow_checked(pp.prime, pp.exponent);
        for (const auto& g : basis)
            if (prime_power_of(g.level).prime == pp.prime) {
                if (g.level % lk != 0) fail(ErrorKind::InvalidArgument, kMod, "basis level too small for the search");
                gens.push_back(base_change(g.project(lk).point, a_hat.curve()));
                mods.push_back(lk);
            }
    }
    u64 total = 1;
    for (u64 m : mods) total *= m;
    for (u64 idx = 0; idx < total; ++idx) {
        u64 v = idx;
        LocalPoint b = a_hat.curve()->infinity();
        for (std::size_t t = 0; t < gens.size(); ++t) {
            b = point_add(b, scalar_mul(static_cast<i64>(v % mods[t]), gens[t]));
            v /= mods[t];
        }
        if (point_order_mod(b, n).value() > N) continue;
        if (alpha_n(b, n, basis, rng).character == target) return b;
    }
    fail(ErrorKind::NoMatch, kMod, "no torsion point realizes the conjugated character");
}

// ---------------------------------------------------------------- unipotent representation

std::array<Elem, 4> UnipotentRep::matrix() const {
    const RingPtr& R = beta.ring();
    return {R->one(), beta, R->zero(), R->one()};
}

UnipotentRep rho_unipotent(const Elem& c, const TateVector& gamma, int n, Rng& rng) {
    UnipotentRep u;
    u.n = n;
    ThetaValue t = theta(gamma, n, rng);
    u.c = c.embed(t.value.ring());
    u.beta = u.c * t.value;
    return u;
}

std::array<Elem, 4> mat_mul(const std::array<Elem, 4>& A, const std::array<Elem, 4>& B) {
    return {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3], A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3]};
}

}  // namespace tate
