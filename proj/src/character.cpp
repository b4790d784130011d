#include "tate/character.hpp"

#include <numeric>

namespace tate {

namespace {

constexpr const char* kMod = "characters";

bool same_ring(const Elem& a, const Elem& b) { return a.ring() == b.ring() || a.ring()->same(*b.ring()); }

// Product in whichever of the two rings contains the other.
Elem mul_any(const Elem& a, const Elem& b) {
    if (same_ring(a, b)) return a * b;
    if (a.ring()->embeds_into(*b.ring())) return a.embed(b.ring()) * b;
    if (b.ring()->embeds_into(*a.ring())) return a * b.embed(a.ring());
    fail(ErrorKind::RingMismatch, kMod, "character values lie in unrelated rings");
}

void check_shape(const Character& a, const Character& b) {
    if (a.domain != b.domain || a.precision != b.precision)
        fail(ErrorKind::RingMismatch, kMod, "characters have different domains");
}

i64 reduce_exponent(i64 k, u64 d) {
    if (d == 0) return k;
    i64 r = k % static_cast<i64>(d);
    return r < 0 ? r + static_cast<i64>(d) : r;
}

}  // namespace

const char* to_string(ComponentKind k) {
    switch (k) {
        case ComponentKind::Ell: return "ell";
        case ComponentKind::P: return "p";
        case ComponentKind::Zhat: return "zhat";
    }
    return "?";
}

bool Character::operator==(const Character& o) const {
    if (domain != o.domain || precision != o.precision || images.size() != o.images.size()) return false;
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (!same_ring(images[i], o.images[i])) return false;
        if (images[i] != o.images[i]) return false;
    }
    return true;
}

Character char_from_images(std::vector<Component> domain, std::vector<Elem> images, int m) {
    if (domain.size() != images.size()) fail(ErrorKind::InvalidArgument, kMod, "one image per generator");
    for (std::size_t i = 0; i < images.size(); ++i) {
        Elem& u = images[i];
        if (u.ring()->m() < m) fail(ErrorKind::PrecisionExhausted, kMod, "image known below the requested precision");
        if (u.ring()->m() > m) u = u.reduce(m);
        if (!u.is_unit()) fail(ErrorKind::NonUnit, kMod, "character values must be units");
        const Component& c = domain[i];
        if (c.kind == ComponentKind::Ell) {
            if (c.level == 0) fail(ErrorKind::InvalidArgument, kMod, "ell-adic component needs a finite level");
            u64 l = c.level;
            while (l % c.prime == 0) l /= c.prime;
            if (l != 1) fail(ErrorKind::InvalidArgument, kMod, "ell-adic level must be a power of ell");
            if (!u.pow(c.level).is_one()) fail(ErrorKind::OrderMismatch, kMod, "ell-adic image is not of ell-power order");
        }
    }
    Character chi;
    chi.domain = std::move(domain);
    chi.images = std::move(images);
    chi.precision = m;
    return chi;
}

Character trivial_character(std::vector<Component> domain, const RingPtr& ring) {
    std::vector<Elem> images(domain.size(), ring->one());
    return char_from_images(std::move(domain), std::move(images), ring->m());
}

u64 required_depth(const Character& chi, std::size_t i) {
    const Component& c = chi.domain.at(i);
    if (c.kind == ComponentKind::Ell) return c.level;
    auto [tame, wild] = unit_group_exponent(*chi.images.at(i).ring());
    return tame * wild;
}

Elem evaluate(const Character& chi, const std::vector<Arg>& args) {
    if (args.size() != chi.images.size()) fail(ErrorKind::InvalidArgument, kMod, "one argument per generator");
    std::optional<Elem> acc;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const u64 d = required_depth(chi, i);
        if (args[i].modulus != 0 && args[i].modulus % d != 0)
            fail(ErrorKind::InsufficientDepth, kMod, "argument not known to the required depth");
        Elem v = chi.images[i].pow(static_cast<u64>(reduce_exponent(args[i].value, d)));
        acc = acc ? mul_any(*acc, v) : v;
    }
    if (!acc) fail(ErrorKind::InvalidArgument, kMod, "character has an empty domain");
    return *acc;
}

Character char_mul(const Character& a, const Character& b) {
    check_shape(a, b);
    Character r = a;
    r.smooth_level.reset();
    for (std::size_t i = 0; i < r.images.size(); ++i) r.images[i] = a.images[i] * b.images[i];
    return r;
}

Character char_inv(const Character& a) {
    Character r = a;
    for (auto& u : r.images) u = u.inv();
    return r;
}

Character char_pow(const Character& a, i64 k) {
    Character r = a;
    r.smooth_level.reset();
    for (auto& u : r.images) u = u.pow_signed(k);
    return r;
}

Character char_reduce(const Character& a, int n) {
    if (n > a.precision) fail(ErrorKind::PrecisionExhausted, kMod, "cannot raise the precision of a character");
    Character r = a;
    for (auto& u : r.images) u = u.reduce(n);
    r.precision = n;
    return r;
}

LogStar log_star(const Character& chi) {
    LogStar out;
    for (const Elem& u : chi.images) {
        const RingPtr& R = u.ring();
        RingPtr U = R->unramified_part();
        Elem t = teichmuller(U->from_residue(u.residue())).embed(R);
        PrecisionBudget b;
        out.values.push_back(padic_log(u * t.inv(), b));
        out.loss = std::max(out.loss, b.loss);
    }
    return out;
}

Character char_with_given_log(std::vector<Component> domain, const std::vector<Elem>& targets, int m) {
    std::vector<Elem> images;
    for (const Elem& t : targets) {
        Elem tm = t.ring()->m() > m ? t.reduce(m) : t;
        PrecisionBudget b;
        Elem u = padic_exp(tm, b);
        if (b.loss > 0) fail(ErrorKind::PrecisionExhausted, kMod, "exponential lost precision");
        images.push_back(u);
    }
    return char_from_images(std::move(domain), std::move(images), m);
}

Character conjugate(const Character& chi, const GaloisAction& sigma) {
    const std::size_t r = chi.images.size();
    if (sigma.inverse_action.size() != r) fail(ErrorKind::InvalidArgument, kMod, "action matrix has the wrong size");
    for (const Elem& u : chi.images)
        if (u.ring()->kind() == RingKind::Eisenstein)
            fail(ErrorKind::RamifiedAutomorphism, kMod, "Galois action only on unramified values");
    Character out = chi;
    out.smooth_level.reset();
    for (std::size_t i = 0; i < r; ++i) {
        if (sigma.inverse_action[i].size() != r) fail(ErrorKind::InvalidArgument, kMod, "action matrix has the wrong size");
        Elem v = chi.images[i].ring()->one();
        for (std::size_t j = 0; j < r; ++j) {
            i64 k = reduce_exponent(sigma.inverse_action[i][j], required_depth(chi, j));
            if (k == 0) continue;
            Elem w = chi.images[j].pow(static_cast<u64>(k));
            if (!same_ring(w, v)) w = w.embed(v.ring());
            v = v * w;
        }
        out.images[i] = frobenius(v, sigma.frobenius_power);
    }
    return out;
}

SmoothnessCertificate is_smooth_at_level(Character& chi, const std::vector<GaloisAction>& generators) {
    SmoothnessCertificate cert;
    int level = 1;
    for (const auto& g : generators) {
        if (conjugate(chi, g) != chi) {
            chi.smooth_level.reset();
            return cert;
        }
        level = std::lcm(level, std::max(1, g.frobenius_power));
    }
    cert.smooth = true;
    cert.level = level;
    chi.smooth_level = level;
    return cert;
}

}  // namespace tate
