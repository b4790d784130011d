#include "tate/local_ring.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace tate {

namespace {

constexpr const char* kMod = "local_rings";

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

u64 mod_signed(i64 v, u64 q) {
    i64 r = v % static_cast<i64>(q);
    if (r < 0) r += static_cast<i64>(q);
    return static_cast<u64>(r);
}

// Polynomials over F_p for the irreducibility search, coefficients low to high.
using FpPoly = std::vector<u64>;

void fp_trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

FpPoly fp_mod(FpPoly a, const FpPoly& m, u64 p) {
    fp_trim(a);
    const std::size_t d = m.size() - 1;
    const u64 lead_inv = powmod(m.back(), p - 2, p);
    while (a.size() > d) {
        u64 c = a.back() * lead_inv % p;
        std::size_t shift = a.size() - 1 - d;
        for (std::size_t i = 0; i <= d; ++i) a[shift + i] = (a[shift + i] + (p - c) * m[i]) % p;
        fp_trim(a);
    }
    return a;
}

FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, u64 p) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return fp_mod(r, m, p);
}

FpPoly fp_powx(u64 e, const FpPoly& m, u64 p) {
    FpPoly result{1}, base{0, 1};
    base = fp_mod(base, m, p);
    while (e) {
        if (e & 1) result = fp_mulmod(result, base, m, p);
        base = fp_mulmod(base, base, m, p);
        e >>= 1;
    }
    return result;
}

FpPoly fp_compose_frob(const FpPoly& g, const FpPoly& m, u64 p) {
    // g(x)^p mod m = g(x^p) mod m over F_p
    FpPoly xp = fp_powx(p, m, p), r{}, pw{1};
    for (u64 c : g) {
        FpPoly t = pw;
        for (auto& v : t) v = v * c % p;
        if (r.size() < t.size()) r.resize(t.size(), 0);
        for (std::size_t i = 0; i < t.size(); ++i) r[i] = (r[i] + t[i]) % p;
        pw = fp_mulmod(pw, xp, m, p);
    }
    fp_trim(r);
    return r;
}

FpPoly fp_gcd(FpPoly a, FpPoly b, u64 p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        FpPoly r = fp_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

}  // namespace

const char* to_string(RingKind k) {
    switch (k) {
        case RingKind::Base: return "base";
        case RingKind::Unramified: return "unramified";
        case RingKind::Eisenstein: return "eisenstein";
    }
    return "?";
}

std::string Valuation::str() const {
    std::ostringstream os;
    if (infinite) os << ">=";
    os << num;
    if (den != 1) os << "/" << den;
    return os.str();
}

bool Valuation::operator==(const Valuation& o) const {
    return infinite == o.infinite && num * o.den == o.num * den;
}

bool Valuation::operator<(const Valuation& o) const {
    if (infinite != o.infinite) return !infinite;
    return num * o.den < o.num * den;
}

int max_precision(u64 p) {
    int k = 0;
    u64 r = 1;
    while (r <= (u64(1) << 56) / p) {
        r *= p;
        ++k;
    }
    return k;
}

bool is_irreducible_mod_p(const std::vector<u64>& f_in, u64 p) {
    FpPoly f = f_in;
    for (auto& c : f) c %= p;
    fp_trim(f);
    if (f.size() < 2) return false;
    const int n = static_cast<int>(f.size()) - 1;
    if (n == 1) return true;
    // x^(p^n) == x mod f, and gcd(x^(p^(n/r)) - x, f) = 1 for primes r | n.
    FpPoly x{0, 1};
    FpPoly xp = fp_mod(x, f, p);
    std::vector<FpPoly> powers(n + 1);
    powers[0] = xp;
    for (int i = 1; i <= n; ++i) powers[i] = fp_compose_frob(powers[i - 1], f, p);
    FpPoly diff = powers[n];
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = (diff[1] + p - 1) % p;
    fp_trim(diff);
    if (!diff.empty()) return false;
    for (auto pp : factorize(static_cast<u64>(n))) {
        FpPoly g = powers[n / pp.prime];
        if (g.size() < 2) g.resize(2, 0);
        g[1] = (g[1] + p - 1) % p;
        fp_trim(g);
        FpPoly d = fp_gcd(f, g, p);
        if (d.size() != 1) return false;
    }
    return true;
}

std::vector<u64> first_irreducible(u64 p, int f) {
    std::vector<u64> c(f + 1, 0);
    c[f] = 1;
    u64 total = ipow_checked(p, f);
    for (u64 idx = 0; idx < total; ++idx) {
        u64 t = idx;
        for (int i = 0; i < f; ++i) {
            c[i] = t % p;
            t /= p;
        }
        if (c[0] == 0) continue;
        if (is_irreducible_mod_p(c, p)) return c;
    }
    fail(ErrorKind::InvalidModulus, kMod, "no irreducible polynomial found");
}

LocalRing::LocalRing(Key, u64 p, int m, int f, std::vector<u64> umod, int e, std::vector<u64> emod,
                     int mod_prec, u64 q_mod_prec)
    : p_(p),
      m_(m),
      q_(ipow_checked(p, m)),
      f_(f),
      e_(e),
      mod_prec_(mod_prec),
      q_hi_(q_mod_prec),
      umod_hi_(std::move(umod)),
      emod_hi_(std::move(emod)) {
    umod_ = umod_hi_;
    for (auto& c : umod_) c %= q_;
    emod_ = emod_hi_;
    for (auto& c : emod_) c %= q_;
}

void LocalRing::finish() {
    const int D = degree();
    if (!(m_ == 1 && e_ == 1 && emod_.empty())) {
        auto r = std::make_shared<LocalRing>(Key{}, p_, 1, f_, umod_hi_, 1, std::vector<u64>{}, mod_prec_, q_hi_);
        r->finish();
        residue_ = r;
    }
    if (e_ > 1) {
        pipow_.assign(static_cast<std::size_t>(e_ - 1) * D, 0);
        std::vector<u64> cur(D, 0);
        for (int i = 0; i < D; ++i) cur[i] = emod_[i] ? q_ - emod_[i] : 0;
        if (e_ >= 2) std::copy(cur.begin(), cur.end(), pipow_.begin());
        const std::vector<u64> base = cur;
        std::vector<u64> tmp(f_);
        for (int k = 1; k < e_ - 1; ++k) {
            std::vector<u64> nxt(D, 0);
            for (int j = e_ - 1; j >= 1; --j)
                for (int i = 0; i < f_; ++i) nxt[j * f_ + i] = cur[(j - 1) * f_ + i];
            const u64* top = &cur[(e_ - 1) * f_];
            for (int j = 0; j < e_; ++j) {
                gr_mul(top, &base[j * f_], tmp.data());
                for (int i = 0; i < f_; ++i) nxt[j * f_ + i] = (nxt[j * f_ + i] + tmp[i]) % q_;
            }
            cur = nxt;
            std::copy(cur.begin(), cur.end(), pipow_.begin() + static_cast<std::ptrdiff_t>(k) * D);
        }
    }
    if (e_ == 1 && f_ > 1) {
        Elem t = unramified_gen();
        Elem x = t.pow(p_);
        for (int it = 0; it < 128; ++it) {
            Elem u = zero(), du = zero(), xp = one();
            for (int i = 0; i <= f_; ++i) {
                u += xp.scale(static_cast<i64>(umod_[i]));
                if (i < f_) du += xp.scale(static_cast<i64>((umod_[i + 1] * static_cast<u64>(i + 1)) % q_));
                xp *= x;
            }
            if (u.is_zero()) break;
            x = x - u * du.inv();
            if (it == 127) fail(ErrorKind::InternalInconsistency, kMod, "frobenius root did not converge");
        }
        frob_.assign(static_cast<std::size_t>(f_) * f_, 0);
        Elem pw = one();
        for (int i = 0; i < f_; ++i) {
            for (int k = 0; k < f_; ++k) frob_[i * f_ + k] = pw.coeffs()[k];
            pw *= x;
        }
    }
}

RingPtr LocalRing::make(u64 p, RingKind kind, const std::vector<i64>& modulus, int m) {
    if (!is_prime(p)) fail(ErrorKind::InvalidArgument, kMod, "p must be prime");
    if (p < 5) fail(ErrorKind::UnsupportedPrime, kMod, "p must be at least 5");
    const int cap = max_precision(p);
    if (m < 1 || m > cap) fail(ErrorKind::CapExceeded, kMod, "precision out of range");
    const u64 qhi = ipow_checked(p, cap);
    std::vector<u64> mod(modulus.size());
    for (std::size_t i = 0; i < modulus.size(); ++i) mod[i] = mod_signed(modulus[i], qhi);
    if (mod.empty() || mod.back() != 1) fail(ErrorKind::InvalidModulus, kMod, "modulus must be monic");
    const int deg = static_cast<int>(mod.size()) - 1;
    std::shared_ptr<LocalRing> r;
    switch (kind) {
        case RingKind::Base:
            if (deg != 1 || mod[0] != 0) fail(ErrorKind::InvalidModulus, kMod, "base ring expects modulus x");
            r = std::make_shared<LocalRing>(Key{}, p, m, 1, std::vector<u64>{0, 1}, 1, std::vector<u64>{},
                                            cap, qhi);
            break;
        case RingKind::Unramified:
            if (deg < 2) fail(ErrorKind::InvalidModulus, kMod, "unramified modulus needs degree >= 2");
            if (!is_irreducible_mod_p(mod, p))
                fail(ErrorKind::InvalidModulus, kMod, "modulus is reducible mod p");
            r = std::make_shared<LocalRing>(Key{}, p, m, deg, mod, 1, std::vector<u64>{}, cap, qhi);
            break;
        case RingKind::Eisenstein: {
            if (deg < 1) fail(ErrorKind::InvalidModulus, kMod, "Eisenstein modulus needs degree >= 1");
            const u64 p2 = p * p;
            for (int i = 0; i < deg; ++i)
                if (mod[i] % p != 0) fail(ErrorKind::InvalidModulus, kMod, "coefficient not divisible by p");
            if (mod[0] % p2 == 0) fail(ErrorKind::InvalidModulus, kMod, "constant term divisible by p^2");
            r = std::make_shared<LocalRing>(Key{}, p, m, 1, std::vector<u64>{0, 1}, deg, mod, cap, qhi);
            break;
        }
    }
    r->finish();
    return r;
}

RingPtr LocalRing::base(u64 p, int m) { return make(p, RingKind::Base, {0, 1}, m); }

RingPtr LocalRing::unramified(u64 p, int f, int m) {
    if (f == 1) return base(p, m);
    auto c = first_irreducible(p, f);
    std::vector<i64> s(c.begin(), c.end());
    return make(p, RingKind::Unramified, s, m);
}

RingPtr LocalRing::eisenstein(const RingPtr& over, const std::vector<Elem>& modulus) {
    if (over->e() != 1) fail(ErrorKind::InvalidModulus, kMod, "Eisenstein tower must sit over an unramified ring");
    const int deg = static_cast<int>(modulus.size()) - 1;
    if (deg < 1) fail(ErrorKind::InvalidModulus, kMod, "Eisenstein modulus needs degree >= 1");
    if (!modulus.back().is_one()) fail(ErrorKind::InvalidModulus, kMod, "modulus must be monic");
    for (int i = 0; i < deg; ++i) {
        if (modulus[i].ring() != over && !modulus[i].ring()->same(*over))
            fail(ErrorKind::RingMismatch, kMod, "modulus coefficient ring");
        if (modulus[i].coeff_divisibility() < 1)
            fail(ErrorKind::InvalidModulus, kMod, "coefficient not divisible by p");
    }
    if (over->m() >= 2 && modulus[0].coeff_divisibility() >= 2)
        fail(ErrorKind::InvalidModulus, kMod, "constant term divisible by p^2");
    const int f = over->f();
    std::vector<u64> emod(static_cast<std::size_t>(deg + 1) * f, 0);
    for (int j = 0; j <= deg; ++j)
        for (int i = 0; i < f; ++i) emod[j * f + i] = modulus[j].coeffs()[i];
    auto r = std::make_shared<LocalRing>(Key{}, over->p(), over->m(), f, over->umod_, deg, emod, over->m(),
                                         over->q());
    r->finish();
    return r;
}

RingKind LocalRing::kind() const {
    if (e_ > 1 || !emod_.empty()) return RingKind::Eisenstein;
    if (f_ > 1) return RingKind::Unramified;
    return RingKind::Base;
}

u64 LocalRing::residue_size() const { return ipow_checked(p_, f_); }

RingPtr LocalRing::at_precision(int k) const {
    if (k == m_) return self();
    if (k < 1 || k > mod_prec_) fail(ErrorKind::PrecisionExhausted, kMod, "requested precision unavailable");
    auto r = std::make_shared<LocalRing>(Key{}, p_, k, f_, umod_hi_, e_, emod_hi_, mod_prec_, q_hi_);
    r->finish();
    return r;
}

RingPtr LocalRing::residue_field() const {
    if (residue_) return residue_;
    return self();
}

RingPtr LocalRing::unramified_part() const {
    if (e_ == 1 && emod_.empty()) return self();
    auto r = std::make_shared<LocalRing>(Key{}, p_, m_, f_, umod_hi_, 1, std::vector<u64>{}, mod_prec_, q_hi_);
    r->finish();
    return r;
}

bool LocalRing::same(const LocalRing& o) const {
    if (this == &o) return true;
    return p_ == o.p_ && m_ == o.m_ && f_ == o.f_ && e_ == o.e_ && umod_ == o.umod_ && emod_ == o.emod_;
}

bool LocalRing::embeds_into(const LocalRing& o) const {
    if (p_ != o.p_ || o.m_ > m_) return false;
    auto reduce_eq = [&](const std::vector<u64>& a, const std::vector<u64>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] % o.q_ != b[i] % o.q_) return false;
        return true;
    };
    if (kind() == RingKind::Base) return true;
    if (kind() == RingKind::Unramified) return o.f_ == f_ && reduce_eq(umod_, o.umod_);
    return o.f_ == f_ && o.e_ == e_ && reduce_eq(umod_, o.umod_) && reduce_eq(emod_, o.emod_);
}

void LocalRing::reduce_row(const u128* row, u64* out) const {
    const int w = 2 * f_ - 1;
    u64 tmp[64];
    for (int i = 0; i < w; ++i) tmp[i] = static_cast<u64>(row[i] % q_);
    for (int k = w - 1; k >= f_; --k) {
        const u64 c = tmp[k];
        if (!c) continue;
        const u64 nc = q_ - c;
        for (int i = 0; i < f_; ++i)
            tmp[k - f_ + i] = static_cast<u64>((tmp[k - f_ + i] + static_cast<u128>(nc) * umod_[i]) % q_);
    }
    for (int i = 0; i < f_; ++i) out[i] = tmp[i];
}

void LocalRing::gr_mul(const u64* a, const u64* b, u64* out) const {
    if (f_ == 1) {
        out[0] = static_cast<u64>((static_cast<u128>(a[0]) * b[0]) % q_);
        return;
    }
    u128 row[64];
    const int w = 2 * f_ - 1;
    for (int i = 0; i < w; ++i) row[i] = 0;
    for (int i = 0; i < f_; ++i) {
        if (!a[i]) continue;
        for (int j = 0; j < f_; ++j) row[i + j] += static_cast<u128>(a[i]) * b[j];
    }
    reduce_row(row, out);
}

void LocalRing::mul_raw(const u64* a, const u64* b, u64* out) const {
    if (e_ == 1) {
        gr_mul(a, b, out);
        return;
    }
    const int f = f_, e = e_, w = 2 * f - 1, D = e * f;
    thread_local std::vector<u128> acc;
    thread_local std::vector<u64> prod;
    acc.assign(static_cast<std::size_t>(2 * e - 1) * w, 0);
    for (int j1 = 0; j1 < e; ++j1)
        for (int i1 = 0; i1 < f; ++i1) {
            const u64 x = a[j1 * f + i1];
            if (!x) continue;
            for (int j2 = 0; j2 < e; ++j2) {
                u128* row = &acc[static_cast<std::size_t>(j1 + j2) * w + i1];
                const u64* bb = &b[j2 * f];
                for (int i2 = 0; i2 < f; ++i2) row[i2] += static_cast<u128>(x) * bb[i2];
            }
        }
    prod.assign(static_cast<std::size_t>(2 * e - 1) * f, 0);
    for (int k = 0; k < 2 * e - 1; ++k) reduce_row(&acc[static_cast<std::size_t>(k) * w], &prod[k * f]);
    acc.assign(static_cast<std::size_t>(e) * w, 0);
    for (int k = e; k < 2 * e - 1; ++k) {
        const u64* pk = &pipow_[static_cast<std::size_t>(k - e) * D];
        for (int i1 = 0; i1 < f; ++i1) {
            const u64 c = prod[k * f + i1];
            if (!c) continue;
            for (int j = 0; j < e; ++j) {
                u128* row = &acc[static_cast<std::size_t>(j) * w + i1];
                const u64* pj = &pk[j * f];
                for (int i2 = 0; i2 < f; ++i2) row[i2] += static_cast<u128>(c) * pj[i2];
            }
        }
    }
    for (int j = 0; j < e; ++j) {
        for (int i = 0; i < f; ++i) acc[static_cast<std::size_t>(j) * w + i] += prod[j * f + i];
        reduce_row(&acc[static_cast<std::size_t>(j) * w], &out[j * f]);
    }
}

void LocalRing::frobenius_raw(const u64* a, u64* out) const {
    if (f_ == 1) {
        out[0] = a[0];
        return;
    }
    for (int k = 0; k < f_; ++k) {
        u128 s = 0;
        for (int i = 0; i < f_; ++i) s += static_cast<u128>(a[i]) * frob_[i * f_ + k];
        out[k] = static_cast<u64>(s % q_);
    }
}

Elem LocalRing::zero() const { return Elem(self(), std::vector<u64>(degree(), 0)); }

Elem LocalRing::one() const {
    std::vector<u64> c(degree(), 0);
    c[0] = 1 % q_;
    return Elem(self(), std::move(c));
}

Elem LocalRing::from_int(i64 k) const {
    std::vector<u64> c(degree(), 0);
    c[0] = mod_signed(k, q_);
    return Elem(self(), std::move(c));
}

Elem LocalRing::from_coeffs(std::vector<u64> c) const {
    if (static_cast<int>(c.size()) != degree()) fail(ErrorKind::InvalidArgument, kMod, "coefficient count");
    for (auto& v : c) v %= q_;
    return Elem(self(), std::move(c));
}

Elem LocalRing::from_signed(const std::vector<i64>& c) const {
    std::vector<u64> u(degree(), 0);
    for (std::size_t i = 0; i < c.size() && i < u.size(); ++i) u[i] = mod_signed(c[i], q_);
    return Elem(self(), std::move(u));
}

Elem LocalRing::gen() const {
    std::vector<u64> c(degree(), 0);
    if (e_ > 1) {
        c[f_] = 1;
    } else if (e_ == 1 && !emod_.empty()) {
        c[0] = emod_[0] ? q_ - emod_[0] : 0;
    } else if (f_ > 1) {
        c[1] = 1;
    }
    return Elem(self(), std::move(c));
}

Elem LocalRing::unramified_gen() const {
    std::vector<u64> c(degree(), 0);
    if (f_ > 1) c[1] = 1;
    return Elem(self(), std::move(c));
}

Elem LocalRing::random(Rng& rng) const {
    std::vector<u64> c(degree());
    for (auto& v : c) v = rng.below(q_);
    return Elem(self(), std::move(c));
}

Elem LocalRing::from_residue(const Elem& r) const {
    if (r.ring()->f() != f_ || r.ring()->p() != p_) fail(ErrorKind::RingMismatch, kMod, "residue field mismatch");
    std::vector<u64> c(degree(), 0);
    for (int i = 0; i < f_; ++i) c[i] = r.coeffs()[i];
    return Elem(self(), std::move(c));
}

// ---------------------------------------------------------------- Elem

Elem::Elem(RingPtr r, std::vector<u64> c) : r_(std::move(r)), c_(std::move(c)) {}

void Elem::check_same(const Elem& o) const {
    if (!r_ || !o.r_) fail(ErrorKind::RingMismatch, kMod, "uninitialized element");
    if (r_ != o.r_ && !r_->same(*o.r_)) fail(ErrorKind::RingMismatch, kMod, "operands in different rings");
}

bool Elem::is_zero() const {
    for (u64 v : c_)
        if (v) return false;
    return true;
}

bool Elem::is_one() const {
    if (c_.empty() || c_[0] != 1 % r_->q()) return false;
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i]) return false;
    return true;
}

bool Elem::is_unit() const {
    const u64 p = r_->p();
    const int span = r_->e() > 1 ? r_->f() : r_->degree();
    for (int i = 0; i < span; ++i)
        if (c_[i] % p) return true;
    return false;
}

Elem Elem::operator+(const Elem& o) const {
    check_same(o);
    const u64 q = r_->q();
    std::vector<u64> c(c_.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        u64 s = c_[i] + o.c_[i];
        c[i] = s >= q ? s - q : s;
    }
    return Elem(r_, std::move(c));
}

Elem Elem::operator-(const Elem& o) const {
    check_same(o);
    const u64 q = r_->q();
    std::vector<u64> c(c_.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = c_[i] >= o.c_[i] ? c_[i] - o.c_[i] : c_[i] + q - o.c_[i];
    return Elem(r_, std::move(c));
}

Elem Elem::operator-() const {
    const u64 q = r_->q();
    std::vector<u64> c(c_.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = c_[i] ? q - c_[i] : 0;
    return Elem(r_, std::move(c));
}

Elem Elem::operator*(const Elem& o) const {
    check_same(o);
    std::vector<u64> c(c_.size());
    r_->mul_raw(c_.data(), o.c_.data(), c.data());
    return Elem(r_, std::move(c));
}

Elem& Elem::operator+=(const Elem& o) { return *this = *this + o; }
Elem& Elem::operator-=(const Elem& o) { return *this = *this - o; }
Elem& Elem::operator*=(const Elem& o) { return *this = *this * o; }

Elem Elem::scale(i64 k) const {
    const u64 q = r_->q();
    const u64 s = mod_signed(k, q);
    std::vector<u64> c(c_.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = mulmod(c_[i], s, q);
    return Elem(r_, std::move(c));
}

bool Elem::operator==(const Elem& o) const {
    check_same(o);
    return c_ == o.c_;
}

Elem Elem::pow(u64 k) const {
    Elem r = r_->one(), b = *this;
    while (k) {
        if (k & 1) r *= b;
        k >>= 1;
        if (k) b *= b;
    }
    return r;
}

Elem Elem::pow_signed(i64 k) const {
    if (k >= 0) return pow(static_cast<u64>(k));
    return inv().pow(static_cast<u64>(-k));
}

Elem Elem::residue() const {
    RingPtr rf = r_->residue_field();
    const int f = r_->f();
    std::vector<u64> c(f);
    for (int i = 0; i < f; ++i) c[i] = c_[i] % r_->p();
    return Elem(rf, std::move(c));
}

Elem Elem::inv() const {
    if (!is_unit()) fail(ErrorKind::NonUnit, kMod, "inverse of a non-unit");
    const int f = r_->f();
    Elem res = residue();
    Elem rinv = res.pow(r_->residue_size() - 2);
    std::vector<u64> c(c_.size(), 0);
    for (int i = 0; i < f; ++i) c[i] = rinv.coeffs()[i];
    Elem x(r_, std::move(c));
    const Elem two = r_->from_int(2);
    for (int it = 0; it < 80; ++it) {
        Elem ax = *this * x;
        if (ax.is_one()) return x;
        x = x * (two - ax);
    }
    fail(ErrorKind::InternalInconsistency, kMod, "Newton inverse did not converge");
}

int Elem::coeff_divisibility() const {
    int best = r_->m();
    for (u64 v : c_)
        if (v) best = std::min(best, vp_int(v, r_->p()));
    return best;
}

int Elem::val_units() const {
    const int e = r_->e(), f = r_->f(), m = r_->m();
    int best = e * m;
    const u64 p = r_->p();
    for (int j = 0; j < e; ++j) {
        int vj = m;
        for (int i = 0; i < f; ++i) {
            u64 v = c_[j * f + i];
            if (v) vj = std::min(vj, vp_int(v, p));
        }
        if (vj < m) best = std::min(best, e * vj + j);
    }
    return best;
}

Valuation Elem::valuation() const {
    Valuation v;
    const int e = r_->e();
    int u = val_units();
    if (u >= e * r_->m()) {
        v.infinite = true;
        v.num = r_->m();
        v.den = 1;
        return v;
    }
    i64 g = std::gcd(static_cast<i64>(u), static_cast<i64>(e));
    if (g == 0) g = 1;
    v.num = u / g;
    v.den = e / g;
    return v;
}

Elem Elem::reduce(int k) const {
    if (k > r_->m()) fail(ErrorKind::PrecisionExhausted, kMod, "cannot reduce to higher precision");
    RingPtr t = r_->at_precision(k);
    std::vector<u64> c = c_;
    for (auto& v : c) v %= t->q();
    return Elem(t, std::move(c));
}

Elem Elem::lift(const RingPtr& hi) const {
    if (hi->p() != r_->p() || hi->f() != r_->f() || hi->e() != r_->e() || hi->m() < r_->m())
        fail(ErrorKind::RingMismatch, kMod, "lift target has a different presentation");
    return Elem(hi, c_);
}

Elem Elem::embed(const RingPtr& target) const {
    if (r_ == target) return *this;
    if (!r_->embeds_into(*target)) fail(ErrorKind::RingMismatch, kMod, "no standard inclusion into the target ring");
    std::vector<u64> c(target->degree(), 0);
    const u64 q = target->q();
    if (r_->kind() == RingKind::Base) {
        c[0] = c_[0] % q;
    } else {
        for (std::size_t i = 0; i < c_.size(); ++i) c[i] = c_[i] % q;
    }
    return Elem(target, std::move(c));
}

std::string Elem::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i];
    os << "]";
    return os.str();
}

Elem div_p_exact(const Elem& a, int k) {
    if (k == 0) return a;
    const u64 pk = ipow_checked(a.ring()->p(), k);
    std::vector<u64> c = a.coeffs();
    for (auto& v : c) {
        if (v % pk) fail(ErrorKind::InternalInconsistency, kMod, "exact division by p^k failed");
        v /= pk;
    }
    return Elem(a.ring(), std::move(c));
}

Elem teichmuller(const Elem& a) {
    const auto& r = a.ring();
    if (r->kind() == RingKind::Eisenstein) fail(ErrorKind::RamifiedRing, kMod, "Teichmuller lift needs an unramified ring");
    if (!a.is_unit()) fail(ErrorKind::NonUnit, kMod, "Teichmuller lift of a non-unit");
    const u64 qres = r->residue_size();
    Elem x = a;
    for (int it = 0; it <= r->m() + 2; ++it) {
        Elem y = x.pow(qres);
        if (y == x) return x;
        x = y;
    }
    fail(ErrorKind::InternalInconsistency, kMod, "Teichmuller iteration did not stabilize");
}

Elem frobenius(const Elem& a, int power) {
    const auto& r = a.ring();
    if (r->kind() == RingKind::Eisenstein) fail(ErrorKind::RamifiedRing, kMod, "Frobenius needs an unramified ring");
    const int f = r->f();
    power %= f;
    if (power < 0) power += f;
    std::vector<u64> c = a.coeffs(), out(c.size());
    for (int k = 0; k < power; ++k) {
        r->frobenius_raw(c.data(), out.data());
        c.swap(out);
    }
    return Elem(r, std::move(c));
}

Valuation valuation(const Elem& a) { return a.valuation(); }

namespace {

// Index bound for sum_k c_k x^k / d_k with v(x^k) = k*s/e and v(d_k) = dv(k):
// returns the last k whose term can be nonzero modulo p^m.
template <class DV>
int last_term(int s, int e, int m, u64 p, DV dv) {
    int last = 0;
    int k = 1;
    int quiet = 0;
    // terms with k*s - e*dv(k) >= e*m vanish; once k*s >= e*(m + log_p k + 2) for a long stretch we stop.
    while (true) {
        i64 lhs = static_cast<i64>(k) * s - static_cast<i64>(e) * dv(k);
        if (lhs < static_cast<i64>(e) * m) {
            last = k;
            quiet = 0;
        } else {
            ++quiet;
        }
        int logk = 0;
        for (u64 t = static_cast<u64>(k); t >= p; t /= p) ++logk;
        if (static_cast<i64>(k) * s >= static_cast<i64>(e) * (m + 2 * logk + 2) && quiet > static_cast<int>(p) * 4)
            break;
        ++k;
        if (k > 1000000) fail(ErrorKind::PrecisionExhausted, kMod, "series bound too large");
    }
    return last;
}

}  // namespace

Elem padic_log(const Elem& u, PrecisionBudget& budget) {
    const auto& r = u.ring();
    const u64 p = r->p();
    const int e = r->e(), m = r->m();
    budget.nominal = m;
    budget.guard = 0;
    budget.loss = 0;
    if (!u.is_unit()) fail(ErrorKind::NonUnit, kMod, "log of a non-unit");
    Elem d = u - r->one();
    if (d.is_zero()) return r->zero();
    const int s = d.val_units();
    if (static_cast<i64>(s) * static_cast<i64>(p - 1) <= e)
        fail(ErrorKind::OutOfDomain, kMod, "v(u-1) must exceed 1/(p-1)");
    auto dv = [&](int k) { return vp_int(static_cast<u64>(k), p); };
    const int K = last_term(s, e, m, p, dv);
    int delta = 0;
    for (int k = 1; k <= K; ++k) delta = std::max(delta, dv(k));
    int work = m + delta;
    if (work > r->modulus_precision()) {
        budget.loss = work - r->modulus_precision();
        work = r->modulus_precision();
    }
    budget.guard = delta;
    if (budget.guaranteed() < 1) fail(ErrorKind::PrecisionExhausted, kMod, "log loses all digits");
    RingPtr hi = r->at_precision(work);
    Elem x = u.lift(hi) - hi->one();
    Elem xk = hi->one(), sum = hi->zero();
    for (int k = 1; k <= K; ++k) {
        xk *= x;
        const int v = dv(k);
        const i64 unit = static_cast<i64>(static_cast<u64>(k) / ipow_checked(p, v));
        Elem t = div_p_exact(xk, v) * hi->from_int(unit).inv();
        if (k % 2 == 1)
            sum += t;
        else
            sum -= t;
    }
    Elem out = sum.reduce(m);
    return Elem(r, out.coeffs());
}

Elem padic_log(const Elem& u) {
    PrecisionBudget b;
    Elem r = padic_log(u, b);
    if (b.loss > 0) fail(ErrorKind::PrecisionExhausted, kMod, "log lost precision");
    return r;
}

Elem padic_exp(const Elem& z, PrecisionBudget& budget) {
    const auto& r = z.ring();
    const u64 p = r->p();
    const int e = r->e(), m = r->m();
    budget.nominal = m;
    budget.guard = 0;
    budget.loss = 0;
    if (z.is_zero()) return r->one();
    const int s = z.val_units();
    if (static_cast<i64>(s) * static_cast<i64>(p - 1) <= e)
        fail(ErrorKind::OutOfDomain, kMod, "v(z) must exceed 1/(p-1)");
    auto vfact = [&](int k) {
        int v = 0;
        for (u64 pk = p; pk <= static_cast<u64>(k); pk *= p) v += static_cast<int>(static_cast<u64>(k) / pk);
        return v;
    };
    const int K = last_term(s, e, m, p, vfact);
    const int delta = vfact(K);
    int work = m + delta;
    if (work > r->modulus_precision()) {
        budget.loss = work - r->modulus_precision();
        work = r->modulus_precision();
    }
    budget.guard = delta;
    if (budget.guaranteed() < 1) fail(ErrorKind::PrecisionExhausted, kMod, "exp loses all digits");
    RingPtr hi = r->at_precision(work);
    Elem x = z.lift(hi);
    Elem xk = hi->one(), sum = hi->one();
    u64 unit = 1;
    const u64 qh = hi->q();
    for (int k = 1; k <= K; ++k) {
        xk *= x;
        u64 kk = static_cast<u64>(k);
        while (kk % p == 0) kk /= p;
        unit = mulmod(unit, kk % qh, qh);
        Elem t = div_p_exact(xk, vfact(k)) * hi->from_int(static_cast<i64>(unit)).inv();
        sum += t;
    }
    Elem out = sum.reduce(m);
    return Elem(r, out.coeffs());
}

Elem padic_exp(const Elem& z) {
    PrecisionBudget b;
    Elem r = padic_exp(z, b);
    if (b.loss > 0) fail(ErrorKind::PrecisionExhausted, kMod, "exp lost precision");
    return r;
}

std::pair<u64, u64> unit_group_exponent(const LocalRing& r) {
    const u64 p = r.p();
    const int e = r.e(), m = r.m();
    // 1 + pi^s R raised to p lands in 1 + pi^min(s+e, p*s) R.
    int s = 1;
    u64 pe = 1;
    while (s < e * m) {
        s = std::min(s + e, static_cast<int>(p) * s);
        pe *= p;
    }
    return {r.residue_size() - 1, pe};
}

}  // namespace tate
