#include "tate/poly.hpp"

namespace tate {

namespace {
constexpr const char* kMod = "local_rings";
}

Poly Poly::from_ints(const RingPtr& r, const std::vector<i64>& v) {
    Poly out(r);
    for (i64 x : v) out.c.push_back(r->from_int(x));
    out.trim();
    return out;
}

Poly Poly::monomial(const RingPtr& r, const Elem& a, int deg) {
    Poly out(r);
    out.c.assign(deg + 1, r->zero());
    out.c[deg] = a;
    out.trim();
    return out;
}

Elem Poly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c.size())) return ring->zero();
    return c[i];
}

void Poly::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r(a.ring ? a.ring : b.ring);
    const std::size_t n = std::max(a.c.size(), b.c.size());
    r.c.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= a.c.size())
            r.c.push_back(b.c[i]);
        else if (i >= b.c.size())
            r.c.push_back(a.c[i]);
        else
            r.c.push_back(a.c[i] + b.c[i]);
    }
    r.trim();
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly r(a.ring ? a.ring : b.ring);
    const std::size_t n = std::max(a.c.size(), b.c.size());
    r.c.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= a.c.size())
            r.c.push_back(-b.c[i]);
        else if (i >= b.c.size())
            r.c.push_back(a.c[i]);
        else
            r.c.push_back(a.c[i] - b.c[i]);
    }
    r.trim();
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r(a.ring ? a.ring : b.ring);
    if (a.c.empty() || b.c.empty()) return r;
    const auto& R = *r.ring;
    const int D = R.degree();
    const u64 q = R.q();
    const std::size_t n = a.c.size() + b.c.size() - 1;
    std::vector<u64> acc(n * D, 0), tmp(D);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        const u64* x = a.c[i].coeffs().data();
        for (std::size_t j = 0; j < b.c.size(); ++j) {
            R.mul_raw(x, b.c[j].coeffs().data(), tmp.data());
            u64* o = &acc[(i + j) * D];
            for (int k = 0; k < D; ++k) {
                u64 s = o[k] + tmp[k];
                o[k] = s >= q ? s - q : s;
            }
        }
    }
    r.c.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        r.c.emplace_back(r.ring, std::vector<u64>(acc.begin() + i * D, acc.begin() + (i + 1) * D));
    r.trim();
    return r;
}

Poly scale(const Elem& k, const Poly& a) {
    Poly r(a.ring);
    r.c.reserve(a.c.size());
    for (const auto& x : a.c) r.c.push_back(k * x);
    r.trim();
    return r;
}

std::pair<Poly, Poly> divmod_monic(const Poly& f, const Poly& g) {
    if (g.c.empty() || !g.c.back().is_one()) fail(ErrorKind::InvalidArgument, kMod, "divisor must be monic");
    const int d = g.degree();
    Poly rem = f;
    Poly quo(f.ring);
    if (rem.degree() < d) {
        rem.trim();
        return {quo, rem};
    }
    const auto& R = *f.ring;
    const int D = R.degree();
    const u64 q = R.q();
    quo.c.assign(rem.c.size() - d, R.zero());
    std::vector<u64> tmp(D);
    for (int k = rem.degree(); k >= d; --k) {
        const Elem c = rem.c[k];
        if (c.is_zero()) continue;
        quo.c[k - d] = c;
        for (int i = 0; i <= d; ++i) {
            R.mul_raw(c.coeffs().data(), g.c[i].coeffs().data(), tmp.data());
            std::vector<u64> v = rem.c[k - d + i].coeffs();
            for (int t = 0; t < D; ++t) v[t] = v[t] >= tmp[t] ? v[t] - tmp[t] : v[t] + q - tmp[t];
            rem.c[k - d + i] = Elem(f.ring, std::move(v));
        }
    }
    rem.c.resize(d);
    rem.trim();
    quo.trim();
    return {quo, rem};
}

Poly mod_monic(const Poly& f, const Poly& g) { return divmod_monic(f, g).second; }

Elem eval(const Poly& f, const Elem& x) {
    Elem r = x.ring()->zero();
    for (auto it = f.c.rbegin(); it != f.c.rend(); ++it) r = r * x + it->embed(x.ring());
    return r;
}

Poly derivative(const Poly& f) {
    Poly r(f.ring);
    for (std::size_t i = 1; i < f.c.size(); ++i) r.c.push_back(f.c[i].scale(static_cast<i64>(i)));
    r.trim();
    return r;
}

Poly taylor_shift(const Poly& f, const Elem& c) {
    // repeated synthetic division by (x - c)
    Poly out(f.ring);
    std::vector<Elem> cur = f.c;
    while (!cur.empty()) {
        Elem acc = f.ring->zero();
        std::vector<Elem> q(cur.size() > 1 ? cur.size() - 1 : 0, f.ring->zero());
        for (std::size_t k = cur.size(); k-- > 0;) {
            acc = acc * c + cur[k];
            if (k > 0) q[k - 1] = acc;
        }
        out.c.push_back(acc);
        cur = std::move(q);
    }
    out.trim();
    return out;
}

Poly reduce_poly(const Poly& f, const RingPtr& target) {
    Poly r(target);
    for (const auto& x : f.c) r.c.push_back(x.embed(target));
    r.trim();
    return r;
}

HenselSplit hensel_factor(const Poly& f, const Elem& xbar, int max_iter) {
    const RingPtr& R = f.ring;
    Poly sh = taylor_shift(f, xbar);
    int k = 0;
    while (k < static_cast<int>(sh.c.size()) && !sh.c[k].is_unit()) ++k;
    if (k >= static_cast<int>(sh.c.size())) fail(ErrorKind::HenselFailure, kMod, "polynomial vanishes at the residue");
    Poly lin(R, {-xbar, R->one()});
    Poly g(R, {R->one()});
    for (int i = 0; i < k; ++i) g = g * lin;
    if (k == 0) return {g, f, 0};
    Poly h = divmod_monic(f, g).first;
    Poly t(R, {eval(h, xbar).inv()});
    const Poly two(R, {R->from_int(2)});
    for (int it = 0; it < max_iter; ++it) {
        auto [hq, e] = divmod_monic(f, g);
        if (e.is_zero()) return {g, hq, k};
        Poly d = mod_monic(t * e, g);
        g = g + d;
        if (g.degree() < k) {
            g.c.resize(k + 1, R->zero());
            g.c[k] = R->one();
        }
        h = divmod_monic(f, g).first;
        Poly th = mod_monic(t * h, g);
        t = mod_monic(t * (two - th), g);
    }
    fail(ErrorKind::HenselFailure, kMod, "factor lifting did not converge");
}

Elem newton_root(const Poly& f, const Elem& x0, int max_iter) {
    Poly df = derivative(f);
    Elem x = x0;
    for (int it = 0; it < max_iter; ++it) {
        Elem v = eval(f, x);
        if (v.is_zero()) return x;
        Elem d = eval(df, x);
        if (!d.is_unit()) fail(ErrorKind::HenselFailure, kMod, "derivative is not a unit");
        x = x - v * d.inv();
    }
    fail(ErrorKind::HenselFailure, kMod, "Newton iteration did not converge");
}

Elem sqrt_newton(const Elem& a, const Elem& y0, int max_iter) {
    Elem y = y0;
    for (int it = 0; it < max_iter; ++it) {
        Elem d = y * y - a;
        if (d.is_zero()) return y;
        Elem two_y = y.scale(2);
        if (!two_y.is_unit()) fail(ErrorKind::HenselFailure, "elliptic_local", "square root start is not a unit");
        y = y - d * two_y.inv();
    }
    fail(ErrorKind::HenselFailure, "elliptic_local", "square root iteration did not converge");
}

}  // namespace tate
