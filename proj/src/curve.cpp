#include "tate/curve.hpp"

#include <algorithm>
#include <cmath>

namespace tate {

namespace {

constexpr const char* kMod = "elliptic_local";

template <class T>
std::array<T, 3> rcb_add(const T& X1, const T& Y1, const T& Z1, const T& X2, const T& Y2, const T& Z2, const T& a,
                         const T& b3) {
    // complete addition for short Weierstrass curves (Renes-Costello-Batina)
    T t0 = X1 * X2, t1 = Y1 * Y2, t2 = Z1 * Z2;
    T t3 = (X1 + Y1) * (X2 + Y2);
    T t4 = t0 + t1;
    t3 = t3 - t4;
    t4 = (X1 + Z1) * (X2 + Z2);
    T t5 = t0 + t2;
    t4 = t4 - t5;
    t5 = (Y1 + Z1) * (Y2 + Z2);
    T X3 = t1 + t2;
    t5 = t5 - X3;
    T Z3 = a * t4;
    X3 = b3 * t2;
    Z3 = X3 + Z3;
    X3 = t1 - Z3;
    Z3 = t1 + Z3;
    T Y3 = X3 * Z3;
    t1 = t0 + t0 + t0;
    t2 = a * t2;
    t4 = b3 * t4;
    t1 = t1 + t2;
    t2 = t0 - t2;
    t2 = a * t2;
    t4 = t4 + t2;
    t0 = t1 * t4;
    Y3 = Y3 + t0;
    t0 = t5 * t4;
    X3 = t3 * X3;
    X3 = X3 - t0;
    t0 = t3 * t1;
    Z3 = t5 * Z3;
    Z3 = Z3 + t0;
    return {X3, Y3, Z3};
}

bool primitive(const std::array<Elem, 3>& P) { return P[0].is_unit() || P[1].is_unit() || P[2].is_unit(); }

void check_same_curve(const LocalPoint& P, const LocalPoint& Q) {
    if (P.curve() == Q.curve()) return;
    const auto& E = *P.curve();
    const auto& F = *Q.curve();
    if (!E.ring()->same(*F.ring()) || E.a() != F.a() || E.b() != F.b())
        fail(ErrorKind::RingMismatch, kMod, "points lie on different curves");
}

// truncated power series helpers on top of Poly
Poly trunc(Poly f, int D) {
    if (static_cast<int>(f.c.size()) > D) f.c.resize(D);
    f.trim();
    return f;
}

Poly series_mul(const Poly& a, const Poly& b, int D) {
    Poly ta = trunc(a, D), tb = trunc(b, D);
    return trunc(ta * tb, D);
}

Poly series_inv(const Poly& a, int D) {
    const RingPtr& R = a.ring;
    if (a.c.empty() || !a.c[0].is_unit()) fail(ErrorKind::NonUnit, kMod, "series constant term is not a unit");
    Elem i0 = a.c[0].inv();
    std::vector<Elem> out(D, R->zero());
    out[0] = i0;
    for (int n = 1; n < D; ++n) {
        Elem s = R->zero();
        for (int k = 1; k <= n && k < static_cast<int>(a.c.size()); ++k) s += a.c[k] * out[n - k];
        out[n] = -(i0 * s);
    }
    Poly r(R, std::move(out));
    r.trim();
    return r;
}

struct Ser {
    Poly p;
    int D;
};
Ser operator+(const Ser& a, const Ser& b) { return {a.p + b.p, a.D}; }
Ser operator-(const Ser& a, const Ser& b) { return {a.p - b.p, a.D}; }
Ser operator*(const Ser& a, const Ser& b) { return {series_mul(a.p, b.p, a.D), a.D}; }

Poly series_w(const RingPtr& R, const Elem& a, const Elem& b, int D) {
    Poly z3 = Poly::monomial(R, R->one(), 3);
    Poly z = Poly::monomial(R, R->one(), 1);
    Poly w = trunc(z3, D);
    for (int it = 0; it < D; ++it) {
        Poly w2 = series_mul(w, w, D);
        Poly next = trunc(z3, D) + scale(a, series_mul(z, w2, D)) + scale(b, series_mul(w2, w, D));
        next = trunc(next, D);
        if (next.c.size() == w.c.size() && std::equal(next.c.begin(), next.c.end(), w.c.begin())) break;
        w = next;
    }
    return w;
}

}  // namespace

const char* to_string(Chart c) {
    switch (c) {
        case Chart::Affine: return "affine";
        case Chart::Formal: return "formal";
        case Chart::Infinity: return "infinity";
    }
    return "?";
}

// ---------------------------------------------------------------- LocalCurve

LocalCurve::LocalCurve(Key, RingPtr ring, Elem a, Elem b, std::string id)
    : ring_(std::move(ring)), a_(std::move(a)), b_(std::move(b)), id_(std::move(id)) {
}

CurvePtr LocalCurve::make(RingPtr ring, Elem a, Elem b, std::string id) {
    if (ring->p() < 5) fail(ErrorKind::UnsupportedPrime, kMod, "short Weierstrass form needs p >= 5");
    a = a.embed(ring);
    b = b.embed(ring);
    Elem d = a * a * a * ring->from_int(4) + b * b * ring->from_int(27);
    if (!d.is_unit()) fail(ErrorKind::SingularCurve, kMod, "discriminant is not a unit");
    return std::make_shared<LocalCurve>(Key{}, std::move(ring), std::move(a), std::move(b), std::move(id));
}

CurvePtr LocalCurve::make(RingPtr ring, i64 a, i64 b, std::string id) {
    Elem ea = ring->from_int(a), eb = ring->from_int(b);
    auto E = make(ring, ea, eb, std::move(id));
    return E;
}

Elem LocalCurve::discriminant() const {
    return (a_ * a_ * a_ * ring_->from_int(4) + b_ * b_ * ring_->from_int(27)).scale(-16);
}

CurvePtr LocalCurve::change_ring(const RingPtr& target) const {
    if (target == ring_) return ptr();
    auto move_coeff = [&](const Elem& c) {
        if (ring_->embeds_into(*target)) return c.embed(target);
        if (target->m() > ring_->m() && target->at_precision(ring_->m())->same(*ring_)) {
            // lift through the signed representative of the coefficient
            const u64 q = ring_->q();
            std::vector<i64> s(c.coeffs().size());
            for (std::size_t i = 0; i < s.size(); ++i) {
                u64 v = c.coeffs()[i];
                s[i] = v > q / 2 ? static_cast<i64>(v) - static_cast<i64>(q) : static_cast<i64>(v);
            }
            return target->from_signed(s);
        }
        if (ring_->kind() == RingKind::Base && target->m() > ring_->m()) {
            const u64 q = ring_->q();
            u64 v = c.coeffs()[0];
            return target->from_int(v > q / 2 ? static_cast<i64>(v) - static_cast<i64>(q) : static_cast<i64>(v));
        }
        fail(ErrorKind::RingMismatch, kMod, "curve coefficients do not map to the target ring");
    };
    return make(target, move_coeff(a_), move_coeff(b_), id_);
}

ResidueCurve LocalCurve::residue_curve() const { return ResidueCurve(ring_->residue_field(), a_.residue(), b_.residue()); }

LocalPoint LocalCurve::infinity() const { return LocalPoint(ptr(), ring_->zero(), ring_->one(), ring_->zero()); }

LocalPoint LocalCurve::affine(const Elem& x, const Elem& y) const {
    LocalPoint P(ptr(), x.embed(ring_), y.embed(ring_), ring_->one());
    if (!P.on_curve()) fail(ErrorKind::InvalidArgument, kMod, "point is not on the curve");
    return P;
}

LocalPoint LocalCurve::formal(const Elem& z_in) const {
    Elem z = z_in.embed(ring_);
    if (z.is_unit()) fail(ErrorKind::InvalidArgument, kMod, "formal parameter must have positive valuation");
    Elem w = formal_w(z, a_, b_);
    return LocalPoint(ptr(), -z, ring_->one(), -w);
}

const std::vector<std::array<Elem, 3>>& LocalCurve::auxiliary() const {
    std::call_once(aux_once_, [this] {
        Rng rng(0x51ab1e5eedULL);
        CurvePtr self = ptr();
        while (aux_.size() < 6) {
            LocalPoint P = random_affine_point(self, rng);
            if (P.y().is_unit()) aux_.push_back({P.X(), P.Y(), P.Z()});
        }
    });
    return aux_;
}

// ---------------------------------------------------------------- LocalPoint

LocalPoint::LocalPoint(CurvePtr curve, Elem X, Elem Y, Elem Z) : E_(std::move(curve)) {
    if (Z.is_unit()) {
        Elem i = Z.inv();
        X_ = X * i;
        Y_ = Y * i;
        Z_ = E_->ring()->one();
    } else if (Y.is_unit()) {
        Elem i = Y.inv();
        X_ = X * i;
        Y_ = E_->ring()->one();
        Z_ = Z * i;
    } else {
        fail(ErrorKind::InvalidArgument, kMod, "projective coordinates are not primitive");
    }
}

Chart LocalPoint::chart() const {
    if (Z_.is_unit()) return Chart::Affine;
    if (X_.is_zero() && Z_.is_zero()) return Chart::Infinity;
    return Chart::Formal;
}

bool LocalPoint::is_infinity() const { return X_.is_zero() && Z_.is_zero(); }

Elem LocalPoint::x() const {
    if (!Z_.is_unit()) fail(ErrorKind::InvalidArgument, kMod, "point has no affine coordinates");
    return X_;
}

Elem LocalPoint::y() const {
    if (!Z_.is_unit()) fail(ErrorKind::InvalidArgument, kMod, "point has no affine coordinates");
    return Y_;
}

Elem LocalPoint::z() const {
    if (Y_.is_unit()) return -(X_ * Y_.inv());
    fail(ErrorKind::InvalidArgument, kMod, "formal parameter needs a unit y-coordinate");
}

Elem LocalPoint::w() const {
    if (Y_.is_unit()) return -(Z_ * Y_.inv());
    fail(ErrorKind::InvalidArgument, kMod, "formal parameter needs a unit y-coordinate");
}

ResiduePoint LocalPoint::residue() const {
    if (!Z_.is_unit()) return ResiduePoint::infinity();
    return ResiduePoint::affine(X_.residue(), Y_.residue());
}

bool LocalPoint::on_curve() const {
    const Elem& a = E_->a();
    const Elem& b = E_->b();
    Elem lhs = Y_ * Y_ * Z_;
    Elem rhs = X_ * X_ * X_ + a * X_ * Z_ * Z_ + b * Z_ * Z_ * Z_;
    return lhs == rhs;
}

bool LocalPoint::operator==(const LocalPoint& o) const { return X_ == o.X_ && Y_ == o.Y_ && Z_ == o.Z_; }

std::string LocalPoint::str() const {
    if (is_infinity()) return "inf";
    return "(" + X_.str() + ":" + Y_.str() + ":" + Z_.str() + ")";
}

// ---------------------------------------------------------------- group law

namespace {

std::optional<std::array<Elem, 3>> add_raw(const LocalCurve& E, const std::array<Elem, 3>& P,
                                           const std::array<Elem, 3>& Q, const Elem& b3) {
    auto r = rcb_add(P[0], P[1], P[2], Q[0], Q[1], Q[2], E.a(), b3);
    if (!primitive(r)) return std::nullopt;
    return r;
}

}  // namespace

namespace {

// Chord through P, Q in affine coordinates when x_P - x_Q is a unit.
std::optional<LocalPoint> affine_chord(const LocalPoint& P, const LocalPoint& Q) {
    if (P.chart() != Chart::Affine || Q.chart() != Chart::Affine) return std::nullopt;
    Elem dx = P.x() - Q.x();
    if (!dx.is_unit()) return std::nullopt;
    Elem lam = (P.y() - Q.y()) * dx.inv();
    Elem x3 = lam * lam - P.x() - Q.x();
    Elem y3 = lam * (P.x() - x3) - P.y();
    return P.curve()->affine(x3, y3);
}

// Chord in the chart (z, w) = (-x/y, -1/y), where the curve reads
// w = z^3 + a z w^2 + b w^3; covers P = -Q modulo the maximal ideal.
std::optional<LocalPoint> zw_chord(const LocalPoint& P, const LocalPoint& Q) {
    if (!P.Y().is_unit() || !Q.Y().is_unit()) return std::nullopt;
    const LocalCurve& E = *P.curve();
    Elem zP = P.z(), zQ = Q.z(), wP = P.w(), wQ = Q.w();
    Elem dz = zP - zQ;
    if (!dz.is_unit()) return std::nullopt;
    Elem lam = (wP - wQ) * dz.inv();
    Elem nu = wP - lam * zP;
    Elem A3 = E.ring()->one() + E.a() * lam * lam + E.b() * lam * lam * lam;
    if (!A3.is_unit()) return std::nullopt;
    Elem A2 = (E.a().scale(2) * lam + E.b().scale(3) * lam * lam) * nu;
    Elem zR = -(A2 * A3.inv()) - zP - zQ;
    Elem wR = lam * zR + nu;
    return LocalPoint(P.curve(), zR, E.ring()->one(), wR);
}

}  // namespace

std::optional<LocalPoint> add_direct(const LocalPoint& P, const LocalPoint& Q) {
    if (P.is_infinity()) return Q;
    if (Q.is_infinity()) return P;
    const LocalCurve& E = *P.curve();
    std::array<Elem, 3> p{P.X(), P.Y(), P.Z()}, q{Q.X(), Q.Y(), Q.Z()};
    if (auto r = add_raw(E, p, q, E.b().scale(3))) return LocalPoint(P.curve(), (*r)[0], (*r)[1], (*r)[2]);
    if (auto r = affine_chord(P, Q)) return r;
    return zw_chord(P, Q);
}

std::optional<LocalPoint> add_shifted(const LocalPoint& P, const LocalPoint& Q, int depth) {
    if (auto r = add_direct(P, Q)) return r;
    if (depth == 0) return std::nullopt;
    for (const auto& a : P.curve()->auxiliary()) {
        LocalPoint R(P.curve(), a[0], a[1], a[2]);
        auto A = add_shifted(P, R, depth - 1);
        if (!A) continue;
        auto B = add_shifted(*A, Q, depth - 1);
        if (!B) continue;
        if (auto s = add_shifted(*B, point_neg(R), depth - 1)) return s;
    }
    return std::nullopt;
}

LocalPoint point_add(const LocalPoint& P, const LocalPoint& Q) {
    check_same_curve(P, Q);
    if (auto r = add_shifted(P, Q, 2)) return *r;
    fail(ErrorKind::DegenerateConfiguration, kMod, "addition degenerate for every auxiliary shift");
}

LocalPoint point_neg(const LocalPoint& P) { return LocalPoint(P.curve(), P.X(), -P.Y(), P.Z()); }

LocalPoint point_sub(const LocalPoint& P, const LocalPoint& Q) { return point_add(P, point_neg(Q)); }

LocalPoint scalar_mul(i64 k, const LocalPoint& P) {
    if (k < 0) return scalar_mul(-k, point_neg(P));
    LocalPoint r = P.curve()->infinity();
    if (k == 0) return r;
    for (int bit : binary_digits(static_cast<u64>(k))) {
        r = point_add(r, r);
        if (bit) r = point_add(r, P);
    }
    return r;
}

LocalPoint reduce_point(const LocalPoint& P, int n) {
    const RingPtr& R = P.ring();
    if (n == R->m()) return P;
    if (n > R->m()) fail(ErrorKind::PrecisionExhausted, kMod, "cannot reduce to a higher precision");
    RingPtr T = R->at_precision(n);
    CurvePtr E = P.curve()->change_ring(T);
    return LocalPoint(E, P.X().embed(T), P.Y().embed(T), P.Z().embed(T));
}

LocalPoint base_change(const LocalPoint& P, const CurvePtr& target) {
    const RingPtr& T = target->ring();
    return LocalPoint(target, P.X().embed(T), P.Y().embed(T), P.Z().embed(T));
}

LocalPoint frobenius(const LocalPoint& P, int power) {
    const auto& E = *P.curve();
    if (frobenius(E.a(), power) != E.a() || frobenius(E.b(), power) != E.b())
        fail(ErrorKind::InvalidArgument, kMod, "curve is not defined over the Frobenius-fixed subring");
    return LocalPoint(P.curve(), frobenius(P.X(), power), frobenius(P.Y(), power), frobenius(P.Z(), power));
}

LocalPoint random_affine_point(const CurvePtr& E, Rng& rng) {
    const RingPtr& R = E->ring();
    for (int it = 0; it < 10000; ++it) {
        Elem x = R->random(rng);
        Elem fx = x * x * x + E->a() * x + E->b();
        auto r = field_sqrt(fx.residue());
        if (!r || r->is_zero()) continue;
        Elem y0 = R->from_residue(rng.below(2) ? *r : -*r);
        Elem y = sqrt_newton(fx, y0);
        return LocalPoint(E, x, y, R->one());
    }
    fail(ErrorKind::RetriesExhausted, kMod, "no random point found");
}

// ---------------------------------------------------------------- orders

u64 FactoredOrder::value() const {
    u64 v = prime_to_p;
    for (int i = 0; i < p_exponent; ++i) v *= p;
    return v;
}

std::vector<PrimePower> FactoredOrder::factors() const {
    auto f = factorize(prime_to_p);
    if (p_exponent > 0) f.push_back({p, p_exponent});
    std::sort(f.begin(), f.end(), [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
    return f;
}

FactoredOrder point_order_mod(const LocalPoint& P_in, int n, int iteration_cap) {
    LocalPoint P = reduce_point(P_in, n);
    FactoredOrder out;
    out.p = P.ring()->p();
    if (P.is_infinity()) return out;
    u64 r = P.curve()->residue_curve().point_order(P.residue());
    while (r % out.p == 0) r /= out.p;
    out.prime_to_p = r;
    LocalPoint Q = scalar_mul(static_cast<i64>(r), P);
    int j = 0;
    while (!Q.is_infinity()) {
        if (j >= iteration_cap) fail(ErrorKind::IterationCapExceeded, kMod, "p-part of the order not found");
        Q = scalar_mul(static_cast<i64>(out.p), Q);
        ++j;
    }
    out.p_exponent = j;
    return out;
}

// ---------------------------------------------------------------- lines and Miller

namespace {

bool residues_equal(const LocalPoint& P, const LocalPoint& Q) {
    auto nonunit = [](const Elem& u, const Elem& v, const Elem& w, const Elem& t) { return !(u * v - w * t).is_unit(); };
    return nonunit(P.X(), Q.Y(), Q.X(), P.Y()) && nonunit(P.X(), Q.Z(), Q.X(), P.Z()) &&
           nonunit(P.Y(), Q.Z(), Q.Y(), P.Z());
}

}  // namespace

Line line_through(const LocalPoint& P, const LocalPoint& Q) {
    check_same_curve(P, Q);
    const LocalCurve& E = *P.curve();
    const RingPtr& R = E.ring();
    const Elem& a = E.a();
    const Elem& b = E.b();
    if (!residues_equal(P, Q)) {
        return {P.Y() * Q.Z() - P.Z() * Q.Y(), P.Z() * Q.X() - P.X() * Q.Z(), P.X() * Q.Y() - P.Y() * Q.X()};
    }
    if (!P.Z().is_unit()) {
        // both near O: line w = lambda z + nu in the formal chart
        Elem z1 = P.z(), w1 = P.w(), z2 = Q.z(), w2 = Q.w();
        Elem num = z1 * z1 + z1 * z2 + z2 * z2 + a * w1 * w1;
        Elem den = R->one() - a * z2 * (w1 + w2) - b * (w1 * w1 + w1 * w2 + w2 * w2);
        Elem lam = num * den.inv();
        Elem nu = w1 - lam * z1;
        return {lam, -nu, -R->one()};
    }
    Elem x1 = P.X(), y1 = P.Y(), x2 = Q.X(), y2 = Q.Y();
    Elem g = x1 * x1 + x1 * x2 + x2 * x2 + a;
    Elem sy = y1 + y2;
    if (sy.is_unit()) {
        Elem lam = g * sy.inv();
        Elem nu = y1 - lam * x1;
        return {-lam, R->one(), -nu};
    }
    Elem mu = sy * g.inv();
    Elem c = x1 - mu * y1;
    return {R->one(), -mu, -c};
}

Elem eval_line(const Line& L, const LocalPoint& P) { return L.A * P.X() + L.B * P.Y() + L.C * P.Z(); }

MillerValues miller(const LocalPoint& S, u64 N, const std::vector<LocalPoint>& at) {
    const RingPtr& R = S.ring();
    MillerValues mv;
    mv.num.assign(at.size(), R->one());
    mv.den.assign(at.size(), R->one());
    if (N == 0) fail(ErrorKind::InvalidArgument, kMod, "Miller loop needs N >= 1");
    LocalPoint T = S;
    auto step = [&](const LocalPoint& U, const LocalPoint& V) {
        Line l = line_through(U, V);
        LocalPoint W = point_add(U, V);
        Line v = line_through(W, point_neg(W));
        for (std::size_t i = 0; i < at.size(); ++i) {
            mv.num[i] *= eval_line(l, at[i]);
            mv.den[i] *= eval_line(v, at[i]);
        }
        return W;
    };
    auto bits = binary_digits(N);
    for (std::size_t k = 1; k < bits.size(); ++k) {
        for (std::size_t i = 0; i < at.size(); ++i) {
            mv.num[i] = mv.num[i] * mv.num[i];
            mv.den[i] = mv.den[i] * mv.den[i];
        }
        T = step(T, T);
        if (bits[k]) T = step(T, S);
    }
    if (!T.is_infinity()) fail(ErrorKind::NotTorsion, kMod, "point is not N-torsion");
    return mv;
}

// ---------------------------------------------------------------- division polynomials

Poly cubic(const LocalCurve& E) {
    const RingPtr& R = E.ring();
    return Poly(R, {E.b(), E.a(), R->zero(), R->one()});
}

std::vector<Poly> division_polynomials(const LocalCurve& E, int N, int cap) {
    if (N > cap) fail(ErrorKind::CapExceeded, kMod, "division polynomial index above the cap");
    if (N < 0) fail(ErrorKind::InvalidArgument, kMod, "negative division polynomial index");
    const RingPtr& R = E.ring();
    const Elem& A = E.a();
    const Elem& B = E.b();
    auto c = [&](i64 k) { return R->from_int(k); };
    // g_n with psi_n = g_n for odd n and psi_n = 2y g_n for even n
    std::vector<Poly> g(std::max(N + 1, 5), Poly(R));
    g[1] = Poly(R, {R->one()});
    g[2] = Poly(R, {R->one()});
    g[3] = Poly(R, {-(A * A), c(12) * B, c(6) * A, R->zero(), c(3)});
    g[3].trim();
    Elem A2 = A * A, A3 = A2 * A, B2 = B * B;
    Poly inner(R, {-(c(8) * B2) - A3, -(c(4) * A * B), -(c(5) * A2), c(20) * B, c(5) * A, R->zero(), R->one()});
    g[4] = scale(c(2), inner);
    Poly F4 = scale(c(4), cubic(E));
    Poly F42 = F4 * F4;
    for (int n = 5; n <= N; ++n) {
        const int m = n / 2;
        if (n % 2 == 1) {
            Poly t1 = g[m + 2] * g[m] * g[m] * g[m];
            Poly t2 = g[m - 1] * g[m + 1] * g[m + 1] * g[m + 1];
            if (m % 2 == 0)
                t1 = t1 * F42;
            else
                t2 = t2 * F42;
            g[n] = t1 - t2;
        } else {
            Poly t1 = g[m + 2] * g[m - 1] * g[m - 1];
            Poly t2 = g[m - 2] * g[m + 1] * g[m + 1];
            g[n] = (t1 - t2) * g[m];
        }
    }
    g.resize(N + 1);
    for (int n = 2; n <= N; n += 2) g[n] = scale(c(2), g[n]);
    return g;
}

Poly division_polynomial(const LocalCurve& E, int N, int cap) { return division_polynomials(E, N, cap)[N]; }

// ---------------------------------------------------------------- formal group

Elem formal_w(const Elem& z, const Elem& a, const Elem& b) {
    const RingPtr& R = z.ring();
    Elem z3 = z * z * z;
    Elem w = z3;
    const int cap = 4 * R->e() * R->m() + 16;
    for (int it = 0; it < cap; ++it) {
        Elem next = z3 + a * z * w * w + b * w * w * w;
        if (next == w) return w;
        w = next;
    }
    fail(ErrorKind::IterationCapExceeded, kMod, "formal w(z) iteration did not stabilize");
}

std::vector<Elem> invariant_differential(const RingPtr& R, const Elem& a, const Elem& b, int K) {
    if (K <= 0) return {};
    const int D = K;
    Poly w = series_w(R, a, b, D);
    Poly z = Poly::monomial(R, R->one(), 1);
    Poly den = Poly(R, {R->one()}) - scale(a.scale(2), series_mul(z, w, D)) - scale(b.scale(3), series_mul(w, w, D));
    Poly inv = series_inv(trunc(den, D), D);
    std::vector<Elem> out(K, R->zero());
    for (int k = 0; k < K && k < static_cast<int>(inv.c.size()); ++k) out[k] = inv.c[k];
    return out;
}

Poly multiplication_series(const LocalCurve& E, u64 n, int D) {
    const RingPtr& R = E.ring();
    Poly w = series_w(R, E.a(), E.b(), D);
    auto cst = [&](const Elem& c) { return Ser{trunc(Poly(R, {c}), D), D}; };
    Ser X{trunc(Poly(R, {R->zero(), -R->one()}), D), D};
    Ser Y = cst(R->one());
    Ser Z{scale(-R->one(), w), D};
    Ser a = cst(E.a()), b3 = cst(E.b().scale(3));
    Ser rX = cst(R->zero()), rY = cst(R->one()), rZ = cst(R->zero());
    auto normalize = [&](std::array<Ser, 3>& P) {
        Poly iy = series_inv(P[1].p, D);
        P[0].p = series_mul(P[0].p, iy, D);
        P[2].p = series_mul(P[2].p, iy, D);
        P[1] = cst(R->one());
    };
    if (n == 0) return Poly(R);
    for (int bit : binary_digits(n)) {
        auto d = rcb_add(rX, rY, rZ, rX, rY, rZ, a, b3);
        normalize(d);
        rX = d[0];
        rY = d[1];
        rZ = d[2];
        if (bit) {
            auto s = rcb_add(rX, rY, rZ, X, Y, Z, a, b3);
            normalize(s);
            rX = s[0];
            rY = s[1];
            rZ = s[2];
        }
    }
    return scale(-R->one(), rX.p);
}

namespace {

// Last series index n with n*s - e*v_p(n) < bound (terms z^n / n), or 0.
int last_log_term(int s, int e, int bound, u64 p) {
    int last = 0;
    const double lp = std::log(static_cast<double>(p));
    for (int n = 1; n < 1000000; ++n) {
        int v = vp_int(static_cast<u64>(n), p);
        if (static_cast<i64>(n) * s - static_cast<i64>(e) * v < bound) last = n;
        if (static_cast<double>(n) * s - e * std::log(static_cast<double>(n)) / lp > bound + e) break;
    }
    return last;
}

}  // namespace

Elem elliptic_log(const LocalPoint& P, PrecisionBudget& budget) {
    const RingPtr& R = P.ring();
    const int m = R->m(), e = R->e();
    const u64 p = R->p();
    budget.nominal = m;
    budget.guard = 0;
    budget.loss = 0;
    if (P.is_infinity()) return R->zero();
    if (P.Z().is_unit()) fail(ErrorKind::OutOfDomain, kMod, "elliptic logarithm needs a point of the formal group");
    Elem z = P.z();
    if (z.is_zero()) return R->zero();
    const int s = z.val_units();
    if (static_cast<i64>(s) * static_cast<i64>(p - 1) <= e)
        fail(ErrorKind::OutOfDomain, kMod, "formal parameter valuation at most 1/(p-1)");
    const int K = last_log_term(s, e, e * m, p);
    int delta = 0;
    for (int n = 1; n <= K; ++n) delta = std::max(delta, vp_int(static_cast<u64>(n), p));
    const int work = m + delta;
    const int avail = std::min(work, R->modulus_precision());
    budget.guard = delta;
    budget.loss = std::max(0, work - R->modulus_precision());
    if (budget.guaranteed() < 1) fail(ErrorKind::PrecisionExhausted, kMod, "logarithm loses all precision");
    RingPtr hi = R->at_precision(avail);
    CurvePtr Eh = P.curve()->change_ring(hi);
    Elem zh = z.lift(hi);
    auto c = invariant_differential(hi, Eh->a(), Eh->b(), K);
    Elem acc = hi->zero();
    Elem zn = hi->one();
    for (int n = 1; n <= K; ++n) {
        zn = zn * zh;
        Elem term = c[n - 1] * zn;
        if (term.is_zero()) continue;
        const int v = vp_int(static_cast<u64>(n), p);
        u64 unit = static_cast<u64>(n);
        for (int i = 0; i < v; ++i) unit /= p;
        term = div_p_exact(term, v) * hi->from_int(static_cast<i64>(unit)).inv();
        acc += term;
    }
    Elem out = acc.embed(R);
    if (budget.loss > 0) {
        // digits above the guaranteed exponent are not meaningful
        out = out.reduce(budget.guaranteed()).lift(R);
    }
    return out;
}

Elem elliptic_log(const LocalPoint& P) {
    PrecisionBudget b;
    Elem r = elliptic_log(P, b);
    if (b.loss > 0) fail(ErrorKind::PrecisionExhausted, kMod, "elliptic logarithm lost precision");
    return r;
}

// ---------------------------------------------------------------- torsion

TateVector TateVector::project(u64 lower) const {
    if (lower == 0 || level % lower != 0) fail(ErrorKind::InvalidArgument, kMod, "projection level must divide the level");
    return {lower, scalar_mul(static_cast<i64>(level / lower), point), tower_tag};
}

namespace {

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

u64 residue_count_over_base(const LocalCurve& E) {
    if (E.ring()->degree() != 1) fail(ErrorKind::InvalidArgument, kMod, "curve must be defined over Z/p^m");
    return E.residue_curve().enumerate_points().size();
}

std::vector<Elem> field_roots(const Poly& f_res) {
    // brute-force search over the residue field
    const RingPtr& k = f_res.ring;
    std::vector<Elem> roots;
    const u64 q = k->residue_size();
    for (u64 i = 0; i < q; ++i) {
        Elem x = field_element(k, i);
        if (eval(f_res, x).is_zero()) roots.push_back(x);
    }
    return roots;
}

RingPtr unramified_ring(u64 p, int f, int m) { return f == 1 ? LocalRing::base(p, m) : LocalRing::unramified(p, f, m); }

}  // namespace

TorsionBasis torsion_basis(const LocalCurve& E, u64 ell, int k, int degree, u64 field_cap) {
    const RingPtr& R0 = E.ring();
    const u64 p = R0->p();
    if (!is_prime_u64(ell)) fail(ErrorKind::InvalidArgument, kMod, "torsion level must be a prime power");
    if (ell == p) fail(ErrorKind::InvalidArgument, kMod, "the p-part of torsion is handled by p_torsion_level");
    if (k < 1) fail(ErrorKind::InvalidArgument, kMod, "torsion exponent must be positive");
    const u64 N = ipow_checked(ell, k);
    if (N == 0 || N > 64) fail(ErrorKind::CapExceeded, kMod, "torsion level above the division-polynomial cap");
    const i64 t = static_cast<i64>(p + 1) - static_cast<i64>(residue_count_over_base(E));
    const int m = R0->m();

    for (int f = degree ? degree : 1;; ++f) {
        const u64 q = ipow_checked(p, f);
        if (q == 0 || q > field_cap) fail(ErrorKind::CapExceeded, kMod, "no extension within the field cap carries E[N]");
        const u64 count = count_over_extension(p, t, f);
        if (count % (N * N) != 0 || (q - 1) % N != 0) {
            if (degree) fail(ErrorKind::InvalidArgument, kMod, "requested degree does not carry E[N]");
            continue;
        }
        RingPtr W = unramified_ring(p, f, m);
        CurvePtr EW = E.change_ring(W);
        ResidueCurve Ek = EW->residue_curve();
        RingPtr kf = Ek.field();
        Poly psi = division_polynomial(*EW, static_cast<int>(N));
        std::vector<ResiduePoint> pts = Ek.points_with_x_in(field_roots(reduce_poly(psi, kf)));
        if (N % 2 == 0) {
            auto two = Ek.points_with_x_in(field_roots(reduce_poly(cubic(*EW), kf)));
            pts.insert(pts.end(), two.begin(), two.end());
        }
        std::vector<ResiduePoint> tors;
        for (const auto& P : pts)
            if (Ek.mul(static_cast<i64>(N), P).inf) tors.push_back(P);
        if (tors.size() + 1 != N * N) {
            if (degree) fail(ErrorKind::InvalidArgument, kMod, "requested degree does not carry E[N]");
            continue;
        }
        std::optional<ResiduePoint> S, T;
        for (const auto& P : tors)
            if (Ek.point_order(P) == N) {
                S = P;
                break;
            }
        Rng rng(0x70b5ULL + N);
        for (const auto& P : tors) {
            Elem z = Ek.weil_pairing(*S, P, N, rng);
            if (!z.pow(N / ell).is_one()) {
                T = P;
                break;
            }
        }
        if (!S || !T) fail(ErrorKind::InternalInconsistency, kMod, "no independent torsion pair");
        Poly F = cubic(*EW);
        auto lift = [&](const ResiduePoint& Pb) {
            Elem x, y;
            if (Pb.y.is_zero()) {
                x = newton_root(F, W->from_residue(Pb.x));
                y = W->zero();
            } else {
                x = newton_root(psi, W->from_residue(Pb.x));
                y = sqrt_newton(eval(F, x), W->from_residue(Pb.y));
            }
            LocalPoint L = EW->affine(x, y);
            if (!scalar_mul(static_cast<i64>(N), L).is_infinity() ||
                scalar_mul(static_cast<i64>(N / ell), L).is_infinity())
                fail(ErrorKind::HenselFailure, kMod, "lifted point does not have the expected order");
            return L;
        };
        const std::string tag = "T" + std::to_string(ell) + "/f" + std::to_string(f);
        TorsionBasis out;
        out.ring = W;
        out.curve = EW;
        out.first = {N, lift(*S), tag + "/1"};
        out.second = {N, lift(*T), tag + "/2"};
        return out;
    }
}

namespace {

bool is_eisenstein(const Poly& G) {
    const int d = G.degree();
    if (d < 1) return false;
    for (int i = 0; i < d; ++i)
        if (G.c[i].coeff_divisibility() < 1) return false;
    return G.ring->m() < 2 || G.c[0].coeff_divisibility() == 1;
}

// Newton from x0 towards the root of f closest to x0, for unramified rings where
// f'(x) has positive valuation; each step divides exactly by the valuation of f'(x).
std::optional<Elem> clustered_root(const Poly& f, const Elem& x0, int max_iter = 200) {
    const Poly df = derivative(f);
    Elem x = x0;
    for (int it = 0; it < max_iter; ++it) {
        Elem fx = eval(f, x);
        if (fx.is_zero()) return x;
        Elem d = eval(df, x);
        const int k = d.coeff_divisibility();
        if (fx.coeff_divisibility() < k) return std::nullopt;
        Elem du = div_p_exact(d, k);
        if (!du.is_unit()) return std::nullopt;
        Elem step = div_p_exact(fx, k) * du.inv();
        if (step.is_zero()) return x;
        x -= step;
    }
    return std::nullopt;
}

}  // namespace

PTorsionLevel p_torsion_level(const LocalCurve& E, int nu, int guard, u64 field_cap) {
    const RingPtr& R0 = E.ring();
    const u64 p = R0->p();
    if (nu < 1 || nu > 2) fail(ErrorKind::CapExceeded, kMod, "p-power torsion supported for nu = 1, 2");
    const u64 count = residue_count_over_base(E);
    const i64 t = static_cast<i64>(p + 1) - static_cast<i64>(count);
    if (t % static_cast<i64>(p) == 0) fail(ErrorKind::SupersingularReduction, kMod, "reduction is supersingular");
    const int m = R0->m();
    const int M = std::min(m + guard, max_precision(p));
    const u64 pn = ipow_checked(p, nu);
    PTorsionLevel out;
    out.nu = nu;

    // etale part
    int f = 1;
    for (;; ++f) {
        const u64 q = ipow_checked(p, f);
        if (q == 0 || q > field_cap) fail(ErrorKind::CapExceeded, kMod, "no extension within the field cap has p^nu points");
        if (count_over_extension(p, t, f) % pn == 0) break;
    }
    RingPtr WM = unramified_ring(p, f, M);
    CurvePtr EW = E.change_ring(WM);
    ResidueCurve Ek = EW->residue_curve();
    std::optional<ResiduePoint> abar;
    for (const auto& P : Ek.enumerate_points(field_cap)) {
        u64 o = Ek.point_order(P);
        if (o % pn == 0) {
            abar = Ek.mul(static_cast<i64>(o / pn), P);
            break;
        }
    }
    if (!abar) fail(ErrorKind::InternalInconsistency, kMod, "no residue point of order p^nu");
    Poly psi = division_polynomial(*EW, static_cast<int>(pn));
    Elem c = WM->from_residue(abar->x);
    HenselSplit split = hensel_factor(psi, c);
    Poly G = taylor_shift(split.g, c);
    RingPtr L;
    Elem x;
    if (is_eisenstein(G)) {
        L = LocalRing::eisenstein(WM, G.c)->at_precision(m);
        x = L->gen() + c.embed(L);
    } else {
        auto r = clustered_root(split.g, c);
        if (!r) fail(ErrorKind::HenselFailure, kMod, "etale factor is neither Eisenstein nor split over W");
        L = WM->at_precision(m);
        x = r->reduce(m);
    }
    CurvePtr EL = E.change_ring(L);
    Elem y = sqrt_newton(eval(cubic(*EL), x), L->from_residue(abar->y));
    LocalPoint a = EL->affine(x, y);
    if (!scalar_mul(static_cast<i64>(pn), a).is_infinity() || scalar_mul(static_cast<i64>(pn / p), a).is_infinity())
        fail(ErrorKind::HenselFailure, kMod, "etale torsion point has the wrong order");
    out.etale_ring = L;
    out.etale = {pn, a, "Tp/etale"};

    // formal part
    RingPtr BM = LocalRing::base(p, M);
    CurvePtr EB = E.change_ring(BM);
    const int D = static_cast<int>(pn - pn / p) * (M + 4) + static_cast<int>(pn) + 1;
    auto distinguished = [&](u64 n) {
        Poly ser = multiplication_series(*EB, n, D);
        Poly h(BM, std::vector<Elem>(ser.c.begin() + 1, ser.c.end()));
        HenselSplit s = hensel_factor(h, BM->zero());
        if (s.k != static_cast<int>(n) - 1) fail(ErrorKind::SupersingularReduction, kMod, "formal group is not of height one");
        return s.g;
    };
    Poly P = distinguished(pn);
    if (nu == 2) {
        auto [quo, rem] = divmod_monic(P, distinguished(p));
        if (!rem.is_zero()) fail(ErrorKind::HenselFailure, kMod, "torsion factors are not compatible");
        P = quo;
    }
    RingPtr LfM = LocalRing::eisenstein(BM, P.c);
    RingPtr Lf = LfM->at_precision(m);
    CurvePtr Ef = E.change_ring(Lf);
    LocalPoint af = Ef->formal(Lf->gen());
    if (!scalar_mul(static_cast<i64>(pn), af).is_infinity() || scalar_mul(static_cast<i64>(pn / p), af).is_infinity())
        fail(ErrorKind::HenselFailure, kMod, "formal torsion point has the wrong order");
    out.formal_ring = Lf;
    out.formal = {pn, af, "Tp/formal"};
    return out;
}

}  // namespace tate
