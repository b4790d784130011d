#include "tate/residue_curve.hpp"

#include <cmath>

namespace tate {

namespace {

constexpr const char* kMod = "residue_curves";

void require_field(const RingPtr& k) {
    if (k->m() != 1 || k->e() != 1) fail(ErrorKind::InvalidArgument, kMod, "residue curves live over a finite field");
}

// Value of a line function at an affine point.
struct LineFn {
    enum Kind { One, Vertical, Sloped } kind = One;
    Elem x0, y0, lambda;

    Elem at(const ResiduePoint& A) const {
        switch (kind) {
            case One: return A.x.ring()->one();
            case Vertical: return A.x - x0;
            case Sloped: return A.y - y0 - lambda * (A.x - x0);
        }
        return A.x.ring()->one();
    }
};

}  // namespace

bool ResiduePoint::operator==(const ResiduePoint& o) const {
    if (inf || o.inf) return inf == o.inf;
    return x == o.x && y == o.y;
}

std::string ResiduePoint::str() const {
    if (inf) return "inf";
    return "(" + x.str() + "," + y.str() + ")";
}

Elem field_element(const RingPtr& k, u64 index) {
    std::vector<u64> c(k->degree(), 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = index % k->p();
        index /= k->p();
    }
    return Elem(k, std::move(c));
}

u64 field_index(const Elem& x) {
    u64 idx = 0;
    const auto& c = x.coeffs();
    for (std::size_t i = c.size(); i-- > 0;) idx = idx * x.ring()->p() + c[i];
    return idx;
}

std::optional<Elem> field_sqrt(const Elem& a) {
    const RingPtr& k = a.ring();
    require_field(k);
    if (a.is_zero()) return a;
    const u64 q = k->residue_size();
    if (!a.pow((q - 1) / 2).is_one()) return std::nullopt;
    u64 t = q - 1;
    int s = 0;
    while (t % 2 == 0) {
        t /= 2;
        ++s;
    }
    Elem z;
    for (u64 i = 2; i < q; ++i) {
        Elem c = field_element(k, i);
        if ((c.pow((q - 1) / 2) + k->one()).is_zero()) {
            z = c;
            break;
        }
    }
    int M = s;
    Elem c = z.pow(t), T = a.pow(t), R = a.pow((t + 1) / 2);
    while (!T.is_one()) {
        int i = 0;
        Elem t2 = T;
        while (!t2.is_one()) {
            t2 = t2 * t2;
            ++i;
        }
        Elem b = c;
        for (int j = 0; j < M - i - 1; ++j) b = b * b;
        M = i;
        c = b * b;
        T = T * c;
        R = R * b;
    }
    return R;
}

ResidueCurve::ResidueCurve(RingPtr field, Elem a, Elem b) : k_(std::move(field)), a_(std::move(a)), b_(std::move(b)) {
    require_field(k_);
    Elem d = a_ * a_ * a_ * k_->from_int(4) + b_ * b_ * k_->from_int(27);
    if (d.is_zero()) fail(ErrorKind::SingularCurve, kMod, "discriminant vanishes");
}

ResidueCurve ResidueCurve::over(u64 p, int f, i64 a, i64 b) {
    RingPtr k = f == 1 ? LocalRing::base(p, 1) : LocalRing::unramified(p, f, 1);
    return ResidueCurve(k, k->from_int(a), k->from_int(b));
}

bool ResidueCurve::on_curve(const ResiduePoint& P) const {
    if (P.inf) return true;
    return P.y * P.y == P.x * P.x * P.x + a_ * P.x + b_;
}

ResiduePoint ResidueCurve::neg(const ResiduePoint& P) const {
    if (P.inf) return P;
    return ResiduePoint::affine(P.x, -P.y);
}

ResiduePoint ResidueCurve::add(const ResiduePoint& P, const ResiduePoint& Q) const {
    if (P.inf) return Q;
    if (Q.inf) return P;
    Elem lambda;
    if (P.x == Q.x) {
        if ((P.y + Q.y).is_zero()) return ResiduePoint::infinity();
        lambda = (P.x * P.x * k_->from_int(3) + a_) * P.y.scale(2).inv();
    } else {
        lambda = (Q.y - P.y) * (Q.x - P.x).inv();
    }
    Elem x3 = lambda * lambda - P.x - Q.x;
    Elem y3 = lambda * (P.x - x3) - P.y;
    return ResiduePoint::affine(x3, y3);
}

ResiduePoint ResidueCurve::mul(i64 k, const ResiduePoint& P) const {
    if (k < 0) return mul(-k, neg(P));
    ResiduePoint r = ResiduePoint::infinity();
    for (int bit : binary_digits(static_cast<u64>(k))) {
        r = add(r, r);
        if (bit) r = add(r, P);
    }
    return r;
}

ResiduePoint ResidueCurve::frobenius(const ResiduePoint& P, int power) const {
    if (P.inf) return P;
    return ResiduePoint::affine(tate::frobenius(P.x, power), tate::frobenius(P.y, power));
}

std::vector<ResiduePoint> ResidueCurve::enumerate_points(u64 cap) const {
    const u64 q = this->q();
    if (q > cap) fail(ErrorKind::CapExceeded, kMod, "field too large to enumerate");
    std::vector<i64> root(q, -1);
    for (u64 i = 0; i < q; ++i) {
        Elem y = field_element(k_, i);
        u64 s = field_index(y * y);
        if (root[s] < 0) root[s] = static_cast<i64>(i);
    }
    std::vector<ResiduePoint> pts{ResiduePoint::infinity()};
    for (u64 i = 0; i < q; ++i) {
        Elem x = field_element(k_, i);
        Elem r = x * x * x + a_ * x + b_;
        i64 j = root[field_index(r)];
        if (j < 0) continue;
        Elem y = field_element(k_, static_cast<u64>(j));
        pts.push_back(ResiduePoint::affine(x, y));
        if (!y.is_zero()) pts.push_back(ResiduePoint::affine(x, -y));
    }
    return pts;
}

std::vector<ResiduePoint> ResidueCurve::points_with_x_in(const std::vector<Elem>& xs) const {
    std::vector<ResiduePoint> pts;
    for (const auto& x : xs) {
        auto y = field_sqrt(x * x * x + a_ * x + b_);
        if (!y) continue;
        pts.push_back(ResiduePoint::affine(x, *y));
        if (!y->is_zero()) pts.push_back(ResiduePoint::affine(x, -*y));
    }
    return pts;
}

u64 ResidueCurve::point_order(const ResiduePoint& P) const {
    const u64 bound = q() + 2 + 2 * static_cast<u64>(std::sqrt(static_cast<double>(q())) + 1);
    ResiduePoint Q = P;
    for (u64 k = 1; k <= bound; ++k) {
        if (Q.inf) return k;
        Q = add(Q, P);
    }
    fail(ErrorKind::InternalInconsistency, kMod, "point order exceeds the Hasse bound");
}

ResiduePoint ResidueCurve::random_point(Rng& rng) const {
    for (int it = 0; it < 10000; ++it) {
        Elem x = k_->random(rng);
        auto y = field_sqrt(x * x * x + a_ * x + b_);
        if (!y) continue;
        return ResiduePoint::affine(x, rng.below(2) ? *y : -*y);
    }
    fail(ErrorKind::RetriesExhausted, kMod, "no random point found");
}

std::optional<Elem> ResidueCurve::miller_ratio(const ResiduePoint& S, u64 N, const ResiduePoint& A,
                                               const ResiduePoint& B) const {
    Elem an = k_->one(), ad = k_->one(), bn = k_->one(), bd = k_->one();
    auto step = [&](const ResiduePoint& T, const ResiduePoint& U) {
        LineFn l, v;
        ResiduePoint V = add(T, U);
        if (T.inf || U.inf) {
            // line through O and P equals the vertical through P; the ratio is 1
        } else if (T.x == U.x && (T.y + U.y).is_zero()) {
            l.kind = LineFn::Vertical;
            l.x0 = T.x;
        } else {
            l.kind = LineFn::Sloped;
            l.x0 = T.x;
            l.y0 = T.y;
            l.lambda = T == U ? (T.x * T.x * k_->from_int(3) + a_) * T.y.scale(2).inv()
                              : (U.y - T.y) * (U.x - T.x).inv();
            v.kind = LineFn::Vertical;
            v.x0 = V.x;
            if (V.inf) v.kind = LineFn::One;
        }
        an *= l.at(A);
        ad *= v.at(A);
        bn *= l.at(B);
        bd *= v.at(B);
        return V;
    };
    ResiduePoint T = S;
    auto bits = binary_digits(N);
    for (std::size_t i = 1; i < bits.size(); ++i) {
        an = an * an;
        ad = ad * ad;
        bn = bn * bn;
        bd = bd * bd;
        T = step(T, T);
        if (bits[i]) T = step(T, S);
    }
    if (!T.inf) fail(ErrorKind::NotTorsion, kMod, "point is not N-torsion");
    if (an.is_zero() || ad.is_zero() || bn.is_zero() || bd.is_zero()) return std::nullopt;
    return an * bd * (ad * bn).inv();
}

Elem ResidueCurve::weil_pairing(const ResiduePoint& S, const ResiduePoint& T, u64 N, Rng& rng, int retries) const {
    if (!mul(static_cast<i64>(N), S).inf || !mul(static_cast<i64>(N), T).inf)
        fail(ErrorKind::NotTorsion, kMod, "pairing arguments must be N-torsion");
    if (N % k_->p() == 0) fail(ErrorKind::InvalidArgument, kMod, "pairing level must be prime to p");
    if (S.inf || T.inf || S == T) return k_->one();
    for (int it = 0; it < retries; ++it) {
        ResiduePoint R1 = random_point(rng), R2 = random_point(rng);
        ResiduePoint R = add(R1, neg(R2));
        ResiduePoint TR = add(T, R), SR = add(S, neg(R)), nR = neg(R);
        if (R.inf || TR.inf || SR.inf) continue;
        auto f1 = miller_ratio(S, N, TR, R);
        if (!f1) continue;
        auto f2 = miller_ratio(T, N, SR, nR);
        if (!f2) continue;
        return *f1 * f2->inv();
    }
    fail(ErrorKind::RetriesExhausted, kMod, "no admissible auxiliary shift");
}

i64 frobenius_trace(u64 p, i64 a, i64 b) {
    u64 count = 1;
    auto md = [&](i64 v) { return static_cast<u64>(((v % static_cast<i64>(p)) + static_cast<i64>(p)) % static_cast<i64>(p)); };
    for (u64 x = 0; x < p; ++x) {
        u64 r = (x * x % p * x + md(a) * x + md(b)) % p;
        if (r == 0)
            count += 1;
        else if (powmod(r, (p - 1) / 2, p) == 1)
            count += 2;
    }
    return static_cast<i64>(p + 1) - static_cast<i64>(count);
}

u64 count_over_extension(u64 p, i64 trace, int k) {
    __int128 s0 = 2, s1 = trace;
    for (int i = 1; i < k; ++i) {
        __int128 s2 = s1 * trace - s0 * static_cast<__int128>(p);
        s0 = s1;
        s1 = s2;
    }
    __int128 pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    return static_cast<u64>(pk + 1 - (k == 0 ? 2 : s1));
}

}  // namespace tate
