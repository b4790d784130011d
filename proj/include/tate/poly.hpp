#pragma once

#include <vector>

#include "tate/local_ring.hpp"

namespace tate {

/// Dense polynomial over a LocalRing, coefficients low to high.
struct Poly {
    RingPtr ring;
    std::vector<Elem> c;

    Poly() = default;
    explicit Poly(RingPtr r) : ring(std::move(r)) {}
    Poly(RingPtr r, std::vector<Elem> coeffs) : ring(std::move(r)), c(std::move(coeffs)) {}
    static Poly from_ints(const RingPtr& r, const std::vector<i64>& v);
    static Poly monomial(const RingPtr& r, const Elem& a, int deg);

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    Elem lead() const { return c.back(); }
    Elem coeff(int i) const;
    void trim();
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly scale(const Elem& k, const Poly& a);
/// Division by a monic polynomial; returns (quotient, remainder).
std::pair<Poly, Poly> divmod_monic(const Poly& f, const Poly& g);
Poly mod_monic(const Poly& f, const Poly& g);
Elem eval(const Poly& f, const Elem& x);
Poly derivative(const Poly& f);
/// f(x + c).
Poly taylor_shift(const Poly& f, const Elem& c);
Poly reduce_poly(const Poly& f, const RingPtr& target);

struct HenselSplit {
    Poly g;  ///< monic, congruent to (x - xbar)^k modulo the maximal ideal
    Poly h;
    int k = 0;
};

/// Splits f = g*h with g monic and g = (x - xbar)^k mod pi where k is the
/// multiplicity of the residue root xbar.
HenselSplit hensel_factor(const Poly& f, const Elem& xbar, int max_iter = 400);

/// Newton iteration for a simple root of f near x0.
Elem newton_root(const Poly& f, const Elem& x0, int max_iter = 200);

/// Square root of a with the given residue approximation y0 (2*y0 must be a unit).
Elem sqrt_newton(const Elem& a, const Elem& y0, int max_iter = 200);

}  // namespace tate
