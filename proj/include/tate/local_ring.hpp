#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tate/errors.hpp"
#include "tate/util.hpp"

namespace tate {

enum class RingKind { Base, Unramified, Eisenstein };

const char* to_string(RingKind k);

/// p-adic valuation normalized by v(p) = 1, stored as a reduced fraction.
/// An element that vanishes at the working precision reports infinite = true and num/den = m.
struct Valuation {
    bool infinite = false;
    i64 num = 0;
    i64 den = 1;

    std::string str() const;
    bool operator==(const Valuation& o) const;
    bool operator<(const Valuation& o) const;
};

class LocalRing;
class Elem;
using RingPtr = std::shared_ptr<const LocalRing>;

/// Finite quotient o_L / p^m where o_L is either Z_p, an unramified extension
/// W(F_{p^f}) presented as Z_p[t]/(U), or an Eisenstein extension of one of those
/// presented as W[pi]/(E).  Elements are flat coefficient vectors: entry j*f + i
/// holds the coefficient of pi^j t^i.
class LocalRing : public std::enable_shared_from_this<LocalRing> {
    struct Key {};

public:
    /// Integer-coefficient constructor.  Base kind expects modulus x.
    static RingPtr make(u64 p, RingKind kind, const std::vector<i64>& modulus, int m);
    static RingPtr base(u64 p, int m);
    /// Unramified ring of degree f using the first irreducible monic polynomial
    /// in lexicographic order of its coefficients.
    static RingPtr unramified(u64 p, int f, int m);
    /// Eisenstein extension of `over` (base or unramified).  The coefficient
    /// lists are known modulo p^(over->m()); that bounds later precision boosts.
    static RingPtr eisenstein(const RingPtr& over, const std::vector<Elem>& modulus);

    LocalRing(Key, u64 p, int m, int f, std::vector<u64> umod, int e, std::vector<u64> emod,
              int mod_prec, u64 q_mod_prec);

    u64 p() const { return p_; }
    int m() const { return m_; }
    u64 q() const { return q_; }
    int e() const { return e_; }
    int f() const { return f_; }
    int degree() const { return e_ * f_; }
    RingKind kind() const;
    /// Highest precision at which the defining polynomials are known.
    int modulus_precision() const { return mod_prec_; }
    u64 residue_size() const;

    RingPtr self() const { return shared_from_this(); }
    RingPtr at_precision(int k) const;
    RingPtr residue_field() const;
    RingPtr unramified_part() const;
    bool same(const LocalRing& o) const;
    /// True when this ring is (up to precision) a subring of `o` through the
    /// standard inclusion Z_p -> W -> W[pi].
    bool embeds_into(const LocalRing& o) const;

    /// Defining polynomials at the working precision.
    const std::vector<u64>& unramified_modulus() const { return umod_; }
    const std::vector<u64>& eisenstein_modulus() const { return emod_; }
    const std::vector<u64>& unramified_modulus_hi() const { return umod_hi_; }
    const std::vector<u64>& eisenstein_modulus_hi() const { return emod_hi_; }

    Elem zero() const;
    Elem one() const;
    Elem from_int(i64 k) const;
    Elem from_coeffs(std::vector<u64> c) const;
    Elem from_signed(const std::vector<i64>& c) const;
    /// pi for Eisenstein rings, t for unramified rings, 0 for the base ring.
    Elem gen() const;
    Elem unramified_gen() const;
    Elem random(Rng& rng) const;
    /// Coefficient-wise lift of a residue field element.
    Elem from_residue(const Elem& r) const;

    // Raw kernels on coefficient arrays of length degree().
    void mul_raw(const u64* a, const u64* b, u64* out) const;
    void frobenius_raw(const u64* a, u64* out) const;
    bool has_frobenius() const { return !frob_.empty() || (e_ == 1 && f_ == 1); }

private:
    friend class Elem;
    void finish();
    void gr_mul(const u64* a, const u64* b, u64* out) const;
    void reduce_row(const u128* row, u64* out) const;

    u64 p_;
    int m_;
    u64 q_;
    int f_;
    int e_;
    int mod_prec_;
    u64 q_hi_;
    std::vector<u64> umod_hi_, emod_hi_;
    std::vector<u64> umod_, emod_;
    std::vector<u64> pipow_;
    std::vector<u64> frob_;
    RingPtr residue_;
};

class Elem {
public:
    Elem() = default;
    Elem(RingPtr r, std::vector<u64> c);

    const RingPtr& ring() const { return r_; }
    const std::vector<u64>& coeffs() const { return c_; }
    bool valid() const { return static_cast<bool>(r_); }

    bool is_zero() const;
    bool is_one() const;
    bool is_unit() const;

    Elem operator+(const Elem& o) const;
    Elem operator-(const Elem& o) const;
    Elem operator*(const Elem& o) const;
    Elem operator-() const;
    Elem& operator+=(const Elem& o);
    Elem& operator-=(const Elem& o);
    Elem& operator*=(const Elem& o);
    Elem scale(i64 k) const;
    bool operator==(const Elem& o) const;
    bool operator!=(const Elem& o) const { return !(*this == o); }

    Elem inv() const;
    Elem pow(u64 k) const;
    Elem pow_signed(i64 k) const;

    Valuation valuation() const;
    /// Valuation in units of 1/e; e*m for zero.
    int val_units() const;
    /// Largest k such that every coefficient is divisible by p^k (m for zero).
    int coeff_divisibility() const;

    /// Image in the residue field ring.
    Elem residue() const;
    /// Reduction to the same presentation at precision k <= m.
    Elem reduce(int k) const;
    /// Same coefficients viewed in `hi`, a copy of this ring at higher precision.
    Elem lift(const RingPtr& hi) const;
    /// Image under the standard inclusion into `target` (precision may drop).
    Elem embed(const RingPtr& target) const;

    std::string str() const;

private:
    void check_same(const Elem& o) const;
    RingPtr r_;
    std::vector<u64> c_;
};

/// Bookkeeping for series computed at boosted internal precision.
struct PrecisionBudget {
    int nominal = 0;
    int guard = 0;
    int loss = 0;
    int guaranteed() const { return nominal - loss; }
};

/// Exact division of every coefficient by p^k; the top k digits of the result are unknown
/// and set to zero.
Elem div_p_exact(const Elem& a, int k);

Elem teichmuller(const Elem& a);
Elem frobenius(const Elem& a, int power = 1);
Valuation valuation(const Elem& a);

Elem padic_log(const Elem& u, PrecisionBudget& budget);
Elem padic_log(const Elem& u);
Elem padic_exp(const Elem& z, PrecisionBudget& budget);
Elem padic_exp(const Elem& z);

/// Exponent of the unit group of the ring: (prime-to-p part, p-part).
std::pair<u64, u64> unit_group_exponent(const LocalRing& r);

/// First monic irreducible polynomial of degree f over F_p (coefficients low to high).
std::vector<u64> first_irreducible(u64 p, int f);
bool is_irreducible_mod_p(const std::vector<u64>& f, u64 p);

/// Largest precision allowed for prime p (keeps p^m below 2^56).
int max_precision(u64 p);

}  // namespace tate
