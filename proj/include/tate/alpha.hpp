#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "tate/character.hpp"
#include "tate/curve.hpp"
#include "tate/vectorial.hpp"

namespace tate {

/// Weil pairing e_N(S, T) over the ring of S and T by Miller functions with random shifts.
Elem cartier_pairing_local(const LocalPoint& S, const LocalPoint& T, u64 N, Rng& rng, int retries = 64);

/// Curve with integer coefficients over Z_p.
struct CurveSpec {
    std::string id;
    u64 p = 5;
    i64 a = 1;
    i64 b = 1;
    bool cm = false;
    /// Residue degree of the common unramified ring carrying the ell-adic bases.
    int ell_degree = 0;
};

CurveSpec preset_curve(const std::string& name);
std::vector<std::string> preset_names();

/// Lazily built torsion data for one curve up to a maximal precision.  Safe to share
/// between threads.
class TorsionProvider {
public:
    TorsionProvider(CurveSpec spec, int max_precision);

    const CurveSpec& spec() const { return spec_; }
    int max_precision() const { return max_m_; }
    CurvePtr curve(int n) const;
    /// Basis of E[ell^k] over the common unramified ring.
    const TorsionBasis& ell_basis(u64 ell, int k) const;
    const PTorsionLevel& p_level(int nu) const;
    /// Both vectors of the ell^k basis as a list.
    std::vector<TateVector> ell_vectors(u64 ell, int k) const;

private:
    CurveSpec spec_;
    int max_m_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<u64, int>, std::unique_ptr<TorsionBasis>> ell_;
    mutable std::map<int, std::unique_ptr<PTorsionLevel>> p_;
    mutable std::map<int, CurvePtr> curves_;
};

struct AlphaResult {
    Character character;
    int n = 0;
    FactoredOrder order;
    std::vector<std::string> provenance;
};

/// alpha_n(a_hat) evaluated on the basis vectors.  Pairs the primary component of
/// a_hat mod p^n with the projection of each vector to the matching level.
AlphaResult alpha_n(const LocalPoint& a_hat, int n, const std::vector<TateVector>& basis, Rng& rng);
std::vector<AlphaResult> alpha_tower(const LocalPoint& a_hat, int n_max, const std::vector<TateVector>& basis, Rng& rng);

std::vector<Component> basis_domain(const std::vector<TateVector>& basis);

struct VerificationReport {
    std::string check_name;
    std::string curve_id;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    std::string expected;
    std::string got;
    int precision = 0;
    int loss = 0;
    bool pass = false;
};

nlohmann::ordered_json to_json(const VerificationReport& r);

VerificationReport isogeny_functoriality_check(const LocalPoint& a_hat, i64 m, int n, const std::vector<TateVector>& basis,
                                               Rng& rng);

/// Global unit relating the two sides of the Lie identity under this module's conventions.
constexpr i64 kLieNormalization = -1;

/// Compares log(alpha_n(a_hat)(gamma)) with c * theta(gamma) * log_E(a_hat).
VerificationReport lie_alpha_check(const LocalPoint& a_hat, const TateVector& gamma, int n, Rng& rng,
                                   i64 normalization = kLieNormalization);

/// Determines the normalization unit from one instance; NormalizationUnresolved when the
/// ratio is not an integer unit congruent to the pinned constant.
i64 pin_normalization(const LocalPoint& a_hat, const TateVector& gamma, int n, Rng& rng);

/// Frobenius^power acting on a torsion basis, as the matrix of sigma^{-1} on the
/// generators (block diagonal over primes).
GaloisAction frobenius_action(const std::vector<TateVector>& basis, int power = 1);

/// Torsion point b with character sigma o alpha(a_hat) = alpha(b), searched over E[N].
LocalPoint cm_conjugate_search(const LocalPoint& a_hat, int frobenius_power, const std::vector<TateVector>& basis,
                               int n, Rng& rng);

struct UnipotentRep {
    Elem c;
    Elem beta;
    int n = 0;
    std::array<Elem, 4> matrix() const;
};

UnipotentRep rho_unipotent(const Elem& c, const TateVector& gamma, int n, Rng& rng);
std::array<Elem, 4> mat_mul(const std::array<Elem, 4>& A, const std::array<Elem, 4>& B);

}  // namespace tate
