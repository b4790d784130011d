#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tate/local_ring.hpp"

namespace tate {

enum class ComponentKind { Ell, P, Zhat };
const char* to_string(ComponentKind k);

/// One topological generator of the domain.  `level` is the finite quotient
/// through which an ell-adic component is evaluated (ell^k); 0 for p-adic and Zhat factors.
struct Component {
    std::string tag;
    ComponentKind kind = ComponentKind::Zhat;
    u64 prime = 0;
    u64 level = 0;

    bool operator==(const Component& o) const {
        return tag == o.tag && kind == o.kind && prime == o.prime && level == o.level;
    }
};

/// Continuous character given by its values on generators.
struct Character {
    std::vector<Component> domain;
    std::vector<Elem> images;
    int precision = 0;
    std::optional<int> smooth_level;

    bool operator==(const Character& o) const;
    bool operator!=(const Character& o) const { return !(*this == o); }
};

Character char_from_images(std::vector<Component> domain, std::vector<Elem> images, int m);
Character trivial_character(std::vector<Component> domain, const RingPtr& ring);

/// Integer approximation of a domain element component, known modulo `modulus`
/// (0 means known exactly).
struct Arg {
    i64 value = 0;
    u64 modulus = 0;
};

/// Depth needed on each component for evaluate.
u64 required_depth(const Character& chi, std::size_t i);
Elem evaluate(const Character& chi, const std::vector<Arg>& args);

Character char_mul(const Character& a, const Character& b);
Character char_inv(const Character& a);
Character char_pow(const Character& a, i64 k);
Character char_reduce(const Character& a, int n);

struct LogStar {
    std::vector<Elem> values;
    int loss = 0;
};

/// Component-wise log of the principal-unit part u / teich(u mod pi).
LogStar log_star(const Character& chi);

/// Character whose log_star equals the targets; targets must lie in the exp domain.
Character char_with_given_log(std::vector<Component> domain, const std::vector<Elem>& targets, int m);

/// Galois element sigma = Frobenius^frobenius_power together with sigma_*^{-1} on the
/// domain: inverse_action[i][j] is the coefficient of generator j in sigma^{-1}(generator i).
struct GaloisAction {
    int frobenius_power = 1;
    std::vector<std::vector<i64>> inverse_action;
};

Character conjugate(const Character& chi, const GaloisAction& sigma);

struct SmoothnessCertificate {
    bool smooth = false;
    int level = 0;
};

SmoothnessCertificate is_smooth_at_level(Character& chi, const std::vector<GaloisAction>& generators);

}  // namespace tate
