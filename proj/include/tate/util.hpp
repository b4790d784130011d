#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tate {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

/// Deterministic generator; identical sequences on every platform for a given seed.
class Rng {
public:
    explicit Rng(u64 seed) : g_(seed) {}
    u64 next() { return g_(); }
    u64 below(u64 n) { return n == 0 ? 0 : g_() % n; }
    i64 range(i64 lo, i64 hi) { return lo + static_cast<i64>(below(static_cast<u64>(hi - lo + 1))); }
    Rng fork() { return Rng(g_() ^ 0x9e3779b97f4a7c15ULL); }

private:
    std::mt19937_64 g_;
};

inline int vp_int(u64 k, u64 p) {
    if (k == 0) return 1 << 20;
    int v = 0;
    while (k % p == 0) {
        k /= p;
        ++v;
    }
    return v;
}

/// p^k, or 0 when it does not fit below 2^63.
u64 ipow_checked(u64 p, int k);

u64 mulmod(u64 a, u64 b, u64 q);
u64 powmod(u64 a, u64 e, u64 q);
i64 mod_inverse(i64 a, i64 n);
u64 gcd_u64(u64 a, u64 b);

struct PrimePower {
    u64 prime;
    int exponent;
};
std::vector<PrimePower> factorize(u64 n);

std::vector<int> binary_digits(u64 n);

}  // namespace tate
