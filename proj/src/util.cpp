#include "tate/util.hpp"

#include <limits>

namespace tate {

u64 ipow_checked(u64 p, int k) {
    u64 r = 1;
    for (int i = 0; i < k; ++i) {
        if (r > (std::numeric_limits<u64>::max() >> 1) / p) return 0;
        r *= p;
    }
    return r;
}

u64 mulmod(u64 a, u64 b, u64 q) { return static_cast<u64>((static_cast<u128>(a) * b) % q); }

u64 powmod(u64 a, u64 e, u64 q) {
    u64 r = 1 % q;
    a %= q;
    while (e) {
        if (e & 1) r = mulmod(r, a, q);
        a = mulmod(a, a, q);
        e >>= 1;
    }
    return r;
}

i64 mod_inverse(i64 a, i64 n) {
    i64 t = 0, nt = 1, r = n, nr = ((a % n) + n) % n;
    while (nr != 0) {
        i64 qq = r / nr;
        i64 tmp = t - qq * nt;
        t = nt;
        nt = tmp;
        tmp = r - qq * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) return 0;
    return t < 0 ? t + n : t;
}

u64 gcd_u64(u64 a, u64 b) {
    while (b) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::vector<PrimePower> factorize(u64 n) {
    std::vector<PrimePower> out;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        int e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        out.push_back({d, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

std::vector<int> binary_digits(u64 n) {
    std::vector<int> bits;
    while (n) {
        bits.push_back(static_cast<int>(n & 1));
        n >>= 1;
    }
    return {bits.rbegin(), bits.rend()};
}

}  // namespace tate
