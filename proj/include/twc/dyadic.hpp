#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace twc {

// Exact dyadic rational num * 2^(-log2den), kept normalized (num odd or zero).
// All lambda parameters in this library are dyadic (the paper-side values are
// +-2^(-2j)), so phases exp(i*pi*lambda*t) can be built from an exactly
// represented lambda instead of a rounded double.
struct Dyadic {
    std::int64_t num = 0;
    int log2den = 0;

    constexpr Dyadic() = default;

    constexpr Dyadic(std::int64_t n, int l2d) : num(n), log2den(l2d) { normalize(); }

    static constexpr Dyadic from_int(std::int64_t n) { return Dyadic(n, 0); }

    // 2^k for k of either sign.
    static constexpr Dyadic pow2(int k) {
        return k >= 0 ? Dyadic(std::int64_t(1) << k, 0) : Dyadic(1, -k);
    }

    constexpr void normalize() {
        if (num == 0) { log2den = 0; return; }
        while ((num & 1) == 0 && log2den > 0) { num >>= 1; --log2den; }
        while (log2den < 0) { num <<= 1; ++log2den; }
    }

    constexpr bool zero() const { return num == 0; }

    double value() const { return std::ldexp(double(num), -log2den); }

    constexpr Dyadic operator*(const Dyadic& o) const {
        return Dyadic(num * o.num, log2den + o.log2den);
    }
    constexpr Dyadic operator-() const { return Dyadic(-num, log2den); }

    constexpr bool operator==(const Dyadic& o) const {
        return num == o.num && log2den == o.log2den;
    }

    // this * 2^k
    constexpr Dyadic scale2(int k) const { return *this * pow2(k); }

    std::string str() const {
        return std::to_string(num) + "/2^" + std::to_string(log2den);
    }
};

inline Dyadic dyadic_lambda_for_level(int j) {
    // lambda = 2^(-2j)
    return Dyadic::pow2(-2 * j);
}

// Reduces num*2^(-log2den)*m mod 2 exactly and returns it as a double in
// [-2, 2). Used to evaluate exp(i*pi*lambda*m) for integer m without the
// phase drift of a large rounded angle.
inline double dyadic_times_int_mod2(const Dyadic& d, std::int64_t m) {
    if (d.num == 0 || m == 0) return 0.0;
    // (d.num * m) mod 2^(log2den+1), as a signed value
    const int sh = d.log2den + 1;
    __int128 prod = static_cast<__int128>(d.num) * m;
    if (sh >= 127) return std::ldexp(double(d.num), -d.log2den) * double(m); // out of reach; fall back
    __int128 mod = static_cast<__int128>(1) << sh;
    __int128 r = prod % mod;
    return std::ldexp(double(static_cast<std::int64_t>(r)), -d.log2den);
}

} // namespace twc
