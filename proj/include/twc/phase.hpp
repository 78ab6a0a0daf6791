#pragma once

#include <cstdint>

#include "twc/dyadic.hpp"
#include "twc/grid.hpp"

namespace twc {

inline cplx unit_phase(double angle) { return cplx(std::cos(angle), std::sin(angle)); }

// exp(i * pi * num * k / den) with the angle reduced mod 2*pi in exact integer
// arithmetic before conversion to double. den > 0.
inline cplx unit_phase_pi_ratio(std::int64_t num, std::int64_t den, std::int64_t k) {
    const __int128 mod = static_cast<__int128>(2) * den;
    __int128 r = (static_cast<__int128>(num) * k) % mod;
    const double ang = pi * double(static_cast<std::int64_t>(r)) / double(den);
    return unit_phase(ang);
}

// exp(i * pi * lambda * m) for dyadic lambda and integer m, drift-free.
inline cplx unit_phase_pi_dyadic(const Dyadic& lam, std::int64_t m) {
    return unit_phase(pi * dyadic_times_int_mod2(lam, m));
}

} // namespace twc
