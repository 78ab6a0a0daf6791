#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace twc {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

inline bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct GridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform grid on [-X, X)^2 with nodes at -X + i*h, i = 0..n-1 (left
// endpoints, half-open box). n is a power of two and 1/h is a positive
// integer so that integer translations land on nodes.
struct GridSpec {
    double extent = 0.0; // X
    std::size_t n = 0;   // samples per axis

    GridSpec() = default;
    GridSpec(double X, std::size_t n_) : extent(X), n(n_) { validate(); }

    double h() const { return 2.0 * extent / double(n); }

    void validate() const {
        if (!(extent > 0.0)) throw GridError("grid extent must be positive");
        if (!is_pow2(n)) throw GridError("grid n must be a power of two");
        const double inv_h = double(n) / (2.0 * extent);
        if (std::abs(inv_h - std::round(inv_h)) > 1e-9 || inv_h < 1.0 - 1e-12)
            throw GridError("1/h must be a positive integer");
    }

    // 1/h, exact by construction.
    std::int64_t inv_h() const { return std::int64_t(std::llround(double(n) / (2.0 * extent))); }

    double node(std::size_t i) const { return -extent + double(i) * h(); }

    // Index of the node nearest to x, or -1 when x falls outside the box.
    std::int64_t nearest_index(double x) const {
        const double t = (x + extent) / h();
        const std::int64_t i = std::int64_t(std::llround(t));
        if (i < 0 || i >= std::int64_t(n)) return -1;
        return i;
    }

    bool operator==(const GridSpec& o) const { return extent == o.extent && n == o.n; }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

    // True when the two grids share the extent and the ratio of resolutions
    // is a power of two (the only resampling this library performs).
    bool commensurate(const GridSpec& o) const {
        if (extent != o.extent) return false;
        const std::size_t a = std::max(n, o.n), b = std::min(n, o.n);
        return a % b == 0 && is_pow2(a / b);
    }
};

} // namespace twc
