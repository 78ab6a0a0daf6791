#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "twc/grid.hpp"
#include "twc/io.hpp"
#include "twc/parallel.hpp"

namespace twc {

enum class Interp { Nearest, Linear };

struct SeparableKernel; // designed.hpp

// Oscillation bounds used to size quadrature panels for analytic fields:
// g(x,y) * exp(-i pi chirp_rate x y) varies in x no faster than omega_const
// rad per unit (plus a smooth envelope resolved by panel_cap).
struct OscHints {
    double chirp_rate = 0.0;
    double omega_const = 0.0;
    double panel_cap = 0.5;
};

// Axis-aligned support rectangle; evaluation outside it is exactly zero.
struct SupportBox {
    double x_lo, x_hi, y_lo, y_hi;

    bool disjoint(const SupportBox& o) const {
        return x_hi <= o.x_lo || o.x_hi <= x_lo || y_hi <= o.y_lo || o.y_hi <= y_lo;
    }
    SupportBox intersect(const SupportBox& o) const {
        return {std::max(x_lo, o.x_lo), std::min(x_hi, o.x_hi),
                std::max(y_lo, o.y_lo), std::min(y_hi, o.y_hi)};
    }
};

// A complex function on R^2, either analytic (evaluable anywhere, truncated to
// its extent box) or sampled on a uniform grid. Immutable after construction.
class Field2D {
public:
    using Evaluator = std::function<cplx(double, double)>;

    static Field2D analytic(Evaluator f, double extent) {
        Field2D out;
        out.eval_ = std::move(f);
        out.extent_ = extent;
        return out;
    }

    static Field2D analytic(Evaluator f, double extent, SupportBox support,
                            std::vector<double> x_breaks = {},
                            std::vector<double> y_breaks = {}) {
        Field2D out;
        out.eval_ = std::move(f);
        out.extent_ = extent;
        out.support_ = support;
        out.x_breaks_ = std::move(x_breaks);
        out.y_breaks_ = std::move(y_breaks);
        return out;
    }

    static Field2D sampled(const GridSpec& g, std::vector<cplx> data,
                           Interp order = Interp::Nearest) {
        g.validate();
        if (data.size() != g.n * g.n)
            throw GridError("sampled field: data length must be n^2");
        Field2D out;
        out.grid_ = g;
        out.data_ = std::move(data);
        out.extent_ = g.extent;
        out.interp_ = order;
        return out;
    }

    static Field2D zero(const GridSpec& g) {
        return sampled(g, std::vector<cplx>(g.n * g.n, cplx(0.0, 0.0)));
    }

    bool is_sampled() const { return !data_.empty(); }
    bool is_analytic() const { return static_cast<bool>(eval_); }

    double extent() const { return extent_; }
    Interp interp() const { return interp_; }

    const GridSpec& grid() const {
        if (!is_sampled()) throw GridError("field is not sampled");
        return grid_;
    }
    const std::vector<cplx>& data() const { return data_; }

    const std::optional<SupportBox>& support() const { return support_; }
    const std::vector<double>& x_breaks() const { return x_breaks_; }
    const std::vector<double>& y_breaks() const { return y_breaks_; }

    cplx at(std::size_t ix, std::size_t iy) const { return data_[iy * grid_.n + ix]; }

    // Point evaluation; zero outside the extent box (and outside the support
    // box when one is declared).
    cplx eval(double x, double y) const {
        if (x < -extent_ || x >= extent_ || y < -extent_ || y >= extent_) return cplx(0, 0);
        if (support_ &&
            (x < support_->x_lo || x > support_->x_hi || y < support_->y_lo || y > support_->y_hi))
            return cplx(0, 0);
        if (is_analytic() && !is_sampled()) return eval_(x, y);
        if (interp_ == Interp::Nearest) {
            const std::int64_t ix = grid_.nearest_index(x), iy = grid_.nearest_index(y);
            if (ix < 0 || iy < 0) return cplx(0, 0);
            return at(std::size_t(ix), std::size_t(iy));
        }
        // bilinear
        const double h = grid_.h();
        const double fx = (x + extent_) / h, fy = (y + extent_) / h;
        const std::int64_t ix = std::int64_t(std::floor(fx)), iy = std::int64_t(std::floor(fy));
        const double tx = fx - double(ix), ty = fy - double(iy);
        auto cell = [&](std::int64_t i, std::int64_t j) -> cplx {
            if (i < 0 || j < 0 || i >= std::int64_t(grid_.n) || j >= std::int64_t(grid_.n))
                return cplx(0, 0);
            return at(std::size_t(i), std::size_t(j));
        };
        return (1 - tx) * (1 - ty) * cell(ix, iy) + tx * (1 - ty) * cell(ix + 1, iy) +
               (1 - tx) * ty * cell(ix, iy + 1) + tx * ty * cell(ix + 1, iy + 1);
    }

    Field2D with_support(SupportBox box) const {
        Field2D out = *this;
        out.support_ = box;
        return out;
    }

    Field2D with_hints(OscHints h) const {
        Field2D out = *this;
        out.hints_ = h;
        return out;
    }

    Field2D with_separable(std::shared_ptr<const SeparableKernel> s) const {
        Field2D out = *this;
        out.separable_ = std::move(s);
        return out;
    }

    const OscHints& hints() const { return hints_; }
    const std::shared_ptr<const SeparableKernel>& separable() const { return separable_; }

    // x-range actually carrying mass on any row: extent box clipped by support
    std::pair<double, double> x_range() const {
        double lo = -extent_, hi = extent_;
        if (support_) { lo = std::max(lo, support_->x_lo); hi = std::min(hi, support_->x_hi); }
        return {lo, hi};
    }
    std::pair<double, double> y_range() const {
        double lo = -extent_, hi = extent_;
        if (support_) { lo = std::max(lo, support_->y_lo); hi = std::min(hi, support_->y_hi); }
        return {lo, hi};
    }

private:
    GridSpec grid_{};
    Evaluator eval_;
    std::vector<cplx> data_;
    double extent_ = 0.0;
    Interp interp_ = Interp::Nearest;
    std::optional<SupportBox> support_;
    std::vector<double> x_breaks_, y_breaks_;
    OscHints hints_;
    std::shared_ptr<const SeparableKernel> separable_;
};

// Samples f onto g. Analytic sources evaluate exactly at the nodes; sampled
// sources must be commensurate with g and are resampled with the declared
// interpolation order (recorded on the result).
inline Field2D sample(const Field2D& f, const GridSpec& g, Interp order = Interp::Nearest) {
    g.validate();
    if (f.is_sampled() && !f.grid().commensurate(g))
        throw GridError("sample: incommensurate grids");
    std::vector<cplx> data(g.n * g.n);
    const double h = g.h();
    const Field2D* src = &f;
    Field2D relaxed;
    if (f.is_sampled() && order != f.interp()) {
        relaxed = Field2D::sampled(f.grid(), f.data(), order);
        src = &relaxed;
    }
    parallel_for(0, g.n, [&](std::size_t iy) {
        const double y = -g.extent + double(iy) * h;
        for (std::size_t ix = 0; ix < g.n; ++ix) {
            const double x = -g.extent + double(ix) * h;
            data[iy * g.n + ix] = src->eval(x, y);
        }
    });
    return Field2D::sampled(g, std::move(data), order);
}

// h^2 * sum f * conj(g), the composite rectangle rule for the L^2 inner
// product. Summation order is fixed (row major), so inner(f,g) == conj(inner(g,f))
// exactly as computed.
inline cplx inner(const Field2D& f, const Field2D& g) {
    if (!f.is_sampled() || !g.is_sampled()) throw GridError("inner: fields must be sampled");
    if (f.grid() != g.grid()) throw GridError("inner: grid mismatch");
    const double h = f.grid().h();
    cplx acc(0.0, 0.0);
    const auto& a = f.data();
    const auto& b = g.data();
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
    return acc * (h * h);
}

inline double l2_norm(const Field2D& f) {
    const cplx ip = inner(f, f);
    return std::sqrt(std::max(0.0, ip.real()));
}

// Rectangle-rule inner product of two analytic fields over the intersection
// of their support boxes on the quadrature grid g. Disjoint supports give an
// exact zero without touching the evaluators.
inline cplx boxed_inner(const Field2D& f, const Field2D& g, const GridSpec& grid) {
    if (f.support() && g.support() && f.support()->disjoint(*g.support())) return cplx(0, 0);
    SupportBox box{-grid.extent, grid.extent, -grid.extent, grid.extent};
    if (f.support()) box = box.intersect(*f.support());
    if (g.support()) box = box.intersect(*g.support());
    if (box.x_hi <= box.x_lo || box.y_hi <= box.y_lo) return cplx(0, 0);
    const double h = grid.h();
    const std::int64_t ix_lo = std::max<std::int64_t>(0, std::int64_t(std::ceil((box.x_lo + grid.extent) / h - 1e-12)));
    const std::int64_t ix_hi = std::min<std::int64_t>(std::int64_t(grid.n) - 1, std::int64_t(std::floor((box.x_hi + grid.extent) / h + 1e-12)));
    const std::int64_t iy_lo = std::max<std::int64_t>(0, std::int64_t(std::ceil((box.y_lo + grid.extent) / h - 1e-12)));
    const std::int64_t iy_hi = std::min<std::int64_t>(std::int64_t(grid.n) - 1, std::int64_t(std::floor((box.y_hi + grid.extent) / h + 1e-12)));
    if (ix_hi < ix_lo || iy_hi < iy_lo) return cplx(0, 0);

    std::vector<cplx> rows(std::size_t(iy_hi - iy_lo + 1), cplx(0, 0));
    parallel_for(0, rows.size(), [&](std::size_t r) {
        const double y = grid.node(std::size_t(iy_lo) + r);
        cplx acc(0, 0);
        for (std::int64_t ix = ix_lo; ix <= ix_hi; ++ix) {
            const double x = grid.node(std::size_t(ix));
            acc += f.eval(x, y) * std::conj(g.eval(x, y));
        }
        rows[r] = acc;
    });
    cplx acc(0, 0);
    for (const cplx& v : rows) acc += v;
    return acc * (h * h);
}

// --- serialization: magic "TWF2" {version u32, n u32, extent f64} + n^2
// complex128, row major (y outer, x inner) ---

inline void write_field(std::ostream& os, const Field2D& f) {
    if (!f.is_sampled()) throw IoError("write_field: field must be sampled");
    detail::write_magic(os, "TWF2");
    detail::write_pod<std::uint32_t>(os, 1u);
    detail::write_pod<std::uint32_t>(os, std::uint32_t(f.grid().n));
    detail::write_pod<double>(os, f.grid().extent);
    detail::write_cplx_array(os, f.data());
}

inline Field2D read_field(std::istream& is) {
    detail::expect_magic(is, "TWF2", "Field2D");
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != 1u) throw IoError("unsupported TWF2 version");
    const auto n = detail::read_pod<std::uint32_t>(is);
    const auto extent = detail::read_pod<double>(is);
    GridSpec g(extent, n);
    std::vector<cplx> data(std::size_t(n) * n);
    detail::read_cplx_array(is, data);
    return Field2D::sampled(g, std::move(data));
}

} // namespace twc
