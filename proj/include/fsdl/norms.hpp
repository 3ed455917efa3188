#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fsdl/field.hpp"

namespace fsdl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Norms {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double h1_seminorm = 0.0;
};

/// Pointwise magnitude: |f| for scalars, Euclidean length for vectors.
template <class Grid>
std::vector<double> magnitudes(const Field<Grid>& f) {
    std::vector<double> m(f.cells(), 0.0);
    for (int k = 0; k < f.components(); ++k) {
        auto c = f.component(k);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += c[i] * c[i];
    }
    for (double& v : m) v = std::sqrt(v);
    return m;
}

namespace detail {
inline double diff_sq_sum(const Grid1D& g, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t k = 1; k < g.n_cells(); ++k) {
        const double d = (f[k] - f[k - 1]) / g.h();
        s += d * d;
    }
    return s;
}

inline double diff_sq_sum(const Grid2D& g, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 1; i < g.nx(); ++i) {
            const double d = (f[g.index(i, j)] - f[g.index(i - 1, j)]) / g.hx();
            s += d * d;
        }
    for (std::size_t j = 1; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double d = (f[g.index(i, j)] - f[g.index(i, j - 1)]) / g.hy();
            s += d * d;
        }
    return s;
}
}  // namespace detail

template <class Grid>
Norms norms(const Field<Grid>& f) {
    const double vol = f.grid().cell_volume();
    Norms out;
    double s1 = 0.0, s2 = 0.0;
    for (double m : magnitudes(f)) {
        s1 += m;
        s2 += m * m;
        out.linf = std::max(out.linf, m);
    }
    out.l1 = vol * s1;
    out.l2 = std::sqrt(vol * s2);
    double sd = 0.0;
    for (int k = 0; k < f.components(); ++k) sd += detail::diff_sq_sum(f.grid(), f.component(k));
    out.h1_seminorm = std::sqrt(vol * sd);
    return out;
}

/// Discrete L^p norm (h^d * sum |f|^p)^(1/p); p = infinity gives the max norm.
template <class Grid>
double lp_norm(const Field<Grid>& f, double p) {
    const auto m = magnitudes(f);
    if (std::isinf(p)) return m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
    double s = 0.0;
    for (double v : m) s += std::pow(v, p);
    return std::pow(f.grid().cell_volume() * s, 1.0 / p);
}

/// h^d * sum |f|^p (no root).
template <class Grid>
double power_integral(const Field<Grid>& f, double p) {
    double s = 0.0;
    for (double v : magnitudes(f)) s += std::pow(v, p);
    return f.grid().cell_volume() * s;
}

}  // namespace fsdl
