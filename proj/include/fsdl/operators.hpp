#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fsdl/errors.hpp"
#include "fsdl/field.hpp"
#include "fsdl/linalg.hpp"

namespace fsdl {

// ---------------------------------------------------------------------------
// Neumann Laplacian: mirrored ghosts f[-1] = f[0], f[N] = f[N-1].
// ---------------------------------------------------------------------------

inline void laplacian_neumann_into(const Grid1D& g, std::span<const double> f, std::span<double> out) {
    const std::size_t n = g.n_cells();
    const double inv_h2 = 1.0 / (g.h() * g.h());
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? f[i - 1] : f[i];
        const double right = i + 1 < n ? f[i + 1] : f[i];
        out[i] = (left - 2.0 * f[i] + right) * inv_h2;
    }
}

inline void laplacian_neumann_into(const Grid2D& g, std::span<const double> f, std::span<double> out) {
    const std::size_t nx = g.nx(), ny = g.ny();
    const double ix2 = 1.0 / (g.hx() * g.hx()), iy2 = 1.0 / (g.hy() * g.hy());
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = g.index(i, j);
            const double c = f[k];
            const double w = i > 0 ? f[k - 1] : c;
            const double e = i + 1 < nx ? f[k + 1] : c;
            const double s = j > 0 ? f[k - nx] : c;
            const double nn = j + 1 < ny ? f[k + nx] : c;
            out[k] = (w - 2.0 * c + e) * ix2 + (s - 2.0 * c + nn) * iy2;
        }
    }
}

template <class Grid>
Field<Grid> laplacian_neumann(const Field<Grid>& f, const Grid& grid) {
    if (!(f.grid() == grid)) throw StructuralError("laplacian_neumann: grid mismatch");
    if (f.components() != 1) throw StructuralError("laplacian_neumann: scalar field expected");
    Field<Grid> out(grid);
    laplacian_neumann_into(grid, f.values(), out.values());
    return out;
}

template <class Grid>
Field<Grid> laplacian_neumann(const Field<Grid>& f) {
    return laplacian_neumann(f, f.grid());
}

// ---------------------------------------------------------------------------
// Face-located velocities. Boundary faces always carry zero normal velocity.
// ---------------------------------------------------------------------------

/// Normal velocities at the n+1 faces of a 1D grid; face k sits at x = k*h.
struct FaceField1D {
    Grid1D grid;
    std::vector<double> v;

    explicit FaceField1D(const Grid1D& g) : grid(g), v(g.n_cells() + 1, 0.0) {}
};

/// Staggered normal velocities on a 2D grid. x-face (i,j), i in [0,nx], sits
/// at (i*hx, (j+1/2)*hy); y-face (i,j), j in [0,ny], sits at ((i+1/2)*hx, j*hy).
struct FaceField2D {
    Grid2D grid;
    std::vector<double> x, y;

    explicit FaceField2D(const Grid2D& g)
        : grid(g), x((g.nx() + 1) * g.ny(), 0.0), y(g.nx() * (g.ny() + 1), 0.0) {}

    std::size_t xi(std::size_t i, std::size_t j) const noexcept { return j * (grid.nx() + 1) + i; }
    std::size_t yi(std::size_t i, std::size_t j) const noexcept { return j * grid.nx() + i; }

    friend bool operator==(const FaceField2D& a, const FaceField2D& b) {
        return a.grid == b.grid && a.x == b.x && a.y == b.y;
    }
};

/// Cell-centered gradient averaged onto faces; boundary faces set to zero.
inline FaceField1D to_faces(const Field1D& velocity) {
    const Grid1D& g = velocity.grid();
    FaceField1D faces(g);
    for (std::size_t k = 1; k < g.n_cells(); ++k) faces.v[k] = 0.5 * (velocity[k - 1] + velocity[k]);
    return faces;
}

inline FaceField2D to_faces(const Field2D& velocity) {
    if (velocity.components() != 2) throw StructuralError("to_faces: 2-component velocity expected");
    const Grid2D& g = velocity.grid();
    FaceField2D faces(g);
    auto vx = velocity.component(0);
    auto vy = velocity.component(1);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 1; i < g.nx(); ++i)
            faces.x[faces.xi(i, j)] = 0.5 * (vx[g.index(i - 1, j)] + vx[g.index(i, j)]);
    for (std::size_t j = 1; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            faces.y[faces.yi(i, j)] = 0.5 * (vy[g.index(i, j - 1)] + vy[g.index(i, j)]);
    return faces;
}

/// Two-point gradient of a cell field at interior faces (zero at the boundary).
inline FaceField1D face_gradient(const Field1D& f) {
    const Grid1D& g = f.grid();
    FaceField1D out(g);
    for (std::size_t k = 1; k < g.n_cells(); ++k) out.v[k] = (f[k] - f[k - 1]) / g.h();
    return out;
}

inline FaceField2D face_gradient(const Field2D& f) {
    const Grid2D& g = f.grid();
    FaceField2D out(g);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 1; i < g.nx(); ++i)
            out.x[out.xi(i, j)] = (f[g.index(i, j)] - f[g.index(i - 1, j)]) / g.hx();
    for (std::size_t j = 1; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            out.y[out.yi(i, j)] = (f[g.index(i, j)] - f[g.index(i, j - 1)]) / g.hy();
    return out;
}

/// Discrete divergence of a face field at cell centers.
inline Field2D face_divergence(const FaceField2D& u) {
    const Grid2D& g = u.grid;
    Field2D out(g);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            out[g.index(i, j)] = (u.x[u.xi(i + 1, j)] - u.x[u.xi(i, j)]) / g.hx() +
                                 (u.y[u.yi(i, j + 1)] - u.y[u.yi(i, j)]) / g.hy();
    return out;
}

// ---------------------------------------------------------------------------
// First-order upwind divergence of carrier * velocity with zero boundary flux.
// ---------------------------------------------------------------------------

inline double upwind_flux(double w, double left, double right) { return w > 0.0 ? w * left : w * right; }

inline void upwind_divergence_into(const FaceField1D& w, std::span<const double> q, std::span<double> out) {
    const std::size_t n = w.grid.n_cells();
    const double inv_h = 1.0 / w.grid.h();
    double left_flux = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double right_flux = i + 1 < n ? upwind_flux(w.v[i + 1], q[i], q[i + 1]) : 0.0;
        out[i] = (right_flux - left_flux) * inv_h;
        left_flux = right_flux;
    }
}

inline void upwind_divergence_into(const FaceField2D& w, std::span<const double> q, std::span<double> out) {
    const Grid2D& g = w.grid;
    const std::size_t nx = g.nx(), ny = g.ny();
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 1; i < nx; ++i) {
            const std::size_t l = g.index(i - 1, j), r = g.index(i, j);
            const double flux = upwind_flux(w.x[w.xi(i, j)], q[l], q[r]) * ihx;
            out[l] += flux;
            out[r] -= flux;
        }
    }
    for (std::size_t j = 1; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t b = g.index(i, j - 1), t = g.index(i, j);
            const double flux = upwind_flux(w.y[w.yi(i, j)], q[b], q[t]) * ihy;
            out[b] += flux;
            out[t] -= flux;
        }
    }
}

inline Field1D upwind_divergence(const Field1D& carrier, const FaceField1D& w) {
    if (!(carrier.grid() == w.grid)) throw StructuralError("upwind_divergence: grid mismatch");
    Field1D out(carrier.grid());
    upwind_divergence_into(w, carrier.values(), out.values());
    return out;
}

inline Field2D upwind_divergence(const Field2D& carrier, const FaceField2D& w) {
    if (!(carrier.grid() == w.grid)) throw StructuralError("upwind_divergence: grid mismatch");
    Field2D out(carrier.grid());
    upwind_divergence_into(w, carrier.values(), out.values());
    return out;
}

/// Conservative upwind divergence of carrier*velocity for a cell-centered
/// velocity; interior face velocities are two-point averages.
template <class Grid>
Field<Grid> upwind_advective_divergence(const Field<Grid>& carrier, const Field<Grid>& velocity,
                                        const Grid& grid) {
    if (!(carrier.grid() == grid) || !(velocity.grid() == grid))
        throw StructuralError("upwind_advective_divergence: grid mismatch");
    if (carrier.components() != 1 || velocity.components() != Grid::dim)
        throw StructuralError("upwind_advective_divergence: component count mismatch");
    return upwind_divergence(carrier, to_faces(velocity));
}

/// max over cells of the total outflow rate; 1/rate is the largest step
/// keeping an explicit upwind update positive.
inline double max_outflow_rate(const FaceField1D& w) {
    const std::size_t n = w.grid.n_cells();
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, (std::max(w.v[i + 1], 0.0) + std::max(-w.v[i], 0.0)) / w.grid.h());
    return m;
}

inline double max_outflow_rate(const FaceField2D& w) {
    const Grid2D& g = w.grid;
    double m = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double out = (std::max(w.x[w.xi(i + 1, j)], 0.0) + std::max(-w.x[w.xi(i, j)], 0.0)) / g.hx() +
                               (std::max(w.y[w.yi(i, j + 1)], 0.0) + std::max(-w.y[w.yi(i, j)], 0.0)) / g.hy();
            m = std::max(m, out);
        }
    return m;
}

// ---------------------------------------------------------------------------
// Cell-centered derivatives with mirrored ghosts (used by monitors).
// ---------------------------------------------------------------------------

/// Centered gradient; 1 component in 1D, 2 in 2D.
inline Field1D centered_gradient(const Field1D& f) {
    const Grid1D& g = f.grid();
    const std::size_t n = g.n_cells();
    Field1D out(g);
    for (std::size_t i = 0; i < n; ++i) {
        const double l = i > 0 ? f[i - 1] : f[i];
        const double r = i + 1 < n ? f[i + 1] : f[i];
        out[i] = (r - l) / (2.0 * g.h());
    }
    return out;
}

inline Field2D centered_gradient(const Field2D& f) {
    const Grid2D& g = f.grid();
    Field2D out(g, 2);
    auto gx = out.component(0);
    auto gy = out.component(1);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            const double w = i > 0 ? f[k - 1] : f[k];
            const double e = i + 1 < g.nx() ? f[k + 1] : f[k];
            const double s = j > 0 ? f[k - g.nx()] : f[k];
            const double nn = j + 1 < g.ny() ? f[k + g.nx()] : f[k];
            gx[k] = (e - w) / (2.0 * g.hx());
            gy[k] = (nn - s) / (2.0 * g.hy());
        }
    return out;
}

/// Squared Frobenius norm of the discrete Hessian at each cell.
inline std::vector<double> hessian_norm_sq(const Field1D& f) {
    Field1D lap = laplacian_neumann(f);
    std::vector<double> out(lap.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lap[i] * lap[i];
    return out;
}

inline std::vector<double> hessian_norm_sq(const Field2D& f) {
    const Grid2D& g = f.grid();
    const std::size_t nx = g.nx(), ny = g.ny();
    auto at = [&](long i, long j) {
        // mirrored ghost cells
        i = std::clamp<long>(i, 0, static_cast<long>(nx) - 1);
        j = std::clamp<long>(j, 0, static_cast<long>(ny) - 1);
        return f[g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
    };
    std::vector<double> out(g.cell_count());
    for (long j = 0; j < static_cast<long>(ny); ++j)
        for (long i = 0; i < static_cast<long>(nx); ++i) {
            const double c = at(i, j);
            const double fxx = (at(i - 1, j) - 2.0 * c + at(i + 1, j)) / (g.hx() * g.hx());
            const double fyy = (at(i, j - 1) - 2.0 * c + at(i, j + 1)) / (g.hy() * g.hy());
            const double fxy =
                (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4.0 * g.hx() * g.hy());
            out[g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))] =
                fxx * fxx + 2.0 * fxy * fxy + fyy * fyy;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Shifted Neumann operators alpha*I - beta*Lap + diag(extra) [+ upwind transport]
// ---------------------------------------------------------------------------

/// Tridiagonal form of alpha*I - beta*Lap_h + diag(extra) on a 1D grid.
inline Tridiag neumann_system(const Grid1D& g, double alpha, double beta, std::span<const double> extra = {}) {
    const std::size_t n = g.n_cells();
    const double k = beta / (g.h() * g.h());
    Tridiag sys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? k : 0.0;
        const double right = i + 1 < n ? k : 0.0;
        sys.sub[i] = -left;
        sys.sup[i] = -right;
        sys.diag[i] = alpha + left + right + (extra.empty() ? 0.0 : extra[i]);
    }
    return sys;
}

/// Matrix-free 2D operator alpha*I - beta*Lap_h + diag(extra) + div_upwind(. w).
struct NeumannOperator2D {
    Grid2D grid;
    double alpha = 1.0;
    double beta = 1.0;
    std::span<const double> extra{};
    const FaceField2D* transport = nullptr;

    void operator()(std::span<const double> x, std::span<double> y) const {
        laplacian_neumann_into(grid, x, y);
        for (std::size_t k = 0; k < y.size(); ++k)
            y[k] = alpha * x[k] - beta * y[k] + (extra.empty() ? 0.0 : extra[k] * x[k]);
        if (transport) {
            std::vector<double> div(y.size());
            upwind_divergence_into(*transport, x, div);
            for (std::size_t k = 0; k < y.size(); ++k) y[k] += div[k];
        }
    }
};

struct SolverControl {
    double rel_tol = 1e-10;
    std::size_t max_iter = 0;  // 0 selects 10 * cell count

    std::size_t cap(std::size_t cells) const { return max_iter ? max_iter : 10 * cells; }
};

/// Solves op x = rhs; x holds the initial guess. CG when symmetric, else BiCGSTAB.
inline SolveStats solve_neumann(const NeumannOperator2D& op, std::span<const double> rhs, std::span<double> x,
                                const SolverControl& ctl = {}) {
    const std::size_t cap = ctl.cap(op.grid.cell_count());
    if (op.transport) return bicgstab(op, rhs, x, ctl.rel_tol, cap);
    return conjugate_gradient(op, rhs, x, ctl.rel_tol, cap);
}

/// Solution c of (I - Lap_h) c = source with Neumann closure.
inline Field1D helmholtz_solve(const Field1D& source, const Grid1D& grid) {
    if (!(source.grid() == grid) || source.components() != 1)
        throw StructuralError("helmholtz_solve: scalar field on matching grid expected");
    return Field1D(grid, tridiag_solve(neumann_system(grid, 1.0, 1.0), source.values()));
}

inline Field1D helmholtz_solve(const Field1D& source) { return helmholtz_solve(source, source.grid()); }

inline Field2D helmholtz_solve(const Field2D& source, const Grid2D& grid, const SolverControl& ctl = {}) {
    if (!(source.grid() == grid) || source.components() != 1)
        throw StructuralError("helmholtz_solve: scalar field on matching grid expected");
    Field2D c = source;
    NeumannOperator2D op{grid, 1.0, 1.0};
    solve_neumann(op, source.values(), c.values(), ctl);
    return c;
}

inline Field2D helmholtz_solve(const Field2D& source, const SolverControl& ctl = {}) {
    return helmholtz_solve(source, source.grid(), ctl);
}

}  // namespace fsdl
