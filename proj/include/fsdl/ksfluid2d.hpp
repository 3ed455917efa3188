#pragma once

// Keller-Segel-(Navier-)Stokes system on the unit square:
//   n_t + u.grad n     = D Lap n - div(n S_eta(x,n,c) grad c) + f(x,n,c)
//   eps c_t + u.grad c = Lap c - c + n
//   u_t + kappa (u.grad) u = Lap u - grad p + n grad phi,  div u = 0
// Staggered (MAC) velocities with no-slip walls, Chorin projection, cell
// centered n, c, p. The projection pressure p is the negative of the
// pressure P in the form u_t = Lap u + grad P + n grad phi.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fsdl/core_num.hpp"
#include "fsdl/monitors.hpp"
#include "fsdl/profiles.hpp"
#include "fsdl/trajectory.hpp"

namespace fsdl {

// ---------------------------------------------------------------------------
// Model ingredients
// ---------------------------------------------------------------------------

/// Sensitivity tensor K_S * R(theta) with the optional cutoff
/// S_eta = rho_eta(x) chi_eta(n) S. rho_eta vanishes within distance eta of
/// the boundary and ramps to 1 over two cells; chi_eta vanishes for
/// n >= 1/eta and ramps to 1 over 10% of 1/eta. eta = 0 disables both.
struct SensitivitySpec {
    enum class Mode { ScalarDiagonal, Rotation };

    double K_S = 1.0;
    Mode mode = Mode::ScalarDiagonal;
    double theta = 0.0;
    double eta = 0.0;

    static SensitivitySpec scalar(double K_S, double eta = 0.0) { return {K_S, Mode::ScalarDiagonal, 0.0, eta}; }
    static SensitivitySpec rotation(double K_S, double theta, double eta = 0.0) {
        return {K_S, Mode::Rotation, theta, eta};
    }

    void validate() const {
        if (!(K_S > 0.0) || !std::isfinite(K_S)) throw ValidationError(Hypothesis::Sensitivity, "K_S must be a positive finite bound");
        if (!std::isfinite(theta)) throw ValidationError(Hypothesis::Sensitivity, "rotation angle must be finite");
        if (!(eta >= 0.0 && eta < 1.0)) throw ValidationError(Hypothesis::Sensitivity, "cutoff eta must lie in [0,1)");
    }

    /// Uncut tensor entries {S11, S12, S21, S22}.
    std::array<double, 4> base() const {
        if (mode == Mode::ScalarDiagonal) return {K_S, 0.0, 0.0, K_S};
        const double c = std::cos(theta), s = std::sin(theta);
        return {K_S * c, -K_S * s, K_S * s, K_S * c};
    }

    double density_cutoff(double n) const {
        if (eta == 0.0) return 1.0;
        const double top = 1.0 / eta;
        return std::clamp((top - n) / (0.1 * top), 0.0, 1.0);
    }

    double boundary_cutoff(double distance, double h) const {
        if (eta == 0.0) return 1.0;
        return std::clamp((distance - eta) / (2.0 * h), 0.0, 1.0);
    }

    friend bool operator==(const SensitivitySpec&, const SensitivitySpec&) = default;
};

/// Per-cell tensor entries of S_eta.
struct CellTensors {
    std::vector<double> s11, s12, s21, s22;
};

inline CellTensors assemble_sensitivity(const SensitivitySpec& spec, const Field2D& n) {
    const Grid2D& g = n.grid();
    const auto base = spec.base();
    const double h = std::max(g.hx(), g.hy());
    CellTensors t;
    const std::size_t cells = g.cell_count();
    t.s11.resize(cells);
    t.s12.resize(cells);
    t.s21.resize(cells);
    t.s22.resize(cells);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            const double x = g.center_x(i), y = g.center_y(j);
            const double d = std::min({x, 1.0 - x, y, 1.0 - y});
            const double w = spec.boundary_cutoff(d, h) * spec.density_cutoff(n[k]);
            t.s11[k] = w * base[0];
            t.s12[k] = w * base[1];
            t.s21[k] = w * base[2];
            t.s22[k] = w * base[3];
        }
    return t;
}

/// Source f(x, n, c) with f(x,0,c) >= 0 and f <= K_f (n + 1).
struct SourceSpec {
    enum class Mode { Zero, Logistic, CustomBounded };
    using Fn = std::function<double(double x, double y, double n, double c)>;

    Mode mode = Mode::Zero;
    double a = 0.0;
    double b = 0.0;
    double K_f = 0.0;
    Fn fn;

    static SourceSpec zero() { return {}; }
    static SourceSpec logistic(double a, double b) { return {Mode::Logistic, a, b, std::max(a, 0.0), {}}; }
    static SourceSpec custom(double K_f, Fn fn) { return {Mode::CustomBounded, 0.0, 0.0, K_f, std::move(fn)}; }

    double operator()(double x, double y, double n, double c) const {
        switch (mode) {
        case Mode::Zero: return 0.0;
        case Mode::Logistic: return a * n - b * n * n;
        case Mode::CustomBounded: return fn(x, y, n, c);
        }
        return 0.0;
    }

    void validate() const {
        if (mode == Mode::Zero) return;
        if (!(K_f >= 0.0) || !std::isfinite(K_f)) throw ValidationError(Hypothesis::Source, "K_f must be a finite nonnegative bound");
        if (mode == Mode::Logistic) {
            if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError(Hypothesis::Source, "logistic coefficients must be finite");
            if (b < 0.0) throw ValidationError(Hypothesis::Source, "logistic competition b must be >= 0 so that f <= K_f (n+1)");
            if (a > K_f) throw ValidationError(Hypothesis::Source, "growth rate a exceeds K_f, violating f <= K_f (n+1)");
            return;
        }
        if (!fn) throw ValidationError(Hypothesis::Source, "custom source needs a function");
        const double ns[] = {0.0, 0.1, 1.0, 10.0, 100.0};
        const double xs[] = {0.05, 0.5, 0.95};
        for (double x : xs)
            for (double y : xs)
                for (double c : ns) {
                    if (!(fn(x, y, 0.0, c) >= 0.0)) throw ValidationError(Hypothesis::Source, "f(x,0,c) must be nonnegative");
                    for (double n : ns)
                        if (!(fn(x, y, n, c) <= K_f * (n + 1.0) * (1.0 + 1e-12)))
                            throw ValidationError(Hypothesis::Source, "f exceeds K_f (n+1)");
                }
    }
};

/// Gravitational potential with bounded derivatives up to second order.
struct PotentialSpec {
    enum class Kind { Zero, Linear, Cosine };

    Kind kind = Kind::Zero;
    double gx = 0.0;  // slope in x | amplitude
    double gy = 0.0;  // slope in y | modes

    static PotentialSpec zero() { return {}; }
    static PotentialSpec linear(double gx, double gy) { return {Kind::Linear, gx, gy}; }
    static PotentialSpec cosine(double amp, double modes) { return {Kind::Cosine, amp, modes}; }

    double operator()(double x, double y) const {
        switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return gx * x + gy * y;
        case Kind::Cosine: return gx * std::cos(gy * std::numbers::pi * x) * std::cos(gy * std::numbers::pi * y);
        }
        return 0.0;
    }

    void validate() const {
        if (!std::isfinite(gx) || !std::isfinite(gy))
            throw ValidationError(Hypothesis::Potential, "phi must have bounded first and second derivatives");
    }

    friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

struct FluidParams {
    double kappa = 0.0;
    PotentialSpec phi;

    friend bool operator==(const FluidParams&, const FluidParams&) = default;
};

struct ModelParams2D {
    double eps = 0.0;
    double D = 1.0;
    SourceSpec source;
    SensitivitySpec sensitivity;
    FluidParams fluid;

    void validate() const {
        if (!(eps >= 0.0) || !std::isfinite(eps)) throw ValidationError(Hypothesis::ParameterRange, "eps must satisfy eps >= 0");
        if (!(D > 0.0) || !std::isfinite(D)) throw ValidationError(Hypothesis::ParameterRange, "D must satisfy D > 0");
        if (!std::isfinite(fluid.kappa)) throw ValidationError(Hypothesis::ParameterRange, "kappa must be a finite real");
        source.validate();
        sensitivity.validate();
        fluid.phi.validate();
    }

    double default_dt_cap() const { return 1e-2 * std::min(1.0, 1.0 / D); }
};

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

struct State2D {
    double t = 0.0;
    Field2D n;
    Field2D c;
    FaceField2D u;
    Field2D p;
};

inline FaceField2D lerp(const FaceField2D& a, const FaceField2D& b, double w) {
    FaceField2D out = a;
    for (std::size_t k = 0; k < out.x.size(); ++k) out.x[k] = (1.0 - w) * a.x[k] + w * b.x[k];
    for (std::size_t k = 0; k < out.y.size(); ++k) out.y[k] = (1.0 - w) * a.y[k] + w * b.y[k];
    return out;
}

inline State2D interpolate(const State2D& a, const State2D& b, double t) {
    const double w = (t - a.t) / (b.t - a.t);
    return State2D{t, lerp(a.n, b.n, w), lerp(a.c, b.c, w), lerp(a.u, b.u, w), lerp(a.p, b.p, w)};
}

inline bool finite_state(const State2D& s) {
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    return s.n.all_finite() && s.c.all_finite() && s.p.all_finite() && finite(s.u.x) && finite(s.u.y);
}

using Trajectory2D = Trajectory<State2D>;

/// Face velocities averaged to cell centers (2 components).
inline Field2D cell_velocity(const FaceField2D& u) {
    const Grid2D& g = u.grid;
    Field2D out(g, 2);
    auto vx = out.component(0);
    auto vy = out.component(1);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            vx[g.index(i, j)] = 0.5 * (u.x[u.xi(i, j)] + u.x[u.xi(i + 1, j)]);
            vy[g.index(i, j)] = 0.5 * (u.y[u.yi(i, j)] + u.y[u.yi(i, j + 1)]);
        }
    return out;
}

inline double kinetic_energy(const FaceField2D& u) {
    double s = 0.0;
    for (double v : u.x) s += v * v;
    for (double v : u.y) s += v * v;
    return 0.5 * s * u.grid.cell_volume();
}

inline double max_abs_divergence(const FaceField2D& u) {
    const Field2D d = face_divergence(u);
    double m = 0.0;
    for (double v : d.values()) m = std::max(m, std::abs(v));
    return m;
}

/// Solenoidal field with zero normal component from the discrete curl of
/// psi = sin^2(pi x) sin^2(pi y) sampled at cell corners.
inline FaceField2D vortex_velocity(const Grid2D& g, double amplitude) {
    using std::numbers::pi;
    FaceField2D u(g);
    auto psi = [&](std::size_t i, std::size_t j) {
        const double x = static_cast<double>(i) * g.hx(), y = static_cast<double>(j) * g.hy();
        const double sx = std::sin(pi * x), sy = std::sin(pi * y);
        return amplitude * sx * sx * sy * sy;
    };
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 1; i < g.nx(); ++i) u.x[u.xi(i, j)] = (psi(i, j + 1) - psi(i, j)) / g.hy();
    for (std::size_t j = 1; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) u.y[u.yi(i, j)] = -(psi(i + 1, j) - psi(i, j)) / g.hx();
    return u;
}

inline bool is_zero(const FaceField2D& u) {
    return std::all_of(u.x.begin(), u.x.end(), [](double v) { return v == 0.0; }) &&
           std::all_of(u.y.begin(), u.y.end(), [](double v) { return v == 0.0; });
}

inline State2D init_state2d(const Field2D& n0, const Field2D& c0, const FaceField2D& u0, const ModelParams2D& params) {
    params.validate();
    if (!(n0.grid() == c0.grid()) || !(n0.grid() == u0.grid)) throw StructuralError("init_state2d: grids differ");
    if (n0.min() < 0.0) throw ValidationError(Hypothesis::InitialData, "n0 must be nonnegative");
    if (!(n0.max() > 0.0)) throw ValidationError(Hypothesis::InitialData, "n0 must not vanish identically");
    if (c0.min() < 0.0) throw ValidationError(Hypothesis::InitialData, "c0 must be nonnegative");
    const Grid2D& g = n0.grid();
    for (std::size_t j = 0; j < g.ny(); ++j)
        if (u0.x[u0.xi(0, j)] != 0.0 || u0.x[u0.xi(g.nx(), j)] != 0.0)
            throw ValidationError(Hypothesis::InitialData, "u0 must vanish on the boundary");
    for (std::size_t i = 0; i < g.nx(); ++i)
        if (u0.y[u0.yi(i, 0)] != 0.0 || u0.y[u0.yi(i, g.ny())] != 0.0)
            throw ValidationError(Hypothesis::InitialData, "u0 must vanish on the boundary");
    double umax = 1e-300;
    for (double v : u0.x) umax = std::max(umax, std::abs(v));
    for (double v : u0.y) umax = std::max(umax, std::abs(v));
    if (max_abs_divergence(u0) > 1e-8 * std::max(1.0, umax / std::min(g.hx(), g.hy())))
        throw ValidationError(Hypothesis::InitialData, "u0 must be divergence free");
    Field2D c = params.eps == 0.0 ? helmholtz_solve(n0) : c0;
    return State2D{0.0, n0, std::move(c), u0, Field2D(g)};
}

// ---------------------------------------------------------------------------
// Fluid sub-step helpers
// ---------------------------------------------------------------------------

namespace detail {

/// alpha*u - Lap u on x-faces with no-slip walls; boundary faces are held at 0.
struct ViscousX {
    Grid2D g;
    double alpha;
    void operator()(std::span<const double> u, std::span<double> out) const {
        const std::size_t nx = g.nx(), ny = g.ny(), stride = nx + 1;
        const double ix2 = 1.0 / (g.hx() * g.hx()), iy2 = 1.0 / (g.hy() * g.hy());
        for (std::size_t j = 0; j < ny; ++j) {
            out[j * stride] = alpha * u[j * stride];
            out[j * stride + nx] = alpha * u[j * stride + nx];
            for (std::size_t i = 1; i < nx; ++i) {
                const std::size_t k = j * stride + i;
                const double c = u[k];
                const double w = i > 1 ? u[k - 1] : 0.0;
                const double e = i + 1 < nx ? u[k + 1] : 0.0;
                const double s = j > 0 ? u[k - stride] : -c;
                const double n = j + 1 < ny ? u[k + stride] : -c;
                out[k] = alpha * c - ((w - 2.0 * c + e) * ix2 + (s - 2.0 * c + n) * iy2);
            }
        }
    }
};

/// Same on y-faces.
struct ViscousY {
    Grid2D g;
    double alpha;
    void operator()(std::span<const double> u, std::span<double> out) const {
        const std::size_t nx = g.nx(), ny = g.ny();
        const double ix2 = 1.0 / (g.hx() * g.hx()), iy2 = 1.0 / (g.hy() * g.hy());
        for (std::size_t i = 0; i < nx; ++i) {
            out[i] = alpha * u[i];
            out[ny * nx + i] = alpha * u[ny * nx + i];
        }
        for (std::size_t j = 1; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t k = j * nx + i;
                const double c = u[k];
                const double w = i > 0 ? u[k - 1] : -c;
                const double e = i + 1 < nx ? u[k + 1] : -c;
                const double s = j > 1 ? u[k - nx] : 0.0;
                const double n = j + 1 < ny ? u[k + nx] : 0.0;
                out[k] = alpha * c - ((w - 2.0 * c + e) * ix2 + (s - 2.0 * c + n) * iy2);
            }
    }
};

/// First-order upwind (u.grad)u at interior faces.
inline FaceField2D convection(const FaceField2D& u) {
    const Grid2D& g = u.grid;
    const std::size_t nx = g.nx(), ny = g.ny();
    FaceField2D out(g);
    auto ux = [&](long i, long j) {
        if (j < 0) return -u.x[u.xi(static_cast<std::size_t>(i), 0)];
        if (j >= static_cast<long>(ny)) return -u.x[u.xi(static_cast<std::size_t>(i), ny - 1)];
        return u.x[u.xi(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
    };
    auto uy = [&](long i, long j) {
        if (i < 0) return -u.y[u.yi(0, static_cast<std::size_t>(j))];
        if (i >= static_cast<long>(nx)) return -u.y[u.yi(nx - 1, static_cast<std::size_t>(j))];
        return u.y[u.yi(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
    };
    for (long j = 0; j < static_cast<long>(ny); ++j)
        for (long i = 1; i < static_cast<long>(nx); ++i) {
            const double a = ux(i, j);
            const double b = 0.25 * (uy(i - 1, j) + uy(i, j) + uy(i - 1, j + 1) + uy(i, j + 1));
            const double dx = a > 0.0 ? (a - ux(i - 1, j)) / g.hx() : (ux(i + 1, j) - a) / g.hx();
            const double dy = b > 0.0 ? (a - ux(i, j - 1)) / g.hy() : (ux(i, j + 1) - a) / g.hy();
            out.x[out.xi(static_cast<std::size_t>(i), static_cast<std::size_t>(j))] = a * dx + b * dy;
        }
    for (long j = 1; j < static_cast<long>(ny); ++j)
        for (long i = 0; i < static_cast<long>(nx); ++i) {
            const double b = uy(i, j);
            const double a = 0.25 * (ux(i, j - 1) + ux(i + 1, j - 1) + ux(i, j) + ux(i + 1, j));
            const double dx = a > 0.0 ? (b - uy(i - 1, j)) / g.hx() : (uy(i + 1, j) - b) / g.hx();
            const double dy = b > 0.0 ? (b - uy(i, j - 1)) / g.hy() : (uy(i, j + 1) - b) / g.hy();
            out.y[out.yi(static_cast<std::size_t>(i), static_cast<std::size_t>(j))] = a * dx + b * dy;
        }
    return out;
}

inline double convective_rate(const FaceField2D& u, double kappa) {
    if (kappa == 0.0) return 0.0;
    double mx = 0.0, my = 0.0;
    for (double v : u.x) mx = std::max(mx, std::abs(v));
    for (double v : u.y) my = std::max(my, std::abs(v));
    return std::abs(kappa) * (mx / u.grid.hx() + my / u.grid.hy());
}

/// Face-averaged n times the two-point gradient of cell-sampled phi.
inline FaceField2D buoyancy(const Field2D& n, const Field2D& phi) {
    const Grid2D& g = n.grid();
    FaceField2D out(g);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 1; i < g.nx(); ++i) {
            const std::size_t l = g.index(i - 1, j), r = g.index(i, j);
            out.x[out.xi(i, j)] = 0.5 * (n[l] + n[r]) * (phi[r] - phi[l]) / g.hx();
        }
    for (std::size_t j = 1; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t b = g.index(i, j - 1), t = g.index(i, j);
            out.y[out.yi(i, j)] = 0.5 * (n[b] + n[t]) * (phi[t] - phi[b]) / g.hy();
        }
    return out;
}

}  // namespace detail

/// Projects u onto discretely divergence-free face fields: solves
/// Lap_N p = div(u)/dt (mean-free) and subtracts dt grad p. `p` is the
/// initial guess and receives the mean-zero pressure.
inline void project(FaceField2D& u, Field2D& p, double dt, const SolverControl& ctl = {}) {
    const Grid2D& g = u.grid;
    Field2D rhs = face_divergence(u);
    double mean = 0.0;
    for (double v : rhs.values()) mean += v;
    mean /= static_cast<double>(rhs.size());
    for (double& v : rhs.values()) v = -(v - mean) / dt;
    // -Lap_N is positive semidefinite; the mean-free rhs lies in its range.
    // The remaining divergence is dt times the residual, so the tolerance is
    // tightened until that stays near 1e-10 in absolute terms.
    double div_norm = 0.0;
    for (double v : rhs.values()) div_norm += v * v * dt * dt;
    div_norm = std::sqrt(div_norm);
    const double tol = std::clamp(1e-10 / std::max(div_norm, 1e-300), 1e-14, ctl.rel_tol);
    NeumannOperator2D neg_lap{g, 0.0, 1.0};
    conjugate_gradient(neg_lap, rhs.values(), p.values(), tol, ctl.cap(g.cell_count()));
    double pm = 0.0;
    for (double v : p.values()) pm += v;
    pm /= static_cast<double>(p.size());
    for (double& v : p.values()) v -= pm;
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 1; i < g.nx(); ++i)
            u.x[u.xi(i, j)] -= dt * (p[g.index(i, j)] - p[g.index(i - 1, j)]) / g.hx();
    for (std::size_t j = 1; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            u.y[u.yi(i, j)] -= dt * (p[g.index(i, j)] - p[g.index(i, j - 1)]) / g.hy();
}

/// Chemotactic face velocity S_eta grad c, tensor averaged from adjacent
/// cells, tangential gradient averaged from centered cell differences.
inline FaceField2D chemotaxis_velocity(const Field2D& c, const CellTensors& S) {
    const Grid2D& g = c.grid();
    const Field2D grad = centered_gradient(c);
    const auto gx = grad.component(0);
    const auto gy = grad.component(1);
    FaceField2D w(g);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 1; i < g.nx(); ++i) {
            const std::size_t l = g.index(i - 1, j), r = g.index(i, j);
            const double cx = (c[r] - c[l]) / g.hx();
            const double cy = 0.5 * (gy[l] + gy[r]);
            w.x[w.xi(i, j)] = 0.5 * (S.s11[l] + S.s11[r]) * cx + 0.5 * (S.s12[l] + S.s12[r]) * cy;
        }
    for (std::size_t j = 1; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t b = g.index(i, j - 1), t = g.index(i, j);
            const double cy = (c[t] - c[b]) / g.hy();
            const double cx = 0.5 * (gx[b] + gx[t]);
            w.y[w.yi(i, j)] = 0.5 * (S.s21[b] + S.s21[t]) * cx + 0.5 * (S.s22[b] + S.s22[t]) * cy;
        }
    return w;
}

inline FaceField2D add(FaceField2D a, const FaceField2D& b) {
    for (std::size_t k = 0; k < a.x.size(); ++k) a.x[k] += b.x[k];
    for (std::size_t k = 0; k < a.y.size(); ++k) a.y[k] += b.y[k];
    return a;
}

inline double cfl_dt2d(const State2D& s, const ModelParams2D& params, double cap = 0.0) {
    const double limit = cap > 0.0 ? cap : params.default_dt_cap();
    const FaceField2D w = add(chemotaxis_velocity(s.c, assemble_sensitivity(params.sensitivity, s.n)), s.u);
    const double rate = std::max(max_outflow_rate(w), detail::convective_rate(s.u, params.fluid.kappa));
    return std::min(limit, 1.0 / (rate + std::numeric_limits<double>::min()));
}

/// Solves (eps/dt + 1 - Lap_h + div_upwind(. u)) c+ = (eps/dt) c + n.
inline Field2D signal_update(const Field2D& c, const Field2D& n, const FaceField2D& u, double eps, double dt,
                             const SolverControl& ctl = {}) {
    const Grid2D& g = c.grid();
    const double relax = eps / dt;
    std::vector<double> rhs(g.cell_count());
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = relax * c[k] + n[k];
    Field2D out = c;
    NeumannOperator2D op{g, relax + 1.0, 1.0, {}, is_zero(u) ? nullptr : &u};
    solve_neumann(op, rhs, out.values(), ctl);
    return out;
}

/// One step: fluid (implicit viscosity, explicit convection and buoyancy,
/// projection), signal (implicit, upwind transport by the new velocity
/// treated implicitly), density (implicit diffusion, explicit upwind flux of
/// n (u + S_eta grad c), split source), then the signal again with the new
/// density.
inline State2D step2d(const State2D& s, const ModelParams2D& params, double dt, const SolverControl& ctl = {}) {
    if (!(dt > 0.0)) throw StepSizeError("step size must be positive", 0.0);
    const Grid2D& g = s.n.grid();
    const std::size_t cells = g.cell_count();

    const double conv_rate = detail::convective_rate(s.u, params.fluid.kappa);
    if (dt * conv_rate > 1.0 + 1e-12) throw StepSizeError("convective CFL violated", 1.0 / conv_rate);

    // (1) fluid
    FaceField2D u = s.u;
    Field2D p = s.p;
    const bool has_phi = params.fluid.phi.kind != PotentialSpec::Kind::Zero;
    if (!is_zero(s.u) || has_phi) {
        if (!is_zero(s.u)) {
            FaceField2D rhs = s.u;
            for (double& v : rhs.x) v /= dt;
            for (double& v : rhs.y) v /= dt;
            if (params.fluid.kappa != 0.0) {
                const FaceField2D conv = detail::convection(s.u);
                for (std::size_t k = 0; k < rhs.x.size(); ++k) rhs.x[k] -= params.fluid.kappa * conv.x[k];
                for (std::size_t k = 0; k < rhs.y.size(); ++k) rhs.y[k] -= params.fluid.kappa * conv.y[k];
            }
            conjugate_gradient(detail::ViscousX{g, 1.0 / dt}, rhs.x, u.x, ctl.rel_tol, ctl.cap(u.x.size()));
            conjugate_gradient(detail::ViscousY{g, 1.0 / dt}, rhs.y, u.y, ctl.rel_tol, ctl.cap(u.y.size()));
        }
        if (has_phi) {
            const Field2D phi = Field2D::sample(g, [&](double x, double y) { return params.fluid.phi(x, y); });
            const FaceField2D force = detail::buoyancy(s.n, phi);
            for (std::size_t k = 0; k < u.x.size(); ++k) u.x[k] += dt * force.x[k];
            for (std::size_t k = 0; k < u.y.size(); ++k) u.y[k] += dt * force.y[k];
        }
        project(u, p, dt, ctl);
    }

    // (2) signal
    const Field2D c = signal_update(s.c, s.n, u, params.eps, dt, ctl);

    // (3) density
    const CellTensors S = assemble_sensitivity(params.sensitivity, s.n);
    const FaceField2D w = add(chemotaxis_velocity(c, S), u);
    const double rate = max_outflow_rate(w);
    if (dt * rate > 1.0 + 1e-12)
        throw StepSizeError("chemotactic CFL violated: dt = " + std::to_string(dt) + " exceeds " +
                                std::to_string(1.0 / rate),
                            1.0 / rate);
    std::vector<double> flux(cells), rhs(cells), absorb(cells, 0.0);
    upwind_divergence_into(w, s.n.values(), flux);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            const double nk = s.n[k];
            double gain = 0.0;
            switch (params.source.mode) {
            case SourceSpec::Mode::Zero: break;
            case SourceSpec::Mode::Logistic:
                gain = std::max(params.source.a, 0.0) * nk;
                absorb[k] = params.source.b * nk + std::max(-params.source.a, 0.0);
                break;
            case SourceSpec::Mode::CustomBounded: {
                const double f = params.source(g.center_x(i), g.center_y(j), nk, s.c[k]);
                if (f >= 0.0) gain = f;
                else if (nk > 0.0) absorb[k] = -f / nk;
                break;
            }
            }
            rhs[k] = nk / dt - flux[k] + gain;
        }
    Field2D n = s.n;
    NeumannOperator2D op{g, 1.0 / dt, params.D, absorb};
    solve_neumann(op, rhs, n.values(), ctl);
    // Shift by a constant so that the residual has zero sum: the discrete
    // mass balance then holds to roundoff regardless of the CG tolerance.
    {
        std::vector<double> an(cells);
        op(n.values(), an);
        double rsum = 0.0, dsum = 0.0;
        for (std::size_t k = 0; k < cells; ++k) {
            rsum += rhs[k] - an[k];
            dsum += 1.0 / dt + absorb[k];
        }
        const double shift = rsum / dsum;
        for (double& v : n.values()) v += shift;
    }
    Field2D c_next = signal_update(s.c, n, u, params.eps, dt, ctl);
    return State2D{s.t + dt, std::move(n), std::move(c_next), std::move(u), std::move(p)};
}

inline MonitorRecord measure(const State2D& s, double dt, const MonitorOptions& opt) {
    const Field2D uc = cell_velocity(s.u);
    return measure<Grid2D>(s.t, dt, s.n, s.c, &uc, opt);
}

inline Trajectory2D run2d(const State2D& initial, const ModelParams2D& params, double T, const DtPolicy& policy,
                          std::span<const double> snapshot_times, const MonitorOptions& monitors = {},
                          const SolverControl& ctl = {}) {
    params.validate();
    const double cap = policy.cap > 0.0 ? policy.cap : params.default_dt_cap();
    return integrate(
        initial, T, policy, snapshot_times, [&](const State2D& s, double dt) { return step2d(s, params, dt, ctl); },
        [&](const State2D& s) { return cfl_dt2d(s, params, cap); },
        [&](const State2D& s, double dt) { return measure(s, dt, monitors); });
}

// ---------------------------------------------------------------------------
// Exponent condition and the small-data experiment
// ---------------------------------------------------------------------------

struct ExponentCheck {
    bool ok = false;
    std::string reason;
};

/// lambda in (2, inf], q > N, r > max(2, N) and 1/lambda + N/(2q) < 1/2.
inline ExponentCheck validate_exponents(double lambda, double q, double r, int N) {
    if (N < 1) return {false, "dimension must be at least 1"};
    if (!(lambda > 2.0)) return {false, "lambda must lie in (2, inf]"};
    if (!(q > N)) return {false, "q must exceed N"};
    if (!(r > std::max(2.0, static_cast<double>(N)))) return {false, "r must exceed max(2, N)"};
    const double inv_lambda = std::isinf(lambda) ? 0.0 : 1.0 / lambda;
    const double lhs = inv_lambda + N / (2.0 * q);
    if (!(lhs < 0.5)) return {false, "1/lambda + N/(2q) = " + std::to_string(lhs) + " is not below 1/2"};
    return {true, ""};
}

struct SmallDataConfig {
    ModelParams2D params;  // source is forced to zero
    double delta = 1e-2;
    double p = 4.0, q = 4.0, r = 4.0;
    std::vector<double> eps_list{1.0, 1e-2};
    double T = 1.0;
    Grid2D grid{64, 64};
    DtPolicy dt = DtPolicy::cfl(0.9);
    double bound_factor = 2.0;
};

struct SmallDataRow {
    double eps = 0.0;
    double n_lp0 = 0.0, gradc_lq0 = 0.0, u_lr0 = 0.0;
    double n_lp_max = 0.0, gradc_lq_max = 0.0, u_lr_max = 0.0;
    std::size_t steps = 0;
    bool bounded = false;
    std::string abort_reason;
};

struct SmallDataReport {
    double delta = 0.0;
    double n_scale = 0.0;  // multiplier of the density family
    double u_scale = 0.0;  // vortex amplitude
    std::vector<SmallDataRow> rows;

    bool all_bounded() const {
        return std::all_of(rows.begin(), rows.end(), [](const SmallDataRow& r) { return r.bounded; });
    }
    bool uniform_verdict() const {
        return std::all_of(rows.begin(), rows.end(), [&](const SmallDataRow& r) { return r.bounded == rows.front().bounded; });
    }
};

/// Initial data n0 = m (1 + cos(pi x) cos(pi y) / 2), c0 = (I - Lap_h)^{-1} n0,
/// u0 = U * vortex, with m and U chosen so that ||n0||_p, ||grad c0||_q and
/// ||u0||_r do not exceed delta (two of them equal to it). delta = 0 gives the
/// near-equilibrium family n0 = c0 = 1e-6, u0 = 0.
inline State2D small_data_initial(const Grid2D& g, double delta, double p, double q, double r, double* n_scale = nullptr,
                                  double* u_scale = nullptr) {
    if (!(delta >= 0.0)) throw ValidationError(Hypothesis::InitialData, "delta must be nonnegative");
    if (delta == 0.0) {
        if (n_scale) *n_scale = 1e-6;
        if (u_scale) *u_scale = 0.0;
        return State2D{0.0, Field2D(g, 1, 1e-6), Field2D(g, 1, 1e-6), FaceField2D(g), Field2D(g)};
    }
    Field2D n = sample_profile(ProfileSpec::cosine(1.0, 0.5, 1.0), g);
    Field2D c = helmholtz_solve(n);
    const double m = delta / std::max(lp_norm(n, p), lp_norm(centered_gradient(c), q));
    n *= m;
    c *= m;
    FaceField2D u = vortex_velocity(g, 1.0);
    const double U = delta / lp_norm(cell_velocity(u), r);
    for (double& v : u.x) v *= U;
    for (double& v : u.y) v *= U;
    if (n_scale) *n_scale = m;
    if (u_scale) *u_scale = U;
    return State2D{0.0, std::move(n), std::move(c), std::move(u), Field2D(g)};
}

inline SmallDataRow small_data_row(const SmallDataConfig& cfg, const State2D& initial, double eps) {
    SmallDataRow row;
    row.eps = eps;
    ModelParams2D params = cfg.params;
    params.eps = eps;
    params.source = SourceSpec::zero();
    MonitorOptions mon;
    mon.p = cfg.p;
    mon.q = cfg.q;
    mon.r = cfg.r;
    try {
        State2D s0 = initial;
        params.validate();
        const auto traj = run2d(s0, params, cfg.T, cfg.dt, std::vector<double>{}, mon);
        const auto& first = traj.monitors.front();
        row.n_lp0 = first.n_lp;
        row.gradc_lq0 = first.gradc_lq;
        row.u_lr0 = first.u_lr;
        for (const auto& m : traj.monitors) {
            row.n_lp_max = std::max(row.n_lp_max, m.n_lp);
            row.gradc_lq_max = std::max(row.gradc_lq_max, m.gradc_lq);
            row.u_lr_max = std::max(row.u_lr_max, m.u_lr);
        }
        row.steps = traj.steps;
        row.abort_reason = traj.abort_reason;
        auto within = [&](double mx, double init) { return mx <= cfg.bound_factor * init + 1e-14; };
        row.bounded = traj.completed() && within(row.n_lp_max, row.n_lp0) && within(row.gradc_lq_max, row.gradc_lq0) &&
                      within(row.u_lr_max, row.u_lr0);
    } catch (const std::exception& e) {
        row.abort_reason = e.what();
        row.bounded = false;
    }
    return row;
}

inline SmallDataReport small_data_experiment(const SmallDataConfig& cfg) {
    for (double e : cfg.eps_list)
        if (!(e > 0.0)) throw ValidationError(Hypothesis::ParameterRange, "small-data sweep needs eps > 0");
    if (!(cfg.bound_factor >= 1.0)) throw ValidationError(Hypothesis::ParameterRange, "bound factor must be >= 1");
    SmallDataReport report;
    report.delta = cfg.delta;
    const State2D initial = small_data_initial(cfg.grid, cfg.delta, cfg.p, cfg.q, cfg.r, &report.n_scale, &report.u_scale);
    for (double eps : cfg.eps_list) report.rows.push_back(small_data_row(cfg, initial, eps));
    return report;
}

}  // namespace fsdl
