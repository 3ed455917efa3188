#pragma once

// IMEX integrator for the 1D logistic Keller-Segel system
//   n_t     = D n_xx - chi (n c_x)_x + a n - b n^2
//   eps c_t = c_xx - c + n
// on (0,1) with homogeneous Neumann data. eps = 0 is handled by the same
// step: the signal update then reduces to the Helmholtz solve.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fsdl/core_num.hpp"
#include "fsdl/monitors.hpp"
#include "fsdl/profiles.hpp"
#include "fsdl/trajectory.hpp"

namespace fsdl {

struct ModelParams1D {
    double eps = 0.0;
    double D = 1.0;
    double a = 0.0;
    double b = 0.0;
    double chi = 1.0;

    void validate() const {
        if (!(eps >= 0.0) || !std::isfinite(eps))
            throw ValidationError(Hypothesis::ParameterRange, "eps must satisfy eps >= 0");
        if (!(D > 0.0) || !std::isfinite(D)) throw ValidationError(Hypothesis::ParameterRange, "D must satisfy D > 0");
        if (!std::isfinite(a)) throw ValidationError(Hypothesis::ParameterRange, "a must be a finite real");
        if (!(b >= 0.0) || !std::isfinite(b)) throw ValidationError(Hypothesis::ParameterRange, "b must satisfy b >= 0");
        if (!std::isfinite(chi)) throw ValidationError(Hypothesis::Sensitivity, "chi must be finite");
    }

    /// Default absolute step cap 1e-2 * min(1, 1/D).
    double default_dt_cap() const { return 1e-2 * std::min(1.0, 1.0 / D); }

    friend bool operator==(const ModelParams1D&, const ModelParams1D&) = default;
};

struct State1D {
    double t = 0.0;
    Field1D n;
    Field1D c;
};

inline State1D interpolate(const State1D& a, const State1D& b, double t) {
    const double w = (t - a.t) / (b.t - a.t);
    return State1D{t, lerp(a.n, b.n, w), lerp(a.c, b.c, w)};
}

inline bool finite_state(const State1D& s) { return s.n.all_finite() && s.c.all_finite(); }

using Trajectory1D = Trajectory<State1D>;

namespace detail {
inline void require_initial_data(const Field1D& n0, const Field1D& c0) {
    if (n0.min() < 0.0) throw ValidationError(Hypothesis::InitialData, "n0 must be nonnegative");
    if (!(n0.max() > 0.0)) throw ValidationError(Hypothesis::InitialData, "n0 must not vanish identically");
    if (c0.min() < 0.0) throw ValidationError(Hypothesis::InitialData, "c0 must be nonnegative");
    if (!n0.all_finite() || !c0.all_finite()) throw ValidationError(Hypothesis::InitialData, "initial data must be finite");
}
}  // namespace detail

/// Builds the initial state from sampled profiles. With eps = 0 the signal is
/// slaved to the density and c0 is ignored.
inline State1D init_state(const Field1D& n0, const Field1D& c0, const ModelParams1D& params) {
    params.validate();
    if (!(n0.grid() == c0.grid())) throw StructuralError("init_state: grids differ");
    detail::require_initial_data(n0, c0);
    if (params.eps == 0.0) return State1D{0.0, n0, helmholtz_solve(n0)};
    return State1D{0.0, n0, c0};
}

inline State1D init_state(const ProfileSpec& n0_spec, const ProfileSpec& c0_spec, const ModelParams1D& params,
                          const Grid1D& grid) {
    if (n0_spec.kind == ProfileSpec::Kind::Helmholtz)
        throw ValidationError(Hypothesis::InitialData, "the helmholtz profile applies to c0 only");
    Field1D n0 = sample_profile(n0_spec, grid);
    if (params.eps == 0.0) {
        detail::require_initial_data(n0, Field1D(grid));
        return init_state(n0, Field1D(grid), params);
    }
    return init_state(n0, sample_profile(c0_spec, grid, &n0), params);
}

/// Chemotactic face velocity chi * c_x (two-point, zero at the boundary).
inline FaceField1D chemotaxis_velocity(const Field1D& c, double chi) {
    FaceField1D v = face_gradient(c);
    for (double& x : v.v) x *= chi;
    return v;
}

/// Implicit signal update: solves (eps/dt + 1 - Lap_h) c+ = (eps/dt) c + n.
inline Field1D signal_update(const Field1D& c, const Field1D& n, double eps, double dt) {
    const Grid1D& g = c.grid();
    const double relax = eps / dt;
    std::vector<double> rhs(g.n_cells());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = relax * c[i] + n[i];
    return Field1D(g, tridiag_solve(neumann_system(g, relax + 1.0, 1.0), rhs));
}

/// Largest positivity-preserving step for the explicit upwind flux,
/// 1 / max_i(outflow rate of cell i), capped by `cap` (0 = model default).
/// The flux uses the signal predicted for the step, which depends on dt when
/// eps > 0, so the bound is tightened by a short fixed-point iteration.
inline double cfl_dt(const State1D& state, const ModelParams1D& params, double cap = 0.0) {
    const double limit = cap > 0.0 ? cap : params.default_dt_cap();
    auto admissible = [&](const Field1D& c) {
        return 1.0 / (max_outflow_rate(chemotaxis_velocity(c, params.chi)) + std::numeric_limits<double>::min());
    };
    double dt = std::min(limit, admissible(state.c));
    for (int k = 0; k < 8; ++k) {
        const double next = std::min(dt, admissible(signal_update(state.c, state.n, params.eps, dt)));
        if (next >= dt) break;
        dt = next;
    }
    return dt;
}

/// One IMEX step: signal from the current density, chemotaxis velocity from
/// that signal, density with implicit diffusion, explicit upwind flux,
/// explicit growth a+ n and lagged-implicit absorption (b n + a-) n+. The
/// signal is then re-solved with the new density, so eps = 0 states satisfy
/// the elliptic relation exactly.
inline State1D step(const State1D& state, const ModelParams1D& params, double dt) {
    if (!(dt > 0.0)) throw StepSizeError("step size must be positive", 0.0);
    const Grid1D& g = state.n.grid();
    const std::size_t n = g.n_cells();

    const Field1D c_pred = signal_update(state.c, state.n, params.eps, dt);
    const FaceField1D v = chemotaxis_velocity(c_pred, params.chi);
    const double rate = max_outflow_rate(v);
    if (dt * rate > 1.0 + 1e-12)
        throw StepSizeError("chemotactic CFL violated: dt = " + std::to_string(dt) +
                                " exceeds " + std::to_string(1.0 / rate),
                            1.0 / rate);

    const double growth = std::max(params.a, 0.0);
    const double decay = std::max(-params.a, 0.0);
    std::vector<double> flux_div(n), rhs_n(n), absorb(n);
    upwind_divergence_into(v, state.n.values(), flux_div);
    for (std::size_t i = 0; i < n; ++i) {
        rhs_n[i] = state.n[i] / dt - flux_div[i] + growth * state.n[i];
        absorb[i] = params.b * state.n[i] + decay;
    }
    Field1D n_next(g, tridiag_solve(neumann_system(g, 1.0 / dt, params.D, absorb), rhs_n));
    Field1D c_next = signal_update(state.c, n_next, params.eps, dt);
    return State1D{state.t + dt, std::move(n_next), std::move(c_next)};
}

/// Residual (I - Lap_h) c - n; vanishes for eps = 0 states.
inline Field1D elliptic_residual(const State1D& s) {
    Field1D r = s.c - laplacian_neumann(s.c);
    r -= s.n;
    return r;
}

inline MonitorRecord measure(const State1D& s, double dt, const MonitorOptions& opt) {
    return measure<Grid1D>(s.t, dt, s.n, s.c, nullptr, opt);
}

inline Trajectory1D run(const State1D& initial, const ModelParams1D& params, double T, const DtPolicy& policy,
                        std::span<const double> snapshot_times, const MonitorOptions& monitors = {}) {
    params.validate();
    const double cap = policy.cap > 0.0 ? policy.cap : params.default_dt_cap();
    return integrate(
        initial, T, policy, snapshot_times, [&](const State1D& s, double dt) { return step(s, params, dt); },
        [&](const State1D& s) { return cfl_dt(s, params, cap); },
        [&](const State1D& s, double dt) { return measure(s, dt, monitors); });
}

inline Trajectory1D run(const ModelParams1D& params, const Grid1D& grid, const ProfileSpec& n0, const ProfileSpec& c0,
                        double T, const DtPolicy& policy, std::span<const double> snapshot_times,
                        const MonitorOptions& monitors = {}) {
    return run(init_state(n0, c0, params, grid), params, T, policy, snapshot_times, monitors);
}

}  // namespace fsdl
