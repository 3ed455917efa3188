#pragma once

// Reference runs whose results are frozen under tests/data. The generator
// and the regression tests both build them from here.

#include <numbers>

#include "fsdl/fsdl.hpp"

namespace golden {

/// Standard 1D chemotaxis test: n0 = 1 + cos(pi x)/2, c0 = 0, D = 1,
/// a = b = 0, chi = 5, T = 0.5 on 256 cells with dt = 5e-4.
inline fsdl::Sweep1DConfig standard_1d() {
    fsdl::Sweep1DConfig cfg;
    cfg.params = fsdl::ModelParams1D{0.0, 1.0, 0.0, 0.0, 5.0};
    cfg.grid = fsdl::Grid1D(256);
    cfg.n0 = fsdl::ProfileSpec::cosine(1.0, 0.5, 1.0);
    cfg.c0 = fsdl::ProfileSpec::constant(0.0);
    cfg.T = 0.5;
    cfg.dt = fsdl::DtPolicy::fixed(5e-4);
    cfg.snapshots = 100;
    return cfg;
}

inline fsdl::Trajectory1D standard_1d_run(double eps, double dt = 5e-4) {
    auto cfg = standard_1d();
    cfg.params.eps = eps;
    const auto s0 = fsdl::init_state(cfg.n0, cfg.c0, cfg.params, cfg.grid);
    return fsdl::run(s0, cfg.params, cfg.T, fsdl::DtPolicy::fixed(dt), fsdl::uniform_snapshots(cfg.T, cfg.snapshots),
                     cfg.monitors);
}

/// Logistic chemotaxis run (a = 1, b = 1) whose monitor series is frozen.
inline fsdl::Trajectory1D logistic_1d_run() {
    const fsdl::ModelParams1D p{0.1, 1.0, 1.0, 1.0, 5.0};
    const fsdl::Grid1D g(256);
    const auto s0 = fsdl::init_state(fsdl::ProfileSpec::cosine(1.0, 0.5, 1.0), fsdl::ProfileSpec::constant(0.0), p, g);
    return fsdl::run(s0, p, 0.5, fsdl::DtPolicy::fixed(5e-4), fsdl::uniform_snapshots(0.5, 10));
}

/// 2D rotational-sensitivity run on 32^2 with a vortex and no source.
inline fsdl::Trajectory2D rotation_run(double theta) {
    fsdl::ModelParams2D p;
    p.eps = 0.1;
    p.sensitivity = fsdl::SensitivitySpec::rotation(2.0, theta);
    p.fluid.kappa = 1.0;
    const fsdl::Grid2D g(32, 32);
    const auto n0 = fsdl::sample_profile(fsdl::ProfileSpec::bump(0.3, 0.3, 1.0), g);
    const auto s0 = fsdl::init_state2d(n0, fsdl::helmholtz_solve(n0), fsdl::vortex_velocity(g, 0.5), p);
    return fsdl::run2d(s0, p, 0.2, fsdl::DtPolicy::fixed(2e-3), fsdl::uniform_snapshots(0.2, 4));
}

}  // namespace golden
