#pragma once

// Experiment drivers: eps -> 0 comparisons against the eps = 0 run on the
// same grid and time steps, order estimates, and the small-D quasi-blowup
// probe.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fsdl/ks1d.hpp"
#include "fsdl/ksfluid2d.hpp"
#include "fsdl/parallel.hpp"

namespace fsdl {

struct NormSeries {
    double tau = 0.0;
    double sup_n_C0 = 0.0;       // sup_t ||n_eps - n||_inf
    double sup_c_C0_tail = 0.0;  // sup_{t >= tau} ||c_eps - c||_inf
    double l2_c_H1_tail = 0.0;   // (int_tau^T ||c_eps - c||_{W^{1,2}}^2 dt)^{1/2}
    double sup_u_C0 = 0.0;       // sup_t ||u_eps - u||_inf (2D only)

    friend bool operator==(const NormSeries&, const NormSeries&) = default;
};

namespace detail {

inline double velocity_gap(const State1D&, const State1D&) { return 0.0; }

inline double velocity_gap(const State2D& a, const State2D& b) {
    Field2D d = cell_velocity(a.u);
    d -= cell_velocity(b.u);
    return lp_norm(d, kInf);
}

template <class Grid>
double max_gap(const Field<Grid>& a, const Field<Grid>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

template <class Grid>
double w12_sq(const Field<Grid>& d) {
    const Norms nm = norms(d);
    return nm.l2 * nm.l2 + nm.h1_seminorm * nm.h1_seminorm;
}

}  // namespace detail

/// Discrete convergence norms maximized over the shared snapshots. The tail
/// quantities start at tau; if tau falls between snapshots the c difference
/// is linearly interpolated there.
template <class State>
NormSeries compare_runs(const Trajectory<State>& a, const Trajectory<State>& b, double tau) {
    if (a.snapshots.empty() || a.snapshots.size() != b.snapshots.size())
        throw StructuralError("compare_runs: snapshot sets differ in size");
    const double T = a.snapshots.back().t;
    const double ttol = 1e-9 * std::max(1.0, std::abs(T));
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        const State& x = a.snapshots[k];
        const State& y = b.snapshots[k];
        if (!(x.n.grid() == y.n.grid())) throw StructuralError("compare_runs: grids differ");
        if (std::abs(x.t - y.t) > ttol) throw StructuralError("compare_runs: snapshot times differ");
    }
    if (!(tau >= 0.0) || !(tau < T)) throw ValidationError(Hypothesis::ParameterRange, "tau must satisfy 0 <= tau < T");

    NormSeries out;
    out.tau = tau;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        out.sup_n_C0 = std::max(out.sup_n_C0, detail::max_gap(a.snapshots[k].n, b.snapshots[k].n));
        out.sup_u_C0 = std::max(out.sup_u_C0, detail::velocity_gap(a.snapshots[k], b.snapshots[k]));
    }

    using F = decltype(a.snapshots[0].c);
    std::vector<std::pair<double, F>> tail;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        const double t = a.snapshots[k].t;
        if (t < tau) continue;
        if (tail.empty() && t > tau && k > 0) {
            const double w = (tau - a.snapshots[k - 1].t) / (t - a.snapshots[k - 1].t);
            F d = lerp(a.snapshots[k - 1].c, a.snapshots[k].c, w);
            d -= lerp(b.snapshots[k - 1].c, b.snapshots[k].c, w);
            tail.emplace_back(tau, std::move(d));
        }
        F d = a.snapshots[k].c;
        d -= b.snapshots[k].c;
        tail.emplace_back(t, std::move(d));
    }
    double integral = 0.0;
    for (std::size_t k = 0; k < tail.size(); ++k) {
        out.sup_c_C0_tail = std::max(out.sup_c_C0_tail, lp_norm(tail[k].second, kInf));
        if (k > 0)
            integral += 0.5 * (tail[k].first - tail[k - 1].first) *
                        (detail::w12_sq(tail[k].second) + detail::w12_sq(tail[k - 1].second));
    }
    out.l2_c_H1_tail = std::sqrt(integral);
    return out;
}

/// Least-squares slope of log(errors) against log(params).
inline double estimate_order(const std::vector<double>& params, const std::vector<double>& errors) {
    if (params.size() != errors.size() || params.size() < 3)
        throw ValidationError(Hypothesis::ParameterRange, "order estimate needs at least 3 paired values");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (!(params[k] > 0.0) || !(errors[k] > 0.0))
            throw ValidationError(Hypothesis::ParameterRange, "order estimate needs positive values");
        const double x = std::log(params[k]), y = std::log(errors[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(params.size());
    const double den = m * sxx - sx * sx;
    if (den == 0.0) throw ValidationError(Hypothesis::ParameterRange, "order estimate needs distinct parameters");
    return (m * sxy - sx * sy) / den;
}

// ---------------------------------------------------------------------------
// eps sweep (1D)
// ---------------------------------------------------------------------------

struct SweepRow {
    double param = 0.0;
    NormSeries norms;
    double max_density = 0.0;
    double argmax_x = 0.0;
    double argmax_t = 0.0;
    std::string verdict;
    bool ok = false;
    bool reference = false;
};

struct SweepReport {
    std::string parameter;  // "eps" or "D"
    std::vector<SweepRow> rows;
    std::optional<double> order;
    bool monotone = false;
    std::vector<std::string> summary;
    bool pass = true;
};

struct Sweep1DConfig {
    ModelParams1D params;
    Grid1D grid{256};
    ProfileSpec n0 = ProfileSpec::cosine(1.0, 0.5, 1.0);
    ProfileSpec c0 = ProfileSpec::constant(0.0);
    double T = 0.5;
    DtPolicy dt = DtPolicy::fixed(5e-4);
    std::size_t snapshots = 100;
    MonitorOptions monitors;
    double reference_eps = 0.0;
    std::size_t jobs = 1;
};

namespace detail {

struct Extremum {
    double value = 0.0, x = 0.0, t = 0.0;
    std::size_t cell = 0;
};

inline Extremum density_extremum(const Trajectory1D& tr, const Grid1D& g) {
    Extremum e;
    for (const auto& m : tr.monitors)
        if (m.max_n > e.value) e = {m.max_n, g.center(m.argmax_n), m.t, m.argmax_n};
    return e;
}

inline Trajectory1D run_sweep_member(const Sweep1DConfig& cfg, double eps) {
    ModelParams1D p = cfg.params;
    p.eps = eps;
    p.validate();
    State1D s0 = init_state(cfg.n0, cfg.c0, p, cfg.grid);
    return run(s0, p, cfg.T, cfg.dt, uniform_snapshots(cfg.T, cfg.snapshots), cfg.monitors);
}

}  // namespace detail

inline SweepReport eps_sweep(const Sweep1DConfig& cfg, const std::vector<double>& eps_list, double tau) {
    if (eps_list.empty()) throw ValidationError(Hypothesis::ParameterRange, "eps list must not be empty");
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0.0)) throw ValidationError(Hypothesis::ParameterRange, "sweep eps values must be > 0");
        if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
            throw ValidationError(Hypothesis::ParameterRange, "eps list must be strictly decreasing");
    }
    if (!(tau >= 0.0 && tau < cfg.T)) throw ValidationError(Hypothesis::ParameterRange, "tau must satisfy 0 <= tau < T");

    std::vector<Trajectory1D> runs(eps_list.size() + 1);
    std::vector<std::string> errors(runs.size());
    parallel_for(runs.size(), cfg.jobs, [&](std::size_t i) {
        try {
            runs[i] = detail::run_sweep_member(cfg, i == 0 ? cfg.reference_eps : eps_list[i - 1]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    SweepReport rep;
    rep.parameter = "eps";
    auto fill_extremum = [&](SweepRow& row, const Trajectory1D& tr) {
        const auto e = detail::density_extremum(tr, cfg.grid);
        row.max_density = e.value;
        row.argmax_x = e.x;
        row.argmax_t = e.t;
    };
    SweepRow ref;
    ref.param = cfg.reference_eps;
    ref.reference = true;
    const bool ref_ok = errors[0].empty() && runs[0].completed();
    if (ref_ok) {
        fill_extremum(ref, runs[0]);
        ref.ok = true;
        ref.verdict = "reference";
    } else {
        ref.verdict = "aborted: " + (errors[0].empty() ? runs[0].abort_reason : errors[0]);
    }
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        SweepRow row;
        row.param = eps_list[k];
        const auto& tr = runs[k + 1];
        if (!errors[k + 1].empty() || !tr.completed()) {
            row.verdict = "aborted: " + (errors[k + 1].empty() ? tr.abort_reason : errors[k + 1]);
        } else if (!ref_ok) {
            fill_extremum(row, tr);
            row.verdict = "no reference";
        } else {
            fill_extremum(row, tr);
            row.norms = compare_runs(tr, runs[0], tau);
            row.ok = true;
            row.verdict = "ok";
        }
        rep.rows.push_back(std::move(row));
    }
    rep.rows.push_back(std::move(ref));

    std::vector<double> ps, es;
    rep.monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.rows) {
        if (r.reference) continue;
        if (!r.ok) {
            rep.pass = false;
            rep.monotone = false;
            continue;
        }
        if (!(r.norms.sup_n_C0 < prev)) rep.monotone = false;
        prev = r.norms.sup_n_C0;
        ps.push_back(r.param);
        es.push_back(r.norms.sup_n_C0);
    }
    if (!ref_ok) rep.pass = false;
    if (ps.size() >= 3 && std::all_of(es.begin(), es.end(), [](double e) { return e > 0.0; }))
        rep.order = estimate_order(ps, es);
    rep.summary.push_back("eps sweep: " + std::to_string(ps.size()) + " of " + std::to_string(eps_list.size()) +
                          " rows succeeded");
    rep.summary.push_back(std::string("sup_n_C0 strictly decreasing: ") + (rep.monotone ? "yes" : "no"));
    if (rep.order) rep.summary.push_back("estimated order in eps: " + std::to_string(*rep.order));
    return rep;
}

/// sup over snapshots of || n_h - R n_{h/2} ||_inf for the eps = 0 run, where
/// the fine run halves both h and dt and R averages cell pairs.
inline double self_convergence_error(const Sweep1DConfig& cfg) {
    if (cfg.dt.kind != DtPolicy::Kind::Fixed)
        throw ValidationError(Hypothesis::ParameterRange, "self-convergence needs a fixed dt");
    Sweep1DConfig fine = cfg;
    fine.grid = Grid1D(2 * cfg.grid.n_cells());
    fine.dt = DtPolicy::fixed(cfg.dt.value / 2.0);
    const auto a = detail::run_sweep_member(cfg, 0.0);
    const auto b = detail::run_sweep_member(fine, 0.0);
    if (!a.completed() || !b.completed()) throw SolverError("self-convergence run aborted", 0.0);
    double err = 0.0;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
        for (std::size_t i = 0; i < cfg.grid.n_cells(); ++i) {
            const double r = 0.5 * (b.snapshots[k].n[2 * i] + b.snapshots[k].n[2 * i + 1]);
            err = std::max(err, std::abs(a.snapshots[k].n[i] - r));
        }
    return err;
}

// ---------------------------------------------------------------------------
// Quasi-blowup
// ---------------------------------------------------------------------------

struct QuasiBlowupConfig {
    double a = 1.0;
    double b = 0.5;
    double chi = 1.0;
    double M = 0.0;  // 0 selects 5 * max(n0)
    std::vector<double> D_list{1.0, 0.1, 0.01, 0.001};
    std::vector<double> eps_list{1e-3};
    double T = 2.0;
    Grid1D grid{2048};
    ProfileSpec n0 = ProfileSpec::bump(0.5, 0.25, 8.0);
    ProfileSpec c0 = ProfileSpec::constant(0.0);
    DtPolicy dt = DtPolicy::cfl(0.9);
    std::size_t jobs = 1;

    void validate() const {
        if (!(b >= 0.0 && b < 1.0)) throw ValidationError(Hypothesis::QuasiBlowup, "b must satisfy b in [0,1)");
        if (!std::isfinite(a)) throw ValidationError(Hypothesis::QuasiBlowup, "a must be a finite real");
        if (!(M >= 0.0) || !std::isfinite(M)) throw ValidationError(Hypothesis::QuasiBlowup, "M must be positive");
        if (D_list.empty()) throw ValidationError(Hypothesis::QuasiBlowup, "D list must not be empty");
        for (std::size_t k = 0; k < D_list.size(); ++k) {
            if (!(D_list[k] > 0.0)) throw ValidationError(Hypothesis::ParameterRange, "D must satisfy D > 0");
            if (k > 0 && !(D_list[k] < D_list[k - 1]))
                throw ValidationError(Hypothesis::QuasiBlowup, "D list must be strictly decreasing");
        }
        for (double e : eps_list)
            if (!(e > 0.0)) throw ValidationError(Hypothesis::QuasiBlowup, "probe eps values must be > 0");
        if (!(T > 0.0)) throw ValidationError(Hypothesis::ParameterRange, "T must be positive");
        dt.validate();
    }
};

inline constexpr const char* kTrackingExceeded = "density exceeded tracking range";

struct QuasiBlowupProbe {
    double eps = 0.0;
    double value = 0.0;  // n_eps(x0, t0)
    bool pass = false;
    bool tracking_exceeded = false;
    std::string verdict;
};

struct QuasiBlowupRow {
    double D = 0.0;
    double max_density = 0.0;
    double argmax_x = 0.0;
    double argmax_t = 0.0;
    std::size_t argmax_cell = 0;
    bool triggered = false;  // max_density >= 2M
    bool tracking_exceeded = false;
    std::vector<QuasiBlowupProbe> probes;
};

struct QuasiBlowupReport {
    double M = 0.0;
    double max_n0 = 0.0;
    std::vector<QuasiBlowupRow> rows;

    /// Recorded maxima nondecreasing as D decreases (rows are in D order).
    bool max_nondecreasing() const {
        for (std::size_t k = 1; k < rows.size(); ++k)
            if (rows[k].max_density < rows[k - 1].max_density) return false;
        return true;
    }

    const QuasiBlowupRow* smallest_triggered() const {
        for (auto it = rows.rbegin(); it != rows.rend(); ++it)
            if (it->triggered) return &*it;
        return nullptr;
    }

    std::vector<std::string> summary() const {
        std::vector<std::string> out;
        out.push_back("M = " + std::to_string(M) + ", max n0 = " + std::to_string(max_n0));
        for (const auto& r : rows) {
            std::string line = "D = " + std::to_string(r.D) + ": max n = " + std::to_string(r.max_density) +
                               (r.triggered ? " (>= 2M)" : " (< 2M)");
            if (r.tracking_exceeded) line += std::string(", ") + kTrackingExceeded;
            for (const auto& p : r.probes) line += "; eps " + std::to_string(p.eps) + ": " + p.verdict;
            out.push_back(line);
        }
        if (!smallest_triggered()) out.push_back("no D reached 2M");
        return out;
    }

    SweepReport as_sweep_report() const {
        SweepReport rep;
        rep.parameter = "D";
        rep.monotone = max_nondecreasing();
        for (const auto& r : rows) {
            SweepRow row;
            row.param = r.D;
            row.max_density = r.max_density;
            row.argmax_x = r.argmax_x;
            row.argmax_t = r.argmax_t;
            row.ok = true;
            if (r.tracking_exceeded) row.verdict = kTrackingExceeded;
            else if (!r.triggered) row.verdict = "below 2M";
            else {
                bool all = true;
                for (const auto& p : r.probes) all = all && p.pass;
                row.verdict = all ? "triggered, probes >= M" : "triggered, probe below M";
                row.ok = all;
            }
            rep.pass = rep.pass && row.ok;
            rep.rows.push_back(std::move(row));
        }
        rep.summary = summary();
        return rep;
    }
};

inline QuasiBlowupRow quasi_blowup_row(const QuasiBlowupConfig& cfg, double D, double M) {
    QuasiBlowupRow row;
    row.D = D;
    ModelParams1D p{0.0, D, cfg.a, cfg.b, cfg.chi};
    const State1D s0 = init_state(cfg.n0, cfg.c0, p, cfg.grid);
    const auto ref = run(s0, p, cfg.T, cfg.dt, std::vector<double>{});
    const auto e = detail::density_extremum(ref, cfg.grid);
    row.max_density = e.value;
    row.argmax_x = e.x;
    row.argmax_t = e.t;
    row.argmax_cell = e.cell;
    row.tracking_exceeded = !ref.completed();
    row.triggered = e.value >= 2.0 * M;
    if (!row.triggered || row.tracking_exceeded) return row;
    for (double eps : cfg.eps_list) {
        QuasiBlowupProbe probe;
        probe.eps = eps;
        ModelParams1D pe = p;
        pe.eps = eps;
        const State1D se = init_state(cfg.n0, cfg.c0, pe, cfg.grid);
        if (e.t == 0.0) {
            probe.value = se.n[e.cell];
        } else {
            const auto tr = run(se, pe, e.t, cfg.dt, std::vector<double>{});
            if (!tr.completed() || !tr.final_state) {
                probe.tracking_exceeded = true;
                probe.verdict = kTrackingExceeded;
                row.probes.push_back(std::move(probe));
                continue;
            }
            probe.value = tr.final_state->n[e.cell];
        }
        probe.pass = probe.value >= M;
        probe.verdict = (probe.pass ? "n_eps(x0,t0) >= M (" : "n_eps(x0,t0) < M (") + std::to_string(probe.value) + ")";
        row.probes.push_back(std::move(probe));
    }
    return row;
}

inline QuasiBlowupReport quasi_blowup_experiment(const QuasiBlowupConfig& cfg) {
    cfg.validate();
    QuasiBlowupReport rep;
    const ModelParams1D probe{0.0, cfg.D_list.front(), cfg.a, cfg.b, cfg.chi};
    rep.max_n0 = init_state(cfg.n0, cfg.c0, probe, cfg.grid).n.max();
    rep.M = cfg.M > 0.0 ? cfg.M : 5.0 * rep.max_n0;
    rep.rows.resize(cfg.D_list.size());
    parallel_for(cfg.D_list.size(), cfg.jobs,
                 [&](std::size_t i) { rep.rows[i] = quasi_blowup_row(cfg, cfg.D_list[i], rep.M); });
    return rep;
}

}  // namespace fsdl
