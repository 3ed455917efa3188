#pragma once

// Dispatch of a validated ExperimentConfig to the owning module, with
// outputs written into one directory.

#include <filesystem>
#include <ostream>
#include <string>

#include "fsdl/config.hpp"
#include "fsdl/io.hpp"
#include "fsdl/limit_lab.hpp"
#include "fsdl/version.hpp"

namespace fsdl {

enum ExitCode : int { kExitOk = 0, kExitVerdict = 1, kExitConfig = 2, kExitSolver = 3, kExitIo = 4 };

namespace detail {

inline std::string snapshot_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%04zu.txt", k);
    return buf;
}

template <class State>
void write_trajectory(const Trajectory<State>& tr, const std::filesystem::path& out) {
    atomic_write(out / "monitors.csv", monitors_csv(tr.monitors));
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k)
        atomic_write(out / snapshot_name(k), format_snapshot(snapshot_data(tr.snapshots[k])));
}

struct Summary {
    std::vector<std::string> lines;
    void add(const std::string& s) { lines.push_back(s); }
    std::string text() const {
        std::string t;
        for (const auto& l : lines) t += l + "\n";
        return t;
    }
};

inline int run_simulate_1d(const ExperimentConfig& cfg, const std::filesystem::path& out, Summary& sum) {
    const ModelParams1D p = cfg.model1d();
    const auto tr = run(p, cfg.grid1d(), cfg.n0, cfg.c0, cfg.T, cfg.dt, uniform_snapshots(cfg.T, cfg.snapshots),
                        cfg.monitors);
    write_trajectory(tr, out);
    sum.add("steps: " + std::to_string(tr.steps));
    int code = kExitOk;
    if (!tr.completed()) {
        sum.add("aborted: " + tr.abort_reason);
        code = kExitSolver;
    }
    const auto mass = check_mass_growth(tr.monitors, std::max(cfg.a, 0.0));
    sum.add(std::string("mass growth bound: ") + (mass.pass ? "pass" : "FAIL") + " (worst slack " +
            format_double(mass.slack) + ")");
    bool ok = mass.pass;
    if (cfg.monitors.enabled) {
        const auto ls = check_signal_ls_bound(tr.monitors, cfg.monitors.s);
        sum.add(std::string("signal L^s bound: ") + (ls.pass ? "pass" : "FAIL") + " (worst relative slack " +
                format_double(ls.slack) + ")");
        ok = ok && ls.pass;
    }
    if (cfg.eps == 0.0) {
        double worst = 0.0;
        for (const auto& s : tr.snapshots) worst = std::max(worst, lp_norm(elliptic_residual(s), kInf));
        const bool pass = worst <= 1e-9;
        sum.add(std::string("elliptic relation: ") + (pass ? "pass" : "FAIL") + " (max residual " + format_double(worst) + ")");
        ok = ok && pass;
    }
    if (code == kExitOk && !ok) code = kExitVerdict;
    return code;
}

inline int run_sweep_eps(const ExperimentConfig& cfg, std::size_t jobs, const std::filesystem::path& out, Summary& sum) {
    Sweep1DConfig sc;
    sc.params = cfg.model1d();
    sc.grid = cfg.grid1d();
    sc.n0 = cfg.n0;
    sc.c0 = cfg.c0;
    sc.T = cfg.T;
    sc.dt = cfg.dt;
    sc.snapshots = std::max<std::size_t>(cfg.snapshots, 1);
    sc.monitors = cfg.monitors;
    sc.jobs = jobs;
    const auto rep = eps_sweep(sc, cfg.eps_list, cfg.tau);
    atomic_write(out / "sweep.csv", sweep_csv(rep));
    for (const auto& l : rep.summary) sum.add(l);
    return rep.pass ? kExitOk : kExitSolver;
}

inline int run_quasi_blowup(const ExperimentConfig& cfg, std::size_t jobs, const std::filesystem::path& out, Summary& sum) {
    QuasiBlowupConfig qc;
    qc.a = cfg.a;
    qc.b = cfg.b;
    qc.chi = cfg.chi;
    qc.M = cfg.M;
    qc.D_list = cfg.D_list;
    qc.eps_list = cfg.eps_list;
    qc.T = cfg.T;
    qc.grid = cfg.grid1d();
    qc.n0 = cfg.n0;
    qc.c0 = cfg.c0;
    qc.dt = cfg.dt;
    qc.jobs = jobs;
    const auto rep = quasi_blowup_experiment(qc);
    const auto sweep = rep.as_sweep_report();
    atomic_write(out / "sweep.csv", sweep_csv(sweep));
    atomic_write(out / "probes.csv", quasi_blowup_probes_csv(rep));
    for (const auto& l : sweep.summary) sum.add(l);
    sum.add(std::string("max density nondecreasing as D decreases: ") + (rep.max_nondecreasing() ? "yes" : "no"));
    return sweep.pass ? kExitOk : kExitVerdict;
}

inline State2D initial_state_2d(const ExperimentConfig& cfg, const ModelParams2D& p) {
    const Grid2D g = cfg.grid2d();
    const Field2D n0 = sample_profile(cfg.n0, g);
    const Field2D c0 = cfg.c0.kind == ProfileSpec::Kind::Helmholtz ? helmholtz_solve(n0) : sample_profile(cfg.c0, g);
    return init_state2d(n0, c0, vortex_velocity(g, cfg.u0_amplitude), p);
}

inline int run_simulate_2d(const ExperimentConfig& cfg, const std::filesystem::path& out, Summary& sum) {
    const ModelParams2D p = cfg.model2d();
    const State2D s0 = initial_state_2d(cfg, p);
    const auto tr = run2d(s0, p, cfg.T, cfg.dt, uniform_snapshots(cfg.T, cfg.snapshots), cfg.monitors);
    write_trajectory(tr, out);
    sum.add("steps: " + std::to_string(tr.steps));
    int code = kExitOk;
    if (!tr.completed()) {
        sum.add("aborted: " + tr.abort_reason);
        code = kExitSolver;
    }
    const double K_f = p.source.mode == SourceSpec::Mode::Zero ? 0.0 : p.source.K_f;
    const auto mass = check_mass_growth(tr.monitors, K_f);
    sum.add(std::string("mass growth bound: ") + (mass.pass ? "pass" : "FAIL") + " (worst slack " +
            format_double(mass.slack) + ")");
    double div = 0.0;
    for (const auto& s : tr.snapshots) div = std::max(div, max_abs_divergence(s.u));
    const bool div_ok = div <= 1e-8;
    sum.add(std::string("discrete divergence: ") + (div_ok ? "pass" : "FAIL") + " (max " + format_double(div) + ")");
    if (code == kExitOk && !(mass.pass && div_ok)) code = kExitVerdict;
    return code;
}

inline int run_small_data(const ExperimentConfig& cfg, const std::filesystem::path& out, Summary& sum) {
    SmallDataConfig sc;
    sc.params = cfg.model2d();
    sc.params.source = SourceSpec::zero();
    sc.delta = cfg.delta;
    sc.p = cfg.sd_p;
    sc.q = cfg.sd_q;
    sc.r = cfg.sd_r;
    sc.eps_list = cfg.eps_list;
    sc.T = cfg.T;
    sc.grid = cfg.grid2d();
    sc.dt = cfg.dt;
    sc.bound_factor = cfg.bound_factor;
    const auto rep = small_data_experiment(sc);
    atomic_write(out / "small_data.csv", small_data_csv(rep));
    sum.add("delta = " + format_double(rep.delta) + ", density scale " + format_double(rep.n_scale) +
            ", vortex amplitude " + format_double(rep.u_scale));
    bool aborted = false;
    for (const auto& r : rep.rows) {
        sum.add("eps " + format_double(r.eps) + ": " + (r.bounded ? "bounded" : "NOT bounded") +
                (r.abort_reason.empty() ? "" : " (" + r.abort_reason + ")"));
        aborted = aborted || !r.abort_reason.empty();
    }
    sum.add(std::string("uniform verdict across eps: ") + (rep.uniform_verdict() ? "yes" : "no"));
    if (aborted) return kExitSolver;
    return rep.all_bounded() ? kExitOk : kExitVerdict;
}

inline int run_check_inequalities(const ExperimentConfig& cfg, const std::filesystem::path& out, Summary& sum) {
    std::string csv = "n_cells,sample,q,lhs,rhs,slack,allowance,verdict\n";
    bool ok = true;
    for (std::size_t n : {cfg.n_cells, 2 * cfg.n_cells}) {
        const auto res = fuzz_interpolation(cfg.fuzz_samples, cfg.fuzz_modes, cfg.fuzz_q, n, cfg.seed);
        for (const auto& s : res.samples)
            csv += std::to_string(n) + "," + std::to_string(s.sample) + "," + format_double(s.q) + "," +
                   format_double(s.check.lhs) + "," + format_double(s.check.rhs) + "," + format_double(s.check.slack) +
                   "," + format_double(s.check.allowance) + "," + (s.check.pass ? "pass" : "fail") + "\n";
        sum.add("n_cells " + std::to_string(n) + ": " + std::to_string(res.failures) + " failures, worst relative slack " +
                format_double(res.worst_relative_slack));
        ok = ok && res.pass();
    }
    atomic_write(out / "fuzz.csv", csv);
    return ok ? kExitOk : kExitVerdict;
}

}  // namespace detail

/// Runs the experiment, writing outputs and summary.txt into `out`, and
/// returns the process exit code. `jobs` = 0 keeps the configured value.
inline int run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log,
                          std::size_t jobs = 0) {
    detail::Summary sum;
    sum.add(std::string("fsdl ") + kVersion + ": " + to_string(cfg.kind));
    int code = kExitOk;
    try {
        validate_config(cfg);
        std::error_code ec;
        std::filesystem::create_directories(out, ec);
        if (ec || !std::filesystem::is_directory(out)) throw IoError("cannot create output directory " + out.string());
        const std::size_t workers = jobs ? jobs : cfg.jobs;
        switch (cfg.kind) {
        case ExperimentKind::Simulate1D: code = detail::run_simulate_1d(cfg, out, sum); break;
        case ExperimentKind::SweepEps: code = detail::run_sweep_eps(cfg, workers, out, sum); break;
        case ExperimentKind::QuasiBlowup: code = detail::run_quasi_blowup(cfg, workers, out, sum); break;
        case ExperimentKind::Simulate2D: code = detail::run_simulate_2d(cfg, out, sum); break;
        case ExperimentKind::SmallData2D: code = detail::run_small_data(cfg, out, sum); break;
        case ExperimentKind::CheckInequalities: code = detail::run_check_inequalities(cfg, out, sum); break;
        }
        sum.add(std::string("status: ") + (code == kExitOk ? "ok" : code == kExitVerdict ? "verdict failure" : "solver abort"));
        atomic_write(out / "summary.txt", sum.text());
    } catch (const IoError& e) {
        sum.add(std::string("I/O error: ") + e.what());
        code = kExitIo;
    } catch (const ValidationError& e) {
        sum.add(std::string("config error: ") + e.what());
        code = kExitConfig;
    } catch (const SolverError& e) {
        sum.add(std::string("solver error: ") + e.what());
        code = kExitSolver;
    } catch (const StepSizeError& e) {
        sum.add(std::string("step size error: ") + e.what());
        code = kExitSolver;
    }
    log << sum.text();
    return code;
}

}  // namespace fsdl
