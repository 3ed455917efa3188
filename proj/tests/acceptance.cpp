// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "golden_data.hpp"
#include "golden_runs.hpp"

using namespace fsdl;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Worst elliptic residual over every eps = 0 snapshot seen by the run.
double g_elliptic_worst = 0.0;
std::size_t g_elliptic_snapshots = 0;

void lock_elliptic(const Trajectory1D& tr) {
    for (const auto& s : tr.snapshots) {
        g_elliptic_worst = std::max(g_elliptic_worst, lp_norm(elliptic_residual(s), kInf));
        ++g_elliptic_snapshots;
    }
}

// 1. Helmholtz solve against c = 1 + cos(pi x)/(1 + pi^2).
Outcome helmholtz_order() {
    std::vector<double> hs, errs;
    for (std::size_t n : {64, 128, 256, 512}) {
        const Grid1D g(n);
        const Field1D rhs = Field1D::sample(g, [](double x) { return 1.0 + std::cos(pi * x); });
        const Field1D c = helmholtz_solve(rhs);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            err = std::max(err, std::abs(c[i] - (1.0 + std::cos(pi * g.center(i)) / (1.0 + pi * pi))));
        hs.push_back(g.h());
        errs.push_back(err);
    }
    const double order = estimate_order(hs, errs);
    return {std::abs(order - 2.0) <= 0.2, "observed order " + fmt(order) + ", errors " + fmt(errs.front()) + " .. " +
                                              fmt(errs.back())};
}

// 2. Heat decay of the cos(pi x) mode and the spatially constant logistic ODE.
Outcome heat_and_logistic() {
    std::string detail;
    bool pass = true;
    for (double D : {1.0, 0.1}) {
        const ModelParams1D p{0.0, D, 0.0, 0.0, 0.0};
        const Grid1D g(256);
        const double T = 0.1 / D;
        const auto tr = run(p, g, ProfileSpec::cosine(1.0, 0.5, 1.0), ProfileSpec::constant(0.0), T,
                            DtPolicy::fixed(1e-4 / D), std::vector<double>{T});
        lock_elliptic(tr);
        const Field1D& n = tr.final_state->n;
        double amp = 0.0;
        for (std::size_t i = 0; i < g.n_cells(); ++i) amp += (n[i] - 1.0) * std::cos(pi * g.center(i));
        amp *= 2.0 * g.h() / 0.5;
        const double rel = std::abs(amp / std::exp(-D * pi * pi * T) - 1.0);
        pass = pass && tr.completed() && rel <= 5e-3;
        detail += "heat D=" + fmt(D) + " rel dev " + fmt(rel) + "; ";
    }
    const double a = 1.0, b = 1.0, n0 = 0.1, T = 5.0;
    for (double eps : {0.0, 0.1}) {
        const ModelParams1D p{eps, 1.0, a, b, 1.0};
        const auto tr = run(p, Grid1D(64), ProfileSpec::constant(n0), ProfileSpec::helmholtz(), T, DtPolicy::fixed(1e-3),
                            std::vector<double>{T});
        if (eps == 0.0) lock_elliptic(tr);
        const double K = a / b;
        const double exact = K * n0 * std::exp(a * T) / (K + n0 * (std::exp(a * T) - 1.0));
        const double err = lp_norm(tr.final_state->n - Field1D(Grid1D(64), 1, exact), kInf);
        pass = pass && tr.completed() && err <= 1e-3;
        detail += "logistic eps=" + fmt(eps) + " err " + fmt(err) + "; ";
    }
    return {pass, detail};
}

// 3. Mass and sign preservation with f = 0.
Outcome conservation_positivity() {
    bool pass = true;
    double worst_drift = 0.0, worst_min = kInf;
    std::size_t runs = 0;
    auto check = [&](const std::vector<MonitorRecord>& mons) {
        const double m0 = mons.front().mass;
        for (const auto& m : mons) {
            if (m.t > 0.0) worst_drift = std::max(worst_drift, std::abs(m.mass - m0) / std::max(m.t, 1.0));
            worst_min = std::min({worst_min, m.min_n, m.min_c});
        }
        ++runs;
    };
    for (double eps : {0.0, 1e-2, 1.0}) {
        const ModelParams1D p{eps, 1.0, 0.0, 0.0, 5.0};
        const auto tr = run(p, Grid1D(256), ProfileSpec::bump(0.3, 0.2, 1.0), ProfileSpec::constant(0.0), 0.5,
                            DtPolicy::cfl(0.9), uniform_snapshots(0.5, 5));
        if (eps == 0.0) lock_elliptic(tr);
        pass = pass && tr.completed();
        check(tr.monitors);
    }
    for (int mode = 0; mode < 2; ++mode)
        for (double kappa : {0.0, 1.0})
            for (double eta : {0.0, 0.05}) {
                ModelParams2D p;
                p.eps = 0.1;
                p.sensitivity = mode == 0 ? SensitivitySpec::scalar(2.0, eta) : SensitivitySpec::rotation(2.0, 0.7, eta);
                p.fluid.kappa = kappa;
                p.fluid.phi = PotentialSpec::cosine(1.0, 1.0);
                const Grid2D g(64, 64);
                const Field2D n0 = sample_profile(ProfileSpec::bump(0.35, 0.3, 1.0), g);
                const State2D s0 = init_state2d(n0, helmholtz_solve(n0), vortex_velocity(g, 0.5), p);
                const auto tr = run2d(s0, p, 0.1, DtPolicy::cfl(0.9), std::vector<double>{});
                pass = pass && tr.completed();
                check(tr.monitors);
            }
    pass = pass && worst_drift <= 1e-10 && worst_min >= 0.0;
    return {pass, std::to_string(runs) + " runs, worst drift per unit time " + fmt(worst_drift) + ", min(n, c) " +
                      fmt(worst_min)};
}

// 4. eps -> 0 on the standard test.
Outcome eps_limit() {
    const auto cfg = golden::standard_1d();
    const std::vector<double> eps_list{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    const auto rep = eps_sweep(cfg, eps_list, 0.05);
    lock_elliptic(golden::standard_1d_run(0.0));
    const double self = self_convergence_error(cfg);
    const double last = rep.rows[eps_list.size() - 1].norms.sup_n_C0;
    std::string detail = "sup_n_C0:";
    for (std::size_t k = 0; k < eps_list.size(); ++k) detail += " " + fmt(rep.rows[k].norms.sup_n_C0);
    detail += "; self-convergence " + fmt(self) + "; ratio at 1e-3 " + fmt(last / self);
    if (rep.order) detail += "; order " + fmt(*rep.order);
    return {rep.pass && rep.monotone && last <= 10.0 * self, detail};
}

// 5. Evaluated after every other criterion has fed lock_elliptic.
Outcome elliptic_lock() {
    return {g_elliptic_snapshots > 0 && g_elliptic_worst <= 1e-9,
            std::to_string(g_elliptic_snapshots) + " snapshots, max residual " + fmt(g_elliptic_worst)};
}

// 6. Quasi-blowup, extended by one decade of D when no row reaches 2M.
Outcome quasi_blowup() {
    QuasiBlowupConfig cfg;
    auto rep = quasi_blowup_experiment(cfg);
    bool extended = false;
    if (!rep.smallest_triggered()) {
        const double D = cfg.D_list.back() / 10.0;
        cfg.D_list.push_back(D);
        rep.rows.push_back(quasi_blowup_row(cfg, D, rep.M));
        extended = true;
    }
    std::string detail = "M " + fmt(rep.M) + "; max n:";
    for (const auto& r : rep.rows) detail += " D=" + fmt(r.D) + ":" + fmt(r.max_density);
    if (extended) detail += "; sweep extended to D=" + fmt(cfg.D_list.back());
    const auto* hit = rep.smallest_triggered();
    bool probe_ok = false;
    if (hit) {
        probe_ok = !hit->probes.empty();
        for (const auto& p : hit->probes) {
            probe_ok = probe_ok && p.pass;
            detail += "; n_eps(x0,t0) at eps=" + fmt(p.eps) + " is " + fmt(p.value);
        }
    } else {
        detail += "; no D reached 2M = " + fmt(2.0 * rep.M);
    }
    detail += std::string("; nondecreasing: ") + (rep.max_nondecreasing() ? "yes" : "no");
    return {rep.max_nondecreasing() && hit && probe_ok, detail};
}

// 7. 2D small-data boundedness across eps, sensitivity mode and cutoff.
Outcome small_data() {
    bool pass = true;
    std::string detail;
    for (int mode = 0; mode < 2; ++mode)
        for (double eta : {0.0, 0.05}) {
            SmallDataConfig cfg;
            cfg.params.sensitivity = mode == 0 ? SensitivitySpec::scalar(1.0, eta) : SensitivitySpec::rotation(1.0, 0.5, eta);
            cfg.params.fluid.kappa = 1.0;
            cfg.params.fluid.phi = PotentialSpec::cosine(0.1, 1.0);
            const auto rep = small_data_experiment(cfg);
            pass = pass && rep.all_bounded() && rep.uniform_verdict();
            double worst = 0.0;
            for (const auto& r : rep.rows)
                worst = std::max({worst, r.n_lp_max / r.n_lp0, r.gradc_lq_max / r.gradc_lq0, r.u_lr_max / r.u_lr0});
            detail += std::string(mode == 0 ? "scalar" : "rotation") + " eta=" + fmt(eta) + ": " +
                      (rep.all_bounded() ? "bounded" : "NOT bounded") + " (max growth " + fmt(worst) + "); ";
        }
    return {pass, "delta 1e-2, " + detail};
}

// 8. Interpolation fuzz and monitor fixtures.
Outcome inequalities() {
    const auto a = fuzz_interpolation(100, 8, {2.0, 3.0, 4.0}, 256, 20240601);
    const auto b = fuzz_interpolation(100, 8, {2.0, 3.0, 4.0}, 512, 20240601);
    double neg_a = 0.0, neg_b = 0.0;
    for (const auto& s : a.samples) neg_a = std::min(neg_a, s.check.slack);
    for (const auto& s : b.samples) neg_b = std::min(neg_b, s.check.slack);
    const bool shrink = neg_a == 0.0 || std::abs(neg_b) * 2.0 <= std::abs(neg_a);
    std::string detail = std::to_string(a.failures) + " failures at 256, worst negative slack " + fmt(neg_a) + " -> " +
                         fmt(neg_b);

    bool monitors_ok = true;
    const auto logistic = golden::monitors("golden/logistic_1d_monitors.csv");
    monitors_ok = monitors_ok && check_mass_growth(logistic, 1.0).pass && check_signal_ls_bound(logistic, 2.0).pass;
    for (double eps : {1e-1, 1e-2}) {
        const auto tr = golden::standard_1d_run(eps);
        monitors_ok = monitors_ok && check_mass_growth(tr.monitors, 0.0).pass && check_signal_ls_bound(tr, 2.0).pass;
    }
    for (double theta : {0.0, pi / 2}) {
        const auto tr = golden::rotation_run(theta);
        monitors_ok = monitors_ok && check_mass_growth(tr.monitors, 0.0).pass && check_signal_ls_bound(tr, 2.0).pass;
    }
    const double C = golden::frozen().at("gradc_energy").at("C").get<double>();
    monitors_ok = monitors_ok && check_gradc_energy(golden::standard_1d_run(1e-1).monitors, 1e-1, C).pass;
    const bool fixtures_fail = !check_mass_growth(golden::monitors("corrupted/mass_inflated.csv"), 1.0).pass &&
                               !check_signal_ls_bound(golden::monitors("corrupted/signal_scaled.csv"), 2.0).pass &&
                               !check_gradc_energy(golden::monitors("corrupted/gradc_energy_inflated.csv"), 1e-1, C).pass;
    detail += std::string("; monitors on golden runs: ") + (monitors_ok ? "pass" : "FAIL") +
              "; corrupted fixtures rejected: " + (fixtures_fail ? "yes" : "NO");
    return {a.pass() && shrink && monitors_ok && fixtures_fail, detail};
}

// 9. Every golden config run twice through the CLI gives identical files.
Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / ("fsdl_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    bool pass = true;
    std::size_t compared = 0;
    std::string detail;
    for (const auto& entry : fs::directory_iterator(fs::path(FSDL_SOURCE_DIR) / "configs")) {
        if (entry.path().extension() != ".cfg") continue;
        const std::string stem = entry.path().stem().string();
        const std::string kind = to_string(parse_config(read_file(entry.path())).kind);
        fs::path outs[2] = {root / (stem + "_a"), root / (stem + "_b")};
        for (const auto& out : outs) {
            const std::string cmd = std::string(FSDL_CLI) + " " + kind + " --config " + entry.path().string() +
                                    " --out " + out.string() + " > /dev/null 2>&1";
            const int rc = std::system(cmd.c_str());
            if (!WIFEXITED(rc) || WEXITSTATUS(rc) >= kExitConfig) {
                pass = false;
                detail += stem + " exited " + std::to_string(WEXITSTATUS(rc)) + "; ";
            }
        }
        for (const auto& f : fs::directory_iterator(outs[0])) {
            const auto name = f.path().filename();
            if (name.extension() != ".csv") continue;
            ++compared;
            if (!fs::exists(outs[1] / name) || read_file(f.path()) != read_file(outs[1] / name)) {
                pass = false;
                detail += stem + "/" + name.string() + " differs; ";
            }
        }
    }
    fs::remove_all(root);
    return {pass && compared > 0, std::to_string(compared) + " CSV files compared; " + detail};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> fn;
    };
    const Criterion criteria[] = {
        {1, "Helmholtz order", 1.0, helmholtz_order},
        {2, "heat and logistic oracles", 5.0, heat_and_logistic},
        {3, "conservation and positivity", 120.0, conservation_positivity},
        {4, "eps-limit property", 120.0, eps_limit},
        {6, "quasi-blowup property", 300.0, quasi_blowup},
        {7, "2D small-data boundedness", 600.0, small_data},
        {8, "inequality fuzz and monitors", 60.0, inequalities},
        {9, "determinism", 600.0, determinism},
        {5, "elliptic-relation lock", 1.0, elliptic_lock},
    };
    std::vector<std::pair<int, std::string>> lines;
    bool all = true;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        all = all && pass;
        std::ostringstream line;
        line << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << fmt(secs)
             << " s of " << fmt(c.budget_s) << " s" << (in_time ? "" : ", over budget") << "]  " << o.detail;
        lines.emplace_back(c.id, line.str());
        std::cerr << line.str() << "\n";
    }
    std::sort(lines.begin(), lines.end());
    std::cout << "\nacceptance summary\n";
    for (const auto& [id, text] : lines) std::cout << text << "\n";
    return all ? 0 : 1;
}
