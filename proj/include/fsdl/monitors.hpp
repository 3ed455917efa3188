#pragma once

// Discrete taps on the a priori estimates: mass growth, L^s bounds for the
// signal, the gradient energy inequality and the interpolation inequality.
// Every function here is a pure function of recorded data.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "fsdl/core_num.hpp"

namespace fsdl {


struct MonitorOptions {
    bool enabled = true;
    double s = 2.0;    // exponent for the signal L^s bound
    double p = 4.0;    // ||n||_{L^p}
    double q = 2.0;    // gradient exponent
    double r = kInf;   // ||u||_{L^r}
};

struct MonitorRecord {
    double t = 0.0;
    double dt = 0.0;  // step that produced this record (0 for the initial record)
    double mass = 0.0;
    double c_mass = 0.0;
    double max_n = 0.0;
    std::size_t argmax_n = 0;
    double min_n = 0.0;
    double min_c = 0.0;
    double s = 2.0;
    double cs_integral = 0.0;  // h^d sum c^s
    double ns_integral = 0.0;  // h^d sum n^s
    double q = 2.0;
    double gradc_q_integral = 0.0;  // h^d sum |grad c|^q
    double gradc_lq = 0.0;          // its q-th root
    double hess_weighted = 0.0;     // h^d sum |grad c|^(q-2) |D^2 c|^2
    double p = 4.0;
    double n_lp = 0.0;
    double r = kInf;
    double u_lr = 0.0;
    double gradc_mixed = 0.0;  // ||grad c||_{L^{qr/(r-2)}}, = L^q when r is infinite
};

/// Exponent qr/(r-2), read as q for r = infinity.
inline double mixed_exponent(double q, double r) { return std::isinf(r) ? q : q * r / (r - 2.0); }

template <class Grid>
MonitorRecord measure(double t, double dt, const Field<Grid>& n, const Field<Grid>& c, const Field<Grid>* u_cell,
                      const MonitorOptions& opt) {
    MonitorRecord rec;
    rec.t = t;
    rec.dt = dt;
    rec.s = opt.s;
    rec.q = opt.q;
    rec.p = opt.p;
    rec.r = opt.r;
    rec.mass = n.integral();
    rec.c_mass = c.integral();
    const auto nv = n.values();
    const auto it = std::max_element(nv.begin(), nv.end());
    rec.max_n = *it;
    rec.argmax_n = static_cast<std::size_t>(it - nv.begin());
    rec.min_n = n.min();
    rec.min_c = c.min();
    if (!opt.enabled) return rec;
    rec.cs_integral = power_integral(c, opt.s);
    rec.ns_integral = power_integral(n, opt.s);
    rec.n_lp = lp_norm(n, opt.p);
    const auto grad = centered_gradient(c);
    const auto gmag = magnitudes(grad);
    const auto hess = hessian_norm_sq(c);
    const double vol = n.grid().cell_volume();
    double gq = 0.0, hw = 0.0;
    for (std::size_t k = 0; k < gmag.size(); ++k) {
        gq += std::pow(gmag[k], opt.q);
        hw += (opt.q == 2.0 ? 1.0 : std::pow(gmag[k], opt.q - 2.0)) * hess[k];
    }
    rec.gradc_q_integral = vol * gq;
    rec.gradc_lq = std::pow(rec.gradc_q_integral, 1.0 / opt.q);
    rec.hess_weighted = vol * hw;
    rec.gradc_mixed = lp_norm(grad, mixed_exponent(opt.q, opt.r));
    rec.u_lr = u_cell ? lp_norm(*u_cell, opt.r) : 0.0;
    return rec;
}

struct CheckResult {
    double slack = 0.0;  // worst slack (larger is better)
    double tol = 0.0;    // admissible negative slack
    std::size_t index = 0;
    bool pass = true;
};

/// One-step mass growth bound d/dt mass <= K_f (mass + |Omega|).
inline CheckResult check_mass_growth(const MonitorRecord& prev, const MonitorRecord& next, double dt, double K_f,
                                     double domain_measure = 1.0) {
    CheckResult r;
    r.slack = dt * (K_f * prev.mass + K_f * domain_measure) - (next.mass - prev.mass);
    r.tol = 1e-8 * (1.0 + prev.mass);
    r.pass = r.slack >= -r.tol;
    return r;
}

/// Worst mass-growth step over a series, ranked by slack / tol.
inline CheckResult check_mass_growth(std::span<const MonitorRecord> series, double K_f, double domain_measure = 1.0) {
    CheckResult worst;
    double worst_ratio = kInf;
    for (std::size_t k = 1; k < series.size(); ++k) {
        auto r = check_mass_growth(series[k - 1], series[k], series[k].t - series[k - 1].t, K_f, domain_measure);
        if (r.slack / r.tol < worst_ratio) {
            worst_ratio = r.slack / r.tol;
            worst = r;
            worst.index = k;
        }
    }
    return worst;
}

/// h^d sum c^s <= max{h^d sum c0^s, sup_t h^d sum n^s} at every record; the
/// slack is relative to that bound.
inline CheckResult check_signal_ls_bound(std::span<const MonitorRecord> series, double s, double tol = 1e-6) {
    CheckResult res;
    res.tol = tol;
    if (series.empty()) return res;
    for (const auto& r : series)
        if (r.s != s) throw ValidationError("signal L^s check: records were taken with a different exponent");
    double c1 = 0.0;
    for (const auto& r : series) c1 = std::max(c1, r.ns_integral);
    const double bound = std::max(series.front().cs_integral, c1);
    res.slack = kInf;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double rel = bound > 0.0 ? (bound - series[k].cs_integral) / bound : -series[k].cs_integral;
        if (rel < res.slack) {
            res.slack = rel;
            res.index = k;
        }
    }
    res.pass = res.slack >= -tol;
    return res;
}

template <class Traj>
auto check_signal_ls_bound(const Traj& trajectory, double s, double tol = 1e-6)
    -> decltype(trajectory.monitors, CheckResult{}) {
    return check_signal_ls_bound(std::span<const MonitorRecord>(trajectory.monitors), s, tol);
}

struct InterpolationCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;      // rhs - lhs
    double allowance = 0.0;  // 10 h max(lhs, rhs)
    bool pass = true;
};

/// int |grad phi|^q <= (sqrt(N)+q-2)^(2q/(q+2)) {int |grad phi|^(q-2)|D^2 phi|^2}^(q/(q+2)) {int |phi|^q}^(2/(q+2))
/// evaluated with centered differences and mirrored ghosts.
template <class Grid>
InterpolationCheck check_interpolation_inequality(const Field<Grid>& phi, double q) {
    if (!(q >= 2.0)) throw ValidationError("interpolation inequality needs q >= 2");
    const double N = Grid::dim;
    const auto grad = magnitudes(centered_gradient(phi));
    const auto hess = hessian_norm_sq(phi);
    const double vol = phi.grid().cell_volume();
    double lhs = 0.0, hw = 0.0, pq = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
        lhs += std::pow(grad[k], q);
        hw += (q == 2.0 ? 1.0 : std::pow(grad[k], q - 2.0)) * hess[k];
        pq += std::pow(std::abs(phi[k]), q);
    }
    lhs *= vol;
    hw *= vol;
    pq *= vol;
    InterpolationCheck out;
    out.lhs = lhs;
    out.rhs = std::pow(std::sqrt(N) + q - 2.0, 2.0 * q / (q + 2.0)) * std::pow(hw, q / (q + 2.0)) *
              std::pow(pq, 2.0 / (q + 2.0));
    out.slack = out.rhs - out.lhs;
    double h;
    if constexpr (Grid::dim == 1) {
        h = phi.grid().h();
    } else {
        h = std::max(phi.grid().hx(), phi.grid().hy());
    }
    out.allowance = 10.0 * h * std::max(out.lhs, out.rhs);
    out.pass = out.slack >= -out.allowance;
    return out;
}

/// Per-record sides of the gradient energy inequality. Index 0 has no
/// time derivative and is skipped.
struct GradcEnergyTerms {
    std::vector<double> lhs;    // (eps/q) dG/dt + H/4 + (1 - 1/q^2) G
    std::vector<double> basis;  // ||n||_p^q + ||u||_r^2 ||grad c||_{qr/(r-2)}^q
};

inline GradcEnergyTerms gradc_energy_terms(std::span<const MonitorRecord> series, double eps) {
    GradcEnergyTerms t;
    for (std::size_t k = 1; k < series.size(); ++k) {
        const auto& a = series[k - 1];
        const auto& b = series[k];
        const double q = b.q;
        const double dt = b.t - a.t;
        const double dGdt = dt > 0.0 ? (b.gradc_q_integral - a.gradc_q_integral) / dt : 0.0;
        t.lhs.push_back(eps / q * dGdt + 0.25 * b.hess_weighted + (1.0 - 1.0 / (q * q)) * b.gradc_q_integral);
        t.basis.push_back(std::pow(b.n_lp, q) + b.u_lr * b.u_lr * std::pow(b.gradc_mixed, q));
    }
    return t;
}

/// Smallest C making every step pass, times 1.1 headroom.
inline double calibrate_gradc_energy(std::span<const MonitorRecord> series, double eps) {
    const auto t = gradc_energy_terms(series, eps);
    double c = 0.0;
    for (std::size_t k = 0; k < t.lhs.size(); ++k)
        if (t.basis[k] > 0.0) c = std::max(c, t.lhs[k] / t.basis[k]);
    return 1.1 * c;
}

/// Asserts LHS <= C * basis at every record against a frozen constant C.
inline CheckResult check_gradc_energy(std::span<const MonitorRecord> series, double eps, double C) {
    const auto t = gradc_energy_terms(series, eps);
    CheckResult res;
    res.slack = kInf;
    res.pass = true;
    for (std::size_t k = 0; k < t.lhs.size(); ++k) {
        const double rhs = C * t.basis[k];
        const double slack = rhs - t.lhs[k];
        if (slack < res.slack) {
            res.slack = slack;
            res.index = k + 1;
        }
        if (slack < -1e-12 * (std::abs(rhs) + std::abs(t.lhs[k]))) res.pass = false;
    }
    if (t.lhs.empty()) res.slack = 0.0;
    return res;
}

/// Random cosine polynomial sum_{k<modes} a_k cos(k pi x) with a_k uniform in
/// [-1, 1] (1D). Satisfies the Neumann condition exactly.
inline Field1D random_cosine_field(const Grid1D& g, std::size_t modes, std::mt19937_64& rng) {
    std::vector<double> coef(modes);
    for (double& a : coef) a = -1.0 + 2.0 * std::generate_canonical<double, 53>(rng);
    return Field1D::sample(g, [&](double x) {
        double v = 0.0;
        for (std::size_t k = 0; k < modes; ++k) v += coef[k] * std::cos(static_cast<double>(k) * std::numbers::pi * x);
        return v;
    });
}

struct FuzzSample {
    std::size_t sample = 0;
    double q = 2.0;
    InterpolationCheck check;
};

struct FuzzResult {
    std::size_t n_cells = 0;
    std::vector<FuzzSample> samples;
    std::size_t failures = 0;
    double worst_relative_slack = 0.0;  // min over samples of slack / max(lhs, rhs), capped at 0

    bool pass() const { return failures == 0; }
};

/// Draws `count` fields from one seeded stream and checks each for every q.
/// The same seed gives the same fields at every resolution.
inline FuzzResult fuzz_interpolation(std::size_t count, std::size_t modes, const std::vector<double>& qs,
                                     std::size_t n_cells, std::uint64_t seed) {
    FuzzResult res;
    res.n_cells = n_cells;
    const Grid1D g(n_cells);
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < count; ++s) {
        const Field1D phi = random_cosine_field(g, modes, rng);
        for (double q : qs) {
            FuzzSample fs{s, q, check_interpolation_inequality(phi, q)};
            const double scale = std::max(fs.check.lhs, fs.check.rhs);
            if (scale > 0.0) res.worst_relative_slack = std::min(res.worst_relative_slack, fs.check.slack / scale);
            if (!fs.check.pass) ++res.failures;
            res.samples.push_back(fs);
        }
    }
    return res;
}

}  // namespace fsdl
