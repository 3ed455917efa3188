#pragma once

// Experiment configuration: a flat line-oriented format,
//
//   [section]
//   key = value      # comment
//
// Unknown sections or keys, duplicates and malformed values are errors that
// carry the line number. Defaults are written back into the returned
// config, so a parsed config is always complete.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fsdl/ks1d.hpp"
#include "fsdl/ksfluid2d.hpp"

namespace fsdl {

enum class ExperimentKind { Simulate1D, SweepEps, QuasiBlowup, Simulate2D, SmallData2D, CheckInequalities };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::Simulate1D: return "simulate-1d";
    case ExperimentKind::SweepEps: return "sweep-eps";
    case ExperimentKind::QuasiBlowup: return "quasi-blowup";
    case ExperimentKind::Simulate2D: return "simulate-2d";
    case ExperimentKind::SmallData2D: return "small-data-2d";
    case ExperimentKind::CheckInequalities: return "check-inequalities";
    }
    return "?";
}

inline std::optional<ExperimentKind> parse_kind(std::string_view s) {
    for (auto k : {ExperimentKind::Simulate1D, ExperimentKind::SweepEps, ExperimentKind::QuasiBlowup,
                   ExperimentKind::Simulate2D, ExperimentKind::SmallData2D, ExperimentKind::CheckInequalities})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Simulate1D;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string output = "out";

    // grid
    std::size_t n_cells = 256;
    std::size_t nx = 64, ny = 64;

    // model (shared symbols; the 2D block adds sensitivity, source, fluid)
    double eps = 0.0;
    double D = 1.0;
    double a = 0.0;
    double b = 0.0;
    double chi = 1.0;
    std::string source = "logistic";  // 2D: zero | logistic | bounded
    double K_f = 0.0;                 // materialized as max(a, 0) unless given
    SensitivitySpec sensitivity;
    FluidParams fluid;
    double u0_amplitude = 0.0;  // vortex amplitude of the initial velocity

    // initial data
    ProfileSpec n0 = ProfileSpec::cosine(1.0, 0.5, 1.0);
    ProfileSpec c0 = ProfileSpec::constant(0.0);

    // time
    double T = 0.0;
    DtPolicy dt = DtPolicy::cfl(0.9);
    std::size_t snapshots = 10;
    double tau = 0.0;

    MonitorOptions monitors;

    // sweeps
    std::vector<double> eps_list{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    std::vector<double> D_list{1.0, 0.1, 0.01, 0.001};
    double M = 0.0;

    // small data
    double delta = 1e-2;
    double sd_p = 4.0, sd_q = 4.0, sd_r = 4.0;
    double lambda = kInf;
    double bound_factor = 2.0;

    // inequality fuzz
    std::size_t fuzz_samples = 100;
    std::size_t fuzz_modes = 8;
    std::vector<double> fuzz_q{2.0, 3.0, 4.0};

    ModelParams1D model1d() const { return ModelParams1D{eps, D, a, b, chi}; }

    SourceSpec source_spec() const {
        if (source == "zero") return SourceSpec::zero();
        SourceSpec s = SourceSpec::logistic(a, b);
        s.K_f = K_f;
        if (source == "bounded") {
            // logistic growth clipped at zero from below in n: f = a n - b n^2
            // for n <= a/b, then 0; admissible whenever a <= K_f.
            const double ga = a, gb = b;
            s = SourceSpec::custom(K_f, [ga, gb](double, double, double n, double) {
                return gb > 0.0 && n > ga / gb ? 0.0 : ga * n - gb * n * n;
            });
        }
        return s;
    }

    ModelParams2D model2d() const {
        ModelParams2D m;
        m.eps = eps;
        m.D = D;
        m.source = source_spec();
        m.sensitivity = sensitivity;
        m.fluid = fluid;
        return m;
    }

    Grid1D grid1d() const { return Grid1D(n_cells); }
    Grid2D grid2d() const { return Grid2D(nx, ny); }
};

class ConfigError : public ValidationError {
public:
    ConfigError(Hypothesis h, const std::string& what, std::size_t line = 0)
        : ValidationError(h, line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= s.size(); ++k)
        if (k == s.size() || s[k] == sep) {
            out.push_back(trim(s.substr(start, k - start)));
            start = k + 1;
        }
    return out;
}

struct Value {
    std::string text;
    std::size_t line = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(Hypothesis::Syntax, what, line); }

    double number() const {
        const std::string t = trim(text);
        if (t.empty()) fail("expected a number");
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size()) fail("expected a number, got '" + t + "'");
        return v;
    }

    std::size_t count() const {
        const double v = number();
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e12) fail("expected a nonnegative integer, got '" + text + "'");
        return static_cast<std::size_t>(v);
    }

    bool boolean() const {
        if (text == "true" || text == "on" || text == "1") return true;
        if (text == "false" || text == "off" || text == "0") return false;
        fail("expected true or false, got '" + text + "'");
    }

    std::vector<double> numbers() const {
        std::vector<double> out;
        for (const auto& part : split(text, ',')) out.push_back(Value{part, line}.number());
        return out;
    }

    /// name(arg, arg, ...) or a bare name.
    std::pair<std::string, std::vector<double>> call() const {
        const auto open = text.find('(');
        if (open == std::string::npos) return {trim(text), {}};
        if (text.back() != ')') fail("unbalanced parentheses in '" + text + "'");
        const std::string name = trim(std::string_view(text).substr(0, open));
        const std::string args = trim(std::string_view(text).substr(open + 1, text.size() - open - 2));
        if (args.empty()) return {name, {}};
        return {name, Value{args, line}.numbers()};
    }
};

inline ProfileSpec parse_profile(const Value& v) {
    const auto [name, args] = v.call();
    auto need = [&](std::size_t n) {
        if (args.size() != n) v.fail(name + " takes " + std::to_string(n) + " arguments");
    };
    if (name == "constant") {
        need(1);
        return ProfileSpec::constant(args[0]);
    }
    if (name == "cosine") {
        need(3);
        return ProfileSpec::cosine(args[0], args[1], args[2]);
    }
    if (name == "bump") {
        need(3);
        return ProfileSpec::bump(args[0], args[1], args[2]);
    }
    if (name == "helmholtz") {
        need(0);
        return ProfileSpec::helmholtz();
    }
    v.fail("unknown profile '" + name + "'");
}

inline DtPolicy parse_dt(const Value& v) {
    const auto [name, args] = v.call();
    if (args.size() != 1) v.fail(name + " takes 1 argument");
    if (name == "cfl") return DtPolicy::cfl(args[0]);
    if (name == "fixed") return DtPolicy::fixed(args[0]);
    v.fail("unknown dt policy '" + name + "'");
}

inline PotentialSpec parse_potential(const Value& v) {
    const auto [name, args] = v.call();
    if (name == "zero" && args.empty()) return PotentialSpec::zero();
    if (name == "linear" && args.size() == 2) return PotentialSpec::linear(args[0], args[1]);
    if (name == "cosine" && args.size() == 2) return PotentialSpec::cosine(args[0], args[1]);
    v.fail("expected zero, linear(gx, gy) or cosine(amp, modes), got '" + v.text + "'");
}

inline double parse_exponent(const Value& v) {
    if (v.text == "inf" || v.text == "infinity") return kInf;
    return v.number();
}

}  // namespace detail

/// Checks the config against the model hypotheses; throws ConfigError naming
/// the violated one.
inline void validate_config(const ExperimentConfig& c) {
    auto reject = [](Hypothesis h, const std::string& what) { throw ConfigError(h, what); };
    const bool two_d = c.kind == ExperimentKind::Simulate2D || c.kind == ExperimentKind::SmallData2D;
    const bool evolves = c.kind != ExperimentKind::CheckInequalities;

    if (c.n_cells < 4) reject(Hypothesis::ParameterRange, "n_cells must be >= 4");
    if (c.nx < 8 || c.ny < 8) reject(Hypothesis::ParameterRange, "nx and ny must be >= 8");
    if (c.jobs > 1024) reject(Hypothesis::ParameterRange, "jobs must be <= 1024");
    if (!(c.eps >= 0.0) || !std::isfinite(c.eps)) reject(Hypothesis::ParameterRange, "eps must satisfy eps >= 0");
    if (!(c.D > 0.0) || !std::isfinite(c.D)) reject(Hypothesis::ParameterRange, "D must satisfy D > 0");
    if (!std::isfinite(c.a)) reject(Hypothesis::ParameterRange, "a must be a finite real");
    if (!std::isfinite(c.chi)) reject(Hypothesis::ParameterRange, "chi must be finite");
    if (!(c.b >= 0.0) || !std::isfinite(c.b))
        reject(Hypothesis::Source, "competition b must satisfy b >= 0 so that f <= K_f (n+1)");
    if (evolves && (!(c.T > 0.0) || !std::isfinite(c.T))) reject(Hypothesis::ParameterRange, "T must be a positive time");
    if (evolves && !(c.tau >= 0.0 && c.tau < c.T)) reject(Hypothesis::ParameterRange, "tau must satisfy 0 <= tau < T");
    if (c.snapshots == 0) reject(Hypothesis::ParameterRange, "snapshots must be >= 1");
    try {
        c.dt.validate();
    } catch (const ValidationError& e) {
        reject(Hypothesis::ParameterRange, e.what());
    }
    if (!(c.monitors.s >= 2.0)) reject(Hypothesis::Exponents, "monitor exponent s must be >= 2");
    if (!(c.monitors.q >= 2.0)) reject(Hypothesis::Exponents, "monitor exponent q must be >= 2");
    if (!(c.monitors.p >= 1.0)) reject(Hypothesis::Exponents, "monitor exponent p must be >= 1");
    if (!(c.monitors.r > 2.0)) reject(Hypothesis::Exponents, "monitor exponent r must exceed 2");

    if (evolves) {
        auto check_profile = [&](const ProfileSpec& spec, const char* name, bool need_mass) {
            try {
                if (spec.kind == ProfileSpec::Kind::Helmholtz) {
                    if (need_mass) reject(Hypothesis::InitialData, "n0 cannot be a Helmholtz profile");
                    return;
                }
                double lo = 0.0, hi = 0.0;
                if (two_d) {
                    const auto f = sample_profile(spec, c.grid2d());
                    lo = f.min();
                    hi = f.max();
                } else {
                    const auto f = sample_profile(spec, c.grid1d());
                    lo = f.min();
                    hi = f.max();
                }
                if (!std::isfinite(lo) || !std::isfinite(hi)) reject(Hypothesis::InitialData, std::string(name) + " must be finite");
                if (lo < 0.0) reject(Hypothesis::InitialData, std::string(name) + " must be nonnegative");
                if (need_mass && !(hi > 0.0)) reject(Hypothesis::InitialData, "n0 must not vanish identically");
            } catch (const ConfigError&) {
                throw;
            } catch (const ValidationError& e) {
                reject(Hypothesis::InitialData, e.what());
            }
        };
        if (c.kind != ExperimentKind::SmallData2D) {
            check_profile(c.n0, "n0", true);
            check_profile(c.c0, "c0", false);
        }
    }

    if (c.kind == ExperimentKind::SweepEps) {
        for (std::size_t k = 0; k < c.eps_list.size(); ++k) {
            if (!(c.eps_list[k] > 0.0)) reject(Hypothesis::ParameterRange, "eps_list entries must be > 0");
            if (k > 0 && !(c.eps_list[k] < c.eps_list[k - 1]))
                reject(Hypothesis::ParameterRange, "eps_list must be strictly decreasing");
        }
        if (c.eps_list.empty()) reject(Hypothesis::ParameterRange, "eps_list must not be empty");
    }
    if (c.kind == ExperimentKind::QuasiBlowup) {
        if (!(c.b < 1.0)) reject(Hypothesis::QuasiBlowup, "b must satisfy b in [0,1)");
        if (!(c.M >= 0.0) || !std::isfinite(c.M)) reject(Hypothesis::QuasiBlowup, "M must be positive");
        if (c.D_list.empty()) reject(Hypothesis::QuasiBlowup, "D_list must not be empty");
        for (std::size_t k = 0; k < c.D_list.size(); ++k) {
            if (!(c.D_list[k] > 0.0)) reject(Hypothesis::ParameterRange, "D_list entries must satisfy D > 0");
            if (k > 0 && !(c.D_list[k] < c.D_list[k - 1])) reject(Hypothesis::QuasiBlowup, "D_list must be strictly decreasing");
        }
        for (double e : c.eps_list)
            if (!(e > 0.0)) reject(Hypothesis::QuasiBlowup, "probe eps values must be > 0");
    }
    if (two_d) {
        if (!std::isfinite(c.u0_amplitude)) reject(Hypothesis::InitialData, "u0 amplitude must be finite");
        try {
            ModelParams2D m = c.model2d();
            if (c.kind == ExperimentKind::SmallData2D) m.source = SourceSpec::zero();
            m.validate();
        } catch (const ValidationError& e) {
            throw ConfigError(e.hypothesis(), e.what());
        }
    }
    if (c.kind == ExperimentKind::SmallData2D) {
        if (!(c.delta >= 0.0) || !std::isfinite(c.delta)) reject(Hypothesis::InitialData, "delta must be nonnegative");
        if (!(c.sd_p > 2.0) || !(c.sd_q > 2.0) || !(c.sd_r > 2.0))
            reject(Hypothesis::Exponents, "small-data exponents need p, q, r > 2");
        const auto ex = validate_exponents(c.lambda, c.sd_q, c.sd_r, 2);
        if (!ex.ok) reject(Hypothesis::Exponents, ex.reason);
        if (!(c.bound_factor >= 1.0)) reject(Hypothesis::ParameterRange, "bound_factor must be >= 1");
        if (c.eps_list.empty()) reject(Hypothesis::ParameterRange, "eps_list must not be empty");
        for (double e : c.eps_list)
            if (!(e > 0.0)) reject(Hypothesis::ParameterRange, "eps_list entries must be > 0");
    }
    if (c.kind == ExperimentKind::CheckInequalities) {
        if (c.fuzz_samples == 0) reject(Hypothesis::ParameterRange, "fuzz samples must be >= 1");
        if (c.fuzz_modes == 0) reject(Hypothesis::ParameterRange, "fuzz modes must be >= 1");
        for (double q : c.fuzz_q)
            if (!(q >= 2.0)) reject(Hypothesis::Exponents, "interpolation exponent q must be >= 2");
    }
}

inline ExperimentConfig parse_config(std::string_view text) {
    using detail::Value;
    static const std::map<std::string, std::set<std::string>> schema = {
        {"experiment", {"kind", "seed", "jobs", "output"}},
        {"grid", {"n_cells", "nx", "ny"}},
        {"model", {"eps", "D", "a", "b", "chi", "source", "K_f"}},
        {"sensitivity", {"K_S", "mode", "theta", "eta"}},
        {"fluid", {"kappa", "phi", "u0"}},
        {"initial", {"n0", "c0"}},
        {"time", {"T", "dt", "dt_cap", "snapshots", "tau"}},
        {"monitors", {"enabled", "s", "p", "q", "r"}},
        {"sweep", {"eps_list", "D_list", "M"}},
        {"small_data", {"delta", "p", "q", "r", "lambda", "bound_factor"}},
        {"fuzz", {"samples", "modes", "q"}},
    };

    std::map<std::string, Value> kv;  // "section.key"
    std::string section;
    std::size_t line_no = 0;
    for (const auto& raw : detail::split(text, '\n')) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(Hypothesis::Syntax, "malformed section header", line_no);
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            if (!schema.count(section)) throw ConfigError(Hypothesis::Syntax, "unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(Hypothesis::Syntax, "expected key = value", line_no);
        if (section.empty()) throw ConfigError(Hypothesis::Syntax, "key outside of any section", line_no);
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (!schema.at(section).count(key))
            throw ConfigError(Hypothesis::Syntax, "unknown key '" + key + "' in [" + section + "]", line_no);
        if (value.empty()) throw ConfigError(Hypothesis::Syntax, "missing value for '" + key + "'", line_no);
        if (!kv.emplace(section + "." + key, Value{value, line_no}).second)
            throw ConfigError(Hypothesis::Syntax, "duplicate key '" + key + "'", line_no);
    }

    ExperimentConfig c;
    auto get = [&](const char* k) -> const Value* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };

    const Value* kind = get("experiment.kind");
    if (!kind) throw ConfigError(Hypothesis::Syntax, "missing [experiment] kind");
    const auto parsed = parse_kind(kind->text);
    if (!parsed) kind->fail("unknown experiment kind '" + kind->text + "'");
    c.kind = *parsed;

    // Per-kind defaults that differ from the struct defaults.
    if (c.kind == ExperimentKind::QuasiBlowup) {
        c.a = 1.0;
        c.b = 0.5;
        c.n_cells = 2048;
        c.n0 = ProfileSpec::bump(0.5, 0.25, 8.0);
        c.eps_list = {1e-3};
        c.T = 2.0;
    }
    if (c.kind == ExperimentKind::SmallData2D) {
        c.eps_list = {1.0, 1e-2};
        c.T = 1.0;
        c.source = "zero";
    }
    if (c.kind == ExperimentKind::SweepEps) c.dt = DtPolicy::fixed(5e-4);

    if (auto v = get("experiment.seed")) c.seed = v->count();
    if (auto v = get("experiment.jobs")) c.jobs = v->count();
    if (auto v = get("experiment.output")) c.output = v->text;
    if (auto v = get("grid.n_cells")) c.n_cells = v->count();
    if (auto v = get("grid.nx")) c.nx = v->count();
    if (auto v = get("grid.ny")) c.ny = v->count();
    if (auto v = get("model.eps")) c.eps = v->number();
    if (auto v = get("model.D")) c.D = v->number();
    if (auto v = get("model.a")) c.a = v->number();
    if (auto v = get("model.b")) c.b = v->number();
    if (auto v = get("model.chi")) c.chi = v->number();
    if (auto v = get("model.source")) {
        if (v->text != "zero" && v->text != "logistic" && v->text != "bounded")
            v->fail("source must be zero, logistic or bounded");
        c.source = v->text;
    }
    c.K_f = std::max(c.a, 0.0);
    if (auto v = get("model.K_f")) c.K_f = v->number();
    if (auto v = get("sensitivity.K_S")) c.sensitivity.K_S = v->number();
    if (auto v = get("sensitivity.mode")) {
        if (v->text == "scalar") c.sensitivity.mode = SensitivitySpec::Mode::ScalarDiagonal;
        else if (v->text == "rotation") c.sensitivity.mode = SensitivitySpec::Mode::Rotation;
        else v->fail("sensitivity mode must be scalar or rotation");
    }
    if (auto v = get("sensitivity.theta")) c.sensitivity.theta = v->number();
    if (auto v = get("sensitivity.eta")) c.sensitivity.eta = v->number();
    if (auto v = get("fluid.kappa")) c.fluid.kappa = v->number();
    if (auto v = get("fluid.phi")) c.fluid.phi = detail::parse_potential(*v);
    if (auto v = get("fluid.u0")) {
        const auto [name, args] = v->call();
        if (name == "zero" && args.empty()) c.u0_amplitude = 0.0;
        else if (name == "vortex" && args.size() == 1) c.u0_amplitude = args[0];
        else v->fail("u0 must be zero or vortex(amplitude)");
    }
    if (auto v = get("initial.n0")) c.n0 = detail::parse_profile(*v);
    if (auto v = get("initial.c0")) c.c0 = detail::parse_profile(*v);
    if (auto v = get("time.T")) c.T = v->number();
    if (auto v = get("time.dt")) c.dt = detail::parse_dt(*v);
    if (auto v = get("time.dt_cap")) c.dt.cap = v->number();
    if (auto v = get("time.snapshots")) c.snapshots = v->count();
    c.tau = 0.05 * c.T;
    if (auto v = get("time.tau")) c.tau = v->number();
    if (auto v = get("monitors.enabled")) c.monitors.enabled = v->boolean();
    if (auto v = get("monitors.s")) c.monitors.s = detail::parse_exponent(*v);
    if (auto v = get("monitors.p")) c.monitors.p = detail::parse_exponent(*v);
    if (auto v = get("monitors.q")) c.monitors.q = detail::parse_exponent(*v);
    if (auto v = get("monitors.r")) c.monitors.r = detail::parse_exponent(*v);
    if (auto v = get("sweep.eps_list")) c.eps_list = v->numbers();
    if (auto v = get("sweep.D_list")) c.D_list = v->numbers();
    if (auto v = get("sweep.M")) c.M = v->number();
    if (auto v = get("small_data.delta")) c.delta = v->number();
    if (auto v = get("small_data.p")) c.sd_p = detail::parse_exponent(*v);
    if (auto v = get("small_data.q")) c.sd_q = detail::parse_exponent(*v);
    if (auto v = get("small_data.r")) c.sd_r = detail::parse_exponent(*v);
    if (auto v = get("small_data.lambda")) c.lambda = detail::parse_exponent(*v);
    if (auto v = get("small_data.bound_factor")) c.bound_factor = v->number();
    if (auto v = get("fuzz.samples")) c.fuzz_samples = v->count();
    if (auto v = get("fuzz.modes")) c.fuzz_modes = v->count();
    if (auto v = get("fuzz.q")) c.fuzz_q = v->numbers();

    validate_config(c);
    return c;
}

/// Writes every field back in the config syntax (defaults included).
inline std::string format_config(const ExperimentConfig& c) {
    auto num = [](double v) {
        if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto list = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + num(v[k]);
        return s;
    };
    auto dt = [&](const DtPolicy& p) {
        return std::string(p.kind == DtPolicy::Kind::Fixed ? "fixed(" : "cfl(") + num(p.value) + ")";
    };
    auto phi = [&](const PotentialSpec& p) {
        switch (p.kind) {
        case PotentialSpec::Kind::Zero: return std::string("zero");
        case PotentialSpec::Kind::Linear: return "linear(" + num(p.gx) + ", " + num(p.gy) + ")";
        case PotentialSpec::Kind::Cosine: return "cosine(" + num(p.gx) + ", " + num(p.gy) + ")";
        }
        return std::string("zero");
    };
    std::string o;
    o += "[experiment]\nkind = " + std::string(to_string(c.kind)) + "\nseed = " + std::to_string(c.seed) +
         "\njobs = " + std::to_string(c.jobs) + "\noutput = " + c.output + "\n\n";
    o += "[grid]\nn_cells = " + std::to_string(c.n_cells) + "\nnx = " + std::to_string(c.nx) +
         "\nny = " + std::to_string(c.ny) + "\n\n";
    o += "[model]\neps = " + num(c.eps) + "\nD = " + num(c.D) + "\na = " + num(c.a) + "\nb = " + num(c.b) +
         "\nchi = " + num(c.chi) + "\nsource = " + c.source + "\nK_f = " + num(c.K_f) + "\n\n";
    o += "[sensitivity]\nK_S = " + num(c.sensitivity.K_S) + "\nmode = " +
         (c.sensitivity.mode == SensitivitySpec::Mode::Rotation ? "rotation" : "scalar") +
         "\ntheta = " + num(c.sensitivity.theta) + "\neta = " + num(c.sensitivity.eta) + "\n\n";
    o += "[fluid]\nkappa = " + num(c.fluid.kappa) + "\nphi = " + phi(c.fluid.phi) + "\nu0 = " +
         (c.u0_amplitude == 0.0 ? std::string("zero") : "vortex(" + num(c.u0_amplitude) + ")") + "\n\n";
    o += "[initial]\nn0 = " + to_string(c.n0) + "\nc0 = " + to_string(c.c0) + "\n\n";
    o += "[time]\nT = " + num(c.T) + "\ndt = " + dt(c.dt) + "\ndt_cap = " + num(c.dt.cap) +
         "\nsnapshots = " + std::to_string(c.snapshots) + "\ntau = " + num(c.tau) + "\n\n";
    o += "[monitors]\nenabled = " + std::string(c.monitors.enabled ? "true" : "false") + "\ns = " + num(c.monitors.s) +
         "\np = " + num(c.monitors.p) + "\nq = " + num(c.monitors.q) + "\nr = " + num(c.monitors.r) + "\n\n";
    o += "[sweep]\neps_list = " + list(c.eps_list) + "\nD_list = " + list(c.D_list) + "\nM = " + num(c.M) + "\n\n";
    o += "[small_data]\ndelta = " + num(c.delta) + "\np = " + num(c.sd_p) + "\nq = " + num(c.sd_q) + "\nr = " +
         num(c.sd_r) + "\nlambda = " + num(c.lambda) + "\nbound_factor = " + num(c.bound_factor) + "\n\n";
    o += "[fuzz]\nsamples = " + std::to_string(c.fuzz_samples) + "\nmodes = " + std::to_string(c.fuzz_modes) +
         "\nq = " + list(c.fuzz_q) + "\n";
    return o;
}

}  // namespace fsdl
