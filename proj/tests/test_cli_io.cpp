#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "fsdl/fsdl.hpp"

using namespace fsdl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fsdl_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

Hypothesis rejection(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.hypothesis();
    }
    return Hypothesis::None;
}

std::size_t error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return 0;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FSDL_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string config_path(const std::string& name) { return std::string(FSDL_SOURCE_DIR) + "/configs/" + name; }

const std::string kSim1D = "[experiment]\nkind = simulate-1d\n[time]\nT = 0.1\n";
const std::string kSim2D = "[experiment]\nkind = simulate-2d\n[time]\nT = 0.1\n";

}  // namespace

TEST(Config, DefaultsAreMaterialized) {
    const auto c = parse_config(kSim1D);
    EXPECT_EQ(c.kind, ExperimentKind::Simulate1D);
    EXPECT_EQ(c.n_cells, 256u);
    EXPECT_DOUBLE_EQ(c.tau, 0.005);
    EXPECT_EQ(c.K_f, 0.0);
    EXPECT_EQ(c.dt, DtPolicy::cfl(0.9));
    EXPECT_EQ(c.n0, ProfileSpec::cosine(1.0, 0.5, 1.0));

    const auto q = parse_config("[experiment]\nkind = quasi-blowup\n");
    EXPECT_EQ(q.n_cells, 2048u);
    EXPECT_DOUBLE_EQ(q.b, 0.5);
    EXPECT_DOUBLE_EQ(q.K_f, 1.0);
    EXPECT_DOUBLE_EQ(q.T, 2.0);
    EXPECT_EQ(q.D_list, (std::vector<double>{1.0, 0.1, 0.01, 0.001}));

    const auto s = parse_config("[experiment]\nkind = sweep-eps\n[time]\nT = 0.5\n");
    EXPECT_EQ(s.dt, DtPolicy::fixed(5e-4));
    EXPECT_EQ(s.eps_list.size(), 5u);
}

TEST(Config, EveryHypothesisHasARejectingConfig) {
    EXPECT_EQ(rejection(kSim1D + "[model]\neps = -1\n"), Hypothesis::ParameterRange);
    EXPECT_EQ(rejection(kSim1D + "[model]\nD = 0\n"), Hypothesis::ParameterRange);
    EXPECT_EQ(rejection(kSim1D + "[model]\nb = -0.5\n"), Hypothesis::Source);
    EXPECT_EQ(rejection(kSim2D + "[model]\nsource = logistic\na = 2\nK_f = 1\n"), Hypothesis::Source);
    EXPECT_EQ(rejection(kSim2D + "[sensitivity]\nK_S = 0\n"), Hypothesis::Sensitivity);
    EXPECT_EQ(rejection(kSim2D + "[fluid]\nphi = linear(inf, 0)\n"), Hypothesis::Potential);
    EXPECT_EQ(rejection(kSim1D + "[initial]\nn0 = constant(0)\n"), Hypothesis::InitialData);
    EXPECT_EQ(rejection(kSim1D + "[initial]\nc0 = constant(-1)\n"), Hypothesis::InitialData);
    EXPECT_EQ(rejection("[experiment]\nkind = quasi-blowup\n[model]\nb = 1\n"), Hypothesis::QuasiBlowup);
    EXPECT_EQ(rejection("[experiment]\nkind = small-data-2d\n[small_data]\nlambda = 4\nq = 2.5\nr = 3\n"),
              Hypothesis::Exponents);
    EXPECT_EQ(rejection(kSim1D + "[model]\neps 1\n"), Hypothesis::Syntax);
}

TEST(Config, QuasiBlowupMessageNamesTheHypothesis) {
    try {
        parse_config("[experiment]\nkind = quasi-blowup\n[model]\nb = 1\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("b must satisfy b in [0,1)"), std::string::npos);
    }
}

TEST(Config, SyntaxErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line("[experiment]\nkind = simulate-1d\n[time]\nT = abc\n"), 4u);
    EXPECT_EQ(error_line("[experiment]\nkind = simulate-1d\n\n[nonsense]\n"), 4u);
    EXPECT_EQ(error_line("[experiment]\nkind = simulate-1d\nbogus = 1\n"), 3u);
    EXPECT_EQ(error_line("[experiment]\nkind = simulate-1d\nkind = sweep-eps\n"), 3u);
    EXPECT_EQ(error_line("T = 1\n"), 1u);
    EXPECT_EQ(error_line("[experiment]\nkind = simulate-1d\n[initial]\nn0 = wobble(1)\n"), 4u);
    EXPECT_EQ(error_line("[experiment\n"), 1u);
    EXPECT_EQ(error_line("[experiment]\nkind = simulate-3d\n"), 2u);
}

TEST(Config, UnknownKeysAndMissingKind) {
    EXPECT_EQ(rejection("[experiment]\nkind = simulate-1d\n[time]\nT = 1\nfrobnicate = 2\n"), Hypothesis::Syntax);
    EXPECT_EQ(rejection("[time]\nT = 1\n"), Hypothesis::Syntax);
}

TEST(Config, CommentsAndWhitespace) {
    const auto c = parse_config("# leading\n[experiment]   \n  kind = simulate-1d  # trailing\n[time]\nT=0.25\n");
    EXPECT_DOUBLE_EQ(c.T, 0.25);
}

TEST(Config, FormatRoundTrips) {
    for (const char* name : {"simulate_1d.cfg", "sweep_eps.cfg", "quasi_blowup.cfg", "simulate_2d.cfg", "small_data_2d.cfg",
                             "check_inequalities.cfg"}) {
        const auto c = parse_config(read_file(config_path(name)));
        const std::string once = format_config(c);
        EXPECT_EQ(format_config(parse_config(once)), once) << name;
    }
}

TEST(Csv, HeaderOnlyAndRows) {
    const std::string empty = monitors_csv({});
    const auto t = parse_csv(empty);
    EXPECT_EQ(t.header, monitor_columns());
    EXPECT_TRUE(t.rows.empty());

    SweepReport rep;
    for (double p : {1e-1, 1e-2, 0.0}) {
        SweepRow r;
        r.param = p;
        r.norms.sup_n_C0 = p / 3;
        r.verdict = "ok, fine";
        rep.rows.push_back(r);
    }
    const auto s = parse_csv(sweep_csv(rep));
    EXPECT_EQ(s.header, sweep_columns());
    ASSERT_EQ(s.rows.size(), 3u);
    EXPECT_EQ(s.number(1, "sup_n_C0"), 1e-2 / 3);
    EXPECT_EQ(s.rows[0].back(), "ok; fine");
    EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), IoError);
    EXPECT_THROW(parse_csv(""), IoError);
}

TEST(Csv, MonitorSeriesRoundTripsExactly) {
    const ModelParams1D p{0.1, 1.0, 1.0, 1.0, 5.0};
    const auto tr = run(p, Grid1D(64), ProfileSpec::cosine(1.0, 0.5, 1.0), ProfileSpec::constant(0.0), 0.05,
                        DtPolicy::fixed(1e-3), {});
    const auto back = read_monitors_csv(monitors_csv(tr.monitors));
    ASSERT_EQ(back.size(), tr.monitors.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        EXPECT_EQ(back[k].mass, tr.monitors[k].mass);
        EXPECT_EQ(back[k].t, tr.monitors[k].t);
        EXPECT_EQ(back[k].gradc_q_integral, tr.monitors[k].gradc_q_integral);
        EXPECT_EQ(back[k].argmax_n, tr.monitors[k].argmax_n);
        EXPECT_TRUE(std::isinf(back[k].r));
    }
}

TEST(Snapshot, RoundTrips1DAnd2D) {
    const Grid1D g1(16);
    const State1D s1{0.25, Field1D::sample(g1, [](double x) { return 1.0 / 3.0 + x; }), Field1D(g1, 1, 2.0)};
    const auto d1 = parse_snapshot(format_snapshot(snapshot_data(s1)));
    EXPECT_EQ(d1.dim, 1);
    EXPECT_EQ(d1.t, 0.25);
    EXPECT_EQ(d1.column("n"), std::vector<double>(s1.n.values().begin(), s1.n.values().end()));

    const Grid2D g2(8, 12);
    const State2D s2{0.5, Field2D(g2, 1, 1.5), Field2D(g2, 1, 0.5), vortex_velocity(g2, 1.0), Field2D(g2)};
    const auto d2 = parse_snapshot(format_snapshot(snapshot_data(s2)));
    EXPECT_EQ(d2.dim, 2);
    EXPECT_EQ(d2.nx, 8u);
    EXPECT_EQ(d2.ny, 12u);
    EXPECT_EQ(d2.column("c")[5], 0.5);
    EXPECT_THROW(d2.column("nope"), IoError);
    EXPECT_THROW(parse_snapshot("garbage\n"), IoError);
}

TEST(Io, FormatDoubleIsExact) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) EXPECT_EQ(parse_double(format_double(v)), v);
    EXPECT_TRUE(std::isinf(parse_double(format_double(kInf))));
    EXPECT_THROW(parse_double("1.0x"), IoError);
}

TEST(Io, AtomicWriteLeavesNoPartialFile) {
    const fs::path dir = scratch("atomic");
    fs::create_directories(dir);
    atomic_write(dir / "a.txt", "hello");
    EXPECT_EQ(read_file(dir / "a.txt"), "hello");
    EXPECT_THROW(atomic_write(dir / "missing" / "b.txt", "x"), IoError);
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir)) files += e.is_regular_file();
    EXPECT_EQ(files, 1u);
}

TEST(Io, UnwritableOutputGivesIoExitCode) {
    const fs::path blocker = scratch("blocker");
    atomic_write(blocker, "a regular file where a directory is expected");
    auto cfg = parse_config(read_file(config_path("check_inequalities.cfg")));
    cfg.fuzz_samples = 2;
    std::ostringstream log;
    EXPECT_EQ(run_experiment(cfg, blocker / "out", log), kExitIo);
    EXPECT_TRUE(fs::is_regular_file(blocker));
    EXPECT_NE(log.str().find("I/O error"), std::string::npos);
}

TEST(Experiment, SimulateWritesMonitorsSnapshotsAndSummary) {
    const fs::path out = scratch("sim");
    auto cfg = parse_config(kSim1D + "[grid]\nn_cells = 64\n[time]\nsnapshots = 2\n");
    std::ostringstream log;
    EXPECT_EQ(run_experiment(cfg, out, log), kExitOk) << log.str();
    EXPECT_TRUE(fs::exists(out / "monitors.csv"));
    EXPECT_TRUE(fs::exists(out / "snapshot_0000.txt"));
    EXPECT_TRUE(fs::exists(out / "snapshot_0002.txt"));
    EXPECT_FALSE(fs::exists(out / "snapshot_0003.txt"));
    EXPECT_NE(read_file(out / "summary.txt").find("elliptic relation: pass"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    const fs::path out = scratch("cli");
    EXPECT_EQ(run_cli("version"), 0);
    EXPECT_EQ(run_cli("validate --config " + config_path("simulate_1d.cfg")), 0);
    EXPECT_EQ(run_cli("validate --config /nonexistent/file.cfg"), kExitIo);
    EXPECT_EQ(run_cli("sweep-eps --config " + config_path("simulate_1d.cfg") + " --out " + out.string()), kExitConfig);
    EXPECT_EQ(run_cli("simulate-1d"), kExitConfig);
    EXPECT_EQ(run_cli("no-such-command"), kExitConfig);

    const fs::path bad = scratch("bad.cfg");
    atomic_write(bad, "[experiment]\nkind = quasi-blowup\n[model]\nb = 1\n");
    EXPECT_EQ(run_cli("quasi-blowup --config " + bad.string()), kExitConfig);

    EXPECT_EQ(run_cli("check-inequalities --config " + config_path("check_inequalities.cfg") + " --out " + out.string()),
              kExitOk);
    EXPECT_TRUE(fs::exists(out / "fuzz.csv"));
}

TEST(Cli, EnvironmentOverridesOutput) {
    const fs::path env_out = scratch("env_out");
    const fs::path flag_out = scratch("flag_out");
    const std::string cmd = "FSDL_OUT=" + env_out.string() + " " + std::string(FSDL_CLI) +
                            " check-inequalities --config " + config_path("check_inequalities.cfg") + " --out " +
                            flag_out.string() + " > /dev/null 2>&1";
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(env_out / "fuzz.csv"));
    EXPECT_FALSE(fs::exists(flag_out));
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    for (const auto& d : {a, b})
        ASSERT_EQ(run_cli("simulate-1d --config " + config_path("simulate_1d.cfg") + " --out " + d.string()), 0);
    EXPECT_EQ(read_file(a / "monitors.csv"), read_file(b / "monitors.csv"));
    EXPECT_EQ(read_file(a / "snapshot_0003.txt"), read_file(b / "snapshot_0003.txt"));
}
