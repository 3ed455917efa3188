// fsdl <subcommand> --config <path> [--out <dir>] [--jobs N] [--seed S]

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "fsdl/fsdl.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::size_t jobs = 0;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Options& opt) {
    sub->add_option("--config", opt.config, "experiment config file")->required();
    sub->add_option("--out", opt.out, "output directory (FSDL_OUT overrides)");
    sub->add_option("--jobs", opt.jobs, "worker threads for sweeps");
    sub->add_option("--seed", opt.seed, "random seed for fuzz campaigns");
}

int load(const Options& opt, fsdl::ExperimentConfig& cfg) {
    std::string text;
    try {
        text = fsdl::read_file(opt.config);
    } catch (const fsdl::IoError& e) {
        std::cerr << "fsdl: " << e.what() << "\n";
        return fsdl::kExitIo;
    }
    try {
        cfg = fsdl::parse_config(text);
        if (opt.seed) {
            cfg.seed = *opt.seed;
            fsdl::validate_config(cfg);
        }
    } catch (const fsdl::ValidationError& e) {
        std::cerr << "fsdl: " << opt.config << ": " << e.what() << "\n";
        return fsdl::kExitConfig;
    }
    return fsdl::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fast signal diffusion limit laboratory"};
    app.require_subcommand(1);
    Options opt;

    std::vector<std::pair<CLI::App*, fsdl::ExperimentKind>> runners;
    for (auto kind : {fsdl::ExperimentKind::Simulate1D, fsdl::ExperimentKind::SweepEps, fsdl::ExperimentKind::QuasiBlowup,
                      fsdl::ExperimentKind::Simulate2D, fsdl::ExperimentKind::SmallData2D,
                      fsdl::ExperimentKind::CheckInequalities}) {
        auto* sub = app.add_subcommand(fsdl::to_string(kind), std::string("run a ") + fsdl::to_string(kind) + " experiment");
        add_common(sub, opt);
        runners.emplace_back(sub, kind);
    }
    auto* validate = app.add_subcommand("validate", "parse and check a config, print it with defaults");
    add_common(validate, opt);
    auto* version = app.add_subcommand("version", "print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fsdl::kExitConfig;
    }

    if (version->parsed()) {
        std::cout << "fsdl " << fsdl::kVersion << "\n";
        return 0;
    }

    fsdl::ExperimentConfig cfg;
    if (const int rc = load(opt, cfg)) return rc;

    if (validate->parsed()) {
        std::cout << fsdl::format_config(cfg);
        return 0;
    }

    for (const auto& [sub, kind] : runners) {
        if (!sub->parsed()) continue;
        if (cfg.kind != kind) {
            std::cerr << "fsdl: config describes a " << fsdl::to_string(cfg.kind) << " experiment, not "
                      << fsdl::to_string(kind) << "\n";
            return fsdl::kExitConfig;
        }
        std::string out = opt.out.empty() ? cfg.output : opt.out;
        if (const char* env = std::getenv("FSDL_OUT"); env && *env) out = env;
        return fsdl::run_experiment(cfg, out, std::cout, opt.jobs);
    }
    return fsdl::kExitConfig;
}
