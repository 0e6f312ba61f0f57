// Command-line front end: parses flags with CLI11, merges an optional flat
// config file (flags win), and dispatches to the workflow layer.

#include <string>

#include <CLI11.hpp>

#include "steklab/cli.hpp"

namespace {

struct FlagValues {
    std::string config_path;
    std::string omega, n_max, dims, seeds, window, grid, basis, branches, side, format, out;
};

void add_common_flags(CLI::App* sub, FlagValues& fv) {
    sub->add_option("--config", fv.config_path, "flat key = value config file");
    sub->add_option("--omega", fv.omega, "frequency omega");
    sub->add_option("--n-max", fv.n_max, "maximal spherical-harmonic degree");
    sub->add_option("--dims", fv.dims, "model dimensions V,W1,W2");
    sub->add_option("--seeds", fv.seeds, "comma-separated model seeds");
    sub->add_option("--window", fv.window, "search window a,b");
    sub->add_option("--grid", fv.grid, "grid points per window");
    sub->add_option("--basis", fv.basis, "radial basis size");
    sub->add_option("--branches", fv.branches, "tau branches to track");
    sub->add_option("--side", fv.side, "schur side: w1 or v");
    sub->add_option("--format", fv.format, "output format: csv or json");
    sub->add_option("--out", fv.out, "output path (directory for model-verify)");
}

int apply_and_run(const std::string& command, const FlagValues& fv) {
    steklab::RunConfig cfg;
    cfg.command = command;
    try {
        if (!fv.config_path.empty()) steklab::load_config_file(cfg, fv.config_path);
        auto set = [&cfg](const char* key, const std::string& v) {
            if (!v.empty()) steklab::config_set(cfg, key, v);
        };
        set("omega", fv.omega);
        set("n-max", fv.n_max);
        set("dims", fv.dims);
        set("seeds", fv.seeds);
        set("window", fv.window);
        set("grid", fv.grid);
        set("basis", fv.basis);
        set("branches", fv.branches);
        set("side", fv.side);
        set("format", fv.format);
        set("out", fv.out);
    } catch (const steklab::usage_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return steklab::exit_usage;
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return steklab::exit_io;
    }
    return steklab::run_command(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steklab: electromagnetic Stekloff eigenvalue laboratory"};
    app.require_subcommand(1);

    FlagValues fv_ball, fv_verify, fv_tau, fv_mod;
    auto* sub_ball =
        app.add_subcommand("ball-spectrum", "analytic TE/TM spectrum of the unit ball");
    add_common_flags(sub_ball, fv_ball);
    auto* sub_verify =
        app.add_subcommand("model-verify", "full verification workflow on synthetic models");
    add_common_flags(sub_verify, fv_verify);
    auto* sub_tau = app.add_subcommand("tau-curves", "sampled tau branch curves + fixed points");
    add_common_flags(sub_tau, fv_tau);
    auto* sub_mod =
        app.add_subcommand("modified", "modified spectra (ScalarLB, SProjection) per degree");
    add_common_flags(sub_mod, fv_mod);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : steklab::exit_usage;
    }

    if (sub_ball->parsed()) return apply_and_run("ball-spectrum", fv_ball);
    if (sub_verify->parsed()) return apply_and_run("model-verify", fv_verify);
    if (sub_tau->parsed()) return apply_and_run("tau-curves", fv_tau);
    return apply_and_run("modified", fv_mod);
}
