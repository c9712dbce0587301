// hawkesim: simulate marked self-exciting point processes and measure how
// fast normalized functionals approach their Gaussian limits.
//
// Exit codes: 0 success, 2 configuration error, 3 verification failure,
// 4 numerical failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hawkesim/config.hpp"
#include "hawkesim/errors.hpp"
#include "hawkesim/runner.hpp"

#ifndef HAWKESIM_VERSION
#define HAWKESIM_VERSION "0.0.0"
#endif
#ifndef HAWKESIM_GIT_REV
#define HAWKESIM_GIT_REV "unknown"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerifyFailed = 3;
constexpr int kExitNumerical = 4;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::string run_dir;  // report only
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
};

hawkes::ExperimentConfig load_config(const CliOptions& cli) {
    hawkes::ExperimentConfig config = hawkes::ExperimentConfig::load(cli.config_path);
    if (cli.seed_set) config.seed = cli.seed;
    if (!cli.out_dir.empty()) config.output_dir = cli.out_dir;
    return config;
}

hawkes::RunContext make_context(const hawkes::ExperimentConfig& config, const CliOptions& cli,
                                const std::string& subcommand) {
    hawkes::RunContext ctx;
    ctx.threads = cli.threads;
    ctx.output_dir = !config.output_dir.empty() ? config.output_dir : "runs/" + subcommand;
    return ctx;
}

int run_psi_command(const CliOptions& cli) {
    const auto config = load_config(cli);
    const auto ctx = make_context(config, cli, "psi");
    const auto result = hawkes::run_psi(config, ctx);
    std::printf("psi: %zu grid points, step=%g, horizon=%g\n", result.table.values.size(),
                result.step, result.horizon);
    std::printf("  residual=%.3g (tol %.3g), iterations=%zu\n", result.table.residual, result.tol,
                result.table.iterations);
    std::printf("  l1 estimate=%.10g  exact=%.10g  tail bound=%.3g\n", result.table.l1_estimate,
                result.psi_l1_exact, result.table.tail_bound);
    std::printf("wrote %s/psi.csv\n", ctx.output_dir.c_str());
    return kExitOk;
}

int run_sim_command(const CliOptions& cli) {
    const auto config = load_config(cli);
    const auto ctx = make_context(config, cli, "sim");
    const auto result = hawkes::run_sim(config, ctx);
    std::printf("sim: %zu paths (%zu horizons x %zu replications), method=%s\n",
                result.rows.size(), config.horizons.size(), config.replications,
                config.sim.method.c_str());
    if (config.sim.persist_events) {
        std::printf("  persisted %zu event logs\n", result.events_persisted);
    }
    std::printf("wrote %s/paths.csv\n", ctx.output_dir.c_str());
    return kExitOk;
}

int run_rates_command(const CliOptions& cli) {
    const auto config = load_config(cli);
    const auto ctx = make_context(config, cli, "rates");
    const auto result = hawkes::run_rates(config, ctx);
    std::fputs(hawkes::rates_summary_text(result).c_str(), stdout);
    std::printf("wrote %s/{config.json,distances.csv,cumulants.csv,ratefit.json}\n",
                ctx.output_dir.c_str());
    return kExitOk;
}

int run_verify_command(const CliOptions& cli) {
    const auto config = load_config(cli);
    const auto ctx = make_context(config, cli, "verify");
    const auto result = hawkes::run_verify(config, ctx);
    for (const auto& report : result.reports) {
        std::fputs(hawkes::lemma_report_text(report).c_str(), stdout);
    }
    std::printf("overall: %s\n", result.ok ? "pass" : "FAIL");
    std::printf("wrote %s/lemmas.json\n", ctx.output_dir.c_str());
    return result.ok ? kExitOk : kExitVerifyFailed;
}

int run_report_command(const CliOptions& cli) {
    std::fputs(hawkes::summarize_run_directory(cli.run_dir).c_str(), stdout);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-exciting point process simulation and limit diagnostics"};
    app.set_version_flag("--version", std::string(HAWKESIM_VERSION) + " (" HAWKESIM_GIT_REV ")");
    app.require_subcommand(1);

    CliOptions cli;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", cli.config_path, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("-o,--out", cli.out_dir, "output directory (overrides config)");
        cmd->add_option("-s,--seed", cli.seed, "seed override")
            ->each([&](const std::string&) { cli.seed_set = true; });
        cmd->add_option("-t,--threads", cli.threads, "worker threads")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* psi = app.add_subcommand("psi", "solve the renewal density and write psi.csv");
    add_common(psi);
    CLI::App* sim = app.add_subcommand("sim", "simulate paths and write per-path summaries");
    add_common(sim);
    CLI::App* rates =
        app.add_subcommand("rates", "estimate Gaussian-limit distances across horizons");
    add_common(rates);
    CLI::App* verify =
        app.add_subcommand("verify", "run distribution-identity checks and write lemmas.json");
    add_common(verify);
    CLI::App* report = app.add_subcommand("report", "summarize a finished run directory");
    report->add_option("run_dir", cli.run_dir, "run directory to summarize")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        // CLI11 returns 0 for --help/--version; anything else is a usage error.
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (psi->parsed()) return run_psi_command(cli);
        if (sim->parsed()) return run_sim_command(cli);
        if (rates->parsed()) return run_rates_command(cli);
        if (verify->parsed()) return run_verify_command(cli);
        if (report->parsed()) return run_report_command(cli);
        std::fprintf(stderr, "error: no subcommand\n");
        return kExitConfig;
    } catch (const hawkes::ConfigError& err) {
        std::fprintf(stderr, "config error: %s\n", err.what());
        return kExitConfig;
    } catch (const hawkes::NumericalFailure& err) {
        std::fprintf(stderr, "numerical failure: %s\n", err.what());
        return kExitNumerical;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "internal error: %s\n", err.what());
        return kExitNumerical;
    }
}
