#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hawkesim/config.hpp"
#include "hawkesim/engine.hpp"
#include "hawkesim/kernel.hpp"
#include "hawkesim/stats.hpp"
#include "hawkesim/theory.hpp"
#include "hawkesim/verify.hpp"

namespace hawkes {

// Where and how a run executes.  An empty output_dir skips all file
// output; results still come back to the caller.
struct RunContext {
    std::string output_dir;
    int threads = 1;
};

struct PsiRunResult {
    PsiTable table;
    double step = 0.0;
    double horizon = 0.0;
    double tol = 0.0;
    double psi_l1_exact = 0.0;  // |phi|_1 / (1 - |phi|_1)
};

// Solves the renewal density on the resolved grid and writes psi.csv.
PsiRunResult run_psi(const ExperimentConfig& config, const RunContext& ctx);

struct SimPathRow {
    double horizon = 0.0;
    std::size_t replication = 0;
    double count = 0.0;
    double mark_sum = 0.0;
    double compensator = 0.0;
    double martingale = 0.0;
};

struct SimRunResult {
    std::vector<SimPathRow> rows;  // horizon-major, replication-minor
    std::size_t events_persisted = 0;
};

// Simulates replications per horizon and writes paths.csv (and one
// events_T*_rep*.csv per path when sim.persist_events is set).
SimRunResult run_sim(const ExperimentConfig& config, const RunContext& ctx);

struct HorizonSummary {
    double horizon = 0.0;
    DistanceEstimate distance;
    CumulantEstimates cumulants;
};

struct RatesRunResult {
    AsymptoticParams params;
    FunctionalTag tag = FunctionalTag::compensated;
    std::string distance_kind;
    double target_variance = 0.0;
    std::vector<HorizonSummary> horizons;
    RateFit fit;
};

// The main experiment: per horizon, simulate, normalize, estimate the
// distance to the Gaussian limit and the first four cumulants; then fit
// log distance against log horizon.  Writes config.json, distances.csv,
// cumulants.csv and ratefit.json.
RatesRunResult run_rates(const ExperimentConfig& config, const RunContext& ctx);

struct VerifyRunResult {
    std::vector<LemmaReport> reports;
    // True when every regular check passes and, if negative controls were
    // requested, every corrupted variant fails.
    bool ok = false;
};

// Runs the six distribution-identity checks and writes lemmas.json.
VerifyRunResult run_verify(const ExperimentConfig& config, const RunContext& ctx);

// Fixed-width text rendering used by the CLI.
std::string lemma_report_text(const LemmaReport& report);
std::string rates_summary_text(const RatesRunResult& result);

// Re-reads a run directory written by any subcommand and renders a
// summary; throws ConfigError when no known output file is present.
std::string summarize_run_directory(const std::string& dir);

}  // namespace hawkes
