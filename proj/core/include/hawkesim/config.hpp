#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hawkesim/kernel.hpp"
#include "hawkesim/marks.hpp"

namespace hawkes {

// Sub-config for the renewal-density solver.  Zeros mean "derive":
// step from the kernel family, horizon from the largest horizon.
struct PsiSection {
    double step = 0.0;
    double horizon = 0.0;
    double tol = kPsiDefaultTol;
};

struct SimSection {
    std::string method = "thinning";  // thinning | cluster
    bool persist_events = false;
};

struct VerifySection {
    double T = 10.0;
    std::size_t replications = 4000;
    std::size_t strata = 8;
    std::size_t insertions = 7;
    std::vector<double> checkpoints = {2.0, 5.0, 10.0};
    bool negative_controls = false;
};

// One experiment description, loaded from strict JSON: unknown keys are
// rejected, defaults are materialized on load, and serialization is
// canonical so load(serialize(c)) == c.
struct ExperimentConfig {
    int schema_version = 1;
    std::uint64_t seed = 1;
    double mu = 1.0;
    Kernel kernel = Kernel::exponential(1.0, 2.0);
    MarkDistribution marks = MarkDistribution::dirac(1.0);
    std::vector<double> horizons = {50.0, 100.0, 200.0, 400.0, 800.0};
    std::size_t replications = 1000;
    std::string functional = "F";          // F | Gamma | V | raw
    std::string distance = "wasserstein";  // wasserstein | smooth-surrogate
    std::size_t debias_replicates = 64;
    std::size_t bootstrap_resamples = 200;
    std::string output_dir;  // empty: CLI chooses
    PsiSection psi;
    SimSection sim;
    VerifySection verify;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string to_json_text() const;

    double max_horizon() const;
    double psi_step_resolved() const;
    double psi_horizon_resolved() const;
};

// FNV-1a hash of the canonical serialization, for run metadata.
std::string config_fingerprint(const ExperimentConfig& config);

}  // namespace hawkes
