#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hawkesim/engine.hpp"
#include "hawkesim/kernel.hpp"
#include "hawkesim/rng.hpp"
#include "hawkesim/theory.hpp"

namespace hawkes {

// Which centering/scaling is applied to (H_T, S_T) before comparing
// against the Gaussian limit.
enum class FunctionalTag {
    compensated,   // F_T     = (S_T - E[X] int_0^T lambda) / sqrt(T)   -> N(0, gamma^2)
    drift,         // Gamma_T = (S_T - varpi T) / sqrt(T)               -> N(0, zeta^2)
    mean_centered, // V_T     = (S_T - E[X] int_0^T E[lambda]) / sqrt(T)-> N(0, zeta^2)
    raw,           // S_T / sqrt(T) (centered marks)                    -> N(0, gamma^2)
};

FunctionalTag functional_tag_from_name(const std::string& name);
std::string functional_tag_name(FunctionalTag tag);

// Limit variance the tag converges to.
double target_variance(FunctionalTag tag, const AsymptoticParams& params);

// psi may be null except for mean_centered, which needs the integrated
// mean intensity.
double normalize(const PathResult& path, FunctionalTag tag, const AsymptoticParams& params,
                 const Kernel& kernel, const PsiTable* psi);

struct Sample {
    double horizon = 0.0;
    std::vector<double> values;
};

struct DebiasOptions {
    std::size_t replicates = 64;  // matched-size Gaussian calibration samples
    std::uint64_t seed = 0;
    std::uint64_t stream_context = 0;  // usually the horizon index
};

struct DistanceEstimate {
    double raw = 0.0;       // statistic on the sample
    double offset = 0.0;    // mean statistic over Gaussian calibration samples
    double debiased = 0.0;  // raw - offset (may be slightly negative)
    double se = 0.0;        // Monte Carlo error of `debiased`
    std::size_t sample_size = 0;
    double target_variance = 0.0;
    bool small_sample_advisory = false;  // set when sample_size < 100
};

// Exact L1 distance between the empirical CDF of `sorted` and the
// N(0, variance) CDF, evaluated segment by segment in closed form.
double w1_distance_to_normal(std::span<const double> sorted, double variance);

// W1 estimate with additive debiasing: the same statistic is computed on
// `replicates` Gaussian samples of matching size and its mean subtracted.
DistanceEstimate wasserstein1_to_normal(const Sample& sample, double variance,
                                        const DebiasOptions& debias);

// Certified dictionary of test functions h(x) = scale sin(omega x + phase)
// with max over i in 1..4 of scale omega^i <= 1, so each h lies in the
// fourth-order smooth class and max |E h(sample) - E h(N)| lower-bounds the
// smooth distance.
struct SurrogateDictionary {
    struct Entry {
        double omega = 1.0;
        double phase = 0.0;
        double scale = 1.0;
    };
    std::vector<Entry> entries;

    static SurrogateDictionary default_dictionary();
    // Throws ConfigError if any entry violates the derivative bounds.
    void certify() const;
};

// E[h(Z)] for Z ~ N(0, variance) and a dictionary entry:
// scale exp(-variance omega^2 / 2) sin(phase).
double surrogate_entry_normal_mean(const SurrogateDictionary::Entry& entry, double variance);

DistanceEstimate smooth_distance_surrogate(const Sample& sample, double variance,
                                           const SurrogateDictionary& dictionary,
                                           const DebiasOptions& debias);

struct CumulantEstimates {
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
    double se1 = 0.0, se2 = 0.0, se3 = 0.0, se4 = 0.0;
    std::size_t sample_size = 0;
};

// Unbiased k-statistics for the first four cumulants with bootstrap
// standard errors.
CumulantEstimates k_cumulants(const Sample& sample, std::size_t bootstrap_resamples,
                              std::uint64_t seed, std::uint64_t stream_context = 0);

struct RatePoint {
    double horizon = 0.0;
    double distance = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r2 = 0.0;
    std::vector<RatePoint> used;
    std::vector<RatePoint> dropped;  // non-positive distances, excluded with a warning
};

// Least-squares fit of log(distance) against log(horizon).  Throws
// NumericalFailure if fewer than 3 positive points survive.
RateFit fit_rate(const std::vector<RatePoint>& points);

}  // namespace hawkes
