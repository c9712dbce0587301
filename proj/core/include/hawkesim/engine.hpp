#pragma once

#include <cstddef>
#include <vector>

#include "hawkesim/kernel.hpp"
#include "hawkesim/marks.hpp"
#include "hawkesim/rng.hpp"

namespace hawkes {

struct EventLog {
    double horizon = 0.0;
    std::vector<double> times;  // strictly increasing in (0, horizon]
    std::vector<double> marks;  // same length as times
};

struct PathResult {
    enum class Method { thinning, cluster };

    EventLog log;
    Method method = Method::thinning;
    double count = 0.0;        // H_T
    double mark_sum = 0.0;     // S_T
    double compensator = 0.0;  // int_0^T lambda_s ds
    double martingale = 0.0;   // M_T = H_T - compensator
};

struct CoupledOptions {
    std::size_t grid_points = 256;
    // Negative-control switch: thin the shifted path with its own theta
    // draws instead of the shared ones, deliberately breaking the coupling.
    bool decouple_thinning = false;
};

// Joint simulation of a path H and its add-point shift H composed with
// eps+_{t0}: one driving candidate stream, each candidate (t, theta, x)
// accepted into a path iff theta <= that path's intensity.  The shifted
// path additionally carries a deterministic atom at t0 (mark stored as 1;
// excluded from mark statistics, which only use base-path quantities).
struct CoupledPathResult {
    double insertion_time = 0.0;
    PathResult base;
    PathResult shifted;
    // Shifted-only events strictly after t0 (the inserted atom excluded).
    std::vector<double> extra_times;
    std::vector<double> extra_marks;
    double extra_count = 0.0;          // hat H_T
    double intensity_gap_integral = 0.0;  // int_{t0}^T lambda_hat ds
    double extra_martingale = 0.0;     // hat M_T = hat H_T - gap integral
    // lambda_hat sampled on a uniform grid over [t0, T] plus shifted event
    // times, each value the difference of independently accumulated
    // shifted/base intensities (left limits).
    std::vector<double> sample_times;
    std::vector<double> lambda_hat;
    double min_lambda_hat = 0.0;
    bool containment_ok = true;        // base events form a subset of shifted events
};

class Simulator {
public:
    Simulator(Kernel kernel, double mu, MarkDistribution marks);

    const Kernel& kernel() const { return kernel_; }
    double mu() const { return mu_; }
    const MarkDistribution& marks() const { return marks_; }

    // Ogata thinning under the nonincreasing tail majorant of phi; the
    // envelope is re-evaluated after every candidate.  Exponential kernels
    // take an O(1) Markovian update per candidate.
    PathResult simulate_thinning(double T, RngStream& rng) const;

    // Independent oracle: immigrant/offspring branching representation.
    // Throws NumericalFailure if the generation cap is exceeded.
    PathResult simulate_cluster(double T, RngStream& rng, std::size_t generation_cap = 10000) const;

    CoupledPathResult simulate_coupled_addpoint(double T, double t0, RngStream& rng,
                                                const CoupledOptions& options = {}) const;

    // Intensity at time t given a log (left limit: events strictly before t).
    double intensity(const EventLog& log, double t) const;

private:
    Kernel kernel_;
    double mu_;
    MarkDistribution marks_;
    double support_cutoff_;
};

// int_0^s lambda_u du for the path in `log`, evaluated with the kernel
// antiderivative; s defaults to the log horizon.
double compensator_integral(const EventLog& log, const Kernel& kernel, double mu);
double compensator_integral_at(const EventLog& log, const Kernel& kernel, double mu, double s);

}  // namespace hawkes
