#pragma once

#include <string>
#include <vector>

#include "hawkesim/rng.hpp"

namespace hawkes {

struct MarkMoments {
    double mean = 0.0;      // E[X]
    double second = 0.0;    // E[X^2]
    double third = 0.0;     // E[X^3]
    double fourth = 0.0;    // E[X^4]
};

// IID mark distribution attached to event points.  Families:
//   dirac(c)            point mass at c (c = 1 recovers the plain counting process)
//   rademacher          +1 / -1 with probability 1/2 each
//   centered_normal(v)  N(0, v)
//   two_point(p, a, b)  a with probability p, b otherwise
//   discrete(vals, ps)  finite table
class MarkDistribution {
public:
    enum class Family { dirac, rademacher, centered_normal, two_point, discrete };

    static MarkDistribution dirac(double value);
    static MarkDistribution rademacher();
    static MarkDistribution centered_normal(double variance);
    static MarkDistribution two_point(double p, double a, double b);
    static MarkDistribution discrete(std::vector<double> values, std::vector<double> probabilities);

    Family family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probabilities() const { return probabilities_; }

    // Closed-form moments.
    MarkMoments moments() const;

    double sample(RngStream& rng) const;
    std::vector<double> sample_marks(std::size_t n, RngStream& rng) const;

    std::string family_name() const;

private:
    MarkDistribution() = default;

    Family family_ = Family::dirac;
    std::vector<double> params_;
    std::vector<double> values_;
    std::vector<double> probabilities_;
    std::vector<double> cdf_;
};

struct FastRateHypothesisReport {
    bool ok = false;
    double mean = 0.0;
    double third = 0.0;
    double fourth = 0.0;
};

// The faster-rate regime needs E[X] = 0, E[X^3] = 0 and E[X^4] finite;
// checked on closed-form moments up to 1e-12 slack.
FastRateHypothesisReport check_fast_rate_hypothesis(const MarkDistribution& marks);

}  // namespace hawkes
