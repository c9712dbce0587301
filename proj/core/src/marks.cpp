#include "hawkesim/marks.hpp"

#include <algorithm>
#include <cmath>

#include "hawkesim/errors.hpp"

namespace hawkes {

namespace {

constexpr double kMomentTol = 1e-12;

void require(bool cond, const std::string& message) {
    if (!cond) throw ConfigError(message);
}

}  // namespace

MarkDistribution MarkDistribution::dirac(double value) {
    require(std::isfinite(value), "dirac marks: value must be finite");
    MarkDistribution m;
    m.family_ = Family::dirac;
    m.params_ = {value};
    return m;
}

MarkDistribution MarkDistribution::rademacher() {
    MarkDistribution m;
    m.family_ = Family::rademacher;
    return m;
}

MarkDistribution MarkDistribution::centered_normal(double variance) {
    require(std::isfinite(variance) && variance > 0.0, "centered_normal marks: variance must be > 0");
    MarkDistribution m;
    m.family_ = Family::centered_normal;
    m.params_ = {variance};
    return m;
}

MarkDistribution MarkDistribution::two_point(double p, double a, double b) {
    require(std::isfinite(p) && p > 0.0 && p < 1.0, "two_point marks: p must lie in (0, 1)");
    require(std::isfinite(a) && std::isfinite(b), "two_point marks: values must be finite");
    MarkDistribution m;
    m.family_ = Family::two_point;
    m.params_ = {p, a, b};
    return m;
}

MarkDistribution MarkDistribution::discrete(std::vector<double> values,
                                            std::vector<double> probabilities) {
    require(!values.empty(), "discrete marks: empty table");
    require(values.size() == probabilities.size(), "discrete marks: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(std::isfinite(values[i]), "discrete marks: non-finite value");
        require(std::isfinite(probabilities[i]) && probabilities[i] >= 0.0,
                "discrete marks: probabilities must be >= 0");
        total += probabilities[i];
    }
    require(std::abs(total - 1.0) <= 1e-12, "discrete marks: probabilities must sum to 1");
    MarkDistribution m;
    m.family_ = Family::discrete;
    m.values_ = std::move(values);
    m.probabilities_ = std::move(probabilities);
    m.cdf_.resize(m.probabilities_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m.probabilities_.size(); ++i) {
        acc += m.probabilities_[i];
        m.cdf_[i] = acc;
    }
    m.cdf_.back() = 1.0;
    return m;
}

MarkMoments MarkDistribution::moments() const {
    MarkMoments out;
    switch (family_) {
        case Family::dirac: {
            const double c = params_[0];
            out = {c, c * c, c * c * c, c * c * c * c};
            break;
        }
        case Family::rademacher:
            out = {0.0, 1.0, 0.0, 1.0};
            break;
        case Family::centered_normal: {
            const double v = params_[0];
            out = {0.0, v, 0.0, 3.0 * v * v};
            break;
        }
        case Family::two_point: {
            const double p = params_[0];
            const double a = params_[1];
            const double b = params_[2];
            auto mix = [&](int k) { return p * std::pow(a, k) + (1.0 - p) * std::pow(b, k); };
            out = {mix(1), mix(2), mix(3), mix(4)};
            break;
        }
        case Family::discrete: {
            for (std::size_t i = 0; i < values_.size(); ++i) {
                const double v = values_[i];
                const double w = probabilities_[i];
                out.mean += w * v;
                out.second += w * v * v;
                out.third += w * v * v * v;
                out.fourth += w * v * v * v * v;
            }
            break;
        }
    }
    return out;
}

double MarkDistribution::sample(RngStream& rng) const {
    switch (family_) {
        case Family::dirac:
            return params_[0];
        case Family::rademacher:
            return rng.uniform01() < 0.5 ? -1.0 : 1.0;
        case Family::centered_normal:
            return std::sqrt(params_[0]) * rng.normal();
        case Family::two_point:
            return rng.uniform01() < params_[0] ? params_[1] : params_[2];
        case Family::discrete: {
            const double u = rng.uniform01();
            const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
            const auto idx = static_cast<std::size_t>(it - cdf_.begin());
            return values_[std::min(idx, values_.size() - 1)];
        }
    }
    return 0.0;
}

std::vector<double> MarkDistribution::sample_marks(std::size_t n, RngStream& rng) const {
    std::vector<double> out(n);
    for (auto& x : out) x = sample(rng);
    return out;
}

std::string MarkDistribution::family_name() const {
    switch (family_) {
        case Family::dirac: return "dirac";
        case Family::rademacher: return "rademacher";
        case Family::centered_normal: return "centered_normal";
        case Family::two_point: return "two_point";
        case Family::discrete: return "discrete";
    }
    return "unknown";
}

FastRateHypothesisReport check_fast_rate_hypothesis(const MarkDistribution& marks) {
    const MarkMoments m = marks.moments();
    FastRateHypothesisReport report;
    report.mean = m.mean;
    report.third = m.third;
    report.fourth = m.fourth;
    const double scale = 1.0 + std::abs(m.second);
    report.ok = std::abs(m.mean) <= kMomentTol * scale &&
                std::abs(m.third) <= kMomentTol * scale * scale &&
                std::isfinite(m.fourth);
    return report;
}

}  // namespace hawkes
