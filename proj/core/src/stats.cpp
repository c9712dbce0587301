#include "hawkesim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hawkesim/errors.hpp"
#include "hawkesim/gaussian.hpp"

namespace hawkes {

namespace {

void require(bool cond, const std::string& message) {
    if (!cond) throw ConfigError(message);
}

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

FunctionalTag functional_tag_from_name(const std::string& name) {
    if (name == "F") return FunctionalTag::compensated;
    if (name == "Gamma") return FunctionalTag::drift;
    if (name == "V") return FunctionalTag::mean_centered;
    if (name == "raw") return FunctionalTag::raw;
    throw ConfigError("unknown functional tag: " + name + " (expected F, Gamma, V or raw)");
}

std::string functional_tag_name(FunctionalTag tag) {
    switch (tag) {
        case FunctionalTag::compensated: return "F";
        case FunctionalTag::drift: return "Gamma";
        case FunctionalTag::mean_centered: return "V";
        case FunctionalTag::raw: return "raw";
    }
    return "?";
}

double target_variance(FunctionalTag tag, const AsymptoticParams& params) {
    switch (tag) {
        case FunctionalTag::compensated:
        case FunctionalTag::raw:
            return params.gamma2;
        case FunctionalTag::drift:
        case FunctionalTag::mean_centered:
            return params.zeta2;
    }
    return params.gamma2;
}

double normalize(const PathResult& path, FunctionalTag tag, const AsymptoticParams& params,
                 const Kernel& kernel, const PsiTable* psi) {
    const double T = path.log.horizon;
    require(T > 0.0, "normalize: horizon must be > 0");
    const double sqrt_T = std::sqrt(T);
    switch (tag) {
        case FunctionalTag::compensated:
            return (path.mark_sum - params.mark_mean * path.compensator) / sqrt_T;
        case FunctionalTag::drift:
            return (path.mark_sum - params.varpi * T) / sqrt_T;
        case FunctionalTag::mean_centered: {
            require(psi != nullptr, "normalize: mean_centered tag needs a psi table");
            const double centered =
                params.mark_mean * integrated_mean_intensity(kernel, params.mu, *psi, T);
            return (path.mark_sum - centered) / sqrt_T;
        }
        case FunctionalTag::raw:
            return path.mark_sum / sqrt_T;
    }
    return 0.0;
}

double w1_distance_to_normal(std::span<const double> sorted, double variance) {
    require(!sorted.empty(), "w1_distance_to_normal: empty sample");
    require(variance > 0.0, "w1_distance_to_normal: variance must be > 0");
    const double sigma = std::sqrt(variance);
    const auto M = static_cast<double>(sorted.size());

    // cdf_int(x) = int_{-inf}^x Phi_sigma, used for the closed-form pieces.
    auto cdf = [&](double x) { return normal_cdf(x / sigma); };
    auto cdf_int = [&](double x) { return sigma * normal_cdf_integral(x / sigma); };

    // Tails, written in cancellation-free form.
    const double u_lo = sorted.front() / sigma;
    const double u_hi = sorted.back() / sigma;
    double total = sigma * (normal_pdf(u_lo) + u_lo * normal_cdf(u_lo));
    total += sigma * (normal_pdf(u_hi) - u_hi * normal_cdf(-u_hi));

    for (std::size_t k = 1; k < sorted.size(); ++k) {
        const double a = sorted[k - 1];
        const double b = sorted[k];
        if (!(b > a)) continue;
        const double c = static_cast<double>(k) / M;
        const double fa = cdf(a);
        const double fb = cdf(b);
        if (fa >= c) {
            total += (cdf_int(b) - cdf_int(a)) - c * (b - a);
        } else if (fb <= c) {
            total += c * (b - a) - (cdf_int(b) - cdf_int(a));
        } else {
            const double cross = sigma * normal_quantile(c);
            total += c * (cross - a) - (cdf_int(cross) - cdf_int(a));
            total += (cdf_int(b) - cdf_int(cross)) - c * (b - cross);
        }
    }
    return total;
}

namespace {

// Shared debias scaffolding: statistic(sample) computed on the data and on
// `replicates` Gaussian samples of the same size.
template <typename Statistic>
DistanceEstimate debiased_estimate(const Sample& sample, double variance,
                                   const DebiasOptions& debias, Statistic statistic) {
    require(sample.values.size() >= 2, "distance estimate: need at least 2 values");
    require(debias.replicates >= 2, "distance estimate: need at least 2 debias replicates");
    require(variance > 0.0, "distance estimate: variance must be > 0");

    DistanceEstimate est;
    est.sample_size = sample.values.size();
    est.target_variance = variance;
    est.small_sample_advisory = sample.values.size() < 100;
    est.raw = statistic(sample.values);

    const double sigma = std::sqrt(variance);
    std::vector<double> replica(sample.values.size());
    std::vector<double> stats(debias.replicates);
    for (std::size_t k = 0; k < debias.replicates; ++k) {
        RngStream rng(debias.seed, StreamPurpose::debias, debias.stream_context, k);
        for (auto& x : replica) x = sigma * rng.normal();
        stats[k] = statistic(replica);
    }
    est.offset = mean_of(stats);
    est.debiased = est.raw - est.offset;
    // The replica spread estimates the raw statistic's own noise; the
    // offset mean adds a 1/K share of the same variance.
    est.se = sd_of(stats) * std::sqrt(1.0 + 1.0 / static_cast<double>(debias.replicates));
    return est;
}

}  // namespace

DistanceEstimate wasserstein1_to_normal(const Sample& sample, double variance,
                                        const DebiasOptions& debias) {
    auto statistic = [variance](const std::vector<double>& values) {
        std::vector<double> sorted(values);
        std::sort(sorted.begin(), sorted.end());
        return w1_distance_to_normal(sorted, variance);
    };
    return debiased_estimate(sample, variance, debias, statistic);
}

SurrogateDictionary SurrogateDictionary::default_dictionary() {
    SurrogateDictionary dict;
    for (int j = -3; j <= 2; ++j) {
        const double omega = std::pow(2.0, j);
        const double scale = std::min(1.0, 1.0 / (omega * omega * omega * omega));
        dict.entries.push_back({omega, 0.0, scale});
        dict.entries.push_back({omega, std::asin(1.0), scale});  // pi/2: cosine component
    }
    return dict;
}

void SurrogateDictionary::certify() const {
    require(!entries.empty(), "surrogate dictionary: empty");
    for (const auto& e : entries) {
        require(e.omega > 0.0 && std::isfinite(e.omega), "surrogate dictionary: bad omega");
        require(e.scale > 0.0 && std::isfinite(e.scale), "surrogate dictionary: bad scale");
        double power = e.omega;
        for (int i = 1; i <= 4; ++i) {
            if (e.scale * power > 1.0 + 1e-12) {
                std::ostringstream oss;
                oss << "surrogate dictionary: derivative bound violated at omega=" << e.omega
                    << " order " << i << " (scale * omega^i = " << e.scale * power << ")";
                throw ConfigError(oss.str());
            }
            power *= e.omega;
        }
    }
}

double surrogate_entry_normal_mean(const SurrogateDictionary::Entry& entry, double variance) {
    return entry.scale * std::exp(-0.5 * variance * entry.omega * entry.omega) *
           std::sin(entry.phase);
}

DistanceEstimate smooth_distance_surrogate(const Sample& sample, double variance,
                                           const SurrogateDictionary& dictionary,
                                           const DebiasOptions& debias) {
    dictionary.certify();
    std::vector<double> targets(dictionary.entries.size());
    for (std::size_t i = 0; i < dictionary.entries.size(); ++i) {
        targets[i] = surrogate_entry_normal_mean(dictionary.entries[i], variance);
    }
    auto statistic = [&](const std::vector<double>& values) {
        double best = 0.0;
        for (std::size_t i = 0; i < dictionary.entries.size(); ++i) {
            const auto& e = dictionary.entries[i];
            double acc = 0.0;
            for (double x : values) acc += std::sin(e.omega * x + e.phase);
            const double mean = e.scale * acc / static_cast<double>(values.size());
            best = std::max(best, std::abs(mean - targets[i]));
        }
        return best;
    };
    return debiased_estimate(sample, variance, debias, statistic);
}

namespace {

struct KStats {
    double k1, k2, k3, k4;
};

KStats k_statistics(const std::vector<double>& xs) {
    const auto n = static_cast<double>(xs.size());
    const double mean = mean_of(xs);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    KStats k;
    k.k1 = mean;
    k.k2 = n / (n - 1.0) * m2;
    k.k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
    k.k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) /
           ((n - 1.0) * (n - 2.0) * (n - 3.0));
    return k;
}

}  // namespace

CumulantEstimates k_cumulants(const Sample& sample, std::size_t bootstrap_resamples,
                              std::uint64_t seed, std::uint64_t stream_context) {
    const std::size_t n = sample.values.size();
    require(n >= 8, "k_cumulants: need at least 8 values");
    require(bootstrap_resamples >= 2, "k_cumulants: need at least 2 bootstrap resamples");

    const KStats point = k_statistics(sample.values);
    CumulantEstimates out;
    out.k1 = point.k1;
    out.k2 = point.k2;
    out.k3 = point.k3;
    out.k4 = point.k4;
    out.sample_size = n;

    std::vector<double> b1(bootstrap_resamples), b2(bootstrap_resamples),
        b3(bootstrap_resamples), b4(bootstrap_resamples);
    std::vector<double> resample(n);
    for (std::size_t r = 0; r < bootstrap_resamples; ++r) {
        RngStream rng(seed, StreamPurpose::bootstrap, stream_context, r);
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
            resample[i] = sample.values[std::min(idx, n - 1)];
        }
        const KStats k = k_statistics(resample);
        b1[r] = k.k1;
        b2[r] = k.k2;
        b3[r] = k.k3;
        b4[r] = k.k4;
    }
    out.se1 = sd_of(b1);
    out.se2 = sd_of(b2);
    out.se3 = sd_of(b3);
    out.se4 = sd_of(b4);
    return out;
}

RateFit fit_rate(const std::vector<RatePoint>& points) {
    RateFit fit;
    for (const auto& p : points) {
        require(p.horizon > 0.0, "fit_rate: horizons must be > 0");
        if (p.distance > 0.0) {
            fit.used.push_back(p);
        } else {
            fit.dropped.push_back(p);
        }
    }
    const std::size_t n = fit.used.size();
    if (n < 3) {
        std::ostringstream oss;
        oss << "fit_rate: only " << n << " positive distances (need >= 3); dropped "
            << fit.dropped.size();
        throw NumericalFailure(oss.str());
    }
    double sx = 0.0, sy = 0.0;
    for (const auto& p : fit.used) {
        sx += std::log(p.horizon);
        sy += std::log(p.distance);
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : fit.used) {
        const double dx = std::log(p.horizon) - mx;
        const double dy = std::log(p.distance) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0.0, "fit_rate: horizons must not be all equal");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (const auto& p : fit.used) {
        const double pred = fit.intercept + fit.slope * std::log(p.horizon);
        const double res = std::log(p.distance) - pred;
        rss += res * res;
    }
    fit.slope_se = std::sqrt(std::max(rss, 0.0) / static_cast<double>(n - 2) / sxx);
    fit.r2 = (syy > 0.0) ? 1.0 - rss / syy : 1.0;
    return fit;
}

}  // namespace hawkes
