#include "hawkesim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hawkesim/errors.hpp"

namespace hawkes {

namespace {

constexpr double kBreachSlack = 1e-9;

void require(bool cond, const std::string& message) {
    if (!cond) throw ConfigError(message);
}

double sum_marks(const std::vector<double>& marks) {
    double acc = 0.0;
    for (double x : marks) acc += x;
    return acc;
}

void finalize(PathResult& r, const Kernel& kernel, double mu) {
    r.count = static_cast<double>(r.log.times.size());
    r.mark_sum = sum_marks(r.log.marks);
    r.compensator = compensator_integral(r.log, kernel, mu);
    r.martingale = r.count - r.compensator;
}

// Inverts the kernel antiderivative on [0, limit] by bisection.
double invert_antiderivative(const Kernel& kernel, double target, double limit) {
    if (target <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = limit;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (kernel.antiderivative(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Rolling view over the recent events that still contribute to the
// intensity at double precision.  `begin` only ever advances.
struct ActiveWindow {
    const std::vector<double>* times;
    double cutoff;
    std::size_t begin = 0;

    void advance(double now) {
        while (begin < times->size() && (*times)[begin] < now - cutoff) ++begin;
    }
    double excitation(const Kernel& kernel, double t) const {
        double acc = 0.0;
        for (std::size_t i = begin; i < times->size() && (*times)[i] < t; ++i) {
            acc += kernel.value(t - (*times)[i]);
        }
        return acc;
    }
    double envelope_excitation(const Kernel& kernel, double now) const {
        double acc = 0.0;
        for (std::size_t i = begin; i < times->size(); ++i) {
            acc += kernel.tail_majorant(now - (*times)[i]);
        }
        return acc;
    }
};

}  // namespace

Simulator::Simulator(Kernel kernel, double mu, MarkDistribution marks)
    : kernel_(std::move(kernel)), mu_(mu), marks_(std::move(marks)) {
    require(std::isfinite(mu_) && mu_ > 0.0, "simulator: mu must be > 0");
    const StabilityReport stability = stability_check(kernel_);
    if (!stability.ok) throw ConfigError("simulator: " + stability.violation);
    support_cutoff_ = kernel_.support_cutoff(1e-18 * (1.0 + kernel_.sup_value()));
}

double Simulator::intensity(const EventLog& log, double t) const {
    const auto first =
        std::lower_bound(log.times.begin(), log.times.end(), t - support_cutoff_);
    double acc = 0.0;
    for (auto it = first; it != log.times.end() && *it < t; ++it) {
        acc += kernel_.value(t - *it);
    }
    return mu_ + acc;
}

PathResult Simulator::simulate_thinning(double T, RngStream& rng) const {
    require(std::isfinite(T) && T >= 0.0, "simulate_thinning: horizon must be >= 0");
    PathResult r;
    r.method = PathResult::Method::thinning;
    r.log.horizon = T;

    if (kernel_.family() == Kernel::Family::exponential) {
        // Markovian excitation g(s) = sum of alpha exp(-beta (s - t_i)):
        // the envelope mu + g is exact for a monotone kernel, so the
        // update per candidate is O(1).
        const double alpha = kernel_.alpha();
        const double beta = kernel_.beta();
        double g = 0.0;
        double s = 0.0;
        while (true) {
            const double envelope = mu_ + g;
            const double step = rng.exponential(envelope);
            const double next = s + step;
            if (next > T) break;
            const double theta = rng.uniform01() * envelope;
            const double mark = marks_.sample(rng);
            const double decayed = g * std::exp(-beta * step);
            const double lambda = mu_ + decayed;
            if (lambda > envelope * (1.0 + kBreachSlack) + kBreachSlack) {
                throw EnvelopeBreach("thinning: intensity exceeded envelope");
            }
            if (theta <= lambda) {
                r.log.times.push_back(next);
                r.log.marks.push_back(mark);
                g = decayed + alpha;
            } else {
                g = decayed;
            }
            s = next;
        }
        finalize(r, kernel_, mu_);
        return r;
    }

    ActiveWindow window{&r.log.times, support_cutoff_};
    double s = 0.0;
    while (true) {
        window.advance(s);
        const double envelope = mu_ + window.envelope_excitation(kernel_, s);
        const double step = rng.exponential(envelope);
        const double next = s + step;
        if (next > T) break;
        const double theta = rng.uniform01() * envelope;
        const double mark = marks_.sample(rng);
        const double lambda = mu_ + window.excitation(kernel_, next);
        if (lambda > envelope * (1.0 + kBreachSlack) + kBreachSlack) {
            throw EnvelopeBreach("thinning: intensity exceeded envelope");
        }
        if (theta <= lambda) {
            r.log.times.push_back(next);
            r.log.marks.push_back(mark);
        }
        s = next;
    }
    finalize(r, kernel_, mu_);
    return r;
}

PathResult Simulator::simulate_cluster(double T, RngStream& rng,
                                       std::size_t generation_cap) const {
    require(std::isfinite(T) && T >= 0.0, "simulate_cluster: horizon must be >= 0");
    PathResult r;
    r.method = PathResult::Method::cluster;
    r.log.horizon = T;

    std::vector<double> times;
    std::vector<std::size_t> generations;
    const std::uint64_t immigrants = rng.poisson(mu_ * T);
    times.reserve(immigrants);
    for (std::uint64_t i = 0; i < immigrants; ++i) {
        times.push_back(rng.uniform01() * T);
        generations.push_back(0);
    }
    // FIFO sweep; each event spawns children on (t, T] from the normalized
    // kernel restriction, so the union over generations is the process law.
    for (std::size_t head = 0; head < times.size(); ++head) {
        const double t = times[head];
        const std::size_t generation = generations[head];
        if (generation >= generation_cap) {
            std::ostringstream oss;
            oss << "simulate_cluster: generation cap " << generation_cap
                << " exceeded (kernel L1 norm too close to 1)";
            throw NumericalFailure(oss.str());
        }
        const double window_mass = kernel_.antiderivative(T - t);
        const std::uint64_t children = rng.poisson(window_mass);
        for (std::uint64_t c = 0; c < children; ++c) {
            const double v = rng.uniform01() * window_mass;
            const double offset = invert_antiderivative(kernel_, v, T - t);
            times.push_back(t + offset);
            generations.push_back(generation + 1);
        }
    }
    std::sort(times.begin(), times.end());
    r.log.times = std::move(times);
    r.log.marks = marks_.sample_marks(r.log.times.size(), rng);
    finalize(r, kernel_, mu_);
    return r;
}

CoupledPathResult Simulator::simulate_coupled_addpoint(double T, double t0, RngStream& rng,
                                                       const CoupledOptions& options) const {
    require(std::isfinite(T) && T > 0.0, "simulate_coupled_addpoint: horizon must be > 0");
    require(std::isfinite(t0) && t0 > 0.0 && t0 < T,
            "simulate_coupled_addpoint: insertion time must lie in (0, T)");
    require(options.grid_points >= 2, "simulate_coupled_addpoint: need at least 2 grid points");

    CoupledPathResult out;
    out.insertion_time = t0;
    out.base.log.horizon = T;
    out.shifted.log.horizon = T;

    std::vector<double>& base_times = out.base.log.times;
    std::vector<double>& shifted_times = out.shifted.log.times;
    std::vector<double> union_times;  // envelope support: every event of either path

    ActiveWindow window{&union_times, support_cutoff_};

    auto push_base = [&](double t, double mark) {
        base_times.push_back(t);
        out.base.log.marks.push_back(mark);
    };
    auto push_shifted = [&](double t, double mark) {
        shifted_times.push_back(t);
        out.shifted.log.marks.push_back(mark);
    };

    // Common segment on [0, t0]: both paths share every event.  A candidate
    // falling beyond t0 is discarded and the clock restarts at t0; by the
    // memoryless property this is exactly conditioning on "no candidate in
    // (s, t0]", and the envelope must be rebuilt there anyway because the
    // inserted atom changes the shifted intensity.
    double s = 0.0;
    bool crossed = false;
    while (!crossed) {
        window.advance(s);
        const double envelope = mu_ + window.envelope_excitation(kernel_, s);
        const double next = s + rng.exponential(envelope);
        if (next > t0) {
            crossed = true;
            break;
        }
        const double theta = rng.uniform01() * envelope;
        const double mark = marks_.sample(rng);
        const double lambda = mu_ + window.excitation(kernel_, next);
        if (lambda > envelope * (1.0 + kBreachSlack) + kBreachSlack) {
            throw EnvelopeBreach("coupled: intensity exceeded envelope");
        }
        if (theta <= lambda) {
            push_base(next, mark);
            push_shifted(next, mark);
            union_times.push_back(next);
        }
        s = next;
    }

    // The add-point operator: a deterministic atom at t0 joins the shifted
    // path only.  Its mark coordinate is irrelevant to every intensity, so
    // it is stored as 1 and never enters mark statistics.
    push_shifted(t0, 1.0);
    union_times.push_back(t0);
    s = t0;

    std::size_t base_window = 0;
    std::size_t shifted_window = 0;
    auto path_intensity = [&](const std::vector<double>& times, std::size_t& begin, double t) {
        while (begin < times.size() && times[begin] < t - support_cutoff_) ++begin;
        double acc = 0.0;
        for (std::size_t i = begin; i < times.size() && times[i] < t; ++i) {
            acc += kernel_.value(t - times[i]);
        }
        return mu_ + acc;
    };

    while (true) {
        window.advance(s);
        const double envelope = mu_ + window.envelope_excitation(kernel_, s);
        const double next = s + rng.exponential(envelope);
        if (next > T) break;
        const double theta = rng.uniform01() * envelope;
        const double mark = marks_.sample(rng);
        const double lambda_base = path_intensity(base_times, base_window, next);
        const double lambda_shifted = path_intensity(shifted_times, shifted_window, next);
        if (std::max(lambda_base, lambda_shifted) > envelope * (1.0 + kBreachSlack) + kBreachSlack) {
            throw EnvelopeBreach("coupled: intensity exceeded envelope");
        }
        const double theta_shifted =
            options.decouple_thinning ? rng.uniform01() * envelope : theta;
        const bool in_base = theta <= lambda_base;
        const bool in_shifted = theta_shifted <= lambda_shifted;
        if (in_base) push_base(next, mark);
        if (in_shifted) {
            push_shifted(next, mark);
            if (!in_base) {
                out.extra_times.push_back(next);
                out.extra_marks.push_back(mark);
            }
        }
        if (in_base || in_shifted) union_times.push_back(next);
        s = next;
    }

    finalize(out.base, kernel_, mu_);
    finalize(out.shifted, kernel_, mu_);
    out.extra_count = static_cast<double>(out.extra_times.size());
    out.intensity_gap_integral = out.shifted.compensator - out.base.compensator;
    out.extra_martingale = out.extra_count - out.intensity_gap_integral;

    // lambda_hat samples: uniform grid over [t0, T] merged with the shifted
    // event times, evaluated as a difference of the two accumulated sums so
    // a broken coupling shows up as a sign violation.
    out.sample_times.reserve(options.grid_points + shifted_times.size());
    const double span = T - t0;
    for (std::size_t k = 0; k < options.grid_points; ++k) {
        out.sample_times.push_back(
            t0 + span * static_cast<double>(k) / static_cast<double>(options.grid_points - 1));
    }
    for (double t : shifted_times) {
        if (t > t0 && t <= T) out.sample_times.push_back(t);
    }
    std::sort(out.sample_times.begin(), out.sample_times.end());
    out.lambda_hat.reserve(out.sample_times.size());
    double min_gap = 0.0;
    for (double t : out.sample_times) {
        const double gap = intensity(out.shifted.log, t) - intensity(out.base.log, t);
        out.lambda_hat.push_back(gap);
        min_gap = std::min(min_gap, gap);
    }
    out.min_lambda_hat = min_gap;

    // Containment: every base event must appear in the shifted log (times
    // are copied bit-for-bit, so exact comparison is the right test).
    std::size_t j = 0;
    out.containment_ok = true;
    for (double t : base_times) {
        while (j < shifted_times.size() && shifted_times[j] < t) ++j;
        if (j == shifted_times.size() || shifted_times[j] != t) {
            out.containment_ok = false;
            break;
        }
    }
    return out;
}

double compensator_integral(const EventLog& log, const Kernel& kernel, double mu) {
    return compensator_integral_at(log, kernel, mu, log.horizon);
}

double compensator_integral_at(const EventLog& log, const Kernel& kernel, double mu, double s) {
    if (s < 0.0) throw ConfigError("compensator_integral_at: negative time");
    double acc = mu * s;
    for (double t : log.times) {
        if (t >= s) break;
        acc += kernel.antiderivative(s - t);
    }
    return acc;
}

}  // namespace hawkes
