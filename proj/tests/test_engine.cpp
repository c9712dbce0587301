#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hawkesim/engine.hpp"
#include "hawkesim/errors.hpp"
#include "hawkesim/kernel.hpp"
#include "hawkesim/marks.hpp"
#include "hawkesim/rng.hpp"

using namespace hawkes;

namespace {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
};

MeanVar mean_var(const std::vector<double>& xs) {
    MeanVar out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    for (double x : xs) out.var += (x - out.mean) * (x - out.mean);
    out.var /= static_cast<double>(xs.size() - 1);
    return out;
}

// Simpson quadrature of the intensity over [0, T] split at event times, so the
// integrand is smooth on every subinterval.
double quadrature_compensator(const Simulator& sim, const PathResult& path) {
    std::vector<double> knots = {0.0};
    for (double t : path.log.times) knots.push_back(t);
    knots.push_back(path.log.horizon);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = knots[i];
        const double b = knots[i + 1];
        if (b <= a) continue;
        const std::size_t n = 200;  // even panel count per segment
        const double h = (b - a) / static_cast<double>(n);
        double acc = sim.intensity(path.log, a + 1e-15) + sim.intensity(path.log, b);
        for (std::size_t j = 1; j < n; ++j) {
            const double w = (j % 2 == 1) ? 4.0 : 2.0;
            acc += w * sim.intensity(path.log, a + h * static_cast<double>(j));
        }
        total += acc * h / 3.0;
    }
    return total;
}

}  // namespace

TEST_CASE("zero kernel reduces to a Poisson process") {
    const Simulator sim(Kernel::zero(), 2.0, MarkDistribution::dirac(1.0));
    const double T = 50.0;
    const std::size_t reps = 4000;
    std::vector<double> counts(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        RngStream rng(11, StreamPurpose::simulate, 0, i);
        const PathResult p = sim.simulate_thinning(T, rng);
        counts[i] = p.count;
        // Compensator is exactly mu T for the homogeneous case.
        CHECK(p.compensator == doctest::Approx(2.0 * T).epsilon(1e-12));
        CHECK(p.martingale == doctest::Approx(p.count - 2.0 * T));
        CHECK(p.mark_sum == p.count);  // unit marks
    }
    const MeanVar mv = mean_var(counts);
    const double lambda = 2.0 * T;
    // Poisson(100): mean and variance both lambda.
    CHECK(std::abs(mv.mean - lambda) <= 5.0 * std::sqrt(lambda / reps));
    CHECK(std::abs(mv.var - lambda) <=
          5.0 * lambda * std::sqrt(2.0 / static_cast<double>(reps - 1)));
}

TEST_CASE("event logs are strictly increasing and in range") {
    const Simulator sim(Kernel::exponential(1.0, 2.0), 1.0, MarkDistribution::rademacher());
    for (std::size_t i = 0; i < 50; ++i) {
        RngStream rng(3, StreamPurpose::simulate, 1, i);
        const PathResult p = sim.simulate_thinning(30.0, rng);
        REQUIRE(p.log.times.size() == p.log.marks.size());
        CHECK(p.count == doctest::Approx(static_cast<double>(p.log.times.size())));
        double prev = 0.0;
        double mark_sum = 0.0;
        for (std::size_t j = 0; j < p.log.times.size(); ++j) {
            CHECK(p.log.times[j] > prev);
            CHECK(p.log.times[j] <= 30.0);
            prev = p.log.times[j];
            mark_sum += p.log.marks[j];
        }
        CHECK(p.mark_sum == doctest::Approx(mark_sum));
    }
}

TEST_CASE("compensator matches quadrature of the intensity") {
    const std::vector<Kernel> kernels = {
        Kernel::exponential(1.0, 2.0),
        Kernel::erlang(1.0, 2.0),
        Kernel::tabulated(0.5, {0.0, 1.0, 0.0}),
    };
    std::uint64_t context = 7;
    for (const Kernel& k : kernels) {
        const Simulator sim(k, 1.0, MarkDistribution::dirac(1.0));
        RngStream rng(17, StreamPurpose::simulate, context++, 0);
        const PathResult p = sim.simulate_thinning(12.0, rng);
        REQUIRE(p.count > 0.0);
        const double quad = quadrature_compensator(sim, p);
        // Tabulated kernels put kinks inside Simpson panels, slowing the
        // quadrature convergence; smooth families meet the tight bound.
        const double eps = k.family() == Kernel::Family::tabulated ? 1e-4 : 1e-6;
        CHECK(p.compensator == doctest::Approx(quad).epsilon(eps));
        CHECK(compensator_integral(p.log, k, 1.0) == doctest::Approx(p.compensator));
    }
}

TEST_CASE("compensator of a hand-built log") {
    // One event at t = 9, horizon 10, exponential(1, 2) kernel, mu arbitrary:
    // Lambda = mu * 10 + Phi(1) = 10 mu + (1 - exp(-2)) / 2.
    EventLog log;
    log.horizon = 10.0;
    log.times = {9.0};
    log.marks = {1.0};
    const Kernel k = Kernel::exponential(1.0, 2.0);
    const double expected = 10.0 * 1.5 + 0.5 * (1.0 - std::exp(-2.0));
    CHECK(compensator_integral(log, k, 1.5) == doctest::Approx(expected).epsilon(1e-14));
    // Partial upper limit before the event sees only the baseline.
    CHECK(compensator_integral_at(log, k, 1.5, 4.0) == doctest::Approx(6.0));
    CHECK_THROWS_AS(compensator_integral_at(log, k, 1.5, -1.0), ConfigError);
}

TEST_CASE("thinning is reproducible for equal streams") {
    const Simulator sim(Kernel::erlang(1.0, 2.0), 1.0, MarkDistribution::centered_normal(1.0));
    RngStream a(42, StreamPurpose::simulate, 9, 7);
    RngStream b(42, StreamPurpose::simulate, 9, 7);
    const PathResult pa = sim.simulate_thinning(25.0, a);
    const PathResult pb = sim.simulate_thinning(25.0, b);
    REQUIRE(pa.log.times.size() == pb.log.times.size());
    CHECK(pa.log.times == pb.log.times);
    CHECK(pa.log.marks == pb.log.marks);
    CHECK(pa.compensator == pb.compensator);

    RngStream c(43, StreamPurpose::simulate, 9, 7);
    const PathResult pc = sim.simulate_thinning(25.0, c);
    CHECK(pa.log.times != pc.log.times);
}

TEST_CASE("mean count matches the renewal mean intensity") {
    // E[H_T] = int_0^T E[lambda_s] ds with E[lambda] from the renewal table.
    const Kernel k = Kernel::exponential(1.0, 2.0);
    const double T = 40.0;
    const Simulator sim(k, 1.0, MarkDistribution::dirac(1.0));
    const std::size_t reps = 6000;
    std::vector<double> counts(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        RngStream rng(7, StreamPurpose::simulate, 2, i);
        counts[i] = sim.simulate_thinning(T, rng).count;
    }
    const PsiTable psi = solve_psi(k, 0.01, T);
    const double target = integrated_mean_intensity(k, 1.0, psi, T);
    const MeanVar mv = mean_var(counts);
    const double se = std::sqrt(mv.var / static_cast<double>(reps));
    CHECK(std::abs(mv.mean - target) <= 4.0 * se);
}

TEST_CASE("cluster oracle agrees with thinning") {
    const Simulator sim(Kernel::exponential(1.0, 2.0), 1.0, MarkDistribution::dirac(1.0));
    const double T = 30.0;
    const std::size_t reps = 6000;
    std::vector<double> thin(reps), clus(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        RngStream r1(21, StreamPurpose::simulate, 3, i);
        RngStream r2(21, StreamPurpose::cluster, 3, i);
        thin[i] = sim.simulate_thinning(T, r1).count;
        clus[i] = sim.simulate_cluster(T, r2).count;
    }
    const MeanVar a = mean_var(thin);
    const MeanVar b = mean_var(clus);
    const double n = static_cast<double>(reps);
    const double se_mean = std::sqrt(a.var / n + b.var / n);
    CHECK(std::abs(a.mean - b.mean) <= 4.0 * se_mean);
    const double se_var = std::sqrt(2.0 / (n - 1.0)) * (a.var + b.var);
    CHECK(std::abs(a.var - b.var) <= 4.0 * se_var);

    // Two-sample Kolmogorov-Smirnov on the counts (discrete ties only tighten
    // the distance, keeping the test conservative).
    std::vector<double> xs = thin, ys = clus;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        if (xs[i] <= ys[j]) ++i; else ++j;
        const double fx = static_cast<double>(i) / n;
        const double fy = static_cast<double>(j) / n;
        d = std::max(d, std::abs(fx - fy));
    }
    // alpha ~ 0.001 critical value c(alpha) sqrt((n+m)/(n m)) with c = 1.95.
    CHECK(d <= 1.95 * std::sqrt(2.0 / n));
}

TEST_CASE("cluster generation cap trips on deep cascades") {
    const Simulator sim(Kernel::exponential(1.9, 2.0), 1.0, MarkDistribution::dirac(1.0));
    bool tripped = false;
    for (std::size_t i = 0; i < 200 && !tripped; ++i) {
        RngStream rng(5, StreamPurpose::cluster, 4, i);
        try {
            (void)sim.simulate_cluster(200.0, rng, 3);
        } catch (const NumericalFailure&) {
            tripped = true;
        }
    }
    CHECK(tripped);
}

TEST_CASE("coupled add-point simulation") {
    const Kernel k = Kernel::exponential(1.0, 2.0);
    const Simulator sim(k, 1.0, MarkDistribution::dirac(1.0));
    const double T = 10.0;
    const double t0 = 2.0;
    const std::size_t reps = 4000;
    std::vector<double> extras(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        RngStream rng(13, StreamPurpose::coupled, 0, i);
        const CoupledPathResult c = sim.simulate_coupled_addpoint(T, t0, rng);
        extras[i] = c.extra_count;
        CHECK(c.containment_ok);
        CHECK(c.min_lambda_hat >= -1e-12);
        // The shifted path carries the inserted atom plus every extra event.
        CHECK(c.shifted.count ==
              doctest::Approx(c.base.count + 1.0 + c.extra_count));
        // Gap integral equals the difference of the two compensators over
        // [t0, T]; both paths share the baseline, so full-horizon
        // compensators differ by exactly the gap integral.
        CHECK(c.intensity_gap_integral ==
              doctest::Approx(c.shifted.compensator - c.base.compensator).epsilon(1e-9));
        CHECK(c.extra_martingale ==
              doctest::Approx(c.extra_count - c.intensity_gap_integral));
        // Before the first extra event, lambda_hat is exactly the kernel
        // response of the inserted atom.
        const double first_extra =
            c.extra_times.empty() ? T : c.extra_times.front();
        for (std::size_t s = 0; s < c.sample_times.size(); ++s) {
            const double u = c.sample_times[s];
            if (u <= t0 || u >= first_extra) continue;
            CHECK(c.lambda_hat[s] == doctest::Approx(k.value(u - t0)).epsilon(1e-9));
        }
    }
    // E[hat H_T] = int_0^{T - t0} psi = 1 - exp(-(beta - alpha)(T - t0)).
    const double target = 1.0 - std::exp(-(2.0 - 1.0) * (T - t0));
    const MeanVar mv = mean_var(extras);
    const double se = std::sqrt(mv.var / static_cast<double>(reps));
    CHECK(std::abs(mv.mean - target) <= 4.0 * se);
}

TEST_CASE("decoupled thinning control breaks containment") {
    const Simulator sim(Kernel::exponential(1.5, 2.0), 1.5, MarkDistribution::dirac(1.0));
    CoupledOptions opt;
    opt.decouple_thinning = true;
    bool violated = false;
    for (std::size_t i = 0; i < 400 && !violated; ++i) {
        RngStream rng(13, StreamPurpose::coupled, 1, i);
        const CoupledPathResult c = sim.simulate_coupled_addpoint(20.0, 1.0, rng, opt);
        if (!c.containment_ok || c.min_lambda_hat < -1e-9) violated = true;
    }
    CHECK(violated);
}
