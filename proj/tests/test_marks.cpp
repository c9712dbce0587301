#include <doctest.h>

#include <cmath>
#include <vector>

#include "hawkesim/errors.hpp"
#include "hawkesim/marks.hpp"
#include "hawkesim/rng.hpp"

using namespace hawkes;

TEST_CASE("closed-form moments") {
    {
        const MarkMoments m = MarkDistribution::dirac(2.0).moments();
        CHECK(m.mean == 2.0);
        CHECK(m.second == 4.0);
        CHECK(m.third == 8.0);
        CHECK(m.fourth == 16.0);
    }
    {
        const MarkMoments m = MarkDistribution::rademacher().moments();
        CHECK(m.mean == 0.0);
        CHECK(m.second == 1.0);
        CHECK(m.third == 0.0);
        CHECK(m.fourth == 1.0);
    }
    {
        const MarkMoments m = MarkDistribution::centered_normal(4.0).moments();
        CHECK(m.mean == 0.0);
        CHECK(m.second == 4.0);
        CHECK(m.third == 0.0);
        CHECK(m.fourth == doctest::Approx(48.0));  // 3 v^2
    }
    {
        const MarkMoments m = MarkDistribution::two_point(2.0 / 3.0, -1.0, 2.0).moments();
        CHECK(m.mean == doctest::Approx(0.0));
        CHECK(m.second == doctest::Approx(2.0));
        CHECK(m.third == doctest::Approx(2.0));
        CHECK(m.fourth == doctest::Approx(6.0));
    }
    {
        const MarkMoments m =
            MarkDistribution::discrete({1.0, 3.0}, {0.25, 0.75}).moments();
        CHECK(m.mean == doctest::Approx(2.5));
        CHECK(m.second == doctest::Approx(7.0));
        CHECK(m.third == doctest::Approx(20.5));
        CHECK(m.fourth == doctest::Approx(61.0));
    }
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(MarkDistribution::centered_normal(-1.0), ConfigError);
    CHECK_THROWS_AS(MarkDistribution::two_point(1.5, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(MarkDistribution::discrete({1.0, 2.0}, {0.5, 0.6}), ConfigError);
    CHECK_THROWS_AS(MarkDistribution::discrete({1.0, 2.0}, {0.5}), ConfigError);
    CHECK_THROWS_AS(MarkDistribution::discrete({}, {}), ConfigError);
    CHECK_THROWS_AS(MarkDistribution::discrete({1.0, 2.0}, {-0.1, 1.1}), ConfigError);
}

TEST_CASE("sampler matches closed-form moments") {
    const std::size_t n = 40000;
    const std::vector<MarkDistribution> dists = {
        MarkDistribution::dirac(1.5),
        MarkDistribution::rademacher(),
        MarkDistribution::centered_normal(2.0),
        MarkDistribution::two_point(2.0 / 3.0, -1.0, 2.0),
        MarkDistribution::discrete({-2.0, 0.0, 1.0, 5.0}, {0.1, 0.4, 0.3, 0.2}),
    };
    std::uint64_t context = 0;
    for (const MarkDistribution& dist : dists) {
        RngStream rng(5, StreamPurpose::generic, context++, 0);
        const std::vector<double> xs = dist.sample_marks(n, rng);
        REQUIRE(xs.size() == n);
        double s1 = 0.0, s2 = 0.0;
        for (double x : xs) {
            s1 += x;
            s2 += x * x;
        }
        const MarkMoments m = dist.moments();
        const double mean = s1 / static_cast<double>(n);
        const double second = s2 / static_cast<double>(n);
        const double se_mean = std::sqrt(std::max(m.second - m.mean * m.mean, 0.0) / n);
        const double se_second = std::sqrt(std::max(m.fourth - m.second * m.second, 0.0) / n);
        CHECK(std::abs(mean - m.mean) <= 5.0 * se_mean + 1e-12);
        CHECK(std::abs(second - m.second) <= 5.0 * se_second + 1e-12);
    }
}

TEST_CASE("faster-rate hypothesis check") {
    CHECK(check_fast_rate_hypothesis(MarkDistribution::rademacher()).ok);
    CHECK(check_fast_rate_hypothesis(MarkDistribution::centered_normal(1.0)).ok);
    // Centered but with a nonzero third moment.
    const auto skewed = check_fast_rate_hypothesis(MarkDistribution::two_point(2.0 / 3.0, -1.0, 2.0));
    CHECK_FALSE(skewed.ok);
    CHECK(skewed.third == doctest::Approx(2.0));
    // Not centered at all.
    CHECK_FALSE(check_fast_rate_hypothesis(MarkDistribution::dirac(1.0)).ok);
    // Symmetric two-point is fine.
    CHECK(check_fast_rate_hypothesis(MarkDistribution::two_point(0.5, -3.0, 3.0)).ok);
}
