#include "hawkesim/theory.hpp"

#include <cmath>
#include <sstream>

#include "hawkesim/errors.hpp"

namespace hawkes {

namespace {

void require_subcritical(double kernel_l1) {
    if (!(kernel_l1 >= 0.0) || !(kernel_l1 < 1.0)) {
        std::ostringstream oss;
        oss << "kernel L1 norm " << kernel_l1 << " must lie in [0, 1)";
        throw ConfigError(oss.str());
    }
}

void require_rate(double mu) {
    if (!(std::isfinite(mu)) || !(mu > 0.0)) throw ConfigError("baseline rate mu must be > 0");
}

}  // namespace

double gamma2(double mu, double kernel_l1, double mark_second_moment) {
    require_rate(mu);
    require_subcritical(kernel_l1);
    return mu * mark_second_moment / (1.0 - kernel_l1);
}

double zeta2(double mu, double kernel_l1, double mark_second_moment, double mark_mean) {
    require_rate(mu);
    require_subcritical(kernel_l1);
    const double centered = mark_second_moment - mark_mean * mark_mean;
    const double one_minus = 1.0 - kernel_l1;
    return mu * (mark_second_moment + kernel_l1 * centered * (kernel_l1 - 2.0)) /
           (one_minus * one_minus * one_minus);
}

double varpi(double mu, double mark_mean, double kernel_l1) {
    require_rate(mu);
    require_subcritical(kernel_l1);
    return mu * mark_mean / (1.0 - kernel_l1);
}

double offspring_bound(double kernel_l1, double psi_l1) {
    require_subcritical(kernel_l1);
    return kernel_l1 * (1.0 + psi_l1);
}

AsymptoticParams AsymptoticParams::from(const Kernel& kernel, double mu,
                                        const MarkDistribution& marks) {
    const StabilityReport stability = stability_check(kernel);
    if (!stability.ok) throw ConfigError(stability.violation);
    const MarkMoments mm = marks.moments();
    AsymptoticParams p;
    p.mu = mu;
    p.kernel_l1 = stability.l1;
    p.mark_mean = mm.mean;
    p.mark_second_moment = mm.second;
    p.gamma2 = hawkes::gamma2(mu, p.kernel_l1, mm.second);
    p.zeta2 = hawkes::zeta2(mu, p.kernel_l1, mm.second, mm.mean);
    p.varpi = hawkes::varpi(mu, mm.mean, p.kernel_l1);
    p.psi_l1 = p.kernel_l1 / (1.0 - p.kernel_l1);
    p.offspring_bound = hawkes::offspring_bound(p.kernel_l1, p.psi_l1);
    return p;
}

}  // namespace hawkes
