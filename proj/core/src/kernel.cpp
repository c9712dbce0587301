#include "hawkesim/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hawkesim/errors.hpp"

namespace hawkes {

namespace {

constexpr double kTiny = 1e-12;

void require(bool cond, const std::string& message) {
    if (!cond) throw ConfigError(message);
}

}  // namespace

Kernel Kernel::zero() {
    Kernel k;
    k.family_ = Family::zero;
    return k;
}

Kernel Kernel::exponential(double alpha, double beta) {
    require(std::isfinite(alpha) && alpha > 0.0, "exponential kernel: alpha must be > 0");
    require(std::isfinite(beta) && beta > 0.0, "exponential kernel: beta must be > 0");
    Kernel k;
    k.family_ = Family::exponential;
    k.alpha_ = alpha;
    k.beta_ = beta;
    return k;
}

Kernel Kernel::erlang(double alpha, double beta) {
    require(std::isfinite(alpha) && alpha > 0.0, "erlang kernel: alpha must be > 0");
    require(std::isfinite(beta) && beta > 0.0, "erlang kernel: beta must be > 0");
    Kernel k;
    k.family_ = Family::erlang;
    k.alpha_ = alpha;
    k.beta_ = beta;
    return k;
}

Kernel Kernel::tabulated(double step, std::vector<double> values) {
    require(std::isfinite(step) && step > 0.0, "tabulated kernel: step must be > 0");
    require(values.size() >= 2, "tabulated kernel: need at least two nodes");
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("tabulated kernel: non-finite entry");
        if (v < 0.0) throw ConfigError("tabulated kernel: negative entry");
    }
    Kernel k;
    k.family_ = Family::tabulated;
    k.step_ = step;
    k.values_ = std::move(values);

    const std::size_t n = k.values_.size();
    k.suffix_max_.assign(n, 0.0);
    k.suffix_max_[n - 1] = k.values_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        k.suffix_max_[i] = std::max(k.values_[i], k.suffix_max_[i + 1]);
    }
    // Piecewise-linear cells integrate exactly:
    //   int f = h (v0 + v1) / 2,   int u f = a h (v0 + v1) / 2 + h^2 (v0 / 6 + v1 / 3).
    k.prefix_integral_.assign(n, 0.0);
    double moment = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double v0 = k.values_[i];
        const double v1 = k.values_[i + 1];
        const double a = static_cast<double>(i) * step;
        k.prefix_integral_[i + 1] = k.prefix_integral_[i] + step * (v0 + v1) / 2.0;
        moment += a * step * (v0 + v1) / 2.0 + step * step * (v0 / 6.0 + v1 / 3.0);
    }
    k.table_l1_ = k.prefix_integral_[n - 1];
    k.table_first_moment_ = moment;
    return k;
}

double Kernel::value(double u) const {
    if (u < 0.0) return 0.0;
    switch (family_) {
        case Family::zero:
            return 0.0;
        case Family::exponential:
            return alpha_ * std::exp(-beta_ * u);
        case Family::erlang:
            return alpha_ * u * std::exp(-beta_ * u);
        case Family::tabulated: {
            const double support = static_cast<double>(values_.size() - 1) * step_;
            if (u >= support) return (u == support) ? values_.back() : 0.0;
            const double pos = u / step_;
            const auto idx = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(idx);
            return values_[idx] + frac * (values_[idx + 1] - values_[idx]);
        }
    }
    return 0.0;
}

double Kernel::l1_norm() const {
    switch (family_) {
        case Family::zero:
            return 0.0;
        case Family::exponential:
            return alpha_ / beta_;
        case Family::erlang:
            return alpha_ / (beta_ * beta_);
        case Family::tabulated:
            return table_l1_;
    }
    return 0.0;
}

double Kernel::first_moment() const {
    switch (family_) {
        case Family::zero:
            return 0.0;
        case Family::exponential:
            return alpha_ / (beta_ * beta_);
        case Family::erlang:
            return 2.0 * alpha_ / (beta_ * beta_ * beta_);
        case Family::tabulated:
            return table_first_moment_;
    }
    return 0.0;
}

double Kernel::antiderivative(double u) const {
    if (u <= 0.0) return 0.0;
    switch (family_) {
        case Family::zero:
            return 0.0;
        case Family::exponential:
            return (alpha_ / beta_) * (1.0 - std::exp(-beta_ * u));
        case Family::erlang:
            return (alpha_ / (beta_ * beta_)) * (1.0 - (1.0 + beta_ * u) * std::exp(-beta_ * u));
        case Family::tabulated: {
            const double support = static_cast<double>(values_.size() - 1) * step_;
            if (u >= support) return table_l1_;
            const double pos = u / step_;
            const auto idx = static_cast<std::size_t>(pos);
            const double w = u - static_cast<double>(idx) * step_;
            const double v0 = values_[idx];
            const double v1 = values_[idx + 1];
            return prefix_integral_[idx] + v0 * w + (v1 - v0) * w * w / (2.0 * step_);
        }
    }
    return 0.0;
}

double Kernel::tail_majorant(double u) const {
    if (u < 0.0) u = 0.0;
    switch (family_) {
        case Family::zero:
            return 0.0;
        case Family::exponential:
            return value(u);
        case Family::erlang: {
            const double mode = 1.0 / beta_;
            return (u <= mode) ? value(mode) : value(u);
        }
        case Family::tabulated: {
            const double support = static_cast<double>(values_.size() - 1) * step_;
            if (u >= support) return 0.0;
            const auto next = static_cast<std::size_t>(std::ceil(u / step_ - kTiny));
            const double node_max = (next < values_.size()) ? suffix_max_[next] : 0.0;
            return std::max(value(u), node_max);
        }
    }
    return 0.0;
}

double Kernel::support_cutoff(double eps) const {
    if (tail_majorant(0.0) <= eps) return 0.0;
    double hi = 1.0;
    while (tail_majorant(hi) > eps) {
        hi *= 2.0;
        if (hi > 0x1p60) throw NumericalFailure("kernel support cutoff did not converge");
    }
    double lo = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (tail_majorant(mid) > eps) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

std::string Kernel::family_name() const {
    switch (family_) {
        case Family::zero: return "zero";
        case Family::exponential: return "exponential";
        case Family::erlang: return "erlang";
        case Family::tabulated: return "tabulated";
    }
    return "unknown";
}

StabilityReport stability_check(const Kernel& kernel) {
    StabilityReport report;
    report.l1 = kernel.l1_norm();
    report.first_moment = kernel.first_moment();
    if (!(report.l1 < 1.0)) {
        std::ostringstream oss;
        oss << "kernel L1 norm " << report.l1 << " violates subcriticality (must be < 1)";
        report.violation = oss.str();
        return report;
    }
    if (!std::isfinite(report.first_moment)) {
        report.violation = "kernel first moment is not finite";
        return report;
    }
    report.ok = true;
    return report;
}

namespace {

// Tail of the renewal-density integral beyond the table horizon.
double psi_tail_bound(const Kernel& kernel, double horizon, double l1) {
    switch (kernel.family()) {
        case Kernel::Family::zero:
            return 0.0;
        case Kernel::Family::exponential: {
            // psi(t) = alpha exp(-(beta - alpha) t) exactly.
            const double delta = kernel.beta() - kernel.alpha();
            return (kernel.alpha() / delta) * std::exp(-delta * horizon);
        }
        case Kernel::Family::tabulated: {
            // The n-fold convolution is supported on [0, n * support]; only
            // generations with n * support > horizon contribute to the tail.
            const double support =
                static_cast<double>(kernel.table_values().size() - 1) * kernel.table_step();
            if (l1 <= 0.0) return 0.0;
            const double n0 = std::floor(horizon / support) + 1.0;
            return std::pow(l1, n0) / (1.0 - l1);
        }
        case Kernel::Family::erlang: {
            // Dominate phi(u) = a u exp(-b u) by C exp(-r u) with
            // C = a / ((b - r) e); if the dominating exponential kernel is
            // subcritical its explicit renewal tail bounds ours.
            double best = std::numeric_limits<double>::infinity();
            const double beta = kernel.beta();
            const double alpha = kernel.alpha();
            for (int i = 1; i < 64; ++i) {
                const double r = beta * static_cast<double>(i) / 64.0;
                const double c = alpha / ((beta - r) * std::exp(1.0));
                if (c >= r) continue;
                const double bound = (c / (r - c)) * std::exp(-(r - c) * horizon);
                best = std::min(best, bound);
            }
            return best;
        }
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace

double psi_default_step(const Kernel& kernel) {
    if (kernel.family() == Kernel::Family::tabulated) return kernel.table_step();
    const double beta = kernel.beta();
    if (beta > 0.0) return std::min(0.01, 1.0 / (10.0 * beta));
    return 0.01;
}

PsiTable solve_psi(const Kernel& kernel, double step, double horizon, double tol) {
    if (!(step > 0.0) || !(horizon > 0.0) || !(tol > 0.0)) {
        throw ConfigError("solve_psi: step, horizon and tol must be positive");
    }
    const StabilityReport stability = stability_check(kernel);
    if (!stability.ok) throw ConfigError("solve_psi: " + stability.violation);
    const double l1 = stability.l1;

    PsiTable table;
    table.step = step;
    const auto cells = static_cast<std::size_t>(std::ceil(horizon / step - kTiny));
    const std::size_t n = cells + 1;
    table.horizon = static_cast<double>(cells) * step;
    table.values.assign(n, 0.0);
    if (l1 == 0.0) return table;

    std::vector<double> phi(n);
    for (std::size_t j = 0; j < n; ++j) phi[j] = kernel.value(static_cast<double>(j) * step);

    // phi is numerically zero past its support cutoff; truncating the
    // convolution there changes nothing at double precision but turns the
    // quadratic-in-n pass into one linear in n for long tables.
    const double cut_eps = 1e-18 * (1.0 + kernel.sup_value());
    const auto span = static_cast<std::size_t>(std::ceil(kernel.support_cutoff(cut_eps) / step)) + 1;
    const std::size_t m = std::min(cells, span);

    auto convolve = [&](const std::vector<double>& psi, std::vector<double>& out) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t top = std::min(j, m);
            double acc = 0.0;
            if (j >= 1) {
                acc += 0.5 * phi[0] * psi[j];
                for (std::size_t i = 1; i < top; ++i) acc += phi[i] * psi[j - i];
                acc += (top == j ? 0.5 : 1.0) * phi[top] * psi[j - top];
            }
            out[j] = phi[j] + step * acc;
        }
    };

    std::vector<double> current = phi;
    std::vector<double> next(n, 0.0);
    const double scale = 1.0 + kernel.sup_value();
    const double rate = std::min(l1, 0.999);
    const auto cap = static_cast<std::size_t>(
        50.0 + 2.0 * std::ceil(std::log(tol / scale) / std::log(rate)));

    double diff = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    while (diff > tol) {
        if (iterations >= cap) {
            std::ostringstream oss;
            oss << "solve_psi: no convergence after " << iterations
                << " iterations (last sup-norm update " << diff << ")";
            throw NumericalFailure(oss.str());
        }
        convolve(current, next);
        diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - current[j]));
        current.swap(next);
        ++iterations;
    }
    table.values = current;
    table.iterations = iterations;

    convolve(current, next);
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) residual = std::max(residual, std::abs(next[j] - current[j]));
    table.residual = residual;

    double integral = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        integral += step * (table.values[j] + table.values[j + 1]) / 2.0;
    }
    table.l1_estimate = integral;
    table.tail_bound = psi_tail_bound(kernel, table.horizon, l1);
    return table;
}

double PsiTable::at(double t) const {
    if (t < 0.0) throw std::out_of_range("psi table: negative time");
    if (t > horizon * (1.0 + kTiny) + kTiny) throw std::out_of_range("psi table: time beyond horizon");
    if (values.empty()) return 0.0;
    const double pos = std::min(t, horizon) / step;
    const auto idx = std::min(static_cast<std::size_t>(pos), values.size() - 2);
    const double frac = pos - static_cast<double>(idx);
    return values[idx] + frac * (values[idx + 1] - values[idx]);
}

double PsiTable::integral_to(double t) const {
    if (t < 0.0) throw std::out_of_range("psi table: negative time");
    if (t > horizon * (1.0 + kTiny) + kTiny) throw std::out_of_range("psi table: time beyond horizon");
    if (values.empty() || t == 0.0) return 0.0;
    const double clamped = std::min(t, horizon);
    const auto full = static_cast<std::size_t>(clamped / step);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 <= full && j + 1 < values.size(); ++j) {
        acc += step * (values[j] + values[j + 1]) / 2.0;
    }
    const double rest = clamped - static_cast<double>(full) * step;
    if (rest > 0.0 && full + 1 < values.size()) {
        const double v0 = values[full];
        const double v1 = at(clamped);
        acc += rest * (v0 + v1) / 2.0;
    }
    return acc;
}

double mean_intensity(const Kernel& kernel, double mu, const PsiTable& psi, double t) {
    if (kernel.family() == Kernel::Family::zero) {
        if (t < 0.0) throw std::out_of_range("mean_intensity: negative time");
        return mu;
    }
    return mu * (1.0 + psi.integral_to(t));
}

double integrated_mean_intensity(const Kernel& kernel, double mu, const PsiTable& psi, double T) {
    if (T < 0.0) throw std::out_of_range("integrated_mean_intensity: negative time");
    if (kernel.family() == Kernel::Family::zero) return mu * T;
    if (T > psi.horizon * (1.0 + kTiny) + kTiny) {
        throw std::out_of_range("integrated_mean_intensity: time beyond psi horizon");
    }
    // Fubini: int_0^T E[lambda_s] ds = mu (T + int_0^T (T - u) psi(u) du).
    const double clamped = std::min(T, psi.horizon);
    const auto full = static_cast<std::size_t>(clamped / psi.step);
    auto weighted = [&](std::size_t j) {
        const double u = static_cast<double>(j) * psi.step;
        return (clamped - u) * psi.values[j];
    };
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 <= full && j + 1 < psi.values.size(); ++j) {
        acc += psi.step * (weighted(j) + weighted(j + 1)) / 2.0;
    }
    const double rest = clamped - static_cast<double>(full) * psi.step;
    if (rest > 0.0 && full + 1 < psi.values.size()) {
        acc += rest * weighted(full) / 2.0;  // integrand vanishes at u = T
    }
    return mu * (T + acc);
}

}  // namespace hawkes
