#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hawkes {

// Nonnegative excitation kernel phi on [0, inf).  Supported families:
//   zero                   phi = 0 (degenerate Poisson case)
//   exponential(a, b)      phi(u) = a * exp(-b u)
//   erlang(a, b)           phi(u) = a * u * exp(-b u)
//   tabulated(step, vals)  piecewise-linear through vals[k] at u = k*step,
//                          zero beyond the last node (compact support)
class Kernel {
public:
    enum class Family { zero, exponential, erlang, tabulated };

    static Kernel zero();
    static Kernel exponential(double alpha, double beta);
    static Kernel erlang(double alpha, double beta);
    static Kernel tabulated(double step, std::vector<double> values);

    Family family() const { return family_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double table_step() const { return step_; }
    const std::vector<double>& table_values() const { return values_; }

    // phi(u); zero for u < 0.
    double value(double u) const;
    // L1 norm of phi (branching ratio).
    double l1_norm() const;
    // First moment: integral of u * phi(u) du.
    double first_moment() const;
    // Antiderivative: integral of phi over [0, u].
    double antiderivative(double u) const;
    // Nonincreasing majorant: sup over v >= u of phi(v).
    double tail_majorant(double u) const;
    double sup_value() const { return tail_majorant(0.0); }
    // Smallest u (up to bisection tolerance) with tail_majorant(u) <= eps.
    double support_cutoff(double eps) const;

    std::string family_name() const;

private:
    Kernel() = default;

    Family family_ = Family::zero;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double step_ = 0.0;
    std::vector<double> values_;
    // Tabulated-family caches.
    std::vector<double> suffix_max_;
    std::vector<double> prefix_integral_;
    double table_l1_ = 0.0;
    double table_first_moment_ = 0.0;
};

struct StabilityReport {
    bool ok = false;
    double l1 = 0.0;
    double first_moment = 0.0;
    std::string violation;  // empty when ok
};

// Subcriticality: L1 norm < 1 and finite first moment.
StabilityReport stability_check(const Kernel& kernel);

// Grid table for the renewal density psi = sum over n >= 1 of the n-fold
// convolution of phi; solves psi = phi + phi * psi.
struct PsiTable {
    double step = 0.0;
    double horizon = 0.0;
    std::vector<double> values;
    double residual = 0.0;      // sup-norm defect of the renewal equation on the grid
    double l1_estimate = 0.0;   // trapezoid integral of psi over [0, horizon]
    double tail_bound = 0.0;    // bound on the integral of psi beyond horizon
    std::size_t iterations = 0;

    // Linear interpolation; throws std::out_of_range beyond the horizon.
    double at(double t) const;
    // Trapezoid integral of psi over [0, t].
    double integral_to(double t) const;
};

inline constexpr double kPsiDefaultTol = 1e-8;

double psi_default_step(const Kernel& kernel);

// Picard iteration psi <- phi + phi * psi with trapezoidal convolution,
// stopped when successive iterates differ by at most tol in sup norm.
// Throws NumericalFailure if the iteration cap is hit, ConfigError if the
// kernel is not subcritical.
PsiTable solve_psi(const Kernel& kernel, double step, double horizon, double tol = kPsiDefaultTol);

// E[lambda_t] = mu * (1 + integral of psi over [0, t]).
double mean_intensity(const Kernel& kernel, double mu, const PsiTable& psi, double t);

// Integral of E[lambda_s] ds over [0, T] = mu * (T + integral of (T-u) psi(u) du).
double integrated_mean_intensity(const Kernel& kernel, double mu, const PsiTable& psi, double T);

}  // namespace hawkes
