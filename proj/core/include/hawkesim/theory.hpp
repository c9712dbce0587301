#pragma once

#include "hawkesim/kernel.hpp"
#include "hawkesim/marks.hpp"

namespace hawkes {

// Limit parameters of the normalized functionals.  All formulas require a
// subcritical kernel (L1 norm < 1); violations throw ConfigError before any
// simulation can start.

// gamma^2 = mu E[X^2] / (1 - |phi|_1): limit variance of the
// compensator-centered functional F_T and of S_T / sqrt(T) for centered marks.
double gamma2(double mu, double kernel_l1, double mark_second_moment);

// zeta^2 = mu (E[X^2] + |phi|_1 (E[X^2] - E[X]^2) (|phi|_1 - 2)) / (1 - |phi|_1)^3:
// limit variance of the linear-drift-centered functional Gamma_T.
double zeta2(double mu, double kernel_l1, double mark_second_moment, double mark_mean);

// varpi = mu E[X] / (1 - |phi|_1): linear drift rate of S_T.
double varpi(double mu, double mark_mean, double kernel_l1);

// |phi|_1 (1 + |psi|_1): bound on the conditional expected offspring
// integral E_t[ int_t^T lambda_hat ds ].
double offspring_bound(double kernel_l1, double psi_l1);

struct AsymptoticParams {
    double mu = 0.0;
    double kernel_l1 = 0.0;
    double mark_mean = 0.0;
    double mark_second_moment = 0.0;
    double gamma2 = 0.0;
    double zeta2 = 0.0;
    double varpi = 0.0;
    double psi_l1 = 0.0;       // |phi|_1 / (1 - |phi|_1)
    double offspring_bound = 0.0;

    static AsymptoticParams from(const Kernel& kernel, double mu, const MarkDistribution& marks);
};

}  // namespace hawkes
