#pragma once

namespace hawkes {

// Standard normal density, CDF, and the integral of the CDF:
// cdf_integral(x) = int_{-inf}^x cdf(u) du = x cdf(x) + pdf(x).
double normal_pdf(double x);
double normal_cdf(double x);
double normal_cdf_integral(double x);

// Inverse standard normal CDF, accurate to ~1e-15 (rational initial guess
// plus one Halley refinement against erfc).
double normal_quantile(double p);

}  // namespace hawkes
