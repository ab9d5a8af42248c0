#pragma once

namespace sublex::normal {

/// Standard normal density.
double pdf(double z);

/// Standard normal CDF, computed from erfc for full-tail accuracy.
double cdf(double z);

/// Upper tail P(Z >= z) = cdf(-z), accurate for large z.
double tail(double z);

/// Inverse CDF via Acklam's rational approximation (relative error
/// below 1.15e-9 over (0,1)). Pure arithmetic plus sqrt/log, so samples
/// derived from it are reproducible bit-for-bit run to run. Exact at
/// u = 0.5 (returns +0.0).
double quantile(double u);

/// Partial first moment E (Z - z)^+ for a standard normal variable.
double excess(double z);

}  // namespace sublex::normal
