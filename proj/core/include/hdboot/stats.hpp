#pragma once

#include <cstddef>
#include <vector>

namespace hdboot {

/// Standard normal CDF Phi(x).
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x);

/// Inverse standard normal CDF (Wichura's AS241, double precision).
double normal_quantile(double p);

/// Quantile of `sorted` (ascending) by linear interpolation between order
/// statistics: h = (m - 1) * nu + 1 in 1-based indexing (type 7).
double quantile_sorted(const std::vector<double>& sorted, double nu);

/// Convenience: copies, sorts, then interpolates.
double quantile(std::vector<double> values, double nu);

}  // namespace hdboot
