#pragma once

#include <vector>

namespace hdboot {

/// Step-down Holm adjustment with monotone enforcement, capped at 1.
std::vector<double> holm_adjust(const std::vector<double>& p_values);

/// Bonferroni-equivalent number of independent tests implied by a
/// rejection threshold: alpha / (2 (1 - Phi(t_rej))). Returns +inf when
/// the normal tail underflows.
double equivalent_tests(double t_rej, double alpha);

}  // namespace hdboot
