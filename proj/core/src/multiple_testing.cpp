#include "hdboot/multiple_testing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hdboot/errors.hpp"
#include "hdboot/stats.hpp"

namespace hdboot {

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("holm_adjust: p-values must lie in [0, 1]");
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double scaled = static_cast<double>(m - rank) * p_values[order[rank]];
    running = std::max(running, scaled);
    adjusted[order[rank]] = std::min(1.0, running);
  }
  return adjusted;
}

double equivalent_tests(double t_rej, double alpha) {
  if (t_rej < 0.0) throw ConfigError("equivalent_tests: t_rej must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("equivalent_tests: alpha must lie in (0, 1)");
  }
  const double tail = normal_sf(t_rej);
  if (tail <= 0.0) return std::numeric_limits<double>::infinity();
  return alpha / (2.0 * tail);
}

}  // namespace hdboot
