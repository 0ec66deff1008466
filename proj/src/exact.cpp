#include "pmelab/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace pmelab {

SpaceTimeFn traveling_wave(double m, double c) {
  if (!(m > 1.0)) throw std::invalid_argument("traveling_wave: needs m > 1");
  return [m, c](double t, const std::array<double, 2>& x) {
    const double arg = (m - 1.0) * c * (c * t - x[0]) / m;
    if (!(arg > 0.0)) return 0.0;
    return std::pow(arg, 1.0 / (m - 1.0));
  };
}

SpaceTimeFn barenblatt(double m, int n, double C) {
  if (!(m > 1.0)) throw std::invalid_argument("barenblatt: needs m > 1");
  const double alpha = n / (n * (m - 1.0) + 2.0);
  const double kappa = alpha * (m - 1.0) / (2.0 * m * n);
  return [m, n, alpha, kappa, C](double t, const std::array<double, 2>& x) {
    if (!(t > 0.0)) throw std::invalid_argument("barenblatt: needs t > 0");
    double r2 = x[0] * x[0];
    if (n == 2) r2 += x[1] * x[1];
    const double arg = C - kappa * r2 * std::pow(t, -2.0 * alpha / n);
    if (!(arg > 0.0)) return 0.0;
    return std::pow(t, -alpha) * std::pow(arg, 1.0 / (m - 1.0));
  };
}

ArrayXd sample(const SpaceTimeFn& f, const GridSpec& grid, double t) {
  ArrayXd out(grid.size());
  for (int i = 0; i < grid.size(); ++i) out[i] = f(t, grid.node(i));
  return out;
}

}  // namespace pmelab
