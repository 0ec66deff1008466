#pragma once

#include "pmelab/grid_pde.hpp"

namespace pmelab {

/// Closed-form reference solutions used as solver oracles.

/// Traveling-wave solution u = ((m-1) c (c t - x1)/m)^(1/(m-1)), defined where
/// the argument is positive (the first coordinate carries the wave).
/// Its pressure variable m/(m-1) u^(m-1) = c (c t - x1) is linear.
SpaceTimeFn traveling_wave(double m, double c);

/// Source-type self-similar solution on R^n (m > 1):
///   u(t,x) = t^-alpha (C - kappa |x|^2 t^(-2 alpha/n))^(1/(m-1)), positive part,
/// with alpha = n/(n(m-1)+2) and kappa = alpha(m-1)/(2mn).
SpaceTimeFn barenblatt(double m, int n, double C);

/// Sample a space-time function on the grid nodes at time t.
ArrayXd sample(const SpaceTimeFn& f, const GridSpec& grid, double t);

}  // namespace pmelab
