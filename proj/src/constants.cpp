#include "pmelab/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace pmelab {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

double delta_super(double m, double eps) { return 3.0 * m - 7.0 + 2.0 * eps; }
double beta_super(double m, double eps) { return 2.0 * eps - 3.0 - m; }
double eps_z2_submartingale(double m) { return (5.0 - m) / 2.0; }
double eps_m_submartingale(double m) { return (3.0 + m) / 2.0; }

double delta_sub(double m, double eps) {
  return 2.0 * kSqrt2 * m * eps - kSqrt2 * (5.0 * m - 1.0) * m / 2.0;
}
double beta_sub(double m, double eps) {
  return delta_sub(m, eps) - 2.0 * kSqrt2 * m * (1.0 - m);
}
double eps_from_beta_sub(double m, double beta) {
  return kSqrt2 * beta / (4.0 * m) + (m + 3.0) / 4.0;
}
double eps_gdelta_star(double m) {
  // delta_sub(m, eps) = -sqrt2 m (1-m)  =>  eps = (7m-3)/4
  return (7.0 * m - 3.0) / 4.0;
}

double z2_drift_super(double m, int n, double delta) {
  return (n + 3.0 - (n + 1.0) * m) * (m - 1.0) + (m - 1.0) * delta -
         delta * delta / 4.0;
}

double m_drift_super(double m, int n, double beta) {
  return (m - 1.0) * (m - 1.0) * (1.0 - n) - beta * beta;
}

double g_delta(double m, int n, double delta) {
  if (!(m > 0.0 && m < 1.0)) throw std::invalid_argument("g_delta: needs 0 < m < 1");
  return 3.0 * (3.0 * m - 1.0) * (1.0 - m) - n * (1.0 - m) * (1.0 - m) -
         kSqrt2 * (1.0 - m) / m * delta - delta * delta / (2.0 * m * m);
}

double h_beta(double m, int n, double beta) {
  return (1.0 - m) * ((7.0 + n) * m - 3.0 - n) -
         2.0 * kSqrt2 * beta * (1.0 - m) / m - beta * beta / (2.0 * m * m);
}

std::pair<double, double> beta_roots(double m, int n) {
  const double disc = 2.0 * (1.0 - m) * ((3.0 + n) * m + 1.0 - n);
  if (disc < 0.0)
    throw std::invalid_argument("beta_roots: no real roots, need m >= (n-1)/(n+3)");
  const double s = m * std::sqrt(disc);
  const double c = -2.0 * kSqrt2 * m * (1.0 - m);
  return {c - s, c + s};
}

double remainder_a_super(double m, double delta, double U,
                         const Eigen::VectorXd& Z, const Eigen::MatrixXd& KZ) {
  const int n = static_cast<int>(Z.size());
  const double u32 = std::pow(U, 1.5);
  const double z2 = Z.squaredNorm();
  double a = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      const double t = KZ(i, k) + delta / (2.0 * u32) * Z[i] * Z[k];
      a += U * t * t;
    }
  for (int k = 0; k < n; ++k) {
    const double theta = KZ(k, k);
    const double t = theta - (delta * Z[k] * Z[k] - 2.0 * (m - 1.0) * z2) / (2.0 * u32);
    a += U * t * t;
  }
  return a;
}

double remainder_b_super(double m, double beta, double U,
                         const Eigen::VectorXd& Z, const Eigen::MatrixXd& KZ) {
  const int n = static_cast<int>(Z.size());
  const double u32 = std::pow(U, 1.5);
  const double z2 = Z.squaredNorm();
  double b = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = KZ(k, k) + (beta * Z[k] * Z[k] - 2.0 * (m - 1.0) * z2) / (2.0 * u32);
    b += t * t;
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      const double t = KZ(i, k) + beta / (2.0 * u32) * Z[i] * Z[k];
      b += t * t;
    }
  return b;
}

double remainder_l_sub(double m, double beta, double U,
                       const Eigen::VectorXd& Z, const Eigen::MatrixXd& KZ) {
  const int n = static_cast<int>(Z.size());
  const double su = std::sqrt(U);
  const double z2 = Z.squaredNorm();
  double l = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = KZ(k, k) / su +
                     (beta * Z[k] * Z[k] + kSqrt2 * (1.0 - m) * m * z2) / (4.0 * m * m * U);
    l += 2.0 * m * m * t * t;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const double t = KZ(i, k) / su + beta / (4.0 * m * m) * Z[i] * Z[k] / U;
      l += 2.0 * m * m * t * t;
    }
  return l;
}

ConstantSet ConstantSet::make(double m, int n, double eps) {
  ConstantSet c;
  c.m = m;
  c.n = n;
  c.eps = eps;
  c.regime = regime_of(m);
  if (m > 1.0 - 2.0 / n) c.alpha = aronson_benilan_alpha(m, n);
  if (c.regime == Regime::Super) {
    c.delta = delta_super(m, eps);
    c.beta = beta_super(m, eps);
    c.z2_drift = z2_drift_super(m, n, c.delta);
    c.m_drift = m_drift_super(m, n, c.beta);
  } else {
    c.delta = delta_sub(m, eps);
    c.beta = beta_sub(m, eps);
    c.g = g_delta(m, n, c.delta);
    c.h = h_beta(m, n, c.beta);
    const auto roots = beta_roots(m, n);
    c.beta1 = roots.first;
    c.beta2 = roots.second;
  }
  return c;
}

}  // namespace pmelab
