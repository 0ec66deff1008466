#pragma once

#include "pmelab/transform.hpp"

#include <Eigen/Dense>
#include <utility>

namespace pmelab {

/// Scalar coefficient algebra for the drift decompositions of |Z|^2 and
/// M = |Z|^2/U under the tilted measure, in both regimes.
///
/// Super regime bookkeeping:  delta = 3m - 7 + 2 eps,  beta = 2 eps - 3 - m.
/// Sub regime bookkeeping:    delta = 2 sqrt2 m eps - sqrt2 (5m-1) m / 2,
///                            beta  = delta - 2 sqrt2 m (1-m),
///                            eps   = sqrt2 beta/(4m) + (m+3)/4.

double delta_super(double m, double eps);
double beta_super(double m, double eps);
/// eps that makes delta_super equal 2(m-1); solving
/// 3m - 7 + 2 eps = 2(m-1) gives eps = (5-m)/2.
double eps_z2_submartingale(double m);
/// eps = (3+m)/2, the n = 1 choice making beta_super vanish.
double eps_m_submartingale(double m);

double delta_sub(double m, double eps);
double beta_sub(double m, double eps);
double eps_from_beta_sub(double m, double beta);
/// eps realizing delta = -sqrt2 m (1-m), the maximizer of G.
double eps_gdelta_star(double m);

/// Drift coefficient of |Z|^4/U^2 in d|Z|^2 (super, tilted measure):
///   (n+3-(n+1)m)(m-1) + (m-1) delta - delta^2/4.
/// At delta = 2(m-1) this reduces to (n+2-nm)(m-1).
double z2_drift_super(double m, int n, double delta);

/// Drift coefficient of |Z|^4/U^3 in dM (super): (m-1)^2 (1-n) - beta^2.
double m_drift_super(double m, int n, double beta);

/// G(delta) = 3(3m-1)(1-m) - n(1-m)^2 - sqrt2 (1-m) delta / m - delta^2/(2m^2).
/// At delta = -sqrt2 m (1-m) this equals ((n+8)m - 2 - n)(1-m).
double g_delta(double m, int n, double delta);

/// H(beta) = (1-m)((7+n)m-3-n) - 2 sqrt2 beta (1-m)/m - beta^2/(2m^2).
double h_beta(double m, int n, double beta);

/// Roots (beta1 <= beta2) of H; real iff m >= (n-1)/(n+3):
///   beta_{1,2} = -2 sqrt2 m(1-m) -/+ m sqrt(2(1-m)((3+n)m+1-n)).
std::pair<double, double> beta_roots(double m, int n);

/// Completed-square remainder terms of the drift decompositions, evaluated
/// from sampled tangent data. Arguments: U > 0, Z in R^n, and the matrix
/// KZ with KZ(i,k) = sum_l K_i^l Z_l^k. Each is a sum of squares.
double remainder_a_super(double m, double delta, double U,
                         const Eigen::VectorXd& Z, const Eigen::MatrixXd& KZ);
double remainder_b_super(double m, double beta, double U,
                         const Eigen::VectorXd& Z, const Eigen::MatrixXd& KZ);
double remainder_l_sub(double m, double beta, double U,
                       const Eigen::VectorXd& Z, const Eigen::MatrixXd& KZ);

/// All scalar coefficients for a given (m, n, eps), regime chosen by m.
struct ConstantSet {
  double m = 0.0;
  int n = 0;
  double eps = 0.0;
  Regime regime = Regime::Super;
  double delta = 0.0;
  double beta = 0.0;
  double alpha = 0.0;        // Aronson-Benilan constant, when m > 1-2/n
  double z2_drift = 0.0;     // super only
  double m_drift = 0.0;      // super only
  double g = 0.0;            // sub only, G(delta)
  double h = 0.0;            // sub only, H(beta)
  double beta1 = 0.0;        // sub only
  double beta2 = 0.0;        // sub only

  static ConstantSet make(double m, int n, double eps);
};

}  // namespace pmelab
