#include "pmelab/martingale.hpp"

#include <cmath>
#include <stdexcept>

namespace pmelab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Functional values for every path at one record index.
Eigen::ArrayXd functional_column(const PathEnsemble& ens, Functional fn, int j) {
  Eigen::ArrayXd z2 = ens.Z[0].col(j).square();
  if (ens.dim == 2) z2 += ens.Z[1].col(j).square();
  if (fn == Functional::Z2) return z2;
  Eigen::ArrayXd u = ens.Y.col(j);
  if (ens.regime == Regime::Super)
    u = 2.0 * ((ens.params.m - 1.0) * u + ens.params.m);
  else
    u = (1.0 - ens.params.m) * u + ens.params.m;
  return z2 / u;
}

}  // namespace

CheckpointStats functional_checkpoints(const PathEnsemble& ens, Functional fn,
                                       const std::vector<double>& times) {
  const bool weighted = ens.params.tilt_mode == TiltMode::DensityWeights &&
                        ens.params.epsilon != 0.0;
  std::vector<int> use;
  use.reserve(ens.params.n_paths);
  for (int pi = 0; pi < ens.params.n_paths; ++pi)
    if (!ens.escaped[pi]) use.push_back(pi);
  if (use.empty()) throw std::runtime_error("functional_checkpoints: no usable paths");

  CheckpointStats out;
  out.times = times;
  out.n_used = static_cast<int>(use.size());
  for (double t : times) {
    const int j = ens.rec_index(t);
    const Eigen::ArrayXd col = functional_column(ens, fn, j);
    double sum = 0.0, sum2 = 0.0;
    for (int pi : use) {
      const double w = weighted ? std::exp(ens.logL(pi, j)) : 1.0;
      const double v = w * col[pi];
      sum += v;
      sum2 += v * v;
    }
    const double n = static_cast<double>(use.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    out.mean.push_back(mean);
    out.se.push_back(std::sqrt(var / n));
  }
  return out;
}

SubmartingaleReport empirical_submartingale(const PathEnsemble& ens,
                                            Functional fn, int n_checkpoints) {
  if (n_checkpoints < 2)
    throw std::invalid_argument("empirical_submartingale: need at least 2 checkpoints");
  std::vector<double> times(n_checkpoints);
  for (int i = 0; i < n_checkpoints; ++i)
    times[i] = ens.params.T * (i + 1) / n_checkpoints;

  SubmartingaleReport rep;
  rep.stats = functional_checkpoints(ens, fn, times);
  for (int i = 0; i + 1 < n_checkpoints; ++i) {
    const double drop = rep.stats.mean[i] - rep.stats.mean[i + 1];
    const double tol = 2.0 * std::hypot(rep.stats.se[i], rep.stats.se[i + 1]);
    if (drop > tol) ++rep.n_violations;
  }
  rep.pass = rep.n_violations == 0;
  return rep;
}

QIntegralReport q_integral_bound(const PathEnsemble& ens,
                                 QIntegralVariant variant, double f0_sup) {
  const SimParams& p = ens.params;
  if (p.record_stride != 1)
    throw std::invalid_argument("q_integral_bound: needs record_stride = 1");
  const bool weighted =
      p.tilt_mode == TiltMode::DensityWeights && p.epsilon != 0.0;

  QIntegralReport rep;
  switch (variant) {
    case QIntegralVariant::Z2Super:
      rep.coefficient = 1.0;
      rep.bound = 4.0 * f0_sup * f0_sup;
      break;
    case QIntegralVariant::MOverUSuper:
      rep.coefficient = std::abs((p.m - 3.0 + 2.0 * p.epsilon) / 2.0);
      rep.bound = 2.0 * f0_sup;
      break;
    case QIntegralVariant::Sub: {
      const double beta = 2.0 * kSqrt2 * p.m * p.epsilon -
                          kSqrt2 * (5.0 * p.m - 1.0) * p.m / 2.0 -
                          2.0 * kSqrt2 * p.m * (1.0 - p.m);
      rep.coefficient = std::abs(2.0 * p.m - 4.0 - kSqrt2 * beta / p.m) / 4.0;
      rep.bound = 2.0 * f0_sup;
      break;
    }
  }

  const Eigen::ArrayXXd z2 = ens.z_squared();
  const Eigen::ArrayXXd U = ens.coefficient_u();
  double sum = 0.0, sum2 = 0.0;
  const int steps = p.steps();
  for (int pi = 0; pi < p.n_paths; ++pi) {
    if (ens.escaped[pi]) continue;
    double integral = 0.0;
    for (int k = 0; k < steps; ++k) {
      double v = z2(pi, k);
      if (variant != QIntegralVariant::Z2Super) v /= U(pi, k);
      // importance weight at the left endpoint matches the Riemann sum
      if (weighted) v *= std::exp(ens.logL(pi, k));
      integral += v * p.dt;
    }
    sum += integral;
    sum2 += integral * integral;
    ++rep.n_used;
  }
  if (rep.n_used == 0) throw std::runtime_error("q_integral_bound: no usable paths");
  const double n = rep.n_used;
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  rep.estimate = rep.coefficient * mean;
  rep.se = rep.coefficient * std::sqrt(var / n);
  rep.margin = rep.bound - rep.estimate;
  rep.pass = rep.estimate + 3.0 * rep.se <= rep.bound;
  return rep;
}

}  // namespace pmelab
