#pragma once

#include "pmelab/fbsde.hpp"

namespace pmelab {

/// Path functionals whose tilted-measure expectations are monitored.
enum class Functional {
  Z2,      // |Z_t|^2
  MOverU,  // |Z_t|^2 / U_t
};

struct CheckpointStats {
  std::vector<double> times;
  std::vector<double> mean;  // weighted mean when the ensemble carries weights
  std::vector<double> se;
  int n_used = 0;  // paths entering the averages (escaped paths excluded)
};

/// Mean and standard error of the functional at the given path times,
/// read from the nearest recorded index. DensityWeights ensembles are
/// averaged with the exp(logL) importance weights at each checkpoint.
CheckpointStats functional_checkpoints(const PathEnsemble& ens, Functional fn,
                                       const std::vector<double>& times);

struct SubmartingaleReport {
  CheckpointStats stats;
  int n_violations = 0;  // checkpoint pairs with a > 2 sigma decrease
  bool pass = false;
};

/// Empirical submartingale test: the functional's expectation must not
/// decrease between consecutive checkpoints by more than twice the combined
/// standard error. `n_checkpoints` equispaced times in (0, T] are used.
SubmartingaleReport empirical_submartingale(const PathEnsemble& ens,
                                            Functional fn,
                                            int n_checkpoints = 10);

enum class QIntegralVariant {
  Z2Super,     // E[int |Z|^2 dt] <= 4 ||f0||^2
  MOverUSuper, // |(m-3+2eps)/2| E[int |Z|^2/U dt] <= 2 ||f0||
  Sub,         // |2m - 4 - sqrt2 beta/m| E[int |Z|^2/(4U) dt] <= 2 ||f0||
};

struct QIntegralReport {
  double estimate = 0.0;     // coefficient * mean path integral
  double se = 0.0;
  double coefficient = 0.0;
  double bound = 0.0;
  double margin = 0.0;       // bound - estimate
  int n_used = 0;
  bool pass = false;         // estimate + 3 se <= bound
};

/// Time-integral bounds under the tilted measure. The ensemble must be
/// recorded at every step (record_stride = 1); the integral is a left
/// Riemann sum. `f0_sup` is the sup norm of the initial pressure.
QIntegralReport q_integral_bound(const PathEnsemble& ens,
                                 QIntegralVariant variant, double f0_sup);

}  // namespace pmelab
