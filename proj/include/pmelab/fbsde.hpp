#pragma once

#include "pmelab/transform.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace pmelab {

enum class TiltMode { TiltedDrift, DensityWeights };

/// Monte Carlo parameters. `epsilon` is the measure-change parameter: under
/// the tilted measure the Brownian motion gains drift epsilon * Z/U. With
/// tilt_mode = TiltedDrift the drift is folded into the simulated paths and
/// logL stays zero; with DensityWeights the paths are simulated under the
/// base measure and logL carries the change-of-measure log-density.
struct SimParams {
  double m = 0.0;
  double epsilon = 0.0;
  double T = 0.0;
  double dt = 0.0;
  int n_paths = 0;
  std::uint64_t seed = 0;
  TiltMode tilt_mode = TiltMode::TiltedDrift;
  int record_stride = 1;
  bool store_x = true;
  bool store_brownian = false;
  bool store_tangent = false;

  int steps() const;
  void validate() const;
};

/// Interpolating view of a pressure-field history seen backwards in time:
/// queries at path time s read the stored slice nearest to T_hist(s) = T - s...
/// Callers pass the *PDE* time directly; the time reversal lives in the
/// simulation loop. Space interpolation is multilinear; gradients and second
/// derivatives interpolate the central-difference stencil fields per slice.
class FieldInterp {
 public:
  struct Eval {
    double f = 0.0;
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
    bool inside = true;  // false when x left a Dirichlet domain
  };

  explicit FieldInterp(const PressureField& pf);

  Eval eval(double pde_time, const std::array<double, 2>& x) const;
  const PressureField& field() const { return *pf_; }
  int dim() const { return pf_->grid.dim; }

 private:
  const PressureField* pf_;
  std::vector<ArrayXd> grad_[2];
  std::vector<ArrayXd> hess_[3];  // 00, 01, 11
};

/// Regime-resolved SDE coefficients at one space-time point.
struct Coefficients {
  double U = 0.0;
  double sigma = 0.0;               // isotropic diffusion coefficient
  double Y = 0.0;                   // f value
  Eigen::Vector2d Z = Eigen::Vector2d::Zero();
  Eigen::Vector2d drift = Eigen::Vector2d::Zero();  // X drift incl. tilt
  Eigen::Matrix2d Zx = Eigen::Matrix2d::Zero();     // Zx(i,a) = d Z^i / dx_a
};

Coefficients coefficients(const FieldInterp::Eval& e, double m, Regime regime,
                          double tilt_eps);

/// Drift coefficient c in dY = Z.dW + c |Z|^2/U dt for the given regime and
/// measure (eps = 0 reproduces the base measure).
double bsde_drift_coefficient(double m, Regime regime, double eps);

struct PathEnsemble {
  SimParams params;
  Regime regime = Regime::Super;
  int dim = 1;
  std::vector<double> rec_times;               // record_stride multiples of dt
  std::vector<Eigen::ArrayXXd> X;              // per axis, (n_paths x n_rec)
  Eigen::ArrayXXd Y;                           // (n_paths x n_rec)
  std::vector<Eigen::ArrayXXd> Z;              // per axis
  Eigen::ArrayXXd logL;                        // (n_paths x n_rec)
  std::vector<Eigen::ArrayXXd> dW;             // per axis, (n_paths x steps), stride 1 only
  std::vector<Eigen::ArrayXXd> J, K;           // per (i*dim+j), when store_tangent
  std::vector<Eigen::ArrayXXd> KZ;             // K * Zp contraction, when store_tangent
  std::vector<char> escaped;                   // per path
  std::vector<int> escape_step;

  int n_rec() const { return static_cast<int>(rec_times.size()); }
  int n_escaped() const;
  /// Record index whose time is nearest to t.
  int rec_index(double t) const;
  /// Coefficient U along paths, from Y and the regime relation.
  Eigen::ArrayXXd coefficient_u() const;
  Eigen::ArrayXXd z_squared() const;
  /// exp(logL) at the final record; identically 1 in TiltedDrift mode.
  Eigen::ArrayXd weights() const;
};

/// Euler-Maruyama simulation of the forward diffusion read off a solved
/// pressure history, deterministic in (seed, path index). Y and Z are
/// evaluated along the way (one field query per step serves both the
/// coefficients and the recorded values). Tangent/inverse-flow matrices are
/// integrated when store_tangent is set (base measure only, epsilon = 0).
PathEnsemble simulate_forward(const FieldInterp& f, const SimParams& p,
                              const std::array<double, 2>& x0);

/// Refill Y and Z from the stored positions; used to cross-check the values
/// recorded during simulation.
void evaluate_yz(PathEnsemble& ens, const FieldInterp& f);

struct ResidualStats {
  double mean = 0.0;       // ensemble mean of the cumulative residual
  double se = 0.0;
  double rms = 0.0;        // RMS of the cumulative residual over paths
  double step_rms = 0.0;   // RMS of single-step residuals
  int n_paths = 0;
};

/// Per-path residual of the backward equation over the simulated steps:
///   r_k = dY_k - Z_k . dW_k - c |Z_k|^2/U_k dt
/// with c matching the measure the paths were simulated under. Requires
/// record_stride = 1 and stored Brownian increments.
ResidualStats bsde_residual(const PathEnsemble& ens);

/// Change-of-measure log-density recomputed from stored increments:
///   logL_t = sum eps (Z/U).dW - 1/2 sum eps^2 |Z|^2/U^2 dt.
/// Requires record_stride = 1, stored Brownian increments, and paths
/// simulated under the base measure. Entries with |logL| > 30 are counted
/// as poorly conditioned in the returned value.
int girsanov_weights(PathEnsemble& ens, double eps);

struct FlowCheckResult {
  double rms_rel = 0.0;        // ||Z_flow - Z_grid|| / ||Z_grid|| over samples
  double kj_ok_fraction = 0.0; // fraction of paths with ||KJ - I||_F <= 0.05 throughout
  double j_fd_rms_rel = 0.0;   // tangent vs finite-difference flow derivative
  int n_paths = 0;
  int n_flagged = 0;
};

/// Cross-checks the flow representation of Z: reconstructs Z from the
/// inverse flow K and common-random-number finite differences of Y across
/// perturbed starting points, and compares with the grid-evaluated Z.
FlowCheckResult flow_z_check(const FieldInterp& f, const SimParams& p,
                             const std::array<double, 2>& x0, double delta_fd);

}  // namespace pmelab
