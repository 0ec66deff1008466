#pragma once

#include "pmelab/constants.hpp"

#include <string>

namespace pmelab {

/// Which bound a report refers to: the four u-variable display estimates
/// (cases 1-4) or their pressure-variable counterparts.
enum class BoundCase { Case1 = 1, Case2, Case3, Case4 };
enum class PressureBound { Est1, Thm3, E671, Thm6 };

/// Verification record for one bound on one solved field.
struct EstimateReport {
  std::string id;
  double m = 0.0;
  int n = 0;
  double T = 0.0;
  double norm = 0.0;  // input norm entering the bound
  std::vector<double> times;     // checked times (> 0)
  std::vector<double> bound;     // bound evaluated with horizon t
  std::vector<double> observed;  // grid supremum of the left-hand side
  std::vector<double> margin;    // bound - observed
  std::vector<double> tolerance; // discretization allowance per time
  double min_margin = 0.0;
  bool regime_valid = false;
  bool pass = false;  // margin >= -tolerance at all times >= t_min
};

/// Right-hand side of the display estimate `c` at time t. `norm` is
/// ||u0^(m-1) - 1||_inf (cases 1-2) or ||u0^(1-m) - 1||_inf (cases 3-4).
/// Case 4 resolves beta2 from beta_roots(m, n).
double bound_value(BoundCase c, double m, int n, double norm, double t);

/// True iff (m, n) satisfies the case hypothesis.
bool regime_valid(BoundCase c, double m, int n);
bool regime_valid(PressureBound b, double m, int n);

/// Grid supremum of the left-hand side gradient magnitude at the stored
/// slice nearest to t: |grad u^(3(m-1)/2)| (1), |grad u^(m-1)| (2),
/// |grad u^(1-m)| (3), |grad log u| (4).
double observed_lhs(BoundCase c, const ScalarFieldHistory& u, double t);

/// Check one display estimate on a solved history at all stored times in
/// (0, T]. Pass/fail only weighs times >= t_min; the allowance per time is
/// tol_factor * (h^2 + dt) * bound(t).
EstimateReport theorem1_check(BoundCase c, const ScalarFieldHistory& u,
                              double t_min = 0.05, double tol_factor = 25.0);

/// Check one pressure-variable bound on a pressure history. Left-hand
/// sides: ((m-1)f+m)|grad f|^2 (est1), |grad f|^2 (thm3), |grad f| (e671),
/// |grad f|/U = |grad log u| (thm6).
EstimateReport pressure_bound_check(PressureBound b, const PressureField& f,
                                    double t_min = 0.05,
                                    double tol_factor = 25.0);

/// Chain-rule audit of one display estimate against its pressure form on
/// random admissible samples.
struct AuditResult {
  BoundCase c = BoundCase::Case1;
  int n_samples = 0;
  bool lhs_identity_ok = false;    // pointwise chain-rule identity to 1e-12
  bool exact = false;              // display == pressure form (factor 1)
  bool pattern_confirmed = false;  // observed ratio matches `pattern`
  double ratio_min = 0.0;          // display bound / derived bound
  double ratio_max = 0.0;
  std::string pattern;             // "1", "norm/t", or "1/m"
};

AuditResult equivalence_audit(BoundCase c, int n_samples = 100,
                              std::uint64_t seed = 0);

}  // namespace pmelab
