#pragma once

#include "pmelab/grid_pde.hpp"

namespace pmelab {

enum class Regime { Super, Sub };  // Super: m > 1, Sub: 0 < m < 1

inline Regime regime_of(double m) { return m > 1.0 ? Regime::Super : Regime::Sub; }

/// Pressure-type variable of a solved field.
///
/// Super (m > 1):  f = m/(m-1) (u^(m-1) - 1),  U = 2((m-1) f + m) = 2 m u^(m-1)
/// Sub  (m < 1):   f = m/(1-m) (u^(1-m) - 1),  U = (1-m) f + m   = m u^(1-m)
struct PressureField {
  Regime regime = Regime::Super;
  double m = 0.0;
  GridSpec grid;
  TimeMesh mesh;
  double t0 = 0.0;
  int record_stride = 1;
  std::vector<ArrayXd> f;           // one entry per stored slice
  std::vector<double> slice_times;

  int n_slices() const { return static_cast<int>(f.size()); }
  ArrayXd coefficient_u(int slice) const;  // U on the grid
  int nearest_slice(double t) const;
  /// Invariant (m-1)f+m > 0 (super) resp. (1-m)f+m > 0 (sub) on every slice.
  void check_positivity() const;
};

/// Pointwise coefficient U for a single pressure slice.
ArrayXd coefficient_u(const ArrayXd& f, double m, Regime regime);

PressureField to_pressure(const ScalarFieldHistory& u, double m);
PressureField to_pressure_slice(const ArrayXd& u, double m, const GridSpec& grid);

/// Inverse transform; throws if the regime positivity invariant fails.
ArrayXd from_pressure(const ArrayXd& f, double m, Regime regime);
std::vector<ArrayXd> from_pressure(const PressureField& pf);

/// Hopf transform log u, the m -> 1 limit of both pressure transforms.
ArrayXd hopf_transform(const ArrayXd& u);

/// Residual of the pressure PDE on interior stored slices, using central
/// differences in time over the stored slice spacing:
///   super: df/dt - ((m-1)f+m) lap f - |grad f|^2
///   sub:   df/dt - m^2/((1-m)f+m) lap f - m^2(2m-1)/((1-m)f+m)^2 |grad f|^2
/// Returns one residual field per interior slice (indices 1..n_slices-2),
/// which requires at least 3 stored slices.
std::vector<ArrayXd> pressure_pde_residual(const PressureField& pf);

/// Pointwise margin of the classical one-sided estimate for
/// v = m/(m-1) u^(m-1) at stored slice index `slice` (interior in time):
///   margin = alpha v / t - (|grad v|^2 - dv/dt),  alpha = n(m-1)/((m-1)n+2).
/// Nonnegative margin means the inequality holds at that node.
/// Requires m > 1 - 2/n and slice time > 0.
ArrayXd aronson_benilan_margin(const ScalarFieldHistory& u, double m, int slice);

double aronson_benilan_alpha(double m, int n);

}  // namespace pmelab
