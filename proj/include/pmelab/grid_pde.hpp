#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

namespace pmelab {

using Eigen::ArrayXd;

/// Scalar function of (time, point); used for Dirichlet boundary data and
/// ghost values fed from an exact solution.
using SpaceTimeFn = std::function<double(double t, const std::array<double, 2>& x)>;

enum class Boundary { Periodic, DirichletOracle };

/// Rectangular grid in 1 or 2 dimensions.
///
/// Periodic axes have nodes at lo + i*h, i = 0..N-1 with h = (hi-lo)/N
/// (the node at hi is identified with the one at lo and not stored).
/// Dirichlet axes include both endpoints, h = (hi-lo)/(N-1); values at
/// exterior ghost nodes come from the oracle.
struct GridSpec {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> points{0, 1};  // points per axis; unused axis = 1
  Boundary boundary = Boundary::Periodic;
  SpaceTimeFn oracle;  // required for DirichletOracle

  double h(int axis) const;
  double length(int axis) const { return hi[axis] - lo[axis]; }
  int size() const { return points[0] * points[1]; }
  double coord(int axis, int i) const { return lo[axis] + i * h(axis); }
  int index(int i0, int i1 = 0) const { return i0 * points[1] + i1; }
  std::array<double, 2> node(int flat) const;
  void validate() const;

  static GridSpec periodic1d(int n, double a = 0.0, double b = 1.0);
  static GridSpec periodic2d(int n0, int n1, double a = 0.0, double b = 1.0);
  static GridSpec dirichlet1d(int n, double a, double b, SpaceTimeFn oracle);
};

/// Uniform time mesh on [0, T]; dt*steps must reproduce T to machine precision.
struct TimeMesh {
  double T = 0.0;
  double dt = 0.0;
  int steps = 0;

  void validate() const;
  static TimeMesh from_steps(double T, int steps);
};

/// Second-order central-difference Laplacian. For Dirichlet grids, stencil
/// values outside the domain are taken from `ghost` (falling back to the
/// grid's oracle) at time t.
ArrayXd laplacian(const ArrayXd& field, const GridSpec& grid, double t = 0.0,
                  const SpaceTimeFn& ghost = {});

/// Central-difference gradient, one component per axis.
std::array<ArrayXd, 2> gradient(const ArrayXd& field, const GridSpec& grid,
                                double t = 0.0, const SpaceTimeFn& ghost = {});

/// Central-difference second derivative d^2 field / dx_a dx_b.
ArrayXd second_derivative(const ArrayXd& field, const GridSpec& grid, int a,
                          int b, double t = 0.0, const SpaceTimeFn& ghost = {});

/// Largest stable explicit step for diffusivity m*u^(m-1) frozen at its
/// grid maximum: dt * 2 * m * max(u^(m-1)) * sum_a h_a^-2 <= 1.
double cfl_limit(const ArrayXd& u, double m, const GridSpec& grid);

/// One explicit Euler step u' = u + dt * laplacian(u^m); Dirichlet boundary
/// nodes are refreshed from the oracle at t+dt. Throws if dt violates the
/// stability bound or positivity is lost.
ArrayXd step_pme(const ArrayXd& u, double m, double dt, const GridSpec& grid,
                 double t = 0.0);

/// Discrete solution record. Slices are stored every `record_stride` steps
/// (slice 0 and the final slice always included). Per-step mass and extrema
/// are tracked for every step regardless of the stride.
struct ScalarFieldHistory {
  GridSpec grid;
  TimeMesh mesh;
  double m = 0.0;
  double t0 = 0.0;           // physical time of slice 0 (oracle offset)
  double u_min = 0.0;        // min of the initial data
  int record_stride = 1;
  std::vector<ArrayXd> slices;
  std::vector<double> slice_times;  // relative to t0
  std::vector<double> step_mass;    // steps+1 entries, periodic grids
  std::vector<double> step_min;     // steps+1 entries
  std::vector<double> step_max;     // steps+1 entries

  int n_slices() const { return static_cast<int>(slices.size()); }
  /// Index of the stored slice nearest to time t (relative to t0).
  int nearest_slice(double t) const;
  void validate() const;
};

/// Explicit solve of du/dt = laplacian(u^m) from strictly positive data.
/// Aborts (throws) if min u drops below half the initial minimum.
ScalarFieldHistory solve(const ArrayXd& u0, double m, const TimeMesh& mesh,
                         const GridSpec& grid, int record_stride = 1,
                         double t0 = 0.0);

/// Sum of u * h^dim over the grid (periodic grids only).
double discrete_mass(const ArrayXd& u, const GridSpec& grid);

}  // namespace pmelab
