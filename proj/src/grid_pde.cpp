#include "pmelab/grid_pde.hpp"

#include <cmath>
#include <stdexcept>

namespace pmelab {

double GridSpec::h(int axis) const {
  if (boundary == Boundary::Periodic) return length(axis) / points[axis];
  return length(axis) / (points[axis] - 1);
}

std::array<double, 2> GridSpec::node(int flat) const {
  const int i0 = flat / points[1];
  const int i1 = flat % points[1];
  return {coord(0, i0), dim == 2 ? coord(1, i1) : 0.0};
}

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("GridSpec: dim must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (points[a] < 4) throw std::invalid_argument("GridSpec: need at least 4 points per axis");
    if (!(length(a) > 0.0)) throw std::invalid_argument("GridSpec: extent must be positive");
  }
  if (dim == 1 && points[1] != 1) throw std::invalid_argument("GridSpec: 1d grid must have points[1] == 1");
  if (boundary == Boundary::DirichletOracle && !oracle)
    throw std::invalid_argument("GridSpec: Dirichlet grid needs an oracle");
}

GridSpec GridSpec::periodic1d(int n, double a, double b) {
  GridSpec g;
  g.dim = 1;
  g.lo = {a, 0.0};
  g.hi = {b, 1.0};
  g.points = {n, 1};
  g.boundary = Boundary::Periodic;
  g.validate();
  return g;
}

GridSpec GridSpec::periodic2d(int n0, int n1, double a, double b) {
  GridSpec g;
  g.dim = 2;
  g.lo = {a, a};
  g.hi = {b, b};
  g.points = {n0, n1};
  g.boundary = Boundary::Periodic;
  g.validate();
  return g;
}

GridSpec GridSpec::dirichlet1d(int n, double a, double b, SpaceTimeFn oracle) {
  GridSpec g;
  g.dim = 1;
  g.lo = {a, 0.0};
  g.hi = {b, 1.0};
  g.points = {n, 1};
  g.boundary = Boundary::DirichletOracle;
  g.oracle = std::move(oracle);
  g.validate();
  return g;
}

void TimeMesh::validate() const {
  if (!(T > 0.0) || !(dt > 0.0) || steps <= 0)
    throw std::invalid_argument("TimeMesh: T, dt, steps must be positive");
  if (std::abs(dt * steps - T) > 1e-12 * T)
    throw std::invalid_argument("TimeMesh: dt*steps must equal T");
}

TimeMesh TimeMesh::from_steps(double T, int steps) {
  TimeMesh m;
  m.T = T;
  m.steps = steps;
  m.dt = T / steps;
  m.validate();
  return m;
}

namespace {

// Value at stencil offset (i0+d0, i1+d1); out-of-range offsets on Dirichlet
// grids are resolved through the ghost function.
double stencil_value(const ArrayXd& field, const GridSpec& g, int i0, int i1,
                     int d0, int d1, double t, const SpaceTimeFn& ghost) {
  int j0 = i0 + d0;
  int j1 = i1 + d1;
  if (g.boundary == Boundary::Periodic) {
    j0 = (j0 + g.points[0]) % g.points[0];
    j1 = (j1 + g.points[1]) % g.points[1];
    return field[g.index(j0, j1)];
  }
  const bool out0 = j0 < 0 || j0 >= g.points[0];
  const bool out1 = g.dim == 2 && (j1 < 0 || j1 >= g.points[1]);
  if (!out0 && !out1) return field[g.index(j0, j1)];
  const SpaceTimeFn& fn = ghost ? ghost : g.oracle;
  if (!fn) throw std::invalid_argument("stencil: ghost values required but no oracle given");
  std::array<double, 2> x{g.coord(0, j0), g.dim == 2 ? g.coord(1, j1) : 0.0};
  return fn(t, x);
}

void check_size(const ArrayXd& field, const GridSpec& g) {
  if (field.size() != g.size())
    throw std::invalid_argument("field size does not match grid");
}

}  // namespace

ArrayXd laplacian(const ArrayXd& field, const GridSpec& grid, double t,
                  const SpaceTimeFn& ghost) {
  grid.validate();
  check_size(field, grid);
  ArrayXd out(field.size());
  const double ih0 = 1.0 / (grid.h(0) * grid.h(0));
  const double ih1 = grid.dim == 2 ? 1.0 / (grid.h(1) * grid.h(1)) : 0.0;
  for (int i0 = 0; i0 < grid.points[0]; ++i0) {
    for (int i1 = 0; i1 < grid.points[1]; ++i1) {
      const double c = field[grid.index(i0, i1)];
      double v = ih0 * (stencil_value(field, grid, i0, i1, 1, 0, t, ghost) - 2.0 * c +
                        stencil_value(field, grid, i0, i1, -1, 0, t, ghost));
      if (grid.dim == 2)
        v += ih1 * (stencil_value(field, grid, i0, i1, 0, 1, t, ghost) - 2.0 * c +
                    stencil_value(field, grid, i0, i1, 0, -1, t, ghost));
      out[grid.index(i0, i1)] = v;
    }
  }
  return out;
}

std::array<ArrayXd, 2> gradient(const ArrayXd& field, const GridSpec& grid,
                                double t, const SpaceTimeFn& ghost) {
  grid.validate();
  check_size(field, grid);
  std::array<ArrayXd, 2> out{ArrayXd(field.size()), ArrayXd()};
  if (grid.dim == 2) out[1].resize(field.size());
  const double ih0 = 0.5 / grid.h(0);
  const double ih1 = grid.dim == 2 ? 0.5 / grid.h(1) : 0.0;
  for (int i0 = 0; i0 < grid.points[0]; ++i0) {
    for (int i1 = 0; i1 < grid.points[1]; ++i1) {
      out[0][grid.index(i0, i1)] =
          ih0 * (stencil_value(field, grid, i0, i1, 1, 0, t, ghost) -
                 stencil_value(field, grid, i0, i1, -1, 0, t, ghost));
      if (grid.dim == 2)
        out[1][grid.index(i0, i1)] =
            ih1 * (stencil_value(field, grid, i0, i1, 0, 1, t, ghost) -
                   stencil_value(field, grid, i0, i1, 0, -1, t, ghost));
    }
  }
  return out;
}

ArrayXd second_derivative(const ArrayXd& field, const GridSpec& grid, int a,
                          int b, double t, const SpaceTimeFn& ghost) {
  grid.validate();
  check_size(field, grid);
  if (a < 0 || a >= grid.dim || b < 0 || b >= grid.dim)
    throw std::invalid_argument("second_derivative: axis out of range");
  ArrayXd out(field.size());
  auto off = [](int axis, int s) { return axis == 0 ? std::array<int, 2>{s, 0} : std::array<int, 2>{0, s}; };
  for (int i0 = 0; i0 < grid.points[0]; ++i0) {
    for (int i1 = 0; i1 < grid.points[1]; ++i1) {
      double v;
      if (a == b) {
        const auto p = off(a, 1);
        const auto mn = off(a, -1);
        v = (stencil_value(field, grid, i0, i1, p[0], p[1], t, ghost) -
             2.0 * field[grid.index(i0, i1)] +
             stencil_value(field, grid, i0, i1, mn[0], mn[1], t, ghost)) /
            (grid.h(a) * grid.h(a));
      } else {
        v = (stencil_value(field, grid, i0, i1, 1, 1, t, ghost) -
             stencil_value(field, grid, i0, i1, 1, -1, t, ghost) -
             stencil_value(field, grid, i0, i1, -1, 1, t, ghost) +
             stencil_value(field, grid, i0, i1, -1, -1, t, ghost)) /
            (4.0 * grid.h(0) * grid.h(1));
      }
      out[grid.index(i0, i1)] = v;
    }
  }
  return out;
}

double cfl_limit(const ArrayXd& u, double m, const GridSpec& grid) {
  const double diff = m * u.pow(m - 1.0).maxCoeff();
  double s = 1.0 / (grid.h(0) * grid.h(0));
  if (grid.dim == 2) s += 1.0 / (grid.h(1) * grid.h(1));
  return 1.0 / (2.0 * diff * s);
}

ArrayXd step_pme(const ArrayXd& u, double m, double dt, const GridSpec& grid,
                 double t) {
  grid.validate();
  check_size(u, grid);
  if (!(m > 0.0)) throw std::invalid_argument("step_pme: m must be positive");
  if (!(u.minCoeff() > 0.0)) throw std::invalid_argument("step_pme: u must be strictly positive");
  if (dt > cfl_limit(u, m, grid) * (1.0 + 1e-12))
    throw std::runtime_error("step_pme: stability restriction violated");

  SpaceTimeFn ghost;
  if (grid.boundary == Boundary::DirichletOracle) {
    ghost = [&grid, m](double tt, const std::array<double, 2>& x) {
      return std::pow(grid.oracle(tt, x), m);
    };
  }
  ArrayXd w = u.pow(m);
  ArrayXd un = u + dt * laplacian(w, grid, t, ghost);
  if (grid.boundary == Boundary::DirichletOracle) {
    // boundary nodes carry the oracle value at the new time
    for (int i0 = 0; i0 < grid.points[0]; ++i0)
      for (int i1 = 0; i1 < grid.points[1]; ++i1) {
        const bool bdry = i0 == 0 || i0 == grid.points[0] - 1 ||
                          (grid.dim == 2 && (i1 == 0 || i1 == grid.points[1] - 1));
        if (bdry) {
          std::array<double, 2> x{grid.coord(0, i0), grid.dim == 2 ? grid.coord(1, i1) : 0.0};
          un[grid.index(i0, i1)] = grid.oracle(t + dt, x);
        }
      }
  }
  if (!un.isFinite().all() || !(un.minCoeff() > 0.0))
    throw std::runtime_error("step_pme: positivity lost");
  return un;
}

int ScalarFieldHistory::nearest_slice(double t) const {
  int best = 0;
  double bd = std::abs(slice_times[0] - t);
  for (int i = 1; i < n_slices(); ++i) {
    const double d = std::abs(slice_times[i] - t);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

void ScalarFieldHistory::validate() const {
  grid.validate();
  mesh.validate();
  if (slices.size() != slice_times.size())
    throw std::invalid_argument("history: slices/slice_times mismatch");
  for (const auto& s : slices) {
    if (s.size() != grid.size()) throw std::invalid_argument("history: slice size mismatch");
    if (!s.isFinite().all() || !(s.minCoeff() > 0.0))
      throw std::invalid_argument("history: values must be finite and positive");
  }
}

ScalarFieldHistory solve(const ArrayXd& u0, double m, const TimeMesh& mesh,
                         const GridSpec& grid, int record_stride, double t0) {
  grid.validate();
  mesh.validate();
  check_size(u0, grid);
  if (record_stride < 1) throw std::invalid_argument("solve: record_stride must be >= 1");
  if (!(u0.minCoeff() > 0.0)) throw std::invalid_argument("solve: u0 must be strictly positive");

  ScalarFieldHistory h;
  h.grid = grid;
  h.mesh = mesh;
  h.m = m;
  h.t0 = t0;
  h.u_min = u0.minCoeff();
  h.record_stride = record_stride;
  h.step_mass.reserve(mesh.steps + 1);
  h.step_min.reserve(mesh.steps + 1);
  h.step_max.reserve(mesh.steps + 1);

  ArrayXd u = u0;
  auto record_diag = [&](const ArrayXd& v) {
    h.step_mass.push_back(grid.boundary == Boundary::Periodic ? discrete_mass(v, grid) : 0.0);
    h.step_min.push_back(v.minCoeff());
    h.step_max.push_back(v.maxCoeff());
  };
  h.slices.push_back(u);
  h.slice_times.push_back(0.0);
  record_diag(u);

  for (int k = 0; k < mesh.steps; ++k) {
    u = step_pme(u, m, mesh.dt, grid, t0 + k * mesh.dt);
    if (u.minCoeff() < 0.5 * h.u_min)
      throw std::runtime_error("solve: positivity floor breached, regime breakdown");
    record_diag(u);
    if ((k + 1) % record_stride == 0 || k + 1 == mesh.steps) {
      if (h.slice_times.back() != (k + 1) * mesh.dt) {
        h.slices.push_back(u);
        h.slice_times.push_back((k + 1) * mesh.dt);
      }
    }
  }
  return h;
}

double discrete_mass(const ArrayXd& u, const GridSpec& grid) {
  double cell = grid.h(0);
  if (grid.dim == 2) cell *= grid.h(1);
  return u.sum() * cell;
}

}  // namespace pmelab
