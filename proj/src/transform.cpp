#include "pmelab/transform.hpp"

#include <cmath>
#include <stdexcept>

namespace pmelab {

ArrayXd coefficient_u(const ArrayXd& f, double m, Regime regime) {
  if (regime == Regime::Super) return 2.0 * ((m - 1.0) * f + m);
  return (1.0 - m) * f + m;
}

ArrayXd PressureField::coefficient_u(int slice) const {
  return pmelab::coefficient_u(f[slice], m, regime);
}

int PressureField::nearest_slice(double t) const {
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

void PressureField::check_positivity() const {
  for (int s = 0; s < n_slices(); ++s) {
    const ArrayXd gate = regime == Regime::Super ? ((m - 1.0) * f[s] + m).eval()
                                                 : ((1.0 - m) * f[s] + m).eval();
    if (!(gate.minCoeff() > 0.0))
      throw std::runtime_error("PressureField: positivity invariant violated");
  }
}

namespace {

ArrayXd pressure_of(const ArrayXd& u, double m) {
  if (!(u.minCoeff() > 0.0)) throw std::invalid_argument("to_pressure: u must be positive");
  if (!(m > 0.0) || m == 1.0)
    throw std::invalid_argument("to_pressure: m must be positive and != 1 (use hopf_transform for the limit)");
  if (m > 1.0) return m / (m - 1.0) * (u.pow(m - 1.0) - 1.0);
  return m / (1.0 - m) * (u.pow(1.0 - m) - 1.0);
}

}  // namespace

PressureField to_pressure(const ScalarFieldHistory& u, double m) {
  PressureField pf;
  pf.regime = regime_of(m);
  pf.m = m;
  pf.grid = u.grid;
  pf.mesh = u.mesh;
  pf.t0 = u.t0;
  pf.record_stride = u.record_stride;
  pf.slice_times = u.slice_times;
  pf.f.reserve(u.n_slices());
  for (const auto& s : u.slices) pf.f.push_back(pressure_of(s, m));
  return pf;
}

PressureField to_pressure_slice(const ArrayXd& u, double m, const GridSpec& grid) {
  PressureField pf;
  pf.regime = regime_of(m);
  pf.m = m;
  pf.grid = grid;
  pf.mesh = TimeMesh{1.0, 1.0, 1};
  pf.slice_times = {0.0};
  pf.f.push_back(pressure_of(u, m));
  return pf;
}

ArrayXd from_pressure(const ArrayXd& f, double m, Regime regime) {
  if (regime == Regime::Super) {
    const ArrayXd gate = (m - 1.0) * f + m;
    if (!(gate.minCoeff() > 0.0))
      throw std::runtime_error("from_pressure: (m-1)f+m must stay positive");
    return (gate / m).pow(1.0 / (m - 1.0));
  }
  const ArrayXd gate = (1.0 - m) * f + m;
  if (!(gate.minCoeff() > 0.0))
    throw std::runtime_error("from_pressure: (1-m)f+m must stay positive");
  return (gate / m).pow(1.0 / (1.0 - m));
}

std::vector<ArrayXd> from_pressure(const PressureField& pf) {
  std::vector<ArrayXd> out;
  out.reserve(pf.n_slices());
  for (const auto& s : pf.f) out.push_back(from_pressure(s, pf.m, pf.regime));
  return out;
}

ArrayXd hopf_transform(const ArrayXd& u) {
  if (!(u.minCoeff() > 0.0)) throw std::invalid_argument("hopf_transform: u must be positive");
  return u.log();
}

std::vector<ArrayXd> pressure_pde_residual(const PressureField& pf) {
  if (pf.n_slices() < 3)
    throw std::invalid_argument("pressure_pde_residual: need at least 3 stored slices");
  std::vector<ArrayXd> out;
  out.reserve(pf.n_slices() - 2);
  SpaceTimeFn ghost;
  if (pf.grid.boundary == Boundary::DirichletOracle) {
    const GridSpec& g = pf.grid;
    const double m = pf.m;
    ghost = [&g, m](double tt, const std::array<double, 2>& x) {
      const double u = g.oracle(tt, x);
      return m > 1.0 ? m / (m - 1.0) * (std::pow(u, m - 1.0) - 1.0)
                     : m / (1.0 - m) * (std::pow(u, 1.0 - m) - 1.0);
    };
  }
  for (int s = 1; s + 1 < pf.n_slices(); ++s) {
    const double t = pf.t0 + pf.slice_times[s];
    const double dtc = pf.slice_times[s + 1] - pf.slice_times[s - 1];
    const ArrayXd dfdt = (pf.f[s + 1] - pf.f[s - 1]) / dtc;
    const ArrayXd lap = laplacian(pf.f[s], pf.grid, t, ghost);
    const auto grad = gradient(pf.f[s], pf.grid, t, ghost);
    ArrayXd g2 = grad[0].square();
    if (pf.grid.dim == 2) g2 += grad[1].square();
    ArrayXd rhs;
    if (pf.regime == Regime::Super) {
      rhs = ((pf.m - 1.0) * pf.f[s] + pf.m) * lap + g2;
    } else {
      const ArrayXd gate = (1.0 - pf.m) * pf.f[s] + pf.m;
      rhs = pf.m * pf.m * lap / gate +
            pf.m * pf.m * (2.0 * pf.m - 1.0) * g2 / gate.square();
    }
    out.push_back(dfdt - rhs);
  }
  return out;
}

double aronson_benilan_alpha(double m, int n) {
  if (!(m > 1.0 - 2.0 / n))
    throw std::invalid_argument("aronson_benilan: requires m > 1 - 2/n");
  return n * (m - 1.0) / ((m - 1.0) * n + 2.0);
}

ArrayXd aronson_benilan_margin(const ScalarFieldHistory& u, double m, int slice) {
  if (slice < 1 || slice + 1 >= u.n_slices())
    throw std::invalid_argument("aronson_benilan_margin: slice must be interior in time");
  const double t = u.t0 + u.slice_times[slice];
  if (!(t > 0.0)) throw std::invalid_argument("aronson_benilan_margin: needs t > 0");
  const double alpha = aronson_benilan_alpha(m, u.grid.dim);
  // v is the unshifted pressure m/(m-1) u^(m-1), distinct from f
  auto v_of = [m](const ArrayXd& w) { return (m / (m - 1.0) * w.pow(m - 1.0)).eval(); };
  const ArrayXd v = v_of(u.slices[slice]);
  const double dtc = u.slice_times[slice + 1] - u.slice_times[slice - 1];
  const ArrayXd dvdt = (v_of(u.slices[slice + 1]) - v_of(u.slices[slice - 1])) / dtc;
  SpaceTimeFn ghost;
  if (u.grid.boundary == Boundary::DirichletOracle) {
    const GridSpec& g = u.grid;
    ghost = [&g, m](double tt, const std::array<double, 2>& x) {
      return m / (m - 1.0) * std::pow(g.oracle(tt, x), m - 1.0);
    };
  }
  const auto grad = gradient(v, u.grid, t, ghost);
  ArrayXd g2 = grad[0].square();
  if (u.grid.dim == 2) g2 += grad[1].square();
  return alpha * v / t - (g2 - dvdt);
}

}  // namespace pmelab
