#include "pmelab/fbsde.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pmelab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SpaceTimeFn pressure_ghost(const GridSpec& grid, double m) {
  if (grid.boundary != Boundary::DirichletOracle) return {};
  return [&grid, m](double t, const std::array<double, 2>& x) {
    const double u = grid.oracle(t, x);
    return m > 1.0 ? m / (m - 1.0) * (std::pow(u, m - 1.0) - 1.0)
                   : m / (1.0 - m) * (std::pow(u, 1.0 - m) - 1.0);
  };
}

// Multilinear interpolation of a node field; `inside` goes false outside a
// Dirichlet domain (periodic coordinates wrap).
double interp_field(const ArrayXd& a, const GridSpec& g,
                    const std::array<double, 2>& x, bool& inside) {
  double w[2];
  int i[2];
  int n[2] = {g.points[0], g.points[1]};
  for (int ax = 0; ax < g.dim; ++ax) {
    double s = (x[ax] - g.lo[ax]) / g.h(ax);
    if (g.boundary == Boundary::Periodic) {
      s -= std::floor(s / n[ax]) * n[ax];
      if (s >= n[ax]) s = 0.0;
      i[ax] = static_cast<int>(s);
      if (i[ax] >= n[ax]) i[ax] = n[ax] - 1;
    } else {
      if (x[ax] < g.lo[ax] || x[ax] > g.hi[ax]) {
        inside = false;
        return 0.0;
      }
      i[ax] = static_cast<int>(s);
      if (i[ax] > n[ax] - 2) i[ax] = n[ax] - 2;
    }
    w[ax] = s - i[ax];
  }
  auto wrap = [&](int ax, int j) {
    return g.boundary == Boundary::Periodic ? j % n[ax] : j;
  };
  if (g.dim == 1) {
    return (1.0 - w[0]) * a[i[0]] + w[0] * a[wrap(0, i[0] + 1)];
  }
  const int i0 = i[0], i1 = i[1];
  const int j0 = wrap(0, i0 + 1), j1 = wrap(1, i1 + 1);
  const double v00 = a[g.index(i0, i1)], v10 = a[g.index(j0, i1)];
  const double v01 = a[g.index(i0, j1)], v11 = a[g.index(j0, j1)];
  return (1.0 - w[0]) * ((1.0 - w[1]) * v00 + w[1] * v01) +
         w[0] * ((1.0 - w[1]) * v10 + w[1] * v11);
}

}  // namespace

int SimParams::steps() const { return static_cast<int>(std::llround(T / dt)); }

void SimParams::validate() const {
  if (!(m > 0.0) || m == 1.0) throw std::invalid_argument("SimParams: m must be positive, != 1");
  if (!(T >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("SimParams: need T >= 0, dt > 0");
  if (T > 0.0 && std::abs(steps() * dt - T) > 1e-9 * T)
    throw std::invalid_argument("SimParams: dt must divide T");
  if (n_paths < 1) throw std::invalid_argument("SimParams: n_paths must be >= 1");
  if (record_stride < 1 || (steps() > 0 && steps() % record_stride != 0))
    throw std::invalid_argument("SimParams: record_stride must divide the step count");
  if (store_tangent && epsilon != 0.0 && tilt_mode == TiltMode::TiltedDrift)
    throw std::invalid_argument("SimParams: tangent integration requires the base measure (epsilon = 0)");
}

FieldInterp::FieldInterp(const PressureField& pf) : pf_(&pf) {
  const GridSpec& g = pf.grid;
  const SpaceTimeFn ghost = pressure_ghost(g, pf.m);
  const int ns = pf.n_slices();
  for (int a = 0; a < g.dim; ++a) grad_[a].reserve(ns);
  for (int s = 0; s < ns; ++s) {
    const double t = pf.t0 + pf.slice_times[s];
    auto gr = gradient(pf.f[s], g, t, ghost);
    grad_[0].push_back(std::move(gr[0]));
    if (g.dim == 2) grad_[1].push_back(std::move(gr[1]));
    hess_[0].push_back(second_derivative(pf.f[s], g, 0, 0, t, ghost));
    if (g.dim == 2) {
      hess_[1].push_back(second_derivative(pf.f[s], g, 0, 1, t, ghost));
      hess_[2].push_back(second_derivative(pf.f[s], g, 1, 1, t, ghost));
    }
  }
}

FieldInterp::Eval FieldInterp::eval(double pde_time,
                                    const std::array<double, 2>& x) const {
  Eval e;
  const int s = pf_->nearest_slice(pde_time);
  const GridSpec& g = pf_->grid;
  e.f = interp_field(pf_->f[s], g, x, e.inside);
  if (!e.inside) return e;
  e.grad[0] = interp_field(grad_[0][s], g, x, e.inside);
  e.hess(0, 0) = interp_field(hess_[0][s], g, x, e.inside);
  if (g.dim == 2) {
    e.grad[1] = interp_field(grad_[1][s], g, x, e.inside);
    e.hess(0, 1) = e.hess(1, 0) = interp_field(hess_[1][s], g, x, e.inside);
    e.hess(1, 1) = interp_field(hess_[2][s], g, x, e.inside);
  }
  return e;
}

Coefficients coefficients(const FieldInterp::Eval& e, double m, Regime regime,
                          double tilt_eps) {
  Coefficients c;
  c.Y = e.f;
  if (regime == Regime::Super) {
    c.U = 2.0 * ((m - 1.0) * e.f + m);
    if (!(c.U > 0.0)) throw std::runtime_error("coefficients: U must stay positive");
    const double su = std::sqrt(c.U);
    c.sigma = su;
    c.Z = su * e.grad;
    // drift (m-1)/(2 sqrt U) Z + tilt eps Z / sqrt U, both proportional to grad f
    c.drift = ((m - 1.0) / 2.0 + tilt_eps) * e.grad;
    // Zx(i,a) = d/dx_a (sqrt U f_i) = (m-1) f_a f_i / sqrt U + sqrt U f_ia
    c.Zx = (m - 1.0) / su * e.grad * e.grad.transpose() + su * e.hess;
  } else {
    c.U = (1.0 - m) * e.f + m;
    if (!(c.U > 0.0)) throw std::runtime_error("coefficients: U must stay positive");
    const double su = std::sqrt(c.U);
    c.sigma = m * kSqrt2 / su;
    c.Z = (m * kSqrt2 / su) * e.grad;
    // drift -sqrt2 m (1-m)/4 Z / U^(3/2) + tilt sigma eps Z/U
    c.drift = (m * m / (c.U * c.U)) * (2.0 * tilt_eps - (1.0 - m) / 2.0) * e.grad;
    c.Zx = m * kSqrt2 *
           (e.hess / su -
            (1.0 - m) / (2.0 * c.U * su) * e.grad * e.grad.transpose());
  }
  return c;
}

double bsde_drift_coefficient(double m, Regime regime, double eps) {
  if (regime == Regime::Super) return (m - 3.0 + 2.0 * eps) / 2.0;
  return eps - (3.0 * m - 1.0) / 4.0;
}

int PathEnsemble::n_escaped() const {
  int n = 0;
  for (char e : escaped) n += e != 0;
  return n;
}

int PathEnsemble::rec_index(double t) const {
  const double rdt = params.dt * params.record_stride;
  int j = static_cast<int>(std::llround(t / rdt));
  if (j < 0) j = 0;
  if (j >= n_rec()) j = n_rec() - 1;
  return j;
}

Eigen::ArrayXXd PathEnsemble::coefficient_u() const {
  if (regime == Regime::Super) return 2.0 * ((params.m - 1.0) * Y + params.m);
  return (1.0 - params.m) * Y + params.m;
}

Eigen::ArrayXXd PathEnsemble::z_squared() const {
  Eigen::ArrayXXd z2 = Z[0].square();
  if (dim == 2) z2 += Z[1].square();
  return z2;
}

Eigen::ArrayXd PathEnsemble::weights() const {
  return logL.col(n_rec() - 1).exp();
}

PathEnsemble simulate_forward(const FieldInterp& f, const SimParams& p,
                              const std::array<double, 2>& x0) {
  p.validate();
  const PressureField& pf = f.field();
  if (std::abs(p.m - pf.m) > 1e-14)
    throw std::invalid_argument("simulate_forward: params.m does not match the field");
  if (p.T > pf.mesh.T * (1.0 + 1e-12))
    throw std::invalid_argument("simulate_forward: history does not cover [0, T]");
  const Regime regime = pf.regime;
  const int dim = pf.grid.dim;
  const int steps = p.steps();
  const int n_rec = steps / p.record_stride + 1;
  const double tilt = p.tilt_mode == TiltMode::TiltedDrift ? p.epsilon : 0.0;

  PathEnsemble ens;
  ens.params = p;
  ens.regime = regime;
  ens.dim = dim;
  ens.rec_times.resize(n_rec);
  for (int j = 0; j < n_rec; ++j) ens.rec_times[j] = j * p.record_stride * p.dt;
  auto alloc = [&](std::vector<Eigen::ArrayXXd>& v, int count, int cols) {
    v.assign(count, Eigen::ArrayXXd::Zero(p.n_paths, cols));
  };
  if (p.store_x) alloc(ens.X, dim, n_rec);
  ens.Y = Eigen::ArrayXXd::Zero(p.n_paths, n_rec);
  alloc(ens.Z, dim, n_rec);
  ens.logL = Eigen::ArrayXXd::Zero(p.n_paths, n_rec);
  if (p.store_brownian) {
    if (p.record_stride != 1)
      throw std::invalid_argument("simulate_forward: store_brownian needs record_stride = 1");
    alloc(ens.dW, dim, steps);
  }
  if (p.store_tangent) {
    alloc(ens.J, dim * dim, n_rec);
    alloc(ens.K, dim * dim, n_rec);
    alloc(ens.KZ, dim * dim, n_rec);
  }
  ens.escaped.assign(p.n_paths, 0);
  ens.escape_step.assign(p.n_paths, -1);

  for (int pi = 0; pi < p.n_paths; ++pi) {
    std::mt19937_64 rng(splitmix64(p.seed ^ splitmix64(static_cast<std::uint64_t>(pi) + 1)));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sdt = std::sqrt(p.dt);

    std::array<double, 2> x = x0;
    Eigen::Matrix2d J = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d K = Eigen::Matrix2d::Identity();
    double logL = 0.0;
    bool escaped = false;
    Coefficients frozen;  // last valid coefficients once escaped

    for (int k = 0; k <= steps; ++k) {
      Coefficients c;
      if (!escaped) {
        const auto e = f.eval(p.T - k * p.dt, x);
        if (!e.inside) {
          escaped = true;
          ens.escaped[pi] = 1;
          ens.escape_step[pi] = k;
          c = frozen;
        } else {
          c = coefficients(e, p.m, regime, tilt);
          frozen = c;
        }
      } else {
        c = frozen;
      }

      if (k % p.record_stride == 0) {
        const int j = k / p.record_stride;
        if (p.store_x)
          for (int a = 0; a < dim; ++a) ens.X[a](pi, j) = x[a];
        ens.Y(pi, j) = c.Y;
        for (int a = 0; a < dim; ++a) ens.Z[a](pi, j) = c.Z[a];
        ens.logL(pi, j) = logL;
        if (p.store_tangent) {
          const Eigen::Matrix2d Zp = c.Zx * J;
          const Eigen::Matrix2d KZm = K * Zp;
          for (int i = 0; i < dim; ++i)
            for (int jj = 0; jj < dim; ++jj) {
              ens.J[i * dim + jj](pi, j) = J(i, jj);
              ens.K[i * dim + jj](pi, j) = K(i, jj);
              ens.KZ[i * dim + jj](pi, j) = KZm(i, jj);
            }
        }
      }
      if (k == steps) break;

      Eigen::Vector2d dw = Eigen::Vector2d::Zero();
      for (int a = 0; a < dim; ++a) dw[a] = sdt * normal(rng);
      if (p.store_brownian)
        for (int a = 0; a < dim; ++a) ens.dW[a](pi, k) = dw[a];
      if (escaped) continue;

      if (p.tilt_mode == TiltMode::DensityWeights && p.epsilon != 0.0) {
        const double z2 = c.Z.squaredNorm();
        logL += p.epsilon * c.Z.dot(dw) / c.U -
                0.5 * p.epsilon * p.epsilon * z2 / (c.U * c.U) * p.dt;
      }
      if (p.store_tangent) {
        const Eigen::Matrix2d Zp = c.Zx * J;
        const double su = std::sqrt(c.U);
        Eigen::Matrix2d Jn, Kn;
        if (regime == Regime::Super) {
          const double mm1 = p.m - 1.0;
          const Eigen::RowVector2d yrow = c.Z.transpose() * J / su;
          Jn = J + mm1 / su * dw * yrow +
               p.dt * (mm1 / (2.0 * su) * Zp -
                       mm1 * mm1 / (2.0 * c.U * su) * c.Z * yrow);
          Kn = K - mm1 / c.U * (K * dw) * c.Z.transpose() +
               p.dt * (-mm1 / (2.0 * su) * (K * Zp * K) +
                       1.5 * mm1 * mm1 / (c.U * c.U) * (K * c.Z) * c.Z.transpose());
        } else {
          const double om = 1.0 - p.m;
          const Eigen::RowVector2d zj = c.Z.transpose() * J;
          Jn = J - om / (2.0 * c.U) * dw * zj +
               p.dt * (3.0 * om * om / (8.0 * c.U * c.U) * c.Z * zj -
                       kSqrt2 * p.m * om / (4.0 * c.U * su) * Zp);
          Kn = K + om / (2.0 * c.U) * (K * dw) * c.Z.transpose() +
               p.dt * (kSqrt2 * p.m * om / (4.0 * c.U * su) * (K * Zp * K) -
                       om * om / (8.0 * c.U * c.U) * (K * c.Z) * c.Z.transpose());
        }
        // keep the unused 2d block inert in 1d
        if (dim == 1) {
          Jn(0, 1) = Jn(1, 0) = Kn(0, 1) = Kn(1, 0) = 0.0;
          Jn(1, 1) = Kn(1, 1) = 1.0;
        }
        J = Jn;
        K = Kn;
      }
      for (int a = 0; a < dim; ++a) x[a] += c.sigma * dw[a] + c.drift[a] * p.dt;
    }
  }
  return ens;
}

void evaluate_yz(PathEnsemble& ens, const FieldInterp& f) {
  if (ens.X.empty()) throw std::invalid_argument("evaluate_yz: positions were not stored");
  const SimParams& p = ens.params;
  for (int pi = 0; pi < p.n_paths; ++pi) {
    for (int j = 0; j < ens.n_rec(); ++j) {
      if (ens.escaped[pi] && ens.escape_step[pi] <= ens.rec_times[j] / p.dt) continue;
      std::array<double, 2> x{ens.X[0](pi, j), ens.dim == 2 ? ens.X[1](pi, j) : 0.0};
      const auto e = f.eval(p.T - ens.rec_times[j], x);
      const auto c = coefficients(e, p.m, ens.regime, 0.0);
      ens.Y(pi, j) = c.Y;
      for (int a = 0; a < ens.dim; ++a) ens.Z[a](pi, j) = c.Z[a];
    }
  }
}

ResidualStats bsde_residual(const PathEnsemble& ens) {
  const SimParams& p = ens.params;
  if (p.record_stride != 1 || ens.dW.empty())
    throw std::invalid_argument("bsde_residual: needs record_stride = 1 and stored increments");
  const double tilt = p.tilt_mode == TiltMode::TiltedDrift ? p.epsilon : 0.0;
  const double c = bsde_drift_coefficient(p.m, ens.regime, tilt);
  const int steps = p.steps();

  ResidualStats out;
  double sum = 0.0, sum2 = 0.0, step_sum2 = 0.0;
  long step_count = 0;
  const Eigen::ArrayXXd U = ens.coefficient_u();
  const Eigen::ArrayXXd z2 = ens.z_squared();
  for (int pi = 0; pi < p.n_paths; ++pi) {
    if (ens.escaped[pi]) continue;
    double r = 0.0;
    for (int k = 0; k < steps; ++k) {
      double zdw = 0.0;
      for (int a = 0; a < ens.dim; ++a) zdw += ens.Z[a](pi, k) * ens.dW[a](pi, k);
      const double rk = ens.Y(pi, k + 1) - ens.Y(pi, k) - zdw -
                        c * z2(pi, k) / U(pi, k) * p.dt;
      r += rk;
      step_sum2 += rk * rk;
      ++step_count;
    }
    sum += r;
    sum2 += r * r;
    ++out.n_paths;
  }
  if (out.n_paths == 0) throw std::runtime_error("bsde_residual: no usable paths");
  out.mean = sum / out.n_paths;
  out.rms = std::sqrt(sum2 / out.n_paths);
  const double var = std::max(0.0, sum2 / out.n_paths - out.mean * out.mean);
  out.se = std::sqrt(var / out.n_paths);
  out.step_rms = std::sqrt(step_sum2 / static_cast<double>(step_count));
  return out;
}

int girsanov_weights(PathEnsemble& ens, double eps) {
  const SimParams& p = ens.params;
  if (p.record_stride != 1 || ens.dW.empty())
    throw std::invalid_argument("girsanov_weights: needs record_stride = 1 and stored increments");
  if (p.tilt_mode == TiltMode::TiltedDrift && p.epsilon != 0.0)
    throw std::invalid_argument("girsanov_weights: paths must be simulated under the base measure");
  const int steps = p.steps();
  const Eigen::ArrayXXd U = ens.coefficient_u();
  const Eigen::ArrayXXd z2 = ens.z_squared();
  int clipped = 0;
  for (int pi = 0; pi < p.n_paths; ++pi) {
    double l = 0.0;
    ens.logL(pi, 0) = 0.0;
    for (int k = 0; k < steps; ++k) {
      if (!ens.escaped[pi] || k < ens.escape_step[pi]) {
        double zdw = 0.0;
        for (int a = 0; a < ens.dim; ++a) zdw += ens.Z[a](pi, k) * ens.dW[a](pi, k);
        l += eps * zdw / U(pi, k) -
             0.5 * eps * eps * z2(pi, k) / (U(pi, k) * U(pi, k)) * p.dt;
      }
      ens.logL(pi, k + 1) = l;
    }
    if (std::abs(l) > 30.0) ++clipped;
  }
  return clipped;
}

FlowCheckResult flow_z_check(const FieldInterp& f, const SimParams& p,
                             const std::array<double, 2>& x0, double delta_fd) {
  SimParams pc = p;
  pc.epsilon = 0.0;
  pc.store_tangent = true;
  pc.store_x = true;
  PathEnsemble center = simulate_forward(f, pc, x0);

  SimParams ps = p;
  ps.epsilon = 0.0;
  ps.store_tangent = false;
  ps.store_x = true;
  const int dim = center.dim;
  std::vector<PathEnsemble> plus(dim), minus(dim);
  for (int l = 0; l < dim; ++l) {
    std::array<double, 2> xp = x0, xm = x0;
    xp[l] += delta_fd;
    xm[l] -= delta_fd;
    plus[l] = simulate_forward(f, ps, xp);
    minus[l] = simulate_forward(f, ps, xm);
  }

  const double m = p.m;
  const Regime regime = center.regime;
  FlowCheckResult out;
  out.n_paths = p.n_paths;
  double num = 0.0, den = 0.0, jnum = 0.0, jden = 0.0;
  const Eigen::ArrayXXd U = center.coefficient_u();
  for (int pi = 0; pi < p.n_paths; ++pi) {
    bool bad = center.escaped[pi] != 0;
    for (int l = 0; l < dim && !bad; ++l)
      bad = plus[l].escaped[pi] != 0 || minus[l].escaped[pi] != 0;
    if (!bad) {
      for (int j = 0; j < center.n_rec() && !bad; ++j) {
        Eigen::Matrix2d Jm = Eigen::Matrix2d::Identity();
        Eigen::Matrix2d Km = Eigen::Matrix2d::Identity();
        for (int i = 0; i < dim; ++i)
          for (int jj = 0; jj < dim; ++jj) {
            Jm(i, jj) = center.J[i * dim + jj](pi, j);
            Km(i, jj) = center.K[i * dim + jj](pi, j);
          }
        Eigen::Matrix2d dev = Km * Jm - Eigen::Matrix2d::Identity();
        if (dim == 1) dev(1, 1) = 0.0;
        if (dev.norm() > 0.05) bad = true;
      }
    }
    if (bad) {
      ++out.n_flagged;
      continue;
    }
    for (int j = 0; j < center.n_rec(); ++j) {
      Eigen::Vector2d yfd = Eigen::Vector2d::Zero();
      for (int l = 0; l < dim; ++l)
        yfd[l] = (plus[l].Y(pi, j) - minus[l].Y(pi, j)) / (2.0 * delta_fd);
      Eigen::Matrix2d Km = Eigen::Matrix2d::Identity();
      for (int i = 0; i < dim; ++i)
        for (int jj = 0; jj < dim; ++jj) Km(i, jj) = center.K[i * dim + jj](pi, j);
      const double pref = regime == Regime::Super
                              ? std::sqrt(U(pi, j))
                              : kSqrt2 * m / std::sqrt(U(pi, j));
      const Eigen::Vector2d zflow = pref * Km.transpose() * yfd;
      for (int a = 0; a < dim; ++a) {
        const double zg = center.Z[a](pi, j);
        num += (zflow[a] - zg) * (zflow[a] - zg);
        den += zg * zg;
      }
      // tangent vs common-random-number finite difference of the flow
      for (int l = 0; l < dim; ++l)
        for (int i = 0; i < dim; ++i) {
          const double jfd = (plus[l].X[i](pi, j) - minus[l].X[i](pi, j)) / (2.0 * delta_fd);
          const double jt = center.J[i * dim + l](pi, j);
          jnum += (jt - jfd) * (jt - jfd);
          jden += jfd * jfd;
        }
    }
  }
  if (den > 0.0) out.rms_rel = std::sqrt(num / den);
  if (jden > 0.0) out.j_fd_rms_rel = std::sqrt(jnum / jden);
  out.kj_ok_fraction = static_cast<double>(p.n_paths - out.n_flagged) / p.n_paths;
  return out;
}

}  // namespace pmelab
