#include "pmelab/constants.hpp"
#include "pmelab/martingale.hpp"

#include <doctest.h>

#include <cmath>

using namespace pmelab;

namespace {
constexpr double kPi = 3.141592653589793;

PressureField sine_pressure(double m, int n_points, double T, int steps,
                            int stride) {
  const GridSpec g = GridSpec::periodic1d(n_points);
  ArrayXd u0(g.size());
  for (int i = 0; i < g.size(); ++i)
    u0[i] = 1.0 + 0.3 * std::sin(2.0 * kPi * g.coord(0, i));
  return to_pressure(solve(u0, m, TimeMesh::from_steps(T, steps), g, stride), m);
}
}  // namespace

TEST_CASE("checkpoints on a constant field are identically zero") {
  const PressureField pf = [] {
    const GridSpec g = GridSpec::periodic1d(16);
    const ArrayXd u0 = ArrayXd::Constant(16, 1.0);
    return to_pressure(solve(u0, 2.0, TimeMesh::from_steps(0.05, 128), g, 1),
                       2.0);
  }();
  const FieldInterp interp(pf);
  SimParams p;
  p.m = 2.0;
  p.T = 0.05;
  p.dt = 0.001;
  p.n_paths = 50;
  const PathEnsemble ens = simulate_forward(interp, p, {0.5, 0.0});
  const CheckpointStats st =
      functional_checkpoints(ens, Functional::Z2, {0.01, 0.05});
  CHECK(st.mean[0] == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(st.mean[1] == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(empirical_submartingale(ens, Functional::MOverU, 5).pass);
}

TEST_CASE("submartingale check on a tilted super-regime ensemble") {
  const PressureField pf = sine_pressure(1.5, 64, 0.3, 6000, 5);
  const FieldInterp interp(pf);
  SimParams p;
  p.m = 1.5;
  p.T = 0.25;
  p.dt = 0.001;
  p.n_paths = 2000;
  p.seed = 21;
  p.epsilon = eps_z2_submartingale(1.5);
  const PathEnsemble ens = simulate_forward(interp, p, {0.25, 0.0});
  const SubmartingaleReport rep =
      empirical_submartingale(ens, Functional::Z2, 10);
  CHECK(rep.stats.times.size() == 10);
  CHECK(rep.stats.times.back() == doctest::Approx(0.25));
  CHECK(rep.n_violations == 0);
  CHECK(rep.pass);
  // pde time runs backwards along paths: |Z|^2 should grow toward t = T
  CHECK(rep.stats.mean.back() > rep.stats.mean.front());
}

TEST_CASE("q-integral bounds hold with margin on the standard sine field") {
  const PressureField pf = sine_pressure(2.0, 64, 0.3, 12000, 10);
  const double f0 = pf.f[0].abs().maxCoeff();
  const FieldInterp interp(pf);
  SimParams p;
  p.m = 2.0;
  p.T = 0.25;
  p.dt = 0.001;
  p.n_paths = 2000;
  p.seed = 22;
  p.epsilon = eps_m_submartingale(2.0);
  const PathEnsemble ens = simulate_forward(interp, p, {0.25, 0.0});

  const QIntegralReport z2 = q_integral_bound(ens, QIntegralVariant::Z2Super, f0);
  CHECK(z2.bound == doctest::Approx(4.0 * f0 * f0));
  CHECK(z2.pass);
  CHECK(z2.margin > 0.0);

  const QIntegralReport mu =
      q_integral_bound(ens, QIntegralVariant::MOverUSuper, f0);
  // at eps = (3+m)/2 the coefficient reduces to m
  CHECK(mu.coefficient == doctest::Approx(2.0));
  CHECK(mu.bound == doctest::Approx(2.0 * f0));
  CHECK(mu.pass);
}

TEST_CASE("q-integral sub-regime variant uses the beta2 coefficient") {
  const PressureField pf = sine_pressure(0.5, 64, 0.3, 3000, 10);
  const double f0 = pf.f[0].abs().maxCoeff();
  const FieldInterp interp(pf);
  SimParams p;
  p.m = 0.5;
  p.T = 0.25;
  p.dt = 0.001;
  p.n_paths = 1000;
  p.seed = 23;
  p.epsilon = eps_from_beta_sub(0.5, beta_roots(0.5, 1).second);  // 0.875
  const PathEnsemble ens = simulate_forward(interp, p, {0.25, 0.0});
  const QIntegralReport rep = q_integral_bound(ens, QIntegralVariant::Sub, f0);
  // beta2 = 0 at (n, m) = (1, 1/2): coefficient |2m-4|/4 = 3/4
  CHECK(rep.coefficient == doctest::Approx(0.75));
  CHECK(rep.bound == doctest::Approx(2.0 * f0));
  CHECK(rep.pass);
}

TEST_CASE("weighted checkpoints agree with tilted checkpoints") {
  const PressureField pf = sine_pressure(2.0, 64, 0.3, 12000, 10);
  const FieldInterp interp(pf);
  SimParams p;
  p.m = 2.0;
  p.T = 0.2;
  p.dt = 0.001;
  p.n_paths = 4000;
  p.seed = 31;
  p.epsilon = 2.5;
  const PathEnsemble tilted = simulate_forward(interp, p, {0.25, 0.0});
  p.tilt_mode = TiltMode::DensityWeights;
  p.seed = 32;
  const PathEnsemble weighted = simulate_forward(interp, p, {0.25, 0.0});

  const std::vector<double> times{0.2};
  const CheckpointStats a = functional_checkpoints(tilted, Functional::Z2, times);
  const CheckpointStats b =
      functional_checkpoints(weighted, Functional::Z2, times);
  const double gap = std::abs(a.mean[0] - b.mean[0]);
  CHECK(gap <= 3.0 * std::hypot(a.se[0], b.se[0]));
}
