#include "pmelab/exact.hpp"
#include "pmelab/transform.hpp"

#include <doctest.h>

#include <cmath>

using namespace pmelab;

namespace {
constexpr double kPi = 3.141592653589793;

ScalarFieldHistory solve_sine(double m, int n_points, double T, int steps,
                              int stride, double amp = 0.3) {
  const GridSpec g = GridSpec::periodic1d(n_points);
  ArrayXd u0(g.size());
  for (int i = 0; i < g.size(); ++i)
    u0[i] = 1.0 + amp * std::sin(2.0 * kPi * g.coord(0, i));
  return solve(u0, m, TimeMesh::from_steps(T, steps), g, stride);
}
}  // namespace

TEST_CASE("pressure values and coefficient in both regimes") {
  const GridSpec g = GridSpec::periodic1d(4);
  SUBCASE("super") {
    const ArrayXd u = ArrayXd::Constant(4, 2.0);
    const PressureField pf = to_pressure_slice(u, 2.0, g);
    CHECK(pf.regime == Regime::Super);
    CHECK(pf.f[0][0] == doctest::Approx(2.0));  // 2/1 (2 - 1)
    CHECK(pf.coefficient_u(0)[0] == doctest::Approx(8.0));  // 2 m u^(m-1)
  }
  SUBCASE("sub") {
    const ArrayXd u = ArrayXd::Constant(4, 4.0);
    const PressureField pf = to_pressure_slice(u, 0.5, g);
    CHECK(pf.regime == Regime::Sub);
    CHECK(pf.f[0][0] == doctest::Approx(1.0));  // (0.5/0.5)(2 - 1)
    CHECK(pf.coefficient_u(0)[0] == doctest::Approx(1.0));  // m u^(1-m)
  }
}

TEST_CASE("pressure transform round-trips and hopf is log") {
  const auto h = solve_sine(1.5, 32, 0.001, 10, 5);
  const PressureField pf = to_pressure(h, 1.5);
  const auto back = from_pressure(pf);
  for (int s = 0; s < h.n_slices(); ++s)
    CHECK((back[s] - h.slices[s]).abs().maxCoeff() < 1e-13);
  const ArrayXd lg = hopf_transform(h.slices[0]);
  for (int i = 0; i < 32; ++i)
    CHECK(lg[i] == doctest::Approx(std::log(h.slices[0][i])));
}

TEST_CASE("from_pressure rejects fields violating positivity") {
  const GridSpec g = GridSpec::periodic1d(4);
  PressureField pf = to_pressure_slice(ArrayXd::Constant(4, 1.0), 2.0, g);
  pf.f[0] = ArrayXd::Constant(4, -3.0);  // (m-1)f + m = -1 < 0
  CHECK_THROWS(from_pressure(pf));
}

TEST_CASE("linear traveling-wave pressure solves its PDE to machine precision") {
  // m = 2: the pressure of the traveling wave is linear, so the discrete
  // residual of the quadratic evolution is pure roundoff.
  const double m = 2.0, c = 1.0;
  const SpaceTimeFn exact = traveling_wave(m, c);
  const GridSpec g = GridSpec::dirichlet1d(33, -1.0, 0.0, exact);
  const ArrayXd u0 = sample(exact, g, 0.5);
  const auto h = solve(u0, m, TimeMesh::from_steps(0.04, 400), g, 100, 0.5);
  const PressureField pf = to_pressure(h, m);
  for (const ArrayXd& r : pressure_pde_residual(pf))
    CHECK(r.abs().maxCoeff() < 1e-8);
}

TEST_CASE("pressure PDE residual shrinks under refinement in both regimes") {
  for (double m : {2.0, 0.5}) {
    double prev = 0.0;
    for (int k = 0; k < 2; ++k) {
      const int n = 64 << k;
      const int steps = 4000 << (2 * k);
      // fixed stride: the stored slice spacing shrinks like h^2 together
      // with dt, so the centered time difference refines consistently
      const auto h = solve_sine(m, n, 0.1, steps, 500);
      const PressureField pf = to_pressure(h, m);
      const auto res = pressure_pde_residual(pf);
      double worst = 0.0;
      for (const ArrayXd& r : res) worst = std::max(worst, r.abs().maxCoeff());
      if (k > 0) CHECK(prev / worst > 1.7);
      prev = worst;
    }
  }
}

TEST_CASE("aronson-benilan constant and margins") {
  CHECK(aronson_benilan_alpha(2.0, 2) == doctest::Approx(0.5));
  CHECK(aronson_benilan_alpha(2.0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS(aronson_benilan_alpha(0.1, 3));  // m <= 1 - 2/n

  // the unshifted pressure of the traveling wave has zero laplacian, so the
  // margin reduces to alpha v / t > 0
  const double m = 2.0, c = 1.0;
  const SpaceTimeFn exact = traveling_wave(m, c);
  const GridSpec g = GridSpec::dirichlet1d(33, -1.0, 0.0, exact);
  const ArrayXd u0 = sample(exact, g, 0.5);
  const auto h = solve(u0, m, TimeMesh::from_steps(0.04, 400), g, 100, 0.5);
  const ArrayXd margin = aronson_benilan_margin(h, m, 2);
  CHECK(margin.minCoeff() > 0.0);

  // the source solution saturates the estimate: margin ~ 0 up to
  // discretization error
  const SpaceTimeFn bb = barenblatt(m, 1, 1.0);
  const GridSpec gb = GridSpec::dirichlet1d(65, -1.0, 1.0, bb);
  const ArrayXd ub = sample(bb, gb, 1.0);
  const auto hb = solve(ub, m, TimeMesh::from_steps(0.04, 1600), gb, 400, 1.0);
  const ArrayXd mb = aronson_benilan_margin(hb, m, 2);
  CHECK(mb.abs().maxCoeff() < 5e-3);
}
