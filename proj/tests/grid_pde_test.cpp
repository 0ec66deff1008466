#include "pmelab/exact.hpp"
#include "pmelab/field_io.hpp"
#include "pmelab/grid_pde.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>

using namespace pmelab;

namespace {
constexpr double kPi = 3.141592653589793;

ArrayXd sine_field(const GridSpec& g, double base, double amp) {
  ArrayXd u(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const auto x = g.node(i);
    double v = std::sin(2.0 * kPi * x[0]);
    if (g.dim == 2) v *= std::sin(2.0 * kPi * x[1]);
    u[i] = base + amp * v;
  }
  return u;
}
}  // namespace

TEST_CASE("grid factories and indexing") {
  const GridSpec g1 = GridSpec::periodic1d(64);
  CHECK(g1.h(0) == doctest::Approx(1.0 / 64));
  CHECK(g1.size() == 64);
  const GridSpec g2 = GridSpec::periodic2d(8, 16);
  CHECK(g2.size() == 128);
  CHECK(g2.index(1, 2) == 18);
  const auto x = g2.node(g2.index(3, 5));
  CHECK(x[0] == doctest::Approx(3.0 / 8));
  CHECK(x[1] == doctest::Approx(5.0 / 16));
  const GridSpec gd = GridSpec::dirichlet1d(
      65, 0.0, 1.0, [](double, const std::array<double, 2>&) { return 1.0; });
  CHECK(gd.h(0) == doctest::Approx(1.0 / 64));
}

TEST_CASE("time mesh validation") {
  CHECK_THROWS(TimeMesh{1.0, 0.3, 3}.validate());
  const TimeMesh m = TimeMesh::from_steps(0.5, 100);
  CHECK(m.dt == doctest::Approx(0.005));
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("laplacian and gradient of a sine are second-order accurate") {
  for (int n : {32, 64}) {
    const GridSpec g = GridSpec::periodic1d(n);
    const ArrayXd u = sine_field(g, 0.0, 1.0);
    const ArrayXd lap = laplacian(u, g);
    const ArrayXd grad = gradient(u, g)[0];
    const double w = 2.0 * kPi;
    double lap_err = 0.0, grad_err = 0.0;
    for (int i = 0; i < n; ++i) {
      lap_err = std::max(lap_err, std::abs(lap[i] + w * w * u[i]));
      grad_err = std::max(
          grad_err, std::abs(grad[i] - w * std::cos(w * g.coord(0, i))));
    }
    // central stencils: relative error (w h)^2 / 12 plus 10% headroom
    const double tol = 1.1 * w * w * std::pow(w * g.h(0), 2) / 12.0;
    CHECK(lap_err < tol);
    CHECK(grad_err < tol);
  }
}

TEST_CASE("laplacian on a dirichlet grid uses oracle ghosts") {
  // quadratic field: 3-point stencil is exact including at the boundary
  auto quad = [](double, const std::array<double, 2>& x) {
    return 1.0 + x[0] * x[0];
  };
  const GridSpec g = GridSpec::dirichlet1d(33, 0.0, 1.0, quad);
  const ArrayXd u = sample(quad, g, 0.0);
  const ArrayXd lap = laplacian(u, g);
  for (int i = 0; i < g.size(); ++i) CHECK(lap[i] == doctest::Approx(2.0));
}

TEST_CASE("cfl limit for a constant field") {
  const GridSpec g = GridSpec::periodic1d(10);
  const ArrayXd u = ArrayXd::Constant(10, 1.0);
  CHECK(cfl_limit(u, 2.0, g) == doctest::Approx(0.01 / 4.0));
  // m < 1: the binding diffusivity sits at the minimum of u
  const ArrayXd v = ArrayXd::LinSpaced(10, 0.25, 1.0);
  CHECK(cfl_limit(v, 0.5, g) ==
        doctest::Approx(0.01 / (2.0 * 0.5 * std::pow(0.25, -0.5))));
}

TEST_CASE("explicit step conserves mass and respects the maximum principle") {
  for (double m : {0.5, 1.5, 2.0}) {
    const GridSpec g = GridSpec::periodic1d(64);
    const ArrayXd u0 = sine_field(g, 1.0, 0.3);
    const double dt = 0.5 * cfl_limit(u0, m, g);
    const ArrayXd u1 = step_pme(u0, m, dt, g);
    CHECK(discrete_mass(u1, g) ==
          doctest::Approx(discrete_mass(u0, g)).epsilon(1e-13));
    CHECK(u1.maxCoeff() <= u0.maxCoeff() + 1e-13);
    CHECK(u1.minCoeff() >= u0.minCoeff() - 1e-13);
  }
  CHECK_THROWS(step_pme(sine_field(GridSpec::periodic1d(64), 1.0, 0.3), 2.0,
                        1.0, GridSpec::periodic1d(64)));
}

TEST_CASE("solver converges on a curved traveling wave (m = 3)") {
  // u = sqrt(2 c (c t - x) / 3) is genuinely nonlinear in x, so the scheme
  // shows its O(dt) + O(h^2) error, factor ~4 under h -> h/2, dt -> dt/4.
  const double m = 3.0, c = 1.0;
  const SpaceTimeFn exact = traveling_wave(m, c);
  double prev_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int n = (32 << k) + 1;
    const GridSpec g = GridSpec::dirichlet1d(n, -1.0, 0.0, exact);
    const double t0 = 0.5, T = 0.05;
    const ArrayXd u0 = sample(exact, g, t0);
    const int steps = 400 << (2 * k);
    const auto h = solve(u0, m, TimeMesh::from_steps(T, steps), g, steps, t0);
    const ArrayXd ref = sample(exact, g, t0 + T);
    const double err = (h.slices.back() - ref).abs().maxCoeff();
    if (k > 0) {
      const double factor = prev_err / err;
      CHECK(factor > 3.0);
      CHECK(factor < 5.0);
    }
    prev_err = err;
  }
}

TEST_CASE("solver converges on the self-similar source solution") {
  const double m = 2.0;
  const SpaceTimeFn exact = barenblatt(m, 1, 1.0);
  double prev_err = 0.0;
  for (int k = 0; k < 2; ++k) {
    const int n = (32 << k) + 1;
    // stay inside the support: |x| < sqrt(C/kappa) t^alpha at t ~ 1
    const GridSpec g = GridSpec::dirichlet1d(n, -1.0, 1.0, exact);
    const double t0 = 1.0, T = 0.1;
    const ArrayXd u0 = sample(exact, g, t0);
    const int steps = 200 << (2 * k);
    const auto h = solve(u0, m, TimeMesh::from_steps(T, steps), g, steps, t0);
    const ArrayXd ref = sample(exact, g, t0 + T);
    const double err = (h.slices.back() - ref).abs().maxCoeff();
    if (k > 0) CHECK(prev_err / err > 3.0);
    prev_err = err;
  }
}

TEST_CASE("history records slices at the stride plus endpoints") {
  const GridSpec g = GridSpec::periodic1d(32);
  const ArrayXd u0 = sine_field(g, 1.0, 0.2);
  const auto h = solve(u0, 2.0, TimeMesh::from_steps(0.01, 100), g, 30);
  // slices at steps 0, 30, 60, 90 and the final step 100
  CHECK(h.n_slices() == 5);
  CHECK(h.slice_times.back() == doctest::Approx(0.01));
  CHECK(h.nearest_slice(0.0061) == 2);
  CHECK(static_cast<int>(h.step_mass.size()) == 101);
}

TEST_CASE("positivity floor aborts the solve") {
  // boundary data pulled to near zero forces the interior down
  auto decay = [](double t, const std::array<double, 2>& x) {
    return std::max(1e-6, 1.0 - 40.0 * t * (1.0 + 0.0 * x[0]));
  };
  const GridSpec g = GridSpec::dirichlet1d(17, 0.0, 1.0, decay);
  const ArrayXd u0 = ArrayXd::Constant(17, 1.0);
  CHECK_THROWS(solve(u0, 2.0, TimeMesh::from_steps(0.5, 4000), g, 4000));
}

TEST_CASE("history round-trips through csv and binary") {
  const GridSpec g = GridSpec::periodic1d(16);
  const ArrayXd u0 = sine_field(g, 1.0, 0.25);
  const auto h = solve(u0, 1.5, TimeMesh::from_steps(0.002, 20), g, 5);

  save_history_csv(h, "history_roundtrip.csv");
  const auto hc = load_history_csv("history_roundtrip.csv");
  REQUIRE(hc.n_slices() == h.n_slices());
  for (int s = 0; s < h.n_slices(); ++s)
    CHECK((hc.slices[s] - h.slices[s]).abs().maxCoeff() == 0.0);
  CHECK(hc.m == h.m);
  CHECK(hc.mesh.dt == h.mesh.dt);

  save_history_binary(h, "history_roundtrip.bin");
  const auto hb = load_history_binary("history_roundtrip.bin");
  REQUIRE(hb.n_slices() == h.n_slices());
  for (int s = 0; s < h.n_slices(); ++s)
    CHECK((hb.slices[s] - h.slices[s]).abs().maxCoeff() == 0.0);

  std::remove("history_roundtrip.csv");
  std::remove("history_roundtrip.bin");
}
