#include "pmelab/estimates.hpp"

#include <doctest.h>

#include <cmath>

using namespace pmelab;

namespace {
constexpr double kPi = 3.141592653589793;
constexpr double kSqrt2 = 1.4142135623730951;

ScalarFieldHistory solve_sine(double m, int n_points, double T, int steps,
                              int stride, double amp = 0.1) {
  const GridSpec g = GridSpec::periodic1d(n_points);
  ArrayXd u0(g.size());
  for (int i = 0; i < g.size(); ++i)
    u0[i] = 1.0 + amp * std::sin(2.0 * kPi * g.coord(0, i));
  return solve(u0, m, TimeMesh::from_steps(T, steps), g, stride);
}
}  // namespace

TEST_CASE("display bound values") {
  // case 2 at m = 2, n = 1, norm 0.5, t = 1: sqrt(2 * 1 * 0.5)/2
  CHECK(bound_value(BoundCase::Case2, 2.0, 1, 0.5, 1.0) ==
        doctest::Approx(0.5));
  // case 3 at m = 0.5, norm 0.2: sqrt2 * 0.2 * sqrt(1.2)/sqrt(0.5)
  CHECK(bound_value(BoundCase::Case3, 0.5, 1, 0.2, 1.0) ==
        doctest::Approx(kSqrt2 * 0.2 * std::sqrt(1.2) / std::sqrt(0.5)));
  // case 4 at n = 1, m = 0.5: beta2 = 0, |2m - 4| = 3
  const double norm = 0.16;
  CHECK(bound_value(BoundCase::Case4, 0.5, 1, norm, 1.0) ==
        doctest::Approx(2.0 * std::sqrt(norm) / (0.25 * std::sqrt(3.0))));
  // case 1 at m = 2: 3 norm^2 / (sqrt(2m) t^{3/2})
  CHECK(bound_value(BoundCase::Case1, 2.0, 1, 0.5, 4.0) ==
        doctest::Approx(3.0 * 0.25 / (2.0 * 8.0)));
  CHECK_THROWS(bound_value(BoundCase::Case1, 2.0, 1, 0.5, 0.0));
}

TEST_CASE("bounds blow up monotonically as t decreases") {
  for (int c = 1; c <= 4; ++c) {
    const BoundCase bc = static_cast<BoundCase>(c);
    const double m = c <= 2 ? 1.5 : 0.5;
    double prev = bound_value(bc, m, 1, 0.3, 0.01);
    for (double t : {0.1, 1.0, 10.0}) {
      const double b = bound_value(bc, m, 1, 0.3, t);
      CHECK(b < prev);
      prev = b;
    }
    CHECK(bound_value(bc, m, 1, 0.3, 1e-12) > 1e5);
  }
}

TEST_CASE("scale identities in the input norm") {
  const double b2 = bound_value(BoundCase::Case2, 1.5, 1, 0.2, 1.0);
  CHECK(bound_value(BoundCase::Case2, 1.5, 1, 0.8, 1.0) ==
        doctest::Approx(2.0 * b2));  // norm^(1/2)
  const double b1 = bound_value(BoundCase::Case1, 1.5, 1, 0.2, 1.0);
  CHECK(bound_value(BoundCase::Case1, 1.5, 1, 0.8, 1.0) ==
        doctest::Approx(16.0 * b1));  // norm^2
}

TEST_CASE("regime gating follows the hypotheses") {
  CHECK(regime_valid(BoundCase::Case1, 1.5, 1));
  CHECK_FALSE(regime_valid(BoundCase::Case1, 3.5, 1));  // m >= 1 + 2/n
  CHECK_FALSE(regime_valid(BoundCase::Case1, 2.5, 2));
  CHECK(regime_valid(BoundCase::Case2, 3.0, 1));
  CHECK_FALSE(regime_valid(BoundCase::Case2, 3.0, 2));  // n = 1 only
  CHECK(regime_valid(BoundCase::Case3, 0.5, 1));
  CHECK_FALSE(regime_valid(BoundCase::Case3, 0.2, 1));  // below 1 - 6/(n+8)
  CHECK(regime_valid(BoundCase::Case4, 0.5, 1));
  CHECK_FALSE(regime_valid(BoundCase::Case4, 0.1, 3));  // below (n-1)/(n+3)
  CHECK(regime_valid(PressureBound::Thm3, 2.0, 1));
  CHECK_FALSE(regime_valid(PressureBound::Est1, 0.5, 1));
}

TEST_CASE("observed left-hand sides") {
  SUBCASE("constant data gives zero for every case") {
    const GridSpec g = GridSpec::periodic1d(32);
    const ArrayXd u0 = ArrayXd::Constant(32, 1.7);
    const auto h = solve(u0, 2.0, TimeMesh::from_steps(0.01, 128), g, 128);
    for (int c = 1; c <= 4; ++c)
      CHECK(observed_lhs(static_cast<BoundCase>(c), h, 0.0) <
            1e-13);
  }
  SUBCASE("sine data matches the analytic gradient at t = 0") {
    const auto h = solve_sine(2.0, 256, 0.0001, 32, 32);
    // case 2, m = 2: |grad u| sup = 0.2 pi
    CHECK(observed_lhs(BoundCase::Case2, h, 0.0) ==
          doctest::Approx(0.2 * kPi).epsilon(5e-4));
    // case 4: sup |grad log u| = sup |grad u| / u; compare against a direct
    // nodewise evaluation of the chain-rule form
    const auto g = gradient(h.slices[0], h.grid);
    const double direct = (g[0] / h.slices[0]).abs().maxCoeff();
    CHECK(observed_lhs(BoundCase::Case4, h, 0.0) ==
          doctest::Approx(direct).epsilon(1e-3));
  }
}

TEST_CASE("pressure bounds hold on solved fields") {
  SUBCASE("super") {
    const auto h = solve_sine(1.5, 64, 0.5, 10000, 100, 0.3);
    const PressureField pf = to_pressure(h, 1.5);
    const EstimateReport rep = pressure_bound_check(PressureBound::Est1, pf);
    CHECK(rep.regime_valid);
    CHECK(rep.pass);
    // sup |f0| sits at the minimum of u0 for m = 1.5
    CHECK(rep.norm == doctest::Approx(3.0 * (1.0 - std::pow(0.7, 0.5))));
  }
  SUBCASE("sub") {
    const auto h = solve_sine(0.5, 64, 0.5, 5000, 50, 0.3);
    const PressureField pf = to_pressure(h, 0.5);
    CHECK(pressure_bound_check(PressureBound::E671, pf).pass);
    CHECK(pressure_bound_check(PressureBound::Thm6, pf).pass);
  }
  SUBCASE("constant data passes trivially with margin = bound") {
    const GridSpec g = GridSpec::periodic1d(16);
    const ArrayXd u0 = ArrayXd::Constant(16, 1.5);
    const auto h = solve(u0, 2.0, TimeMesh::from_steps(0.1, 512), g, 128);
    const EstimateReport rep =
        pressure_bound_check(PressureBound::Thm3, to_pressure(h, 2.0));
    CHECK(rep.pass);
    for (std::size_t i = 0; i < rep.margin.size(); ++i)
      CHECK(rep.margin[i] == doctest::Approx(rep.bound[i]));
  }
}

TEST_CASE("display estimates hold on solved fields") {
  const auto h = solve_sine(2.0, 64, 0.5, 20000, 200, 0.3);
  const EstimateReport rep = theorem1_check(BoundCase::Case2, h);
  CHECK(rep.regime_valid);
  CHECK(rep.pass);
}

TEST_CASE("equivalence audit per case") {
  const AuditResult a1 = equivalence_audit(BoundCase::Case1, 100, 1);
  CHECK(a1.lhs_identity_ok);
  CHECK_FALSE(a1.exact);
  CHECK(a1.pattern == "norm/t");
  CHECK(a1.pattern_confirmed);

  const AuditResult a2 = equivalence_audit(BoundCase::Case2, 100, 2);
  CHECK(a2.exact);
  CHECK(a2.ratio_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a2.ratio_max == doctest::Approx(1.0).epsilon(1e-12));

  const AuditResult a3 = equivalence_audit(BoundCase::Case3, 100, 3);
  CHECK(a3.exact);
  CHECK(a3.lhs_identity_ok);

  const AuditResult a4 = equivalence_audit(BoundCase::Case4, 100, 4);
  CHECK_FALSE(a4.exact);
  CHECK(a4.pattern == "1/m");
  CHECK(a4.pattern_confirmed);
  CHECK(a4.ratio_min > 1.0);  // display is strictly weaker for m < 1
}
