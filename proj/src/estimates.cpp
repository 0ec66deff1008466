#include "pmelab/estimates.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pmelab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Exponent p in the transformed variable u^p per case; case 4 uses log u.
double case_power(BoundCase c, double m) {
  switch (c) {
    case BoundCase::Case1: return 1.5 * (m - 1.0);
    case BoundCase::Case2: return m - 1.0;
    case BoundCase::Case3: return 1.0 - m;
    case BoundCase::Case4: return 0.0;
  }
  throw std::logic_error("case_power: bad case");
}

double initial_norm(BoundCase c, const ScalarFieldHistory& u) {
  const double p = (c == BoundCase::Case1 || c == BoundCase::Case2)
                       ? u.m - 1.0
                       : 1.0 - u.m;
  return (u.slices[0].pow(p) - 1.0).abs().maxCoeff();
}

// |2m - 4 - sqrt2 beta2 / m| from the larger root of H.
double case4_coefficient(double m, int n) {
  const double beta2 = beta_roots(m, n).second;
  return std::abs(2.0 * m - 4.0 - kSqrt2 * beta2 / m);
}

double sup_gradient_norm(const ArrayXd& w, const GridSpec& grid, double t,
                         const SpaceTimeFn& ghost) {
  const auto g = gradient(w, grid, t, ghost);
  ArrayXd mag2 = g[0].square();
  if (grid.dim == 2) mag2 += g[1].square();
  return std::sqrt(mag2.maxCoeff());
}

// Display bound re-derived from the corresponding pressure-variable bound
// by the chain rule; the audit compares this against bound_value.
double derived_bound(BoundCase c, double m, int n, double norm, double t) {
  switch (c) {
    case BoundCase::Case1:
      return 3.0 * norm / std::sqrt(2.0 * m * t);
    case BoundCase::Case2:
      return std::sqrt(2.0 * (m - 1.0) * norm) / (m * std::sqrt(t));
    case BoundCase::Case3:
      return kSqrt2 * norm * std::sqrt(norm + 1.0) / std::sqrt(m * t);
    case BoundCase::Case4:
      return 2.0 * std::sqrt(m * norm / (1.0 - m)) /
             (m * std::sqrt(t * case4_coefficient(m, n)));
  }
  throw std::logic_error("derived_bound: bad case");
}

std::string case_id(BoundCase c) {
  return "thm1_case" + std::to_string(static_cast<int>(c));
}

std::string pressure_id(PressureBound b) {
  switch (b) {
    case PressureBound::Est1: return "est1";
    case PressureBound::Thm3: return "thm3";
    case PressureBound::E671: return "e671";
    case PressureBound::Thm6: return "thm6";
  }
  throw std::logic_error("pressure_id: bad bound");
}

void finalize(EstimateReport& rep, double t_min) {
  rep.pass = rep.regime_valid;
  rep.min_margin = rep.margin.empty() ? 0.0 : rep.margin.front();
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    if (rep.margin[i] < rep.min_margin) rep.min_margin = rep.margin[i];
    if (rep.times[i] >= t_min && rep.margin[i] < -rep.tolerance[i])
      rep.pass = false;
  }
}

}  // namespace

double bound_value(BoundCase c, double m, int n, double norm, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("bound_value: t must be positive");
  switch (c) {
    case BoundCase::Case1:
      return 3.0 * norm * norm / (std::sqrt(2.0 * m) * t * std::sqrt(t));
    case BoundCase::Case2:
      return std::sqrt(2.0 * (m - 1.0) * norm) / (m * std::sqrt(t));
    case BoundCase::Case3:
      return kSqrt2 * norm * std::sqrt(norm + 1.0) / std::sqrt(m * t);
    case BoundCase::Case4:
      return 2.0 * std::sqrt(m * norm / (1.0 - m)) /
             (m * m * std::sqrt(t * case4_coefficient(m, n)));
  }
  throw std::logic_error("bound_value: bad case");
}

bool regime_valid(BoundCase c, double m, int n) {
  switch (c) {
    case BoundCase::Case1: return m > 1.0 && m < 1.0 + 2.0 / n;
    case BoundCase::Case2: return n == 1 && m > 1.0;
    case BoundCase::Case3: return m < 1.0 && m >= 1.0 - 6.0 / (n + 8.0);
    case BoundCase::Case4:
      return m < 1.0 && m > static_cast<double>(n - 1) / (n + 3.0);
  }
  return false;
}

bool regime_valid(PressureBound b, double m, int n) {
  switch (b) {
    case PressureBound::Est1: return regime_valid(BoundCase::Case1, m, n);
    case PressureBound::Thm3: return regime_valid(BoundCase::Case2, m, n);
    case PressureBound::E671: return regime_valid(BoundCase::Case3, m, n);
    case PressureBound::Thm6: return regime_valid(BoundCase::Case4, m, n);
  }
  return false;
}

double observed_lhs(BoundCase c, const ScalarFieldHistory& u, double t) {
  const int s = u.nearest_slice(t);
  const double st = u.t0 + u.slice_times[s];
  const double p = case_power(c, u.m);
  ArrayXd w = c == BoundCase::Case4 ? u.slices[s].log().eval()
                                    : u.slices[s].pow(p).eval();
  SpaceTimeFn ghost;
  if (u.grid.boundary == Boundary::DirichletOracle) {
    const SpaceTimeFn& oracle = u.grid.oracle;
    ghost = [oracle, p, c](double tt, const std::array<double, 2>& x) {
      const double v = oracle(tt, x);
      return c == BoundCase::Case4 ? std::log(v) : std::pow(v, p);
    };
  }
  return sup_gradient_norm(w, u.grid, st, ghost);
}

EstimateReport theorem1_check(BoundCase c, const ScalarFieldHistory& u,
                              double t_min, double tol_factor) {
  EstimateReport rep;
  rep.id = case_id(c);
  rep.m = u.m;
  rep.n = u.grid.dim;
  rep.T = u.mesh.T;
  rep.norm = initial_norm(c, u);
  rep.regime_valid = regime_valid(c, u.m, rep.n);
  const double disc = u.grid.h(0) * u.grid.h(0) + u.mesh.dt;
  for (int s = 0; s < u.n_slices(); ++s) {
    const double t = u.slice_times[s];
    if (!(t > 0.0)) continue;
    const double b = bound_value(c, u.m, rep.n, rep.norm, t);
    const double o = observed_lhs(c, u, t);
    rep.times.push_back(t);
    rep.bound.push_back(b);
    rep.observed.push_back(o);
    rep.margin.push_back(b - o);
    rep.tolerance.push_back(tol_factor * disc * b);
  }
  finalize(rep, t_min);
  return rep;
}

EstimateReport pressure_bound_check(PressureBound b, const PressureField& pf,
                                    double t_min, double tol_factor) {
  EstimateReport rep;
  rep.id = pressure_id(b);
  rep.m = pf.m;
  rep.n = pf.grid.dim;
  rep.T = pf.mesh.T;
  rep.norm = pf.f[0].abs().maxCoeff();  // ||f0||_inf from the grid
  rep.regime_valid = regime_valid(b, pf.m, rep.n);
  const double m = pf.m;
  const double f0 = rep.norm;
  const double disc = pf.grid.h(0) * pf.grid.h(0) + pf.mesh.dt;
  const double c4 = b == PressureBound::Thm6
                        ? case4_coefficient(m, rep.n)
                        : 0.0;

  SpaceTimeFn ghost;
  if (pf.grid.boundary == Boundary::DirichletOracle) {
    const SpaceTimeFn& oracle = pf.grid.oracle;
    ghost = [oracle, m](double tt, const std::array<double, 2>& x) {
      const double u = oracle(tt, x);
      return m > 1.0 ? m / (m - 1.0) * (std::pow(u, m - 1.0) - 1.0)
                     : m / (1.0 - m) * (std::pow(u, 1.0 - m) - 1.0);
    };
  }

  for (int s = 0; s < pf.n_slices(); ++s) {
    const double t = pf.slice_times[s];
    if (!(t > 0.0)) continue;
    const double st = pf.t0 + t;
    const auto g = gradient(pf.f[s], pf.grid, st, ghost);
    ArrayXd mag2 = g[0].square();
    if (pf.grid.dim == 2) mag2 += g[1].square();

    double bound = 0.0, observed = 0.0;
    switch (b) {
      case PressureBound::Est1:
        bound = 2.0 * f0 * f0 / t;
        observed = (((m - 1.0) * pf.f[s] + m) * mag2).maxCoeff();
        break;
      case PressureBound::Thm3:
        bound = 2.0 * f0 / (m * t);
        observed = mag2.maxCoeff();
        break;
      case PressureBound::E671:
        bound = kSqrt2 * f0 * std::sqrt((1.0 - m) * f0 + m) /
                (m * std::sqrt(t));
        observed = std::sqrt(mag2.maxCoeff());
        break;
      case PressureBound::Thm6:
        bound = 2.0 * std::sqrt(f0) / (m * m * std::sqrt(t * c4));
        observed = (mag2.sqrt() / ((1.0 - m) * pf.f[s] + m)).maxCoeff();
        break;
    }
    rep.times.push_back(t);
    rep.bound.push_back(bound);
    rep.observed.push_back(observed);
    rep.margin.push_back(bound - observed);
    rep.tolerance.push_back(tol_factor * disc * bound);
  }
  finalize(rep, t_min);
  return rep;
}

AuditResult equivalence_audit(BoundCase c, int n_samples, std::uint64_t seed) {
  AuditResult res;
  res.c = c;
  res.n_samples = n_samples;
  res.lhs_identity_ok = true;
  res.pattern_confirmed = true;
  const int n = 1;

  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL);
  std::uniform_real_distribution<double> uval(0.5, 2.0);
  std::uniform_real_distribution<double> gval(-2.0, 2.0);
  std::uniform_real_distribution<double> tval(0.1, 2.0);
  std::uniform_real_distribution<double> nval(0.05, 2.0);
  auto sample_m = [&]() {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    const double x = d(rng);
    switch (c) {
      case BoundCase::Case1: return 1.0 + 2.0 * (0.05 + 0.9 * x) / n;
      case BoundCase::Case2: return 1.05 + 2.0 * x;
      case BoundCase::Case3: {
        const double lo = 1.0 - 6.0 / (n + 8.0);
        return lo + (0.999 - lo) * x;
      }
      case BoundCase::Case4: {
        const double lo = static_cast<double>(n - 1) / (n + 3.0);
        return lo + 0.05 + (0.95 - lo - 0.05) * x * 0.95;
      }
    }
    return 0.5;
  };

  bool first = true;
  for (int s = 0; s < n_samples; ++s) {
    const double m = sample_m();
    const double u = uval(rng);
    const double gu = gval(rng);
    const double t = tval(rng);
    const double N = nval(rng);

    // chain rule: grad f = m u^(-(2-m)) grad u (super), m u^(-m) grad u (sub)
    const double gf = m > 1.0 ? m * std::pow(u, m - 2.0) * gu
                              : m * std::pow(u, -m) * gu;
    double lhs_u = 0.0, lhs_from_f = 0.0;
    switch (c) {
      case BoundCase::Case1: {
        lhs_u = std::pow(1.5 * (m - 1.0) * std::pow(u, 1.5 * (m - 1.0) - 1.0) * gu, 2);
        lhs_from_f = 2.25 * (m - 1.0) * (m - 1.0) / (m * m * m) *
                     (m * std::pow(u, m - 1.0) * gf * gf);
        break;
      }
      case BoundCase::Case2:
        lhs_u = std::abs((m - 1.0) * std::pow(u, m - 2.0) * gu);
        lhs_from_f = (m - 1.0) / m * std::abs(gf);
        break;
      case BoundCase::Case3:
        lhs_u = std::abs((1.0 - m) * std::pow(u, -m) * gu);
        lhs_from_f = (1.0 - m) / m * std::abs(gf);
        break;
      case BoundCase::Case4:
        lhs_u = std::abs(gu / u);
        lhs_from_f = std::abs(gf) / (m * std::pow(u, 1.0 - m));
        break;
    }
    if (std::abs(lhs_u - lhs_from_f) > 1e-12 * (std::abs(lhs_u) + 1e-30))
      res.lhs_identity_ok = false;

    const double ratio = bound_value(c, m, n, N, t) / derived_bound(c, m, n, N, t);
    if (first || ratio < res.ratio_min) res.ratio_min = ratio;
    if (first || ratio > res.ratio_max) res.ratio_max = ratio;
    first = false;

    double normalized = ratio;
    switch (c) {
      case BoundCase::Case1: normalized = ratio * t / N; break;
      case BoundCase::Case2:
      case BoundCase::Case3: break;
      case BoundCase::Case4: normalized = ratio * m; break;
    }
    if (std::abs(normalized - 1.0) > 1e-12) res.pattern_confirmed = false;
  }

  switch (c) {
    case BoundCase::Case1: res.pattern = "norm/t"; break;
    case BoundCase::Case2:
    case BoundCase::Case3: res.pattern = "1"; break;
    case BoundCase::Case4: res.pattern = "1/m"; break;
  }
  res.exact = res.pattern == "1" && res.pattern_confirmed;
  return res;
}

}  // namespace pmelab
