#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stellar/energetics.hpp"
#include "stellar/eos.hpp"
#include "stellar/errors.hpp"
#include "stellar/ode.hpp"
#include "stellar/quadrature.hpp"
#include "stellar/radial_field.hpp"

namespace stellar {

struct ShootingOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double event_tol = 1e-12;        // |Theta(R)| <= event_tol * beta
  double r_max = 1e4;              // sentinel: no first zero below this is an error
  std::size_t grid_points = 2000;  // output resolution on [0, R]
  double lambda_consistency_tol = 1e-7;
};

/// Solution of Theta'' + (2/r) Theta' = -4 pi phi(Theta) from Theta(0) = beta,
/// Theta'(0) = 0 down to its first zero R(beta), resampled on a uniform grid.
struct ThetaProfile {
  double beta = 0.0;
  std::vector<double> r;
  std::vector<double> theta;
  std::vector<double> theta_prime;
  double r_of_beta = 0.0;
};

/// Complete equilibrium record for one central value beta.
struct StellarSolution {
  double gamma = 0.0;  // NaN-free only for polytropic runs
  double K = 0.0;
  double beta = 0.0;
  double r_support = 0.0;
  double mass = 0.0;
  double lambda = 0.0;
  ThetaProfile theta;
  RadialDensity density;
  std::vector<double> mass_profile;
  PotentialProfile potential;
  EnergyReport energies;

  bool vacuum() const { return mass == 0.0; }
};

namespace detail {

struct ThetaIntegration {
  Dopri5::Solution ode;
  double r_start = 0.0;       // series start radius
  double phi_beta = 0.0;      // central density phi(beta)
  double first_zero = 0.0;
};

/// Series start: Theta ~ beta - (2 pi / 3) phi(beta) r^2 bridges the
/// coordinate singularity of the (2/r) term.
inline ThetaIntegration integrate_theta_raw(const EquationOfState& eos, double beta,
                                            const ShootingOptions& opt) {
  if (!(beta > 0.0)) throw std::domain_error("integrate_theta: beta must be positive");
  if (eos.kind() == EosKind::polytropic && !(eos.gamma() > 4.0 / 3.0))
    throw std::domain_error("integrate_theta: equilibrium solves require gamma > 4/3");

  ThetaIntegration out;
  out.phi_beta = eos.phi(beta);
  if (!(out.phi_beta > 0.0))
    throw numeric_error("integrate_theta: phi(beta) vanished, degenerate EOS");
  const double scale = std::sqrt(beta / (4.0 * M_PI * out.phi_beta));
  out.r_start = 1e-6 * scale;

  auto rhs = [&eos](double r, const Dopri5::State& y) -> Dopri5::State {
    const double sigma = eos.phi(std::max(y[0], 0.0));
    return {y[1], -2.0 * y[1] / r - 4.0 * M_PI * sigma};
  };

  Dopri5::Options oopt;
  oopt.rel_tol = opt.rel_tol;
  oopt.abs_tol = opt.abs_tol * std::max(1.0, beta);
  oopt.h_init = 1e-3 * scale;
  oopt.r_max = opt.r_max;
  Dopri5::State y0 = {beta - (2.0 * M_PI / 3.0) * out.phi_beta * out.r_start * out.r_start,
                      -(4.0 * M_PI / 3.0) * out.phi_beta * out.r_start};

  out.ode = Dopri5::integrate(rhs, out.r_start, y0, oopt,
                              [](double, const Dopri5::State& y) { return y[0] <= 0.0; });
  if (!out.ode.stopped)
    throw numeric_error(
        "integrate_theta: no first zero below r_max = " + std::to_string(opt.r_max) +
        "; unbounded support suspected (gamma <= 3/2 regime or ill-behaved EOS)");

  // The zero lies inside the last accepted step; bisect on dense output.
  const auto& seg = out.ode.segments.back();
  double lo = seg.r0, hi = seg.r0 + seg.h;
  const double target = opt.event_tol * beta;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double th = out.ode.eval(mid)[0];
    (th > 0.0 ? lo : hi) = mid;
    if (std::abs(th) <= target && th <= 0.0) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  out.first_zero = hi;
  return out;
}

}  // namespace detail

/// Integrates the radial Theta equation outward and returns the profile on
/// grid_points uniform radii in [0, R(beta)], truncated at the first zero.
inline ThetaProfile integrate_theta(const EquationOfState& eos, double beta,
                                    const ShootingOptions& opt = {}) {
  const auto raw = detail::integrate_theta_raw(eos, beta, opt);
  const double R = raw.first_zero;
  const std::size_t n = std::max<std::size_t>(opt.grid_points, 8);

  ThetaProfile tp;
  tp.beta = beta;
  tp.r_of_beta = R;
  tp.r.resize(n);
  tp.theta.resize(n);
  tp.theta_prime.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = R * static_cast<double>(i) / static_cast<double>(n - 1);
    tp.r[i] = r;
    if (r < raw.r_start) {
      tp.theta[i] = beta - (2.0 * M_PI / 3.0) * raw.phi_beta * r * r;
      tp.theta_prime[i] = -(4.0 * M_PI / 3.0) * raw.phi_beta * r;
    } else {
      const auto y = raw.ode.eval(std::min(r, R));
      tp.theta[i] = y[0];
      tp.theta_prime[i] = y[1];
    }
  }
  tp.theta[0] = beta;
  tp.theta_prime[0] = 0.0;
  tp.theta[n - 1] = 0.0;  // exact by definition of R(beta)
  return tp;
}

/// Sup-norm Euler-Lagrange residual of an assembled record: the deviation of
/// A'(sigma) from [V + lambda]_+ over the grid, plus the positive part of
/// V + lambda on an exterior test grid where the density vanishes.
inline double el_residual(const StellarSolution& sol, const EquationOfState& eos) {
  if (sol.vacuum()) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < sol.density.r.size(); ++i) {
    const double rhs = std::max(sol.potential.v[i] + sol.lambda, 0.0);
    worst = std::max(worst, std::abs(eos.a_prime(sol.density.sigma[i]) - rhs));
  }
  const int exterior_points = 64;
  for (int k = 1; k <= exterior_points; ++k) {
    const double r = sol.r_support * (1.0 + 3.0 * k / exterior_points);
    worst = std::max(worst, std::max(sol.potential.exterior(r) + sol.lambda, 0.0));
  }
  return worst;
}

/// Solves the full equilibrium at central value beta: density sigma =
/// phi(Theta), mass and potential by quadrature, multiplier lambda = -M/R
/// cross-checked against Theta(0) - V(0).
inline StellarSolution solve_star(const EquationOfState& eos, double beta,
                                  const ShootingOptions& opt = {}) {
  StellarSolution sol;
  if (eos.kind() == EosKind::polytropic) {
    sol.gamma = eos.gamma();
    sol.K = eos.K();
  } else {
    sol.gamma = std::numeric_limits<double>::quiet_NaN();
    sol.K = std::numeric_limits<double>::quiet_NaN();
  }
  sol.beta = beta;
  if (beta == 0.0) return sol;  // vacuum: M = 0, lambda = 0
  if (beta < 0.0) throw std::domain_error("solve_star: beta must be nonnegative");

  sol.theta = integrate_theta(eos, beta, opt);
  sol.r_support = sol.theta.r_of_beta;

  std::vector<double> sigma(sol.theta.r.size());
  for (std::size_t i = 0; i < sigma.size(); ++i)
    sigma[i] = eos.phi(std::max(sol.theta.theta[i], 0.0));
  // sigma ~ (V + lambda)^{1/(gamma-1)} vanishes at R with a known exponent
  const double q = eos.kind() == EosKind::polytropic ? 1.0 / (eos.gamma() - 1.0) : -1.0;
  sol.density = RadialDensity::from_samples(sol.theta.r, std::move(sigma), false, q);
  sol.mass = sol.density.mass;
  sol.mass_profile = cumulative_mass(sol.density);
  sol.potential = potential_profile(sol.density);

  sol.lambda = -sol.mass / sol.r_support;
  const double lambda_alt = beta - sol.potential.v_at_zero;
  if (std::abs(lambda_alt - sol.lambda) >
      10.0 * opt.lambda_consistency_tol * std::max(std::abs(sol.lambda), 1e-300))
    throw numeric_error("solve_star: multiplier determinations disagree: -M/R = " +
                        std::to_string(sol.lambda) + " vs Theta(0) - V(0) = " +
                        std::to_string(lambda_alt));

  sol.energies = make_energy_report(eos, sol.density, sol.lambda, el_residual(sol, eos));
  return sol;
}

/// Full virial/identity report of a solved star.
inline EnergyReport virial_report(const EquationOfState& eos, const StellarSolution& sol) {
  return make_energy_report(eos, sol.density, sol.lambda, el_residual(sol, eos));
}

inline double mass_of_beta(const EquationOfState& eos, double beta,
                           const ShootingOptions& opt = {}) {
  if (beta == 0.0) return 0.0;
  return solve_star(eos, beta, opt).mass;
}

/// Inverts the strictly increasing M(beta) by bisection. For polytropes the
/// scaling law beta ~ m^{2(gamma-1)/(3 gamma - 4)} seeds the bracket; other
/// equations of state must provide one.
inline double beta_of_mass(const EquationOfState& eos, double m, const ShootingOptions& opt = {},
                           std::optional<std::pair<double, double>> bracket = std::nullopt) {
  if (m < 0.0) throw std::domain_error("beta_of_mass: mass must be nonnegative");
  if (m == 0.0) return 0.0;

  double lo, hi;
  double f_lo, f_hi;
  if (bracket) {
    lo = bracket->first;
    hi = bracket->second;
    if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("beta_of_mass: bad bracket");
    f_lo = mass_of_beta(eos, lo, opt) - m;
    f_hi = mass_of_beta(eos, hi, opt) - m;
    if (f_lo > 0.0 || f_hi < 0.0)
      throw numeric_error("beta_of_mass: bracket does not contain a sign change of M(beta) - m");
  } else {
    if (eos.kind() != EosKind::polytropic)
      throw std::invalid_argument("beta_of_mass: a bracket is required for tabulated EOS");
    const double gamma = eos.gamma();
    const double m_ref = mass_of_beta(eos, 1.0, opt);
    const double expo = 2.0 * (gamma - 1.0) / (3.0 * gamma - 4.0);
    const double seed = std::exp(expo * std::log(m / m_ref));
    lo = 0.5 * seed;
    hi = 2.0 * seed;
    f_lo = mass_of_beta(eos, lo, opt) - m;
    f_hi = mass_of_beta(eos, hi, opt) - m;
    for (int grow = 0; grow < 60 && f_lo > 0.0; ++grow) {
      hi = lo;
      f_hi = f_lo;
      lo *= 0.5;
      f_lo = mass_of_beta(eos, lo, opt) - m;
    }
    for (int grow = 0; grow < 60 && f_hi < 0.0; ++grow) {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      f_hi = mass_of_beta(eos, hi, opt) - m;
    }
    if (f_lo > 0.0 || f_hi < 0.0)
      throw numeric_error("beta_of_mass: failed to bracket the requested mass");
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = mass_of_beta(eos, mid, opt) - m;
    (f_mid < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-13 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace stellar
