#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stellar/energetics.hpp"
#include "stellar/eos.hpp"
#include "stellar/errors.hpp"
#include "stellar/quadrature.hpp"
#include "stellar/radial_field.hpp"

namespace stellar {

/// Mass-constrained density iterate on a fixed radial grid [0, r_box].
struct DiscreteDensity {
  std::vector<double> r;
  std::vector<double> rho;
  double r_box = 0.0;
  double target_mass = 0.0;
  double lambda_hat = 0.0;

  double spacing() const { return r.size() < 2 ? 0.0 : r[1] - r[0]; }
  RadialDensity as_radial() const { return RadialDensity::from_samples(r, rho, true); }
};

struct FixedPointOptions {
  double damping = 0.3;
  double tol = 1e-9;            // sup-norm change between iterates
  int max_iter = 2000;
  std::size_t grid_points = 2000;
  double mass_tol = 1e-13;      // relative mass-constraint tolerance
};

struct FixedPointHistoryRow {
  int iter = 0;
  double energy = 0.0;
  double residual = 0.0;
  double lambda_hat = 0.0;
};

struct FixedPointResult {
  DiscreteDensity density;
  int iterations = 0;
  double el_residual = 0.0;
  std::vector<FixedPointHistoryRow> history;
};

namespace detail {

/// Discrete potential sharing the energy's quadrature weights:
/// V_k = 4 pi sum_j w_j rho_j r_j^2 / max(r_j, r_k), evaluated with prefix
/// sums. Using one symmetric quadratic form for G makes the analytic
/// gradient the exact derivative of the discrete energy.
inline std::vector<double> weighted_potential(const DiscreteDensity& d,
                                              const std::vector<double>& w) {
  const std::size_t n = d.r.size();
  std::vector<double> v(n, 0.0);
  std::vector<double> head(n, 0.0);  // running sum of w rho r^2
  double run = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    run += w[j] * d.rho[j] * d.r[j] * d.r[j];
    head[j] = run;
  }
  double tail = 0.0;  // sum of w rho r beyond k
  for (std::size_t k = n; k-- > 0;) {
    v[k] = 4.0 * M_PI * ((k == 0 ? 0.0 : head[k] / d.r[k]) + tail);
    tail += w[k] * d.rho[k] * d.r[k];
  }
  return v;
}

}  // namespace detail

/// E0 = U - G/2 of the iterate, with G as the symmetric quadratic form over
/// the angularly reduced kernel 1/max(r_i, r_j).
inline double discrete_energy(const EquationOfState& eos, const DiscreteDensity& d) {
  const std::size_t n = d.r.size();
  if (n < 2) return 0.0;
  const auto w = simpson_weights(n, d.spacing());
  const auto v = detail::weighted_potential(d, w);
  double u = 0.0, g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double vol = w[i] * 4.0 * M_PI * d.r[i] * d.r[i];
    u += vol * eos.internal_energy_density(d.rho[i]);
    g += vol * d.rho[i] * v[i];
  }
  return u - 0.5 * g;
}

/// Gradient of the discrete energy with respect to the samples:
/// (A'(rho_i) - V_i) weighted by the quadrature volume element. Exact for
/// the discretization used by discrete_energy.
inline std::vector<double> discrete_gradient(const EquationOfState& eos,
                                             const DiscreteDensity& d) {
  const std::size_t n = d.r.size();
  std::vector<double> grad(n, 0.0);
  if (n < 2) return grad;
  const auto w = simpson_weights(n, d.spacing());
  const auto v = detail::weighted_potential(d, w);
  for (std::size_t i = 0; i < n; ++i)
    grad[i] = (eos.a_prime(d.rho[i]) - v[i]) * w[i] * 4.0 * M_PI * d.r[i] * d.r[i];
  return grad;
}

/// Closed-form energy of the uniform ball of mass m dilated to radius delta:
/// U = K/(gamma-1) m^gamma (3/(4 pi))^{gamma-1} delta^{3-3 gamma},
/// G/2 = (3/5) m^2 / delta. Unbounded below for gamma < 4/3 as delta -> 0
/// and unbounded above for gamma > 4/3.
inline double collapse_family_energy(double gamma, double K, double m, double delta) {
  if (!(gamma > 1.0)) throw std::domain_error("collapse_family_energy: gamma must exceed 1");
  if (!(K > 0.0 && m > 0.0 && delta > 0.0))
    throw std::domain_error("collapse_family_energy: K, m, delta must be positive");
  const double u = K / (gamma - 1.0) * std::pow(m, gamma) *
                   std::pow(3.0 / (4.0 * M_PI), gamma - 1.0) * std::pow(delta, 3.0 - 3.0 * gamma);
  return u - 0.6 * m * m / delta;
}

namespace detail {

/// Multiplier making the candidate phi([V + lambda]_+) carry the target
/// mass; monotone in lambda, solved by bisection with adaptive widening.
inline double mass_matching_multiplier(const EquationOfState& eos, const std::vector<double>& r,
                                       const std::vector<double>& v, double target_mass,
                                       double rho_max, double rel_tol) {
  const double h = r[1] - r[0];
  const auto w = simpson_weights(r.size(), h);
  auto mass_at = [&](double lam) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double level = v[i] + lam;
      if (level > 0.0) m += w[i] * 4.0 * M_PI * r[i] * r[i] * eos.phi(level);
    }
    return m;
  };
  const double v0 = *std::max_element(v.begin(), v.end());
  double lo = std::min(-10.0 * eos.a_prime(std::max(rho_max, 1e-300)), -v0 - 1.0);
  double hi = 0.0;
  double m_hi = mass_at(hi);
  for (int grow = 0; grow < 60 && m_hi < target_mass; ++grow) {
    hi += std::max(1.0, v0);
    m_hi = mass_at(hi);
  }
  if (m_hi < target_mass)
    throw numeric_error("fixed_point_minimize: cannot reach the target mass at any multiplier");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass_at(mid) < target_mass ? lo : hi) = mid;
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/**
 * Damped fixed-point iteration on the Euler-Lagrange map
 *   rho <- (1 - damping) rho + damping * phi([V_rho + lambda]_+),
 * lambda chosen each sweep so the update keeps mass m. Iterates are kept
 * radially nonincreasing (a no-op in practice: the potential of any
 * nonnegative radial density already decreases outward). The energy must
 * not increase along accepted iterations; a violation aborts. Serves as the
 * variational oracle against the shooting solver.
 */
inline FixedPointResult fixed_point_minimize(const EquationOfState& eos, double m, double r_box,
                                             const FixedPointOptions& opt = {}) {
  if (eos.kind() == EosKind::polytropic && !(eos.gamma() > 4.0 / 3.0))
    throw std::domain_error(
        "fixed_point_minimize: gamma <= 4/3 rejected, the energy is unbounded below and no "
        "minimizer exists");
  if (m < 0.0) throw std::domain_error("fixed_point_minimize: mass must be nonnegative");
  if (!(r_box > 0.0)) throw std::domain_error("fixed_point_minimize: r_box must be positive");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0))
    throw std::invalid_argument("fixed_point_minimize: damping must lie in (0, 1]");

  const std::size_t n = std::max<std::size_t>(opt.grid_points, 16);
  FixedPointResult res;
  res.density.r.resize(n);
  res.density.rho.assign(n, 0.0);
  res.density.r_box = r_box;
  res.density.target_mass = m;
  for (std::size_t i = 0; i < n; ++i)
    res.density.r[i] = r_box * static_cast<double>(i) / static_cast<double>(n - 1);
  if (m == 0.0) return res;  // vacuum immediately

  // Seed: uniform ball filling half the box.
  const double r_seed = 0.5 * r_box;
  const double rho_seed = 3.0 * m / (4.0 * M_PI * r_seed * r_seed * r_seed);
  for (std::size_t i = 0; i < n; ++i)
    res.density.rho[i] = res.density.r[i] <= r_seed ? rho_seed : 0.0;

  const auto w = simpson_weights(n, res.density.spacing());
  auto grid_mass = [&](const std::vector<double>& rho) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += w[i] * 4.0 * M_PI * res.density.r[i] * res.density.r[i] * rho[i];
    return s;
  };

  double energy_prev = discrete_energy(eos, res.density);
  std::vector<double> cand(n), next(n);
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    const auto pot = potential_profile(res.density.as_radial());
    const double rho_max = *std::max_element(res.density.rho.begin(), res.density.rho.end());
    const double lam = detail::mass_matching_multiplier(eos, res.density.r, pot.v, m, rho_max,
                                                        opt.mass_tol);
    for (std::size_t i = 0; i < n; ++i)
      cand[i] = eos.phi(std::max(pot.v[i] + lam, 0.0));

    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = (1.0 - opt.damping) * res.density.rho[i] + opt.damping * cand[i];
      change = std::max(change, std::abs(next[i] - res.density.rho[i]));
    }
    // Nonincreasing rearrangement, then project back onto the mass shell.
    if (!std::is_sorted(next.rbegin(), next.rend())) {
      std::sort(next.begin(), next.end(), std::greater<>());
      const double gm = grid_mass(next);
      if (gm > 0.0)
        for (double& x : next) x *= m / gm;
    }

    res.density.rho = next;
    res.density.lambda_hat = lam;

    // stationarity defect of the positive-part equation A'(rho) = [V + lam]_+
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      residual = std::max(residual, std::abs(eos.a_prime(res.density.rho[i]) -
                                             std::max(pot.v[i] + lam, 0.0)));

    // The map is not a gradient flow; transient rises at quadrature scale
    // are tolerated, anything larger aborts.
    const double energy = discrete_energy(eos, res.density);
    res.history.push_back({iter, energy, residual, lam});
    if (energy > energy_prev + 1e-7 * (1.0 + std::abs(energy_prev)))
      throw convergence_error("fixed_point_minimize: energy increased at iteration " +
                              std::to_string(iter) + " (" + std::to_string(energy_prev) + " -> " +
                              std::to_string(energy) + ")");
    energy_prev = energy;
    res.iterations = iter;
    res.el_residual = residual;
    if (change <= opt.tol && residual <= 10.0 * opt.tol) return res;
  }
  throw convergence_error("fixed_point_minimize: no convergence within " +
                          std::to_string(opt.max_iter) + " iterations; last residual " +
                          std::to_string(res.el_residual));
}

}  // namespace stellar
