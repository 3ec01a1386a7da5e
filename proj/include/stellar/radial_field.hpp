#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stellar/errors.hpp"
#include "stellar/interpolation.hpp"
#include "stellar/legendre.hpp"
#include "stellar/quadrature.hpp"

namespace stellar {

/**
 * Nonnegative density samples on a uniform radial grid [0, R_support].
 * Equilibrium profiles are radially nonincreasing with sigma(R) = 0; both
 * checks can be relaxed for generic test densities (annuli, uniform balls,
 * bumps). Total mass is the quadrature of 4 pi sigma r^2.
 */
struct RadialDensity {
  std::vector<double> r;
  std::vector<double> sigma;
  double r_support = 0.0;
  double mass = 0.0;
  // Exponent q of sigma ~ (R - r)^q at the support boundary; negative when
  // unknown. Equilibrium polytropes have q = 1/(gamma - 1), and the surface
  // cells of every quadrature are integrated against that power law instead
  // of a polynomial.
  double surface_exponent = -1.0;

  bool empty() const { return r.size() < 2 || mass <= 0.0; }
  double spacing() const { return r.size() < 2 ? 0.0 : r[1] - r[0]; }

  static RadialDensity from_samples(std::vector<double> grid, std::vector<double> samples,
                                    bool relax_shape = false, double surface_exponent = -1.0) {
    if (grid.size() != samples.size())
      throw std::invalid_argument("RadialDensity: mismatched arrays");
    RadialDensity d;
    if (grid.size() < 2) return d;  // vacuum
    if (grid.front() != 0.0) throw std::invalid_argument("RadialDensity: grid must start at 0");
    const double h = grid[1] - grid[0];
    if (!(h > 0.0)) throw std::invalid_argument("RadialDensity: grid must increase");
    double sig_max = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i > 0 && std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * h)
        throw std::invalid_argument("RadialDensity: grid must be uniform");
      if (samples[i] < -1e-14)
        throw std::invalid_argument("RadialDensity: negative density sample");
      samples[i] = std::max(samples[i], 0.0);
      sig_max = std::max(sig_max, samples[i]);
    }
    if (!relax_shape && sig_max > 0.0) {
      for (std::size_t i = 1; i < grid.size(); ++i) {
        if (samples[i] > samples[i - 1] + 1e-12 * sig_max)
          throw std::invalid_argument(
              "RadialDensity: profile not radially nonincreasing (pass relax_shape for generic "
              "test densities)");
      }
      if (samples.back() > 1e-6 * sig_max)
        throw std::invalid_argument("RadialDensity: density does not vanish at the support radius");
    }
    d.r = std::move(grid);
    d.sigma = std::move(samples);
    d.r_support = d.r.back();
    d.surface_exponent = surface_exponent;
    std::vector<double> f(d.r.size());
    for (std::size_t i = 0; i < d.r.size(); ++i) f[i] = d.sigma[i] * d.r[i] * d.r[i];
    d.mass = 4.0 * M_PI * surface_aware_total(f, h, d.surface_exponent);
    return d;
  }
};

/// Potential samples on the density grid. Outside the support the potential
/// is mass/r, so the exterior is represented by the coefficient alone.
struct PotentialProfile {
  std::vector<double> r;
  std::vector<double> v;
  double v_at_zero = 0.0;
  double mass = 0.0;
  double r_support = 0.0;

  double exterior(double x) const {
    if (x < r_support) throw std::domain_error("PotentialProfile::exterior: point inside support");
    return mass == 0.0 ? 0.0 : mass / x;
  }
};

namespace detail {

/// Running integral with the surface cells rewritten as total minus the
/// fitted power-law tail, so the boundary values match surface_aware_total.
inline std::vector<double> cumulative_with_surface(std::span<const double> f, double h,
                                                   double p) {
  auto cum = cumulative_simpson(f, h);
  constexpr std::size_t boundary = 4;
  if (p < 0.0 || f.size() < 2 * boundary + 3) return cum;
  const auto model = SurfaceModel::fit(f, h, p);
  if (!model.valid) return cum;
  const double total = surface_aware_total(f, h, p);
  const std::size_t n = f.size();
  for (std::size_t k = 0; k <= boundary; ++k)
    cum[n - 1 - k] = total - model.integral(k * h);
  return cum;
}

}  // namespace detail

/// m(r) = 4 pi integral_0^r sigma t^2 dt on the grid.
inline std::vector<double> cumulative_mass(const RadialDensity& d) {
  if (d.r.size() < 2) return {};
  std::vector<double> f(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i) f[i] = d.sigma[i] * d.r[i] * d.r[i];
  auto cum = detail::cumulative_with_surface(f, d.spacing(), d.surface_exponent);
  for (double& c : cum) c *= 4.0 * M_PI;
  return cum;
}

/// V(r) = m(r)/r + 4 pi integral_r^R t sigma(t) dt, V(0) = 4 pi integral t sigma.
inline PotentialProfile potential_profile(const RadialDensity& d) {
  PotentialProfile p;
  p.mass = d.mass;
  p.r_support = d.r_support;
  if (d.r.size() < 2) return p;
  const double h = d.spacing();
  const auto mcum = cumulative_mass(d);
  std::vector<double> tsig(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i) tsig[i] = d.r[i] * d.sigma[i];
  const auto tcum = detail::cumulative_with_surface(tsig, h, d.surface_exponent);
  const double tail_total = tcum.back();
  p.r = d.r;
  p.v.resize(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i) {
    const double shell = 4.0 * M_PI * (tail_total - tcum[i]);
    p.v[i] = (i == 0 ? 0.0 : mcum[i] / d.r[i]) + shell;
  }
  p.v_at_zero = p.v.front();
  return p;
}

/// dV/dr = -m(r)/r^2; exactly 0 at the center.
inline double potential_gradient(const RadialDensity& d, double r) {
  if (r < 0.0) throw std::domain_error("potential_gradient: negative radius");
  if (r == 0.0) return 0.0;
  if (d.empty()) return 0.0;
  if (r >= d.r_support) return -d.mass / (r * r);
  const auto mcum = cumulative_mass(d);
  std::vector<double> mprime(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i)
    mprime[i] = 4.0 * M_PI * d.sigma[i] * d.r[i] * d.r[i];
  CubicHermite m_of_r(d.r, mcum, mprime);
  return -m_of_r(r) / (r * r);
}

/// Point-mass potential M/x, valid only outside the support.
inline double exterior_potential(const RadialDensity& d, double x_distance) {
  if (x_distance < d.r_support)
    throw std::domain_error(
        "exterior_potential: point inside the support; use potential_profile");
  if (d.mass == 0.0) return 0.0;
  return d.mass / x_distance;
}

/// Self-interaction energy G(sigma, sigma) = 8 pi integral m(r) sigma(r) r dr.
inline double interaction_energy(const RadialDensity& d) {
  if (d.r.size() < 2) return 0.0;
  const auto mcum = cumulative_mass(d);
  std::vector<double> f(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i) f[i] = mcum[i] * d.sigma[i] * d.r[i];
  return 8.0 * M_PI * surface_aware_total(f, d.spacing(), d.surface_exponent);
}

/// Mutual energy of two non-overlapping spherical bodies: m1 m2 / D.
inline double two_sphere_energy(const RadialDensity& d1, const RadialDensity& d2, double D) {
  if (D < d1.r_support + d2.r_support)
    throw std::domain_error("two_sphere_energy: spheres overlap, the point-mass formula is invalid");
  if (d1.mass == 0.0 || d2.mass == 0.0) return 0.0;
  return d1.mass * d2.mass / D;
}

struct MutualEnergyResult {
  double total = 0.0;
  std::vector<double> terms;  // one contribution per multipole order
};

/**
 * Mutual energy through the Legendre expansion of 1/|x - y|, every integral
 * done numerically against both densities. Order l couples the l-th
 * multipole moment of body 2 (radial Simpson times Gauss-Legendre in the
 * angle, which annihilates P_l for l > 0 up to roundoff) with the matching
 * radial-angular integral over body 1. For spherical bodies the l = 0 term
 * reproduces m1 m2 / D and the rest sit at quadrature noise.
 */
inline MutualEnergyResult mutual_energy_quadrature(const RadialDensity& d1,
                                                   const RadialDensity& d2, double D,
                                                   int l_max) {
  if (l_max < 0) throw std::invalid_argument("mutual_energy_quadrature: l_max must be >= 0");
  if (!(D > d1.r_support + d2.r_support))
    throw std::domain_error("mutual_energy_quadrature: bodies must be strictly separated");
  MutualEnergyResult out;
  out.terms.assign(static_cast<std::size_t>(l_max) + 1, 0.0);
  if (d1.empty() || d2.empty()) return out;

  std::vector<double> mu, wmu;
  gauss_legendre(48, mu, wmu);

  // Multipole moments of body 2 about its own center.
  std::vector<double> angular(static_cast<std::size_t>(l_max) + 1, 0.0);
  for (std::size_t q = 0; q < mu.size(); ++q) {
    const auto pl = legendre_all(l_max, mu[q]);
    for (int l = 0; l <= l_max; ++l) angular[l] += wmu[q] * pl[l];
  }
  std::vector<double> moments(static_cast<std::size_t>(l_max) + 1, 0.0);
  {
    const double h2 = d2.spacing();
    std::vector<double> f(d2.r.size());
    for (int l = 0; l <= l_max; ++l) {
      for (std::size_t i = 0; i < d2.r.size(); ++i)
        f[i] = d2.sigma[i] * std::pow(d2.r[i], l + 2);
      moments[l] = 2.0 * M_PI * angular[l] * richardson_total(f, h2);
    }
  }

  // integral over body 1 of rho(s) / |s z - D|^{l+1}.
  const double h1 = d1.spacing();
  std::vector<double> f1(d1.r.size());
  for (int l = 0; l <= l_max; ++l) {
    for (std::size_t i = 0; i < d1.r.size(); ++i) {
      const double s = d1.r[i];
      double inner = 0.0;
      for (std::size_t q = 0; q < mu.size(); ++q) {
        const double dist2 = s * s + D * D - 2.0 * s * D * mu[q];
        inner += wmu[q] * std::pow(dist2, -0.5 * (l + 1));
      }
      f1[i] = d1.sigma[i] * s * s * inner;
    }
    out.terms[l] = moments[l] * 2.0 * M_PI * richardson_total(f1, h1);
    out.total += out.terms[l];
  }
  return out;
}

}  // namespace stellar
