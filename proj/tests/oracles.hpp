#pragma once

// Independent reference computations the test suite checks the library
// against. Everything here is deliberately written from scratch: closed
// forms, fixed-step integration, brute-force quadrature. Nothing includes
// the solver paths under test except the shared container types.

#include <cmath>
#include <cstddef>
#include <vector>

#include "stellar/radial_field.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Closed-form gamma = 2, K = 2 pi family: Theta = beta sin(r)/r with first
// zero at pi, sigma = Theta/(4 pi), m(r) = beta (sin r - r cos r), M = pi
// beta, lambda = -beta, V = Theta - lambda inside, U = pi beta^2/4,
// G = 3 pi beta^2 / 2, E0 = -pi beta^2 / 2.
// ---------------------------------------------------------------------------
struct Gamma2Star {
  double beta = 1.0;

  static double sinc(double r) { return r == 0.0 ? 1.0 : std::sin(r) / r; }

  double theta(double r) const { return beta * sinc(r); }
  double theta_prime(double r) const {
    return r == 0.0 ? 0.0 : beta * (r * std::cos(r) - std::sin(r)) / (r * r);
  }
  double sigma(double r) const { return beta * sinc(r) / (4.0 * M_PI); }
  double mass_profile(double r) const { return beta * (std::sin(r) - r * std::cos(r)); }
  double radius() const { return M_PI; }
  double mass() const { return M_PI * beta; }
  double lambda() const { return -beta; }
  double potential(double r) const {
    return r <= M_PI ? beta * (sinc(r) + 1.0) : mass() / r;
  }
  double internal_energy() const { return M_PI * beta * beta / 4.0; }
  double interaction_energy() const { return 1.5 * M_PI * beta * beta; }
  double total_energy() const { return -0.5 * M_PI * beta * beta; }
};

// ---------------------------------------------------------------------------
// Uniform ball of mass m, radius R.
// ---------------------------------------------------------------------------
struct UniformBall {
  double m = 1.0;
  double R = 1.0;

  double density() const { return 3.0 * m / (4.0 * M_PI * R * R * R); }
  double mass_profile(double r) const { return r >= R ? m : m * std::pow(r / R, 3.0); }
  double potential(double r) const {
    return r >= R ? m / r : m * (3.0 * R * R - r * r) / (2.0 * R * R * R);
  }
  double interaction_energy() const { return 1.2 * m * m / R; }
  double internal_energy(double K, double gamma) const {
    return K / (gamma - 1.0) * std::pow(density(), gamma - 1.0) * m;
  }
};

inline stellar::RadialDensity uniform_ball_density(double m, double R, std::size_t n = 801) {
  std::vector<double> r(n), sig(n);
  const double rho = UniformBall{m, R}.density();
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = R * static_cast<double>(i) / static_cast<double>(n - 1);
    sig[i] = rho;
  }
  return stellar::RadialDensity::from_samples(std::move(r), std::move(sig), true);
}

// ---------------------------------------------------------------------------
// Lane-Emden reference: fixed-step RK4 on theta'' + (2/xi) theta' = -theta^n
// from the series start, zero located by bisection with single RK4 steps.
// ---------------------------------------------------------------------------
inline double lane_emden_first_zero(double n_index, double h) {
  struct State {
    double theta, dtheta;
  };
  auto rhs = [n_index](double xi, const State& s) -> State {
    const double t = s.theta > 0.0 ? std::pow(s.theta, n_index) : 0.0;
    return {s.dtheta, -t - 2.0 * s.dtheta / xi};
  };
  auto rk4 = [&](double xi, State s, double dx) -> State {
    const State k1 = rhs(xi, s);
    const State s2 = {s.theta + 0.5 * dx * k1.theta, s.dtheta + 0.5 * dx * k1.dtheta};
    const State k2 = rhs(xi + 0.5 * dx, s2);
    const State s3 = {s.theta + 0.5 * dx * k2.theta, s.dtheta + 0.5 * dx * k2.dtheta};
    const State k3 = rhs(xi + 0.5 * dx, s3);
    const State s4 = {s.theta + dx * k3.theta, s.dtheta + dx * k3.dtheta};
    const State k4 = rhs(xi + dx, s4);
    return {s.theta + dx / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
            s.dtheta + dx / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta)};
  };

  double xi = 1e-6;
  State s = {1.0 - xi * xi / 6.0 + n_index * std::pow(xi, 4.0) / 120.0, -xi / 3.0};
  while (s.theta > 0.0) {
    const State nxt = rk4(xi, s, h);
    if (nxt.theta <= 0.0) break;
    s = nxt;
    xi += h;
    if (xi > 100.0) return -1.0;  // no zero found
  }
  double lo = 0.0, hi = h;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rk4(xi, s, mid).theta > 0.0 ? lo : hi) = mid;
  }
  return xi + 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Brute-force self-interaction energy on a staggered 3D midpoint grid with
// the diagonal skipped, Richardson-extrapolated over two resolutions.
// ---------------------------------------------------------------------------
template <class DensityFn>
double brute_force_self_energy_single(DensityFn&& rho, double extent, int n) {
  const double h = 2.0 * extent / n;
  const double cell = h * h * h;
  std::vector<double> vals(static_cast<std::size_t>(n) * n * n);
  std::vector<double> coord(n);
  for (int i = 0; i < n; ++i) coord[i] = -extent + (i + 0.5) * h;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double r =
            std::sqrt(coord[i] * coord[i] + coord[j] * coord[j] + coord[k] * coord[k]);
        vals[(static_cast<std::size_t>(i) * n + j) * n + k] = rho(r);
      }
  // x restricted to one octant (the staggered grid avoids the planes), each
  // octant contributing equally by symmetry of rho.
  double sum = 0.0;
  const int half = n / 2;
  for (int i = half; i < n; ++i)
    for (int j = half; j < n; ++j)
      for (int k = half; k < n; ++k) {
        const double rx = vals[(static_cast<std::size_t>(i) * n + j) * n + k];
        if (rx == 0.0) continue;
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double dx = coord[i] - coord[a];
            const double dy = coord[j] - coord[b];
            const std::size_t base = (static_cast<std::size_t>(a) * n + b) * n;
            for (int c = 0; c < n; ++c) {
              if (a == i && b == j && c == k) continue;
              const double ry = vals[base + c];
              if (ry == 0.0) continue;
              const double dz = coord[k] - coord[c];
              acc += ry / std::sqrt(dx * dx + dy * dy + dz * dz);
            }
          }
        sum += rx * acc;
      }
  return 8.0 * sum * cell * cell;
}

template <class DensityFn>
double brute_force_self_energy(DensityFn&& rho, double extent, int n_coarse = 16) {
  const double coarse = brute_force_self_energy_single(rho, extent, n_coarse);
  const double fine = brute_force_self_energy_single(rho, extent, 2 * n_coarse);
  return fine + (fine - coarse) / 3.0;  // midpoint + skipped diagonal are O(h^2)
}

// ---------------------------------------------------------------------------
// Self-interaction energy by the angular average of the Newton kernel:
// G = 2 (4 pi)^2 integral_0^R rho(s) s [integral_0^s rho(t) t^2 dt] ds,
// nested Gauss-Legendre, independent of the grid quadratures under test.
// ---------------------------------------------------------------------------
template <class DensityFn>
double radial_self_energy(DensityFn&& rho, double R, int n_nodes = 96) {
  std::vector<double> x, w;
  stellar::gauss_legendre(n_nodes, x, w);
  double total = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    const double s = 0.5 * R * (x[i] + 1.0);
    const double ws = 0.5 * R * w[i];
    double inner = 0.0;
    for (int j = 0; j < n_nodes; ++j) {
      const double t = 0.5 * s * (x[j] + 1.0);
      inner += 0.5 * s * w[j] * rho(t) * t * t;
    }
    total += ws * rho(s) * s * inner;
  }
  return 2.0 * 16.0 * M_PI * M_PI * total;
}

// ---------------------------------------------------------------------------
// Two-body mutual energy by nested radial-angular Gauss-Legendre quadrature:
// no shell theorem, no multipole expansion.
// ---------------------------------------------------------------------------
template <class Rho1, class Rho2>
double two_body_energy_quadrature(Rho1&& rho1, double R1, Rho2&& rho2, double R2, double D,
                                  int n_nodes = 64) {
  std::vector<double> x, w;
  stellar::gauss_legendre(n_nodes, x, w);
  auto potential_of_1 = [&](double z) {
    double acc = 0.0;
    for (int i = 0; i < n_nodes; ++i) {
      const double s = 0.5 * R1 * (x[i] + 1.0);
      const double ws = 0.5 * R1 * w[i];
      double ang = 0.0;
      for (int q = 0; q < n_nodes; ++q)
        ang += w[q] / std::sqrt(s * s + z * z - 2.0 * s * z * x[q]);
      acc += ws * rho1(s) * s * s * ang;
    }
    return 2.0 * M_PI * acc;
  };
  double total = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    const double t = 0.5 * R2 * (x[i] + 1.0);
    const double wt = 0.5 * R2 * w[i];
    double ang = 0.0;
    for (int q = 0; q < n_nodes; ++q) {
      const double z = std::sqrt(D * D + t * t + 2.0 * D * t * x[q]);
      ang += w[q] * potential_of_1(z);
    }
    total += wt * rho2(t) * t * t * ang;
  }
  return 2.0 * M_PI * total;
}

}  // namespace oracles
