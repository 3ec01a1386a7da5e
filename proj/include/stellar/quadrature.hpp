#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "stellar/errors.hpp"

namespace stellar {

/// Composite Simpson weights for n uniformly spaced samples with spacing h.
/// An odd interval count gets a 3/8 tail; n == 2 falls back to the trapezoid.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
  if (n < 2) throw std::invalid_argument("simpson_weights: need at least two samples");
  std::vector<double> w(n, 0.0);
  if (n == 2) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  const std::size_t intervals = n - 1;
  const bool tail38 = (intervals % 2 != 0);
  const std::size_t pair_end = tail38 ? intervals - 3 : intervals;
  for (std::size_t j = 0; j + 2 <= pair_end; j += 2) {
    w[j] += h / 3.0;
    w[j + 1] += 4.0 * h / 3.0;
    w[j + 2] += h / 3.0;
  }
  if (tail38) {
    const std::size_t b = pair_end;
    w[b] += 3.0 * h / 8.0;
    w[b + 1] += 9.0 * h / 8.0;
    w[b + 2] += 9.0 * h / 8.0;
    w[b + 3] += 3.0 * h / 8.0;
  }
  return w;
}

inline double simpson_total(std::span<const double> f, double h) {
  const auto w = simpson_weights(f.size(), h);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

/// Composite Simpson over the grid plus one Richardson extrapolation step
/// against the half-resolution grid. Grids too short to stride fall back to
/// plain Simpson.
inline double richardson_total(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 9) return simpson_total(f, h);
  // Extrapolate over a sub-grid with an odd sample count so the strided copy
  // covers the same range; an even n contributes its last interval separately.
  const std::size_t m = (n % 2 == 1) ? n : n - 1;
  std::vector<double> coarse;
  coarse.reserve(m / 2 + 1);
  for (std::size_t i = 0; i < m; i += 2) coarse.push_back(f[i]);
  const double fine = simpson_total(f.first(m), h);
  const double half = simpson_total(coarse, 2.0 * h);
  double total = fine + (fine - half) / 15.0;
  if (n % 2 == 0) {
    // backward three-point rule over the remaining interval
    total += h / 12.0 * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
  }
  return total;
}

/// Local power-law model f ~ a s^p (1 + b s) of a profile near its upper
/// endpoint, with s the distance from the endpoint. Fitted from the samples
/// one and two spacings inside; used to integrate surface cells of
/// equilibrium profiles, whose fractional exponents defeat polynomial rules.
struct SurfaceModel {
  double a = 0.0;
  double b = 0.0;
  double p = 0.0;
  bool valid = false;

  // integral of the model over [0, s]
  double integral(double s) const {
    return a * (std::pow(s, p + 1.0) / (p + 1.0) + b * std::pow(s, p + 2.0) / (p + 2.0));
  }

  static SurfaceModel fit(std::span<const double> f, double h, double p) {
    SurfaceModel m;
    m.p = p;
    const std::size_t n = f.size();
    if (n < 3) return m;
    const double f1 = f[n - 2];
    const double f2 = f[n - 3];
    if (f1 == 0.0 && f2 == 0.0) {
      m.valid = true;  // profile already vanished; nothing beyond the head
      return m;
    }
    const double sgn = f1 > 0.0 ? 1.0 : -1.0;
    if (!(sgn * f1 > 0.0) || !(sgn * f2 > 0.0)) return m;  // mixed signs, no power law
    const double ratio = f2 / f1 / std::pow(2.0, p);
    const double denom = 2.0 - ratio;
    m.b = denom > 0.25 ? (ratio - 1.0) / (denom * h) : 0.0;
    m.a = f1 / (std::pow(h, p) * (1.0 + m.b * h));
    m.valid = true;
    return m;
  }
};

/// Integral of samples whose upper endpoint behaves like (b - x)^p with a
/// fractional p: plain composite Simpson away from the boundary plus the
/// fitted surface model over the last few cells. p < 0 means no singularity.
inline double surface_aware_total(std::span<const double> f, double h, double p) {
  constexpr std::size_t boundary = 4;
  if (p < 0.0 || f.size() < 2 * boundary + 3) return richardson_total(f, h);
  const auto model = SurfaceModel::fit(f, h, p);
  if (!model.valid) return richardson_total(f, h);
  const std::size_t head = f.size() - boundary;
  return simpson_total(f.first(head), h) + model.integral(boundary * h);
}

/// Running integral over a uniform grid, fourth order. cum[0] = 0.
inline std::vector<double> cumulative_simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> cum(n, 0.0);
  if (n < 2) return cum;
  if (n == 2) {
    cum[1] = 0.5 * h * (f[0] + f[1]);
    return cum;
  }
  for (std::size_t j = 1; j < n; ++j) {
    if (j % 2 == 0) {
      cum[j] = cum[j - 2] + h / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
    } else if (j + 1 < n) {
      cum[j] = cum[j - 1] + h / 12.0 * (5.0 * f[j - 1] + 8.0 * f[j] - f[j + 1]);
    } else {
      cum[j] = cum[j - 1] + h / 12.0 * (-f[j - 2] + 8.0 * f[j - 1] + 5.0 * f[j]);
    }
  }
  return cum;
}

namespace detail {

// Cells narrower than min_width are force-accepted: at an integrable
// endpoint singularity the local error decays slower than the halved
// tolerance and the refinement would otherwise never terminate. The
// force-accepted cell contributes O(width^(p+1)), negligible at the floor.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   double min_width, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || (b - a) <= min_width)
    return left + right + delta / 15.0;
  if (depth <= 0)
    throw numeric_error("adaptive quadrature failed to converge on [" + std::to_string(a) + ", " +
                        std::to_string(b) + "], residual " + std::to_string(delta));
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, min_width, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, min_width, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to a relative tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double rel_tol, int max_depth = 60) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max({std::abs(whole), (b - a) * std::abs(fm), 1e-300});
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale,
                                      1e-15 * (b - a), max_depth);
}

/// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on the
/// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

}  // namespace stellar
