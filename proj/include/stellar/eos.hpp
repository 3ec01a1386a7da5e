#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stellar/errors.hpp"
#include "stellar/interpolation.hpp"
#include "stellar/quadrature.hpp"

namespace stellar {

enum class EosKind { polytropic, tabulated };

/**
 * Pressure law P(s) plus every kernel derived from it:
 *
 *   A(s)  = s * integral_0^s P(t) t^{-2} dt   (internal-energy density)
 *   A'(s) = A(s)/s + P(s)/s,  A'(0) = 0
 *   A''(s) = P'(s)/s
 *   phi   = (A')^{-1}
 *   g(s)  = 4 A(s) - 3 s A'(s)
 *   f(s)  = A'(s^3)
 *
 * The polytropic kind (P = K s^gamma) evaluates closed forms; the tabulated
 * kind interpolates samples with a monotone cubic and integrates A
 * adaptively. Values are immutable after construction and all evaluations
 * are pure, so instances can be shared across threads.
 */
class EquationOfState {
 public:
  /// Polytropic law P = K s^gamma. Requires K > 0 and gamma > 1; exponents
  /// at or below 4/3 are only meaningful for the collapse demonstrators and
  /// are rejected by the equilibrium solvers, not here.
  static EquationOfState polytropic(double K, double gamma, double quad_tol = 1e-10) {
    if (!(K > 0.0)) throw std::domain_error("polytropic EOS requires K > 0");
    if (!(gamma > 1.0)) throw std::domain_error("polytropic EOS requires gamma > 1");
    if (!(quad_tol > 0.0)) throw std::domain_error("quad_tol must be positive");
    EquationOfState e;
    e.kind_ = EosKind::polytropic;
    e.K_ = K;
    e.gamma_ = gamma;
    e.quad_tol_ = quad_tol;
    return e;
  }

  /// Tabulated law from samples (s_i, P_i) with s strictly increasing,
  /// P nondecreasing and the first row (0, 0). A plateau in P is accepted
  /// here and reported as an F1 violation by check_assumptions.
  static EquationOfState tabulated(std::vector<double> s, std::vector<double> P,
                                   double quad_tol = 1e-8) {
    if (s.size() != P.size() || s.size() < 3)
      throw std::invalid_argument("tabulated EOS needs at least 3 matching samples");
    if (s.front() != 0.0 || P.front() != 0.0)
      throw std::invalid_argument("tabulated EOS must start at (0, 0)");
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (!(s[i + 1] > s[i])) throw std::invalid_argument("tabulated EOS: s must strictly increase");
      if (P[i + 1] < P[i]) throw std::invalid_argument("tabulated EOS: P must not decrease");
    }
    if (!(quad_tol > 0.0)) throw std::domain_error("quad_tol must be positive");
    EquationOfState e;
    e.kind_ = EosKind::tabulated;
    e.quad_tol_ = quad_tol;
    e.table_s_ = std::move(s);
    e.table_p_ = std::move(P);
    e.interp_ = CubicHermite(e.table_s_, e.table_p_,
                             pchip_slopes(e.table_s_, e.table_p_, /*zero_left_slope=*/true));
    return e;
  }

  EosKind kind() const { return kind_; }
  double K() const { return require_polytropic(), K_; }
  double gamma() const { return require_polytropic(), gamma_; }
  double quad_tol() const { return quad_tol_; }
  double max_tabulated_density() const { return table_s_.empty() ? 0.0 : table_s_.back(); }

  double pressure(double s) const {
    check_density(s);
    if (kind_ == EosKind::polytropic) return K_ * std::pow(s, gamma_);
    if (s > table_s_.back())
      throw std::domain_error("tabulated EOS queried beyond the last sample");
    return std::max(0.0, interp_(s));
  }

  double pressure_derivative(double s) const {
    check_density(s);
    if (kind_ == EosKind::polytropic)
      return s == 0.0 && gamma_ < 1.0 ? std::numeric_limits<double>::infinity()
                                      : K_ * gamma_ * std::pow(s, gamma_ - 1.0);
    if (s > table_s_.back())
      throw std::domain_error("tabulated EOS queried beyond the last sample");
    return interp_.derivative(s);
  }

  /// A(s); closed form K/(gamma-1) s^gamma for the polytropic kind,
  /// adaptive quadrature for tables.
  double internal_energy_density(double s) const {
    check_density(s);
    if (s == 0.0) return 0.0;
    if (kind_ == EosKind::polytropic) return K_ / (gamma_ - 1.0) * std::pow(s, gamma_);
    return internal_energy_density_quadrature(s);
  }

  /// A(s) by quadrature of its defining integral regardless of kind. The
  /// endpoint singularity of P(t) t^{-2} is tamed by t = s u^2, giving
  /// A(s) = 2 * integral_0^1 P(s u^2) u^{-3} du.
  double internal_energy_density_quadrature(double s) const {
    check_density(s);
    if (s == 0.0) return 0.0;
    auto integrand = [&](double u) {
      if (u <= 0.0) return 0.0;
      return 2.0 * pressure(s * u * u) / (u * u * u);
    };
    return adaptive_simpson(integrand, 0.0, 1.0, 0.1 * quad_tol_);
  }

  /// A'(s) = A(s)/s + P(s)/s for s > 0, A'(0) = 0.
  double a_prime(double s) const {
    check_density(s);
    if (s == 0.0) return 0.0;
    if (kind_ == EosKind::polytropic)
      return K_ * gamma_ / (gamma_ - 1.0) * std::pow(s, gamma_ - 1.0);
    return (internal_energy_density(s) + pressure(s)) / s;
  }

  /// A''(s) = P'(s)/s, s > 0 only (the ratio may be singular at 0).
  double a_second(double s) const {
    if (!(s > 0.0)) throw std::domain_error("a_second requires s > 0");
    if (kind_ == EosKind::polytropic) return K_ * gamma_ * std::pow(s, gamma_ - 2.0);
    return pressure_derivative(s) / s;
  }

  /// phi(y) = (A')^{-1}(y). Closed form for polytropes, bracketed root
  /// find for tables.
  double phi(double y) const {
    if (y < 0.0) throw std::domain_error("phi requires y >= 0");
    if (y == 0.0) return 0.0;
    if (kind_ == EosKind::polytropic)
      return std::pow((gamma_ - 1.0) * y / (K_ * gamma_), 1.0 / (gamma_ - 1.0));
    double lo = 0.0, hi = table_s_.back();
    if (a_prime(hi) < y)
      throw std::domain_error("phi: level exceeds A'(s_max) of the tabulated EOS");
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (a_prime(mid) < y ? lo : hi) = mid;
      if (hi - lo <= 1e-15 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
  }

  /// g(s) = 4 A(s) - 3 s A'(s), the integrand of the Pohozaev-form energy.
  double g_profile(double s) const {
    check_density(s);
    if (s == 0.0) return 0.0;
    return 4.0 * internal_energy_density(s) - 3.0 * s * a_prime(s);
  }

  /// f(s) = A'(s^3), the convexity probe of the uniqueness analysis.
  double f_profile(double s) const {
    check_density(s);
    return a_prime(s * s * s);
  }

 private:
  EquationOfState() = default;

  void require_polytropic() const {
    if (kind_ != EosKind::polytropic)
      throw std::domain_error("operation requires a polytropic EOS");
  }
  static void check_density(double s) {
    if (s < 0.0) throw std::domain_error("density must be nonnegative");
  }

  EosKind kind_ = EosKind::polytropic;
  double K_ = 1.0;
  double gamma_ = 2.0;
  double quad_tol_ = 1e-10;
  std::vector<double> table_s_, table_p_;
  CubicHermite interp_;
};

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

/// Pass/fail record for the structural assumptions on P and the curvature
/// conditions entering the uniqueness argument.
struct AssumptionReport {
  Verdict f1_strictly_increasing = Verdict::inconclusive;
  Verdict f2_subcritical_at_zero = Verdict::inconclusive;   // P s^{-4/3} -> 0
  Verdict f3_supercritical_at_infinity = Verdict::inconclusive;  // P s^{-4/3} -> inf
  Verdict f4_smooth_increasing = Verdict::inconclusive;     // P in C^1, P' > 0
  Verdict f_convex = Verdict::inconclusive;                 // A'(s^3)
  Verdict g_concave = Verdict::inconclusive;                // 4A - 3sA'
  bool f_positive_curvature_near_zero = false;

  bool all_pass() const {
    return f1_strictly_increasing == Verdict::pass && f2_subcritical_at_zero == Verdict::pass &&
           f3_supercritical_at_infinity == Verdict::pass && f4_smooth_increasing == Verdict::pass &&
           f_convex == Verdict::pass && g_concave == Verdict::pass &&
           f_positive_curvature_near_zero;
  }
};

namespace detail {

/// Second-derivative estimate by centered differences with step s * 1e-3.
template <class F>
double second_difference(F&& f, double s) {
  const double h = s * 1e-3;
  return (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
}

/// Curvature verdict on a grid. `want_nonnegative` selects convexity; the
/// tolerance is 1e-6 relative to |f(s)|/s^2, the natural curvature scale,
/// with a wider inconclusive band for violations that sit inside plausible
/// interpolation noise of a general EOS.
template <class F>
Verdict curvature_verdict(F&& f, std::span<const double> grid, bool want_nonnegative) {
  double worst = 0.0;
  for (const double s : grid) {
    if (!(s > 0.0)) continue;
    double d2;
    try {
      d2 = second_difference(f, s);
    } catch (const std::domain_error&) {
      continue;  // probe step left the tabulated range
    }
    const double scale = std::max(std::abs(f(s)), 1e-300) / (s * s);
    const double signed_curv = want_nonnegative ? d2 : -d2;
    worst = std::min(worst, signed_curv / scale);
  }
  if (worst >= -1e-6) return Verdict::pass;
  if (worst >= -1e-3) return Verdict::inconclusive;
  return Verdict::fail;
}

/// Least-squares log-log slope over the samples with s in [lo, hi].
inline double loglog_slope(std::span<const double> s, std::span<const double> p, double lo,
                           double hi, std::size_t* count = nullptr) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < lo || s[i] > hi || s[i] <= 0.0 || p[i] <= 0.0) continue;
    const double x = std::log(s[i]), y = std::log(p[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (count) *count = n;
  const double denom = n * sxx - sx * sx;
  if (n < 3 || std::abs(denom) < 1e-30) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

}  // namespace detail

/// Checks F1-F4 and the curvature conditions on a strictly increasing,
/// positive sample grid. Limits at 0 and infinity are decided analytically
/// for polytropes and by log-log slope fits over the first/last decade of
/// table samples otherwise; a fit too close to the critical exponent 4/3
/// (or too few samples in the decade) is reported as inconclusive.
inline AssumptionReport check_assumptions(const EquationOfState& eos,
                                          std::span<const double> sample_grid) {
  if (sample_grid.size() < 2) throw std::invalid_argument("check_assumptions: grid too small");
  for (std::size_t i = 0; i < sample_grid.size(); ++i) {
    if (!(sample_grid[i] > 0.0) || (i > 0 && !(sample_grid[i] > sample_grid[i - 1])))
      throw std::invalid_argument("check_assumptions: grid must be positive and increasing");
  }

  AssumptionReport rep;
  if (eos.kind() == EosKind::polytropic) {
    const double gamma = eos.gamma();
    rep.f1_strictly_increasing = Verdict::pass;
    rep.f2_subcritical_at_zero = gamma > 4.0 / 3.0 ? Verdict::pass : Verdict::fail;
    rep.f3_supercritical_at_infinity = gamma > 4.0 / 3.0 ? Verdict::pass : Verdict::fail;
    rep.f4_smooth_increasing = Verdict::pass;
  } else {
    // F1: strict increase of the interpolated law.
    {
      bool strict = true;
      const double smax = eos.max_tabulated_density();
      double last = eos.pressure(0.0);
      const int probes = 64;
      for (int i = 1; i <= probes; ++i) {
        const double s = smax * i / probes;
        const double p = eos.pressure(s);
        if (p <= last) {
          strict = false;
          break;
        }
        last = p;
      }
      rep.f1_strictly_increasing = strict ? Verdict::pass : Verdict::fail;
    }

    // F2/F3 from decade slope fits; the limits themselves are undecidable
    // from finite data.
    std::vector<double> s_probe, p_probe;
    const double smax = eos.max_tabulated_density();
    for (int i = 1; i <= 256; ++i) {
      const double s = smax * std::pow(10.0, -4.0 * (1.0 - i / 256.0));
      s_probe.push_back(s);
      p_probe.push_back(eos.pressure(s));
    }
    auto verdict_from_slope = [](double slope) {
      if (std::isnan(slope)) return Verdict::inconclusive;
      if (slope > 4.0 / 3.0 + 0.05) return Verdict::pass;
      if (slope < 4.0 / 3.0 - 0.05) return Verdict::fail;
      return Verdict::inconclusive;
    };
    const double s_lo = s_probe.front();
    rep.f2_subcritical_at_zero =
        verdict_from_slope(detail::loglog_slope(s_probe, p_probe, s_lo, 10.0 * s_lo));
    // F2 wants the limit 0, i.e. local exponent above 4/3 near s = 0; F3
    // wants growth beyond 4/3 at the large end.
    rep.f3_supercritical_at_infinity =
        verdict_from_slope(detail::loglog_slope(s_probe, p_probe, smax / 10.0, smax));

    bool deriv_positive = true;
    for (const double s : sample_grid) {
      if (s > smax) break;
      if (eos.pressure_derivative(s) <= 0.0) {
        deriv_positive = false;
        break;
      }
    }
    rep.f4_smooth_increasing = deriv_positive ? Verdict::pass : Verdict::fail;
  }

  auto f = [&](double s) { return eos.f_profile(s); };
  auto g = [&](double s) { return eos.g_profile(s); };
  std::vector<double> f_grid;
  for (const double s : sample_grid) {
    // f probes the EOS at s^3; keep tabulated probes inside the table.
    if (eos.kind() == EosKind::tabulated &&
        std::pow(s * 1.001, 3.0) > eos.max_tabulated_density())
      continue;
    f_grid.push_back(s);
  }
  rep.f_convex = detail::curvature_verdict(f, f_grid, /*want_nonnegative=*/true);
  rep.g_concave = detail::curvature_verdict(g, sample_grid, /*want_nonnegative=*/false);

  // Strict positivity of f'' on a sub-interval near zero: scan the smallest
  // decade of the grid.
  rep.f_positive_curvature_near_zero = false;
  if (!f_grid.empty()) {
    const double cutoff = f_grid.front() * 10.0;
    for (const double s : f_grid) {
      if (s > cutoff) break;
      const double d2 = detail::second_difference(f, s);
      const double scale = std::max(std::abs(f(s)), 1e-300) / (s * s);
      if (d2 > 1e-6 * scale) {
        rep.f_positive_curvature_near_zero = true;
        break;
      }
    }
  }
  return rep;
}

}  // namespace stellar
