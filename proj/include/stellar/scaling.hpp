#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "stellar/energetics.hpp"
#include "stellar/eos.hpp"
#include "stellar/errors.hpp"
#include "stellar/shooting.hpp"

namespace stellar {

/// Exponents of the mass-dilation family sigma_m(x) = (1/A) sigma(x/B),
/// A = m^{a_A}, B = m^{a_B}; energies scale as m^{a_E}, the multiplier and
/// the variational derivative as m^{a_L}. At gamma = 2 these are
/// (-1, 0, 2, 1).
struct ScaleExponents {
  double a_A = 0.0;  // -2/(3 gamma - 4); central density scales as m^{-a_A}
  double a_B = 0.0;  // (gamma - 2)/(3 gamma - 4); support radius
  double a_E = 0.0;  // (5 gamma - 6)/(3 gamma - 4); minimal energy
  double a_L = 0.0;  // (2 gamma - 2)/(3 gamma - 4); multiplier
};

inline ScaleExponents scale_exponents(double gamma) {
  if (gamma == 4.0 / 3.0)
    throw std::domain_error("scale_exponents: gamma = 4/3 makes the exponents singular");
  if (gamma < 4.0 / 3.0)
    throw std::domain_error("scale_exponents: defined for gamma > 4/3 only");
  const double den = 3.0 * gamma - 4.0;
  return {-2.0 / den, (gamma - 2.0) / den, (5.0 * gamma - 6.0) / den, (2.0 * gamma - 2.0) / den};
}

/// lambda_m = -(5 gamma - 6) m^{(2 gamma - 2)/(3 gamma - 4)} U_unit, with
/// U_unit the internal energy of the mass-1 minimizer.
inline double predicted_multiplier(double gamma, double m, double u_unit) {
  if (m < 0.0) throw std::domain_error("predicted_multiplier: mass must be nonnegative");
  if (m == 0.0) return 0.0;
  const double a_L = scale_exponents(gamma).a_L;
  return -(5.0 * gamma - 6.0) * std::exp(a_L * std::log(m)) * u_unit;
}

struct AsymptoticsReport {
  enum class RadiusBehavior { shrinks, fixed, grows };
  double gamma = 0.0;
  double central_density_rate = 0.0;  // central density ~ m^{2/(3 gamma - 4)} as m -> 0
  double radius_rate = 0.0;           // support radius ~ m^{(gamma - 2)/(3 gamma - 4)}
  RadiusBehavior radius_behavior = RadiusBehavior::fixed;
};

/// Small-mass classification: the central density always vanishes with m;
/// the support shrinks for gamma > 2, is mass-independent at gamma = 2 and
/// spreads out for gamma < 2.
inline AsymptoticsReport asymptotics_report(double gamma) {
  const auto ex = scale_exponents(gamma);
  AsymptoticsReport rep;
  rep.gamma = gamma;
  rep.central_density_rate = -ex.a_A;
  rep.radius_rate = ex.a_B;
  if (ex.a_B > 0.0)
    rep.radius_behavior = AsymptoticsReport::RadiusBehavior::shrinks;
  else if (ex.a_B < 0.0)
    rep.radius_behavior = AsymptoticsReport::RadiusBehavior::grows;
  else
    rep.radius_behavior = AsymptoticsReport::RadiusBehavior::fixed;
  return rep;
}

/**
 * Maps a solved star to the target mass through the dilation family. The
 * grid dilates onto the standard uniform grid of the new solution, so no
 * resampling error enters. All derived quantities are recomputed from the
 * dilated profile and cross-checked against the exponent-law predictions;
 * a disagreement beyond check_tol is an internal error.
 */
inline StellarSolution rescale_solution(const EquationOfState& eos, const StellarSolution& sol,
                                        double m_target, double check_tol = 1e-8) {
  if (!(m_target > 0.0)) throw std::domain_error("rescale_solution: target mass must be positive");
  if (sol.vacuum()) throw std::domain_error("rescale_solution: cannot rescale the vacuum");
  if (eos.kind() != EosKind::polytropic)
    throw std::domain_error("rescale_solution: dilation laws hold for polytropic EOS");

  const double gamma = eos.gamma();
  const auto ex = scale_exponents(gamma);
  const double mr = m_target / sol.mass;
  const double lm = std::log(mr);
  const double inv_A = std::exp(-ex.a_A * lm);  // density factor 1/A
  const double B = std::exp(ex.a_B * lm);
  const double theta_fac = std::exp(ex.a_L * lm);

  StellarSolution out;
  out.gamma = sol.gamma;
  out.K = sol.K;
  out.beta = theta_fac * sol.beta;
  const std::size_t n = sol.theta.r.size();
  out.theta.beta = out.beta;
  out.theta.r.resize(n);
  out.theta.theta.resize(n);
  out.theta.theta_prime.resize(n);
  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.theta.r[i] = B * sol.theta.r[i];
    out.theta.theta[i] = theta_fac * sol.theta.theta[i];
    out.theta.theta_prime[i] = theta_fac / B * sol.theta.theta_prime[i];
    sigma[i] = inv_A * sol.density.sigma[i];
  }
  out.theta.r_of_beta = B * sol.theta.r_of_beta;
  out.r_support = out.theta.r_of_beta;

  out.density = RadialDensity::from_samples(out.theta.r, std::move(sigma), false,
                                            sol.density.surface_exponent);
  out.mass = out.density.mass;
  out.mass_profile = cumulative_mass(out.density);
  out.potential = potential_profile(out.density);
  out.lambda = -out.mass / out.r_support;
  out.energies = make_energy_report(eos, out.density, out.lambda, el_residual(out, eos));

  // Exponent-law predictions must match the recomputed values.
  auto check = [&](const char* what, double recomputed, double predicted) {
    const double scale = std::max({std::abs(predicted), std::abs(recomputed), 1e-300});
    if (std::abs(recomputed - predicted) > check_tol * scale)
      throw numeric_error(std::string("rescale_solution: ") + what +
                          " disagrees with the exponent law: recomputed " +
                          std::to_string(recomputed) + ", predicted " + std::to_string(predicted));
  };
  check("mass", out.mass, mr * sol.mass);
  check("radius", out.r_support, B * sol.r_support);
  check("lambda", out.lambda, theta_fac * sol.lambda);
  check("E0", out.energies.E0, std::exp(ex.a_E * lm) * sol.energies.E0);
  check("U", out.energies.U, std::exp(ex.a_E * lm) * sol.energies.U);
  return out;
}

/// Sup-norm relative mismatch between the variational derivative of the
/// rescaled solution and the exponent-law transport
/// m^{a_L} E0'(rho)(x/B) of the source field.
inline double rescaled_derivative_check(const EquationOfState& eos, const StellarSolution& sol,
                                        double m_target) {
  if (sol.vacuum()) return 0.0;
  const auto resc = rescale_solution(eos, sol, m_target);
  const double mr = m_target / sol.mass;
  const double fac = std::exp(scale_exponents(eos.gamma()).a_L * std::log(mr));
  const auto src = variational_derivative_field(eos, sol.density, sol.potential);
  const auto dst = variational_derivative_field(eos, resc.density, resc.potential);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    worst = std::max(worst, std::abs(dst[i] - fac * src[i]));
    scale = std::max(scale, std::abs(dst[i]));
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace stellar
