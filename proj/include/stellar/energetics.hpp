#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "stellar/eos.hpp"
#include "stellar/quadrature.hpp"
#include "stellar/radial_field.hpp"

namespace stellar {

struct VirialResiduals {
  double interaction = 0.0;  // |G - (6 gamma - 6) U| / |U|
  double total = 0.0;        // |E0 - (4 - 3 gamma) U| / |U|
  double pohozaev = 0.0;     // |E0 - integral(4A - 3 sigma A')| / |U|
  double multiplier = 0.0;   // |lambda - (6 - 5 gamma) U_unit m^{(2g-2)/(3g-4)}| / |lambda|
};

/// Energy bookkeeping for one configuration. The virial residuals are the
/// polytropic equilibrium identities and stay NaN for tabulated laws.
struct EnergyReport {
  double U = 0.0;
  double G = 0.0;
  double E0 = 0.0;
  double E0_pohozaev = 0.0;
  VirialResiduals virial;
  double el_residual = 0.0;
};

namespace detail {

/// Surface exponent of a kernel behaving like sigma^power near the support
/// boundary; negative (no correction) when the density's exponent is unknown.
inline double kernel_exponent(const RadialDensity& d, double power) {
  return d.surface_exponent < 0.0 ? -1.0 : d.surface_exponent * power;
}

}  // namespace detail

/// U = 4 pi integral A(sigma) r^2 dr.
inline double internal_energy(const EquationOfState& eos, const RadialDensity& d) {
  if (d.r.size() < 2) return 0.0;
  std::vector<double> f(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i)
    f[i] = eos.internal_energy_density(d.sigma[i]) * d.r[i] * d.r[i];
  const double power = eos.kind() == EosKind::polytropic ? eos.gamma() : -1.0;
  return 4.0 * M_PI * surface_aware_total(f, d.spacing(), detail::kernel_exponent(d, power));
}

/// E0 = U - G/2.
inline double total_energy(const EquationOfState& eos, const RadialDensity& d) {
  return internal_energy(eos, d) - 0.5 * interaction_energy(d);
}

/// integral(4 A(sigma) - 3 sigma A'(sigma)); equals E0 on equilibrium
/// profiles only.
inline double pohozaev_energy(const EquationOfState& eos, const RadialDensity& d) {
  if (d.r.size() < 2) return 0.0;
  std::vector<double> f(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i)
    f[i] = eos.g_profile(d.sigma[i]) * d.r[i] * d.r[i];
  const double power = eos.kind() == EosKind::polytropic ? eos.gamma() : -1.0;
  return 4.0 * M_PI * surface_aware_total(f, d.spacing(), detail::kernel_exponent(d, power));
}

/// A'(sigma(r)) - V(r) on the grid; constantly lambda inside the support of
/// an equilibrium star.
inline std::vector<double> variational_derivative_field(const EquationOfState& eos,
                                                        const RadialDensity& d,
                                                        const PotentialProfile& potential) {
  std::vector<double> field(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i)
    field[i] = eos.a_prime(d.sigma[i]) - potential.v[i];
  return field;
}

inline std::vector<double> variational_derivative_field(const EquationOfState& eos,
                                                        const RadialDensity& d) {
  return variational_derivative_field(eos, d, potential_profile(d));
}

/// integral sigma^{4/3} over space, by radial quadrature.
inline double lp43_norm_power(const RadialDensity& d) {
  if (d.r.size() < 2) return 0.0;
  std::vector<double> f(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i)
    f[i] = std::pow(d.sigma[i], 4.0 / 3.0) * d.r[i] * d.r[i];
  return 4.0 * M_PI * surface_aware_total(f, d.spacing(), detail::kernel_exponent(d, 4.0 / 3.0));
}

/// |integral rho V_rho| / (||rho||_1^{2/3} ||rho||_{4/3}^{4/3}), the
/// dimensionless ratio of the potential-energy bound. Invariant under the
/// mass-preserving dilation family.
inline double hls_ratio(const RadialDensity& d) {
  if (d.empty()) throw std::domain_error("hls_ratio: undefined for the zero density");
  const double g = interaction_energy(d);
  return g / (std::pow(d.mass, 2.0 / 3.0) * lp43_norm_power(d));
}

/// Fills an EnergyReport for a configuration with multiplier `lambda` and
/// mass taken from the density. The multiplier residual compares lambda
/// with (6 - 5 gamma) U_unit m^{(2 gamma - 2)/(3 gamma - 4)}, U_unit being
/// the internal energy of the mass-rescaled unit star.
inline EnergyReport make_energy_report(const EquationOfState& eos, const RadialDensity& d,
                                       double lambda, double el_residual) {
  EnergyReport rep;
  rep.el_residual = el_residual;
  if (d.empty()) return rep;  // vacuum: all residuals zero by convention
  rep.U = internal_energy(eos, d);
  rep.G = interaction_energy(d);
  rep.E0 = rep.U - 0.5 * rep.G;
  rep.E0_pohozaev = pohozaev_energy(eos, d);
  if (eos.kind() != EosKind::polytropic) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.virial = {nan, nan, nan, nan};
    return rep;
  }
  const double gamma = eos.gamma();
  const double m = d.mass;
  const double u_floor = std::max(std::abs(rep.U), std::numeric_limits<double>::epsilon());
  rep.virial.interaction = std::abs(rep.G - (6.0 * gamma - 6.0) * rep.U) / u_floor;
  rep.virial.total = std::abs(rep.E0 - (4.0 - 3.0 * gamma) * rep.U) / u_floor;
  rep.virial.pohozaev = std::abs(rep.E0 - rep.E0_pohozaev) / u_floor;
  const double a_E = (5.0 * gamma - 6.0) / (3.0 * gamma - 4.0);
  const double a_L = (2.0 * gamma - 2.0) / (3.0 * gamma - 4.0);
  const double u_unit = rep.U * std::exp(-a_E * std::log(m));
  const double lambda_pred = (6.0 - 5.0 * gamma) * u_unit * std::exp(a_L * std::log(m));
  rep.virial.multiplier =
      std::abs(lambda - lambda_pred) / std::max(std::abs(lambda), std::numeric_limits<double>::epsilon());
  return rep;
}

}  // namespace stellar
