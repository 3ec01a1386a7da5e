#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "stellar/eos.hpp"
#include "stellar/shooting.hpp"
#include "stellar/varmin.hpp"

namespace stellar {

/// Locale-independent shortest-faithful decimal with `sig` significant
/// digits; identical inputs always produce identical bytes.
inline std::string format_number(double v, int sig) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, sig);
  if (res.ec != std::errc()) throw numeric_error("format_number: conversion failed");
  return std::string(buf, res.ptr);
}

inline std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";  // JSON has no NaN/Inf literals
  return format_number(v, 17);
}
inline std::string csv_number(double v) { return format_number(v, 12); }

/// StellarSolution as a JSON document with pinned field order and 17
/// significant digits throughout.
inline void write_solution_json(std::ostream& os, const StellarSolution& sol) {
  auto num = [&](const char* key, double v, bool comma = true) {
    os << '"' << key << "\":" << json_number(v) << (comma ? "," : "");
  };
  os << '{';
  num("gamma", sol.gamma);
  num("K", sol.K);
  num("beta", sol.beta);
  num("R", sol.r_support);
  num("M", sol.mass);
  num("lambda", sol.lambda);
  os << "\"energies\":{";
  num("U", sol.energies.U);
  num("G", sol.energies.G);
  num("E0", sol.energies.E0);
  num("E0_pohozaev", sol.energies.E0_pohozaev);
  os << "\"virial_residuals\":{";
  num("G", sol.energies.virial.interaction);
  num("E0", sol.energies.virial.total);
  num("pohozaev", sol.energies.virial.pohozaev);
  num("lambda", sol.energies.virial.multiplier, false);
  os << "},";
  num("el_residual", sol.energies.el_residual, false);
  os << "},\"profile\":[";
  for (std::size_t i = 0; i < sol.theta.r.size(); ++i) {
    if (i) os << ',';
    os << '{';
    num("r", sol.theta.r[i]);
    num("theta", sol.theta.theta[i]);
    num("sigma", sol.density.sigma[i]);
    num("mass", sol.mass_profile[i]);
    num("V", sol.potential.v[i], false);
    os << '}';
  }
  os << "]}\n";
}

/// Reads a solution document back. theta' is reconstructed from the mass
/// profile through theta'(r) = -m(r)/r^2, exact on equilibrium records.
inline StellarSolution read_solution_json(std::istream& is) {
  nlohmann::json j;
  is >> j;
  StellarSolution sol;
  sol.gamma = j.at("gamma").get<double>();
  sol.K = j.at("K").get<double>();
  sol.beta = j.at("beta").get<double>();
  sol.r_support = j.at("R").get<double>();
  sol.mass = j.at("M").get<double>();
  sol.lambda = j.at("lambda").get<double>();
  const auto& prof = j.at("profile");
  const std::size_t n = prof.size();
  if (n == 0) return sol;  // vacuum
  sol.theta.beta = sol.beta;
  sol.theta.r_of_beta = sol.r_support;
  sol.theta.r.resize(n);
  sol.theta.theta.resize(n);
  sol.theta.theta_prime.resize(n);
  std::vector<double> sigma(n);
  sol.mass_profile.resize(n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = prof[i];
    sol.theta.r[i] = row.at("r").get<double>();
    sol.theta.theta[i] = row.at("theta").get<double>();
    sigma[i] = row.at("sigma").get<double>();
    sol.mass_profile[i] = row.at("mass").get<double>();
    v[i] = row.at("V").get<double>();
    sol.theta.theta_prime[i] =
        i == 0 ? 0.0 : -sol.mass_profile[i] / (sol.theta.r[i] * sol.theta.r[i]);
  }
  const double q = std::isfinite(sol.gamma) && sol.gamma > 1.0 ? 1.0 / (sol.gamma - 1.0) : -1.0;
  sol.density = RadialDensity::from_samples(sol.theta.r, std::move(sigma), false, q);
  sol.potential.r = sol.theta.r;
  sol.potential.v = std::move(v);
  sol.potential.v_at_zero = sol.potential.v.front();
  sol.potential.mass = sol.mass;
  sol.potential.r_support = sol.r_support;
  const auto& en = j.at("energies");
  sol.energies.U = en.at("U").get<double>();
  sol.energies.G = en.at("G").get<double>();
  sol.energies.E0 = en.at("E0").get<double>();
  sol.energies.E0_pohozaev = en.at("E0_pohozaev").get<double>();
  sol.energies.el_residual = en.at("el_residual").get<double>();
  const auto& vr = en.at("virial_residuals");
  sol.energies.virial.interaction = vr.at("G").get<double>();
  sol.energies.virial.total = vr.at("E0").get<double>();
  sol.energies.virial.pohozaev = vr.at("pohozaev").get<double>();
  sol.energies.virial.multiplier = vr.at("lambda").get<double>();
  return sol;
}

/// Radial profile CSV: header "r,sigma,mass,V".
inline void write_profile_csv(std::ostream& os, const StellarSolution& sol) {
  os << "r,sigma,mass,V\n";
  for (std::size_t i = 0; i < sol.theta.r.size(); ++i) {
    os << csv_number(sol.theta.r[i]) << ',' << csv_number(sol.density.sigma[i]) << ','
       << csv_number(sol.mass_profile[i]) << ',' << csv_number(sol.potential.v[i]) << '\n';
  }
}

/// Sweep CSV: header "gamma,m,beta,R,M,lambda,U,G,E0".
inline void write_sweep_header(std::ostream& os) { os << "gamma,m,beta,R,M,lambda,U,G,E0\n"; }

inline void write_sweep_row(std::ostream& os, double gamma, double m_requested,
                            const StellarSolution& sol) {
  os << csv_number(gamma) << ',' << csv_number(m_requested) << ',' << csv_number(sol.beta) << ','
     << csv_number(sol.r_support) << ',' << csv_number(sol.mass) << ',' << csv_number(sol.lambda)
     << ',' << csv_number(sol.energies.U) << ',' << csv_number(sol.energies.G) << ','
     << csv_number(sol.energies.E0) << '\n';
}

/// Fixed-point convergence history CSV: "iter,energy,residual,lambda_hat".
inline void write_history_csv(std::ostream& os, const std::vector<FixedPointHistoryRow>& rows) {
  os << "iter,energy,residual,lambda_hat\n";
  for (const auto& row : rows) {
    os << row.iter << ',' << csv_number(row.energy) << ',' << csv_number(row.residual) << ','
       << csv_number(row.lambda_hat) << '\n';
  }
}

/// Tabulated EOS from CSV with header "s,P", strictly increasing s and a
/// first row "0,0".
inline EquationOfState eos_from_csv(std::istream& is, double quad_tol = 1e-8) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("eos_from_csv: empty input");
  if (line != "s,P" && line != "s,P\r")
    throw std::invalid_argument("eos_from_csv: expected header \"s,P\"");
  std::vector<double> s, p;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw std::invalid_argument("eos_from_csv: malformed row: " + line);
    s.push_back(std::stod(a));
    p.push_back(std::stod(b));
  }
  return EquationOfState::tabulated(std::move(s), std::move(p), quad_tol);
}

}  // namespace stellar
