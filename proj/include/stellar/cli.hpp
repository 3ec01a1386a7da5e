#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "stellar/energetics.hpp"
#include "stellar/eos.hpp"
#include "stellar/errors.hpp"
#include "stellar/quadrature.hpp"
#include "stellar/radial_field.hpp"
#include "stellar/scaling.hpp"
#include "stellar/serialization.hpp"
#include "stellar/shooting.hpp"
#include "stellar/varmin.hpp"

namespace stellar::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_numeric = 2;
inline constexpr int exit_usage = 64;

namespace detail {

/// Deterministic 64-bit LCG so seeded runs emit identical bytes everywhere.
struct Lcg {
  std::uint64_t state;
  explicit Lcg(std::uint64_t seed) : state(seed * 2862933555777941757ULL + 3037000493ULL) {}
  double uniform() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  }
};

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::invalid_argument("cannot open output file: " + path);
  return os;
}

inline void emit(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload;
  } else {
    auto os = open_output(path);
    os << payload;
  }
}

inline RadialDensity uniform_ball(double mass, double radius, std::size_t n = 513) {
  std::vector<double> r(n), sig(n);
  const double rho = 3.0 * mass / (4.0 * M_PI * radius * radius * radius);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = radius * static_cast<double>(i) / static_cast<double>(n - 1);
    sig[i] = rho;
  }
  return RadialDensity::from_samples(std::move(r), std::move(sig), /*relax_shape=*/true);
}

/// Exterior potential evaluated by a full radial-angular quadrature,
/// independent of the shell-theorem shortcut it is used to verify.
// Accurate for z comfortably outside the support; the angular integrand
// acquires a branch point as z approaches R and the rule loses digits there.
inline double exterior_potential_by_quadrature(const RadialDensity& d, double z) {
  std::vector<double> mu, wmu;
  gauss_legendre(64, mu, wmu);
  std::vector<double> f(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i) {
    const double s = d.r[i];
    double inner = 0.0;
    for (std::size_t q = 0; q < mu.size(); ++q)
      inner += wmu[q] / std::sqrt(s * s + z * z - 2.0 * s * z * mu[q]);
    f[i] = d.sigma[i] * s * s * inner;
  }
  return 2.0 * M_PI * surface_aware_total(f, d.spacing(), d.surface_exponent);
}

inline unsigned thread_budget(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STELLAR_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) n = static_cast<unsigned>(parsed);
  }
  return std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(jobs, 1)));
}

struct VerifyRow {
  double gamma;
  std::string check;
  bool pass;
  double value;
};

inline void run_verify_for_gamma(double gamma, double tol, std::vector<VerifyRow>& rows) {
  const auto eos = EquationOfState::polytropic(1.0, gamma);
  const auto sol = solve_star(eos, 1.0);
  auto add = [&](const std::string& check, double value, double bound) {
    rows.push_back({gamma, check, value <= bound, value});
  };

  const double lambda_alt = sol.beta - sol.potential.v_at_zero;
  add("lambda_consistency", std::abs(lambda_alt - sol.lambda) / std::abs(sol.lambda), tol);
  add("virial_G", sol.energies.virial.interaction, tol);
  add("virial_E0", sol.energies.virial.total, tol);
  add("pohozaev", sol.energies.virial.pohozaev, tol);
  add("multiplier_formula", sol.energies.virial.multiplier, tol);
  add("el_residual", sol.energies.el_residual / std::max(1.0, std::abs(sol.lambda)), tol);
  rows.push_back({gamma, "negative_energy", sol.energies.E0 < 0.0 && sol.lambda < 0.0,
                  sol.energies.E0});

  // Shell exterior against an independent angular quadrature.
  const double z = 1.5 * sol.r_support;
  const double v_quad = exterior_potential_by_quadrature(sol.density, z);
  add("shell_exterior", std::abs(v_quad - sol.mass / z) / (sol.mass / z), 1e-8);

  // Direct solve against the dilation law at twice the mass.
  const double m2 = 2.0 * sol.mass;
  const auto direct = solve_star(eos, beta_of_mass(eos, m2));
  const auto rescaled = rescale_solution(eos, sol, m2);
  double sup = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < direct.density.sigma.size(); ++i) {
    sup = std::max(sup, std::abs(direct.density.sigma[i] - rescaled.density.sigma[i]));
    scale = std::max(scale, direct.density.sigma[i]);
  }
  add("scale_vs_direct_sigma", sup / scale, tol);
  const double a_E = scale_exponents(gamma).a_E;
  add("energy_law",
      std::abs(direct.energies.E0 / sol.energies.E0 - std::pow(m2 / sol.mass, a_E)) /
          std::pow(m2 / sol.mass, a_E),
      1e-8);
}

inline void run_verify_two_body(std::uint64_t seed, std::vector<VerifyRow>& rows) {
  Lcg rng(seed);
  double worst_rel = 0.0, worst_term = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double m1 = 0.5 + 2.5 * rng.uniform();
    const double m2 = 0.5 + 2.5 * rng.uniform();
    const double r1 = 0.3 + 0.9 * rng.uniform();
    const double r2 = 0.3 + 0.9 * rng.uniform();
    const double D = (r1 + r2) * (1.3 + 1.5 * rng.uniform());
    const auto b1 = uniform_ball(m1, r1);
    const auto b2 = uniform_ball(m2, r2);
    const double exact = two_sphere_energy(b1, b2, D);
    const auto quad = mutual_energy_quadrature(b1, b2, D, 4);
    worst_rel = std::max(worst_rel, std::abs(quad.total - exact) / exact);
    for (std::size_t l = 1; l < quad.terms.size(); ++l)
      worst_term = std::max(worst_term, std::abs(quad.terms[l]));
  }
  rows.push_back({0.0, "two_body_random(5)", worst_rel <= 1e-6, worst_rel});
  rows.push_back({0.0, "two_body_multipoles", worst_term <= 1e-8, worst_term});
}

}  // namespace detail

/// Command-line entry point; returns the process exit code.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"Self-gravitating polytropic star toolkit"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one equilibrium star");
  double gamma = 2.0, K = 1.0, tol = 1e-10;
  std::size_t grid = 2000;
  std::string out_path, format = "json";
  std::optional<double> beta_opt, mass_opt;
  solve->add_option("--gamma", gamma, "Adiabatic exponent")->required();
  solve->add_option("--K", K, "Pressure coefficient")->required();
  auto* beta_flag = solve->add_option("--beta", beta_opt, "Central Theta value");
  auto* mass_flag = solve->add_option("--mass", mass_opt, "Total mass");
  beta_flag->excludes(mass_flag);
  solve->add_option("--tol", tol, "Integrator relative tolerance")
      ->check(CLI::Range(1e-300, 1e-2));
  solve->add_option("--grid", grid, "Profile grid points")->check(CLI::Range(std::size_t(8), std::size_t(2000000)));
  solve->add_option("--out", out_path, "Output path ('-' for stdout)");
  solve->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Mass sweep over the solution family");
  double sweep_gamma = 2.0, sweep_K = 1.0, mass_min = 0.5, mass_max = 2.0;
  std::size_t sweep_points = 8;
  std::string sweep_out;
  sweep->add_option("--gamma", sweep_gamma)->required();
  sweep->add_option("--K", sweep_K)->required();
  sweep->add_option("--mass-min", mass_min)->required()->check(CLI::PositiveNumber);
  sweep->add_option("--mass-max", mass_max)->required()->check(CLI::PositiveNumber);
  sweep->add_option("--points", sweep_points)->required()->check(CLI::Range(std::size_t(1), std::size_t(100000)));
  sweep->add_option("--out", sweep_out, "Output CSV path ('-' for stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the identity suite");
  std::string gamma_list = "1.6667,2,2.5";
  double verify_tol = 1e-6;
  std::uint64_t seed = 42;
  verify->add_option("--gamma-list", gamma_list, "Comma-separated gamma values");
  verify->add_option("--tol", verify_tol)->check(CLI::Range(1e-300, 1e-2));
  verify->add_option("--seed", seed, "Seed for randomized rows");

  // scale
  auto* scale = app.add_subcommand("scale", "Rescale a stored solution to a new mass");
  std::string scale_in, scale_out;
  double scale_mass = 1.0;
  scale->add_option("--in", scale_in, "Input solution JSON")->required();
  scale->add_option("--mass", scale_mass, "Target mass")->required()->check(CLI::PositiveNumber);
  scale->add_option("--out", scale_out, "Output path ('-' for stdout)");

  // two-body
  auto* two_body = app.add_subcommand("two-body", "Mutual energy of two spheres");
  double m1 = 1.0, m2 = 1.0, D = 1.0, r1 = 0.0, r2 = 0.0;
  two_body->add_option("--m1", m1)->required()->check(CLI::PositiveNumber);
  two_body->add_option("--m2", m2)->required()->check(CLI::PositiveNumber);
  two_body->add_option("--D", D)->required()->check(CLI::PositiveNumber);
  two_body->add_option("--r1", r1, "Radius of body 1 (default D/10)");
  two_body->add_option("--r2", r2, "Radius of body 2 (default D/10)");

  // collapse-demo
  auto* collapse = app.add_subcommand("collapse-demo", "Energy of the dilated uniform ball");
  double cd_gamma = 1.2, cd_K = 1.0, cd_m = 1.0;
  std::string deltas = "0.1,0.01,0.001";
  std::string cd_out;
  collapse->add_option("--gamma", cd_gamma)->required();
  collapse->add_option("--K", cd_K);
  collapse->add_option("--m", cd_m);
  collapse->add_option("--deltas", deltas, "Comma-separated dilation radii");
  collapse->add_option("--out", cd_out, "Output path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*solve) {
      if (beta_opt.has_value() == mass_opt.has_value())
        throw std::invalid_argument("solve: exactly one of --beta/--mass must be given");
      const auto eos = EquationOfState::polytropic(K, gamma);
      ShootingOptions opt;
      opt.rel_tol = tol;
      opt.grid_points = grid;
      const double beta = beta_opt ? *beta_opt : beta_of_mass(eos, *mass_opt, opt);
      const auto sol = solve_star(eos, beta, opt);
      std::ostringstream payload;
      if (format == "json")
        write_solution_json(payload, sol);
      else
        write_profile_csv(payload, sol);
      detail::emit(out_path, payload.str());
      return exit_ok;
    }

    if (*sweep) {
      const auto eos = EquationOfState::polytropic(sweep_K, sweep_gamma);
      std::vector<double> masses(sweep_points);
      for (std::size_t i = 0; i < sweep_points; ++i) {
        const double t = sweep_points == 1 ? 0.0
                                           : static_cast<double>(i) /
                                                 static_cast<double>(sweep_points - 1);
        masses[i] = mass_min * std::pow(mass_max / mass_min, t);
      }
      std::vector<StellarSolution> sols(sweep_points);
      std::vector<std::string> errors(sweep_points);
      const unsigned threads = detail::thread_budget(sweep_points);
      std::vector<std::thread> pool;
      std::atomic<std::size_t> next{0};
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
          for (std::size_t i = next.fetch_add(1); i < sweep_points; i = next.fetch_add(1)) {
            try {
              sols[i] = solve_star(eos, beta_of_mass(eos, masses[i]));
            } catch (const std::exception& e) {
              errors[i] = e.what();
            }
          }
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& err : errors)
        if (!err.empty()) throw numeric_error("sweep: " + err);
      std::ostringstream payload;
      write_sweep_header(payload);
      for (std::size_t i = 0; i < sweep_points; ++i)
        write_sweep_row(payload, sweep_gamma, masses[i], sols[i]);
      detail::emit(sweep_out, payload.str());
      return exit_ok;
    }

    if (*verify) {
      std::vector<double> gammas;
      std::istringstream gs(gamma_list);
      for (std::string tok; std::getline(gs, tok, ',');) gammas.push_back(std::stod(tok));
      if (gammas.empty()) throw std::invalid_argument("verify: empty gamma list");
      std::vector<detail::VerifyRow> rows;
      for (const double g : gammas) detail::run_verify_for_gamma(g, verify_tol, rows);
      detail::run_verify_two_body(seed, rows);
      bool all_pass = true;
      for (const auto& row : rows) {
        all_pass = all_pass && row.pass;
        std::ostringstream line;
        line << (row.pass ? "PASS" : "FAIL") << "  ";
        if (row.gamma > 0.0)
          line << "gamma=" << format_number(row.gamma, 6) << "  ";
        else
          line << "          ";
        line << row.check << " (" << format_number(row.value, 3) << ")";
        std::cout << line.str() << '\n';
      }
      std::cout << (all_pass ? "ALL PASS" : "FAILURES PRESENT") << '\n';
      return all_pass ? exit_ok : exit_validation;
    }

    if (*scale) {
      std::ifstream is(scale_in, std::ios::binary);
      if (!is) throw std::invalid_argument("scale: cannot open " + scale_in);
      const auto sol = read_solution_json(is);
      const auto eos = EquationOfState::polytropic(sol.K, sol.gamma);
      const auto rescaled = rescale_solution(eos, sol, scale_mass);
      std::ostringstream payload;
      write_solution_json(payload, rescaled);
      detail::emit(scale_out, payload.str());
      return exit_ok;
    }

    if (*two_body) {
      if (r1 <= 0.0) r1 = D / 10.0;
      if (r2 <= 0.0) r2 = D / 10.0;
      const auto b1 = detail::uniform_ball(m1, r1);
      const auto b2 = detail::uniform_ball(m2, r2);
      const double exact = two_sphere_energy(b1, b2, D);
      const auto quad = mutual_energy_quadrature(b1, b2, D, 4);
      std::cout << csv_number(exact) << '\n';
      std::cout << "quadrature " << csv_number(quad.total) << '\n';
      std::cout << "relative_difference " << format_number(std::abs(quad.total - exact) / exact, 3)
                << '\n';
      return exit_ok;
    }

    if (*collapse) {
      std::vector<double> ds;
      std::istringstream dstream(deltas);
      for (std::string tok; std::getline(dstream, tok, ',');) ds.push_back(std::stod(tok));
      if (ds.empty()) throw std::invalid_argument("collapse-demo: empty delta list");
      std::ostringstream payload;
      payload << "delta,E0\n";
      for (const double d : ds)
        payload << csv_number(d) << ',' << csv_number(collapse_family_energy(cd_gamma, cd_K, cd_m, d))
                << '\n';
      detail::emit(cd_out, payload.str());
      return exit_ok;
    }
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_validation;
  }
  return exit_usage;
}

}  // namespace stellar::cli
