#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "stellar/errors.hpp"

namespace stellar {

/// Dormand-Prince 5(4) embedded pair for a two-component state, with the
/// standard fourth-order continuous extension stored per accepted step.
/// FSAL: the last stage of a step is the first stage of the next.
class Dopri5 {
 public:
  using State = std::array<double, 2>;

  struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 1e-3;
    double h_max = 0.0;  // 0 => unrestricted
    double r_max = 1e4;
    std::size_t max_steps = 20'000'000;
  };

  struct Segment {
    double r0 = 0.0;
    double h = 0.0;
    std::array<State, 5> rcont{};  // dense-output coefficients
  };

  struct Solution {
    std::vector<Segment> segments;
    double r_end = 0.0;
    State y_end{};
    bool stopped = false;  // stop predicate fired before r_max

    State eval(double r) const {
      const Segment& s = find(r);
      const double theta = (r - s.r0) / s.h;
      const double theta1 = 1.0 - theta;
      State y{};
      for (int c = 0; c < 2; ++c) {
        y[c] = s.rcont[0][c] +
               theta * (s.rcont[1][c] +
                        theta1 * (s.rcont[2][c] +
                                  theta * (s.rcont[3][c] + theta1 * s.rcont[4][c])));
      }
      return y;
    }

   private:
    const Segment& find(double r) const {
      if (segments.empty()) throw numeric_error("dense output requested from empty solution");
      std::size_t lo = 0, hi = segments.size() - 1;
      while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (segments[mid].r0 <= r)
          lo = mid;
        else
          hi = mid - 1;
      }
      return segments[lo];
    }
  };

  /// Integrates y' = f(r, y) from (r0, y0). After every accepted step calls
  /// stop(r, y); a true return ends the integration with stopped = true.
  template <class RHS, class Stop>
  static Solution integrate(RHS&& f, double r0, State y0, const Options& opt, Stop&& stop) {
    Solution out;
    double r = r0;
    State y = y0;
    State k1 = f(r, y);
    double h = opt.h_init;
    const double hmax = opt.h_max > 0.0 ? opt.h_max : std::numeric_limits<double>::infinity();

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
      if (r >= opt.r_max) break;
      h = std::min({h, hmax, opt.r_max - r});
      if (h < 1e-14 * std::max(1.0, std::abs(r)))
        throw numeric_error("step size underflow at r = " + std::to_string(r));

      State k2, k3, k4, k5, k6, k7, y1;
      auto lin = [&](std::initializer_list<std::pair<double, const State*>> terms) {
        State s = y;
        for (const auto& [a, k] : terms)
          for (int c = 0; c < 2; ++c) s[c] += h * a * (*k)[c];
        return s;
      };
      k2 = f(r + c2 * h, lin({{a21, &k1}}));
      k3 = f(r + c3 * h, lin({{a31, &k1}, {a32, &k2}}));
      k4 = f(r + c4 * h, lin({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      k5 = f(r + c5 * h, lin({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      k6 = f(r + h, lin({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      y1 = lin({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      k7 = f(r + h, y1);

      double err = 0.0;
      for (int c = 0; c < 2; ++c) {
        const double e = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] + e6 * k6[c] +
                              e7 * k7[c]);
        const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[c]), std::abs(y1[c]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(0.5 * err);

      if (err <= 1.0) {
        Segment seg;
        seg.r0 = r;
        seg.h = h;
        for (int c = 0; c < 2; ++c) {
          const double dy = y1[c] - y[c];
          const double bspl = h * k1[c] - dy;
          seg.rcont[0][c] = y[c];
          seg.rcont[1][c] = dy;
          seg.rcont[2][c] = bspl;
          seg.rcont[3][c] = dy - h * k7[c] - bspl;
          seg.rcont[4][c] = h * (d1 * k1[c] + d3 * k3[c] + d4 * k4[c] + d5 * k5[c] + d6 * k6[c] +
                                 d7 * k7[c]);
        }
        out.segments.push_back(seg);
        r += h;
        y = y1;
        k1 = k7;
        if (stop(r, y)) {
          out.stopped = true;
          break;
        }
      }
      const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      h *= fac;
    }
    out.r_end = r;
    out.y_end = y;
    return out;
  }

 private:
  // Dormand-Prince tableau
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

}  // namespace stellar
