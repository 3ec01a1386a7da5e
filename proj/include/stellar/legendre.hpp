#pragma once

#include <stdexcept>
#include <vector>

namespace stellar {

/// Legendre polynomial P_l(x) by the three-term recurrence.
inline double legendre_p(int l, double x) {
  if (l < 0) throw std::invalid_argument("legendre_p: negative degree");
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// P_0(x) ... P_lmax(x) in one pass.
inline std::vector<double> legendre_all(int lmax, double x) {
  std::vector<double> p(static_cast<std::size_t>(lmax) + 1);
  p[0] = 1.0;
  if (lmax >= 1) p[1] = x;
  for (int k = 2; k <= lmax; ++k)
    p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
  return p;
}

}  // namespace stellar
