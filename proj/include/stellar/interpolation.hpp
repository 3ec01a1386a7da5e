#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stellar {

/// Fritsch-Carlson monotone cubic slopes. A monotone data set yields a
/// monotone interpolant. `zero_left_slope` pins d[0] = 0 (used by the
/// pressure table so P = O(s^2) near s = 0).
inline std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y,
                                        bool zero_left_slope = false) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("pchip_slopes: bad sample arrays");
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    if (zero_left_slope) d[0] = 0.0;
    return d;
  }
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0)
      s = 0.0;
    else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0))
      s = 3.0 * d0;
    return s;
  };
  d[0] = zero_left_slope ? 0.0 : end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

/// Piecewise cubic Hermite interpolant over strictly increasing nodes.
class CubicHermite {
 public:
  CubicHermite() = default;
  CubicHermite(std::vector<double> x, std::vector<double> y, std::vector<double> slope)
      : x_(std::move(x)), y_(std::move(y)), d_(std::move(slope)) {
    if (x_.size() != y_.size() || x_.size() != d_.size() || x_.size() < 2)
      throw std::invalid_argument("CubicHermite: bad arrays");
  }

  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }

  double operator()(double xq) const {
    const auto [i, t, h] = locate(xq);
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y_[i] + (t3 - 2.0 * t2 + t) * h * d_[i] +
           (-2.0 * t3 + 3.0 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
  }

  double derivative(double xq) const {
    const auto [i, t, h] = locate(xq);
    const double t2 = t * t;
    return ((6.0 * t2 - 6.0 * t) * y_[i] + (3.0 * t2 - 4.0 * t + 1.0) * h * d_[i] +
            (-6.0 * t2 + 6.0 * t) * y_[i + 1] + (3.0 * t2 - 2.0 * t) * h * d_[i + 1]) /
           h;
  }

 private:
  struct Local {
    std::size_t i;
    double t;
    double h;
  };
  Local locate(double xq) const {
    if (xq < x_.front() || xq > x_.back() * (1.0 + 1e-12))
      throw std::domain_error("CubicHermite: query outside node range");
    xq = std::min(xq, x_.back());
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t i = (it == x_.begin()) ? 0 : std::size_t(it - x_.begin()) - 1;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    return {i, (xq - x_[i]) / h, h};
  }

  std::vector<double> x_, y_, d_;
};

}  // namespace stellar
