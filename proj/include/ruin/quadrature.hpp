#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

namespace ruin::quad {

inline constexpr double kAbsTol = 1e-12;
inline constexpr double kRelTol = 1e-9;

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]; b may be +infinity.
template <class F>
Result integrate(F&& f, double a, double b, double rel_tol = kRelTol, double abs_tol = kAbsTol) {
  if (!(b > a)) return {};
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double err = 0.0;
  double l1 = 0.0;
  // Boost stops on a relative criterion only. Convert the absolute target
  // using a one-panel estimate of the L1 norm so that either target suffices.
  GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  const double tol = l1 > 0.0 ? std::max(rel_tol, std::min(abs_tol / l1, 0.1)) : rel_tol;
  const double value = GK::integrate(f, a, b, 15, tol, &err, &l1);
  return {value, err};
}

/// Single non-adaptive 15-point Kronrod panel. Used for short smooth pieces.
template <class F>
double panel(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const auto& x = GK::abscissa();
  const auto& w = GK::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sum = w[0] * f(c);
  for (std::size_t i = 1; i < x.size(); ++i) {
    sum += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
  }
  return sum * h;
}

}  // namespace ruin::quad
