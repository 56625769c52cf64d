#pragma once

#include <array>
#include <vector>

namespace ruin {

/// Piecewise cubic function of time t >= 0.
///
/// Piece i covers [breakpoints[i], breakpoints[i+1]); the last piece extends
/// to infinity. Coefficients {c0, c1, c2, c3} are in the global variable t,
/// i.e. the piece value is c0 + c1 t + c2 t^2 + c3 t^3.
///
/// When `period > 0` the function repeats: f(t) = f(t mod period), the pieces
/// are then written in the in-period variable and the last piece ends at the
/// period.
class PiecewisePoly {
 public:
  using Coeffs = std::array<double, 4>;

  PiecewisePoly() : PiecewisePoly({0.0}, {Coeffs{0, 0, 0, 0}}) {}
  PiecewisePoly(std::vector<double> breakpoints, std::vector<Coeffs> pieces, double period = 0.0);

  static PiecewisePoly constant(double c) { return PiecewisePoly({0.0}, {Coeffs{c, 0, 0, 0}}); }
  static PiecewisePoly linear(double c0, double c1) { return PiecewisePoly({0.0}, {Coeffs{c0, c1, 0, 0}}); }

  double operator()(double t) const;

  /// Integral over [0, t] in closed form.
  double integral(double t) const;
  double integral(double a, double b) const { return integral(b) - integral(a); }

  /// Supremum / infimum over [a, b]; b may be +infinity. Exact: pieces are
  /// examined at their ends and at the real roots of their derivative.
  double max_on(double a, double b) const;
  double min_on(double a, double b) const;

  /// Breakpoints (including periodic repeats) strictly inside (a, b), ascending.
  std::vector<double> knots(double a, double b) const;

  bool is_identically_zero() const;
  /// True when the function is constant on every piece (degree zero everywhere).
  bool is_piecewise_constant() const;
  bool is_nonnegative() const { return min_on(0.0, kUnbounded) >= 0.0; }
  bool is_nondecreasing() const;

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<Coeffs>& pieces() const noexcept { return pieces_; }
  double period() const noexcept { return period_; }

 private:
  static constexpr double kUnbounded = 1e300;

  std::size_t piece_index(double local_t) const;
  double local(double t) const;
  double integral_local(double tau) const;
  template <class Cmp>
  double extremum(double a, double b, Cmp better, double init) const;

  std::vector<double> breakpoints_;
  std::vector<Coeffs> pieces_;
  double period_ = 0.0;
  std::vector<double> cumulative_;  // integral from 0 to each breakpoint
  double period_integral_ = 0.0;
};

namespace poly {

inline double eval(const PiecewisePoly::Coeffs& c, double x) noexcept {
  return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

inline double antiderivative(const PiecewisePoly::Coeffs& c, double x) noexcept {
  return (((c[3] / 4.0 * x + c[2] / 3.0) * x + c[1] / 2.0) * x + c[0]) * x;
}

}  // namespace poly

}  // namespace ruin
