#include "ruin/piecewise_poly.hpp"

#include "ruin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace ruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Real roots of the derivative c1 + 2 c2 x + 3 c3 x^2.
std::vector<double> critical_points(const PiecewisePoly::Coeffs& c) {
  const double qa = 3.0 * c[3];
  const double qb = 2.0 * c[2];
  const double qc = c[1];
  std::vector<double> roots;
  if (qa == 0.0) {
    if (qb != 0.0) roots.push_back(-qc / qb);
    return roots;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return roots;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (qb + std::copysign(sq, qb));
  if (q != 0.0) roots.push_back(q / qa);
  if (q != 0.0) roots.push_back(qc / q);
  else roots.push_back(0.0);
  return roots;
}

int degree(const PiecewisePoly::Coeffs& c) {
  for (int d = 3; d > 0; --d) {
    if (c[static_cast<std::size_t>(d)] != 0.0) return d;
  }
  return 0;
}

// Limit of the polynomial as x -> +infinity.
double limit_at_infinity(const PiecewisePoly::Coeffs& c) {
  const int d = degree(c);
  if (d == 0) return c[0];
  return c[static_cast<std::size_t>(d)] > 0 ? kInf : -kInf;
}

}  // namespace

PiecewisePoly::PiecewisePoly(std::vector<double> breakpoints, std::vector<Coeffs> pieces, double period)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)), period_(period) {
  if (breakpoints_.empty() || breakpoints_.size() != pieces_.size()) {
    throw DomainError("piecewise polynomial needs one coefficient set per breakpoint");
  }
  if (breakpoints_.front() != 0.0) throw DomainError("first breakpoint must be 0");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) throw DomainError("breakpoints must be strictly ascending");
  }
  for (const auto& c : pieces_) {
    for (double v : c) {
      if (!std::isfinite(v)) throw DomainError("polynomial coefficients must be finite");
    }
  }
  if (period_ < 0.0 || !std::isfinite(period_)) throw DomainError("period must be finite and nonnegative");
  if (period_ > 0.0 && breakpoints_.back() >= period_) throw DomainError("breakpoints must lie inside the period");

  cumulative_.resize(breakpoints_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    const auto& c = pieces_[i - 1];
    cumulative_[i] = cumulative_[i - 1] + poly::antiderivative(c, breakpoints_[i]) -
                     poly::antiderivative(c, breakpoints_[i - 1]);
  }
  if (period_ > 0.0) period_integral_ = integral_local(period_);
}

std::size_t PiecewisePoly::piece_index(double local_t) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), local_t);
  return it == breakpoints_.begin() ? 0 : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double PiecewisePoly::local(double t) const {
  if (period_ <= 0.0) return t;
  double tau = std::fmod(t, period_);
  if (tau < 0.0) tau += period_;
  return tau;
}

double PiecewisePoly::operator()(double t) const {
  const double tau = local(t);
  return poly::eval(pieces_[piece_index(tau)], tau);
}

double PiecewisePoly::integral_local(double tau) const {
  const std::size_t i = piece_index(tau);
  const auto& c = pieces_[i];
  return cumulative_[i] + poly::antiderivative(c, tau) - poly::antiderivative(c, breakpoints_[i]);
}

double PiecewisePoly::integral(double t) const {
  if (t <= 0.0) return 0.0;
  if (period_ <= 0.0) return integral_local(t);
  const double cycles = std::floor(t / period_);
  return cycles * period_integral_ + integral_local(t - cycles * period_);
}

std::vector<double> PiecewisePoly::knots(double a, double b) const {
  std::vector<double> out;
  if (!(b > a)) return out;
  if (period_ <= 0.0) {
    for (double x : breakpoints_) {
      if (x > a && x < b) out.push_back(x);
    }
    return out;
  }
  double base = std::floor(std::max(a, 0.0) / period_) * period_;
  for (; base < b; base += period_) {
    for (double x : breakpoints_) {
      const double k = base + x;
      if (k > a && k < b) out.push_back(k);
    }
  }
  return out;
}

template <class Cmp>
double PiecewisePoly::extremum(double a, double b, Cmp better, double init) const {
  if (b < a) throw DomainError("empty interval");
  if (period_ > 0.0 && b - a >= period_) {
    a = 0.0;
    b = period_;
  }
  std::vector<double> cuts{a};
  for (double k : knots(a, b)) cuts.push_back(k);
  const bool unbounded = b >= kUnbounded;
  if (!unbounded) cuts.push_back(b);

  double best = init;
  auto consider = [&](double v) {
    if (better(v, best)) best = v;
  };
  for (std::size_t s = 0; s < cuts.size(); ++s) {
    const double lo = cuts[s];
    const bool last = s + 1 == cuts.size();
    if (last && !unbounded) {
      consider((*this)(lo));
      break;
    }
    const double hi = last ? kInf : cuts[s + 1];
    // The piece in force on (lo, hi) in the local variable.
    const double shift = period_ > 0.0 ? std::floor(lo / period_ + 1e-12) * period_ : 0.0;
    const double llo = lo - shift;
    const double lhi = hi - shift;
    const auto& c = pieces_[piece_index(llo)];
    consider(poly::eval(c, llo));
    if (std::isinf(lhi)) {
      consider(limit_at_infinity(c));
    } else {
      consider(poly::eval(c, lhi));
    }
    for (double x : critical_points(c)) {
      if (x > llo && x < lhi) consider(poly::eval(c, x));
    }
  }
  return best;
}

double PiecewisePoly::max_on(double a, double b) const {
  return extremum(a, std::isinf(b) ? kUnbounded : b, std::greater<>{}, -kInf);
}

double PiecewisePoly::min_on(double a, double b) const {
  return extremum(a, std::isinf(b) ? kUnbounded : b, std::less<>{}, kInf);
}

bool PiecewisePoly::is_identically_zero() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Coeffs& c) {
    return c[0] == 0.0 && c[1] == 0.0 && c[2] == 0.0 && c[3] == 0.0;
  });
}

bool PiecewisePoly::is_piecewise_constant() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Coeffs& c) { return degree(c) == 0; });
}

bool PiecewisePoly::is_nondecreasing() const {
  constexpr double tol = 1e-12;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& c = pieces_[i];
    const Coeffs deriv{c[1], 2.0 * c[2], 3.0 * c[3], 0.0};
    const double lo = breakpoints_[i];
    const double hi = i + 1 < breakpoints_.size() ? breakpoints_[i + 1] : (period_ > 0.0 ? period_ : kInf);
    double dmin = std::min(poly::eval(deriv, lo), std::isinf(hi) ? limit_at_infinity(deriv) : poly::eval(deriv, hi));
    for (double x : critical_points(deriv)) {
      if (x > lo && x < hi) dmin = std::min(dmin, poly::eval(deriv, x));
    }
    if (dmin < -tol) return false;
    if (i + 1 < breakpoints_.size() && poly::eval(c, hi) > poly::eval(pieces_[i + 1], hi) + tol) return false;
  }
  if (period_ > 0.0) {
    // A periodic function can only be nondecreasing when it is constant.
    return max_on(0.0, period_) - min_on(0.0, period_) <= tol;
  }
  return true;
}

}  // namespace ruin
