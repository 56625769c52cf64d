#pragma once

#include "ruin/extended_real.hpp"
#include "ruin/risk_models.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace ruin {

/// Cumulant a(h, t) of a continuous-time surplus process.
struct CumulantFn {
  std::function<ExtendedReal(double h, double t)> eval;
  /// Values on an ascending time grid. Optional; defaults to pointwise `eval`.
  std::function<std::vector<double>(double h, const std::vector<double>& ts)> eval_grid;
  /// Upper bracket for the exponent search: the cumulant diverges at or beyond it.
  ExtendedReal h_abscissa = kInfinity;

  std::vector<double> on_grid(double h, const std::vector<double>& ts) const;
};

CumulantFn cumulant_fn(const ModelA& m);
CumulantFn cumulant_fn(const ModelB& m);
CumulantFn cumulant_fn(const UnitedModel& m);

namespace window {

/// [0, T].
struct FiniteHorizon {
  double T;
};
/// [0, t0 + l) with per-period contraction checked for t >= t0.
struct QuasiPeriodic {
  double t0;
  double l;
};
/// [0, l]; the exponent is fixed by a(h, l) <= 0.
struct Periodic {
  double l;
};
/// Branch start times plus the terminal slope rule.
struct United {
  std::vector<double> breakpoints;
};

}  // namespace window

using TimeWindow = std::variant<window::FiniteHorizon, window::QuasiPeriodic, window::Periodic, window::United>;

std::string window_kind(const TimeWindow& w);

struct SupResult {
  ExtendedReal value = 0.0;
  double argmax = 0.0;
};

/// sup of a(h, t) over the window. Finite windows: 512-point grid then
/// golden-section refinement around the three best local maxima; ties go to
/// the smallest t. United windows: max over breakpoints, +inf when the slope
/// after the last breakpoint is positive.
SupResult sup_cumulant(const CumulantFn& a, double h, const TimeWindow& w, std::size_t grid_points = 512);

struct Tolerances {
  double htol = 1e-9;
  double atol = 1e-10;
};

struct BoundCertificate {
  double L = 0.0;
  double C = 1.0;
  TimeWindow window = window::FiniteHorizon{1.0};
  ExtendedReal sup_at_L = 0.0;
  double argmax_t = 0.0;
  double h_lo = 0.0;  // final bisection bracket
  double h_hi = 0.0;
  double htol = 1e-9;
  double atol = 1e-10;
  bool degenerate = false;
  std::string method;
  std::vector<std::string> notes;

  /// min(1, C e^{-L u}).
  double bound(double u) const;
};

/// Largest h with `predicate(h)` true, by bisection on [0, cap). The
/// predicate must hold at 0 and be monotone. Returns the lower bracket end.
struct Bisection {
  double lo = 0.0;
  double hi = 0.0;
};
Bisection bisect_largest(const std::function<bool(double)>& predicate, ExtendedReal cap, double htol);

/// Certified exponent for the window. Finite and united windows certify
/// sup_t a(L, t) <= atol and take C = exp(max(0, sup)). The periodic window
/// certifies a(L, l) <= atol, the quasi-periodic one certifies the per-period
/// increment; both absorb the window supremum into C.
BoundCertificate adjustment_coefficient(const CumulantFn& a, const TimeWindow& w, ExtendedReal h_max_hint = kInfinity,
                                        Tolerances tol = {});

/// Exponent from E e^{hY(l)} <= 1 and window constant sup_{0<=t<=l} e^{a(L,t)}.
BoundCertificate periodic_exponent(const ModelB& m, double l, Tolerances tol = {});

/// Window constant C1 = sup_{0<=t<t0+l} e^{a(L,t)} for a given exponent; throws
/// HypothesisViolated when the per-period contraction fails on the grid.
BoundCertificate quasi_periodic_constant(const ModelB& m, double l, double t0, double L_tilde, Tolerances tol = {});

struct UnitedExponents {
  BoundCertificate overall;
  std::vector<double> branch;  // L^(i) per branch
};
UnitedExponents united_exponents(const UnitedModel& m, Tolerances tol = {});

struct OptimizedBound {
  double bound = 1.0;
  double h_star = 0.0;
};

/// inf over h in [h_lo, h_hi] of exp(-h u + log_sup_mgf(h)), capped at 1.
/// `log_sup_mgf` is log sup_t E e^{hS(t)} (or log sup_n E e^{hS_n}); it must be
/// convex where finite.
OptimizedBound optimized_bound(const std::function<ExtendedReal(double)>& log_sup_mgf, double u, double h_lo,
                               double h_hi);

/// log sup over the window of E e^{hS(t)}, usable with optimized_bound.
std::function<ExtendedReal(double)> log_sup_mgf(const CumulantFn& a, const TimeWindow& w);

}  // namespace ruin
