#pragma once

#include "ruin/distributions.hpp"
#include "ruin/extended_real.hpp"
#include "ruin/piecewise_poly.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ruin {

/// a(h, t) = log E e^{h S(t)} together with the quadrature error spent on it.
struct CumulantResult {
  ExtendedReal value = 0.0;
  double error = 0.0;

  bool diverged() const noexcept { return is_divergent(value); }
};

/// Compound Poisson surplus with time-varying intensity Λ'(t), premium
/// density p'(t), and claim law Z(t). Λ(0) = p(0) = 0 by construction.
struct ModelA {
  PiecewisePoly intensity;
  PiecewisePoly premium;
  TimeVaryingClaimFamily claims;

  ModelA(PiecewisePoly intensity_density, PiecewisePoly premium_density, TimeVaryingClaimFamily claim_family);
};

/// Model A under deterministic discounting r(t) (r(0) = 0, nondecreasing).
/// Interest is fixed at the boundary case α(t1, t2) = e^{r(t2) - r(t1)} - 1,
/// β ≡ 0, which gives the largest ruin probability the discounted bound has
/// to cover.
struct ModelB {
  ModelA base;
  PiecewisePoly discount;

  ModelB(ModelA base_model, PiecewisePoly discount_fn);
  static ModelB undiscounted(ModelA base_model) { return ModelB(std::move(base_model), PiecewisePoly{}); }
};

struct Branch {
  double start;
  double intensity;
  double premium_rate;
  Distribution claims;
};

/// Independent homogeneous branches; branch i opens at `start` (0 for the first,
/// strictly increasing afterwards).
struct UnitedModel {
  std::vector<Branch> branches;

  explicit UnitedModel(std::vector<Branch> b);
};

struct DecomposedStep {
  Distribution claim;
  Distribution inter_time;
  double premium_rate;
};
struct DirectStep {
  Distribution increment;
};
using RenewalStep = std::variant<DecomposedStep, DirectStep>;

/// Discrete-time walk S_n = Y_1 + ... + Y_n with independent steps.
///
/// Either an explicit preperiod followed by an endlessly repeated period
/// (eventually periodic; a finite list when the period is empty), or a step
/// generator k -> law of Y_k for schedules that never repeat.
class RenewalModel {
 public:
  RenewalModel(std::vector<RenewalStep> preperiod, std::vector<RenewalStep> period);
  RenewalModel(std::function<RenewalStep(std::size_t)> generator, bool decomposed, std::string name);

  /// Law of Y_k, k >= 1.
  RenewalStep step(std::size_t k) const;

  bool eventually_periodic() const noexcept { return !generator_ && !period_.empty(); }
  /// Number of available steps; nullopt when unbounded.
  std::optional<std::size_t> length() const;
  std::size_t preperiod_length() const noexcept { return preperiod_.size(); }
  std::size_t period_length() const noexcept { return period_.size(); }
  /// All steps are in (claim, inter-time, premium) form.
  bool decomposed() const noexcept { return decomposed_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::vector<RenewalStep> preperiod_;
  std::vector<RenewalStep> period_;
  std::function<RenewalStep(std::size_t)> generator_;
  bool decomposed_ = true;
  std::string name_;
};

/// a(h,t) = ∫_0^t Q(h, x) dΛ(x) - h p(t).
CumulantResult cumulant_model_a(const ModelA& m, double h, double t);

/// a(h,b) - a(h,a), the cumulant of the increment S(b) - S(a).
CumulantResult cumulant_increment(const ModelA& m, double h, double a, double b);

/// a(h,t) = -h ∫_0^t e^{-r(x)} dp(x) + ∫_0^t Q(h e^{-r(x)}, x) dΛ(x).
CumulantResult cumulant_model_b(const ModelB& m, double h, double t);

/// Cumulant of the discounted increment Y(b) - Y(a).
CumulantResult cumulant_increment(const ModelB& m, double h, double a, double b);

/// Per-branch cumulant λ (E e^{hZ} - 1) - h p.
ExtendedReal branch_cumulant(const Branch& b, double h);

/// a(h,t) = Σ_i (t - t_i)^+ a_i(h); piecewise linear in t.
CumulantResult cumulant_united(const UnitedModel& m, double h, double t);

/// log E e^{h Y} for one step.
ExtendedReal step_log_mgf(const RenewalStep& step, double h);
double step_mean(const RenewalStep& step);
/// Smallest abscissa over the step's exponential moments.
ExtendedReal step_abscissa(const RenewalStep& step);

/// log E e^{h S_n} = Σ_{k<=n} log E e^{h Y_k}.
ExtendedReal renewal_log_mgf(const RenewalModel& m, double h, std::size_t n);

/// E S_1, ..., E S_n.
std::vector<double> renewal_expected_sums(const RenewalModel& m, std::size_t n);

struct QuasiPeriodicReport {
  bool pass = true;
  std::string condition;  // "claims", "intensity" or "premium" when failing
  double t = 0.0;
  double h = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Grid check of the per-period contraction conditions: discounted claim
/// transforms, discounted intensity non-increasing over one period, and
/// discounted premium density non-decreasing over one period. PASS is grid
/// evidence, not a proof.
QuasiPeriodicReport check_quasi_periodic(const ModelB& m, double l, const std::vector<double>& h_grid,
                                         const std::vector<double>& t_grid);

}  // namespace ruin
