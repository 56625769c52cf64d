#pragma once

#include "ruin/piecewise_poly.hpp"
#include "ruin/random_stream.hpp"
#include "ruin/risk_models.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ruin {

struct SimConfig {
  std::size_t paths = 100000;
  double horizon = 0.0;    // continuous models
  std::size_t steps = 0;   // renewal walks
  double u = 1.0;
  std::uint64_t seed = 1;
  unsigned workers = 1;    // hint only; results never depend on it
};

struct SimEstimate {
  std::size_t paths = 0;
  std::size_t ruins = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  double mean_events = 0.0;   // claims (or steps) simulated per path
  double wall_seconds = 0.0;  // diagnostics only, never serialized

  /// Binomial standard error sqrt(p(1-p)/n).
  double standard_error() const;
};

struct Interval {
  double lo;
  double hi;
};

/// Wilson score interval at 99% coverage.
Interval wilson99(std::size_t successes, std::size_t trials);

/// Event times of a Poisson process with the given intensity density on
/// [0, T], by thinning against its exact maximum on [0, T].
std::vector<double> sample_nhpp(const PiecewisePoly& intensity, double T, RandomStream& rng);

/// Result of one simulated path.
struct PathOutcome {
  bool ruined = false;
  double ruin_time = 0.0;  // claim instant (or step index) of first ruin
  std::size_t events = 0;
};

/// ∫_0^t e^{-r(x)} p'(x) dx on [0, T], tabulated once and shared by all paths.
class DiscountedPremium {
 public:
  DiscountedPremium(const ModelB& m, double T);
  double operator()(double t) const;

 private:
  const ModelB* model_;
  bool undiscounted_;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
};

PathOutcome simulate_path(const ModelA& m, double u, double T, RandomStream& rng);
PathOutcome simulate_path(const ModelB& m, const DiscountedPremium& premium, double u, double T, RandomStream& rng);
PathOutcome simulate_path(const UnitedModel& m, double u, double T, RandomStream& rng);
PathOutcome simulate_path(const RenewalModel& m, double u, std::size_t steps, RandomStream& rng);

SimEstimate estimate_ruin_model_a(const ModelA& m, const SimConfig& cfg);
SimEstimate estimate_ruin_model_b(const ModelB& m, const SimConfig& cfg);
SimEstimate estimate_ruin_united(const UnitedModel& m, const SimConfig& cfg);
/// Uses cfg.steps as the walk length.
SimEstimate estimate_ruin_renewal(const RenewalModel& m, const SimConfig& cfg);

struct HorizonChoice {
  double T = 10.0;
  std::string warning;  // non-empty when the drift is too small to size T
};

/// 20 / |long-run drift per unit time|, at least 10.
HorizonChoice default_horizon(const ModelA& m);
HorizonChoice default_horizon(const ModelB& m);
HorizonChoice default_horizon(const UnitedModel& m);

/// Exact P(max_{k<=n} S_k > u) for walks whose increments have finite
/// support on a common lattice (spacing 1/q for some integer q <= 10000).
double dp_exact_ruin(const RenewalModel& m, double u, std::size_t n);

}  // namespace ruin
