#include "ruin/presets.hpp"

namespace ruin::presets {

ModelB periodic_premium_model() {
  ModelA base(PiecewisePoly::constant(1.0),
              PiecewisePoly({0.0}, {PiecewisePoly::Coeffs{0.0, 4.0, 0.0, 0.0}}, kPeriodicPremiumPeriod),
              TimeVaryingClaimFamily(Distribution::exponential(1.0)));
  return ModelB::undiscounted(std::move(base));
}

UnitedModel two_branch_model() {
  return UnitedModel({Branch{0.0, 1.0, 4.0, Distribution::exponential(1.0)},
                      Branch{2.0, 1.0, 1.0, Distribution::exponential(1.0)}});
}

RenewalModel accelerating_drift_walk() {
  return RenewalModel(
      [](std::size_t k) -> RenewalStep {
        return DirectStep{Distribution::normal(-27.0 / 64.0 * (2.0 * static_cast<double>(k) - 1.0), 1.0)};
      },
      false, "example3");
}

double accelerating_drift_log_sup_mgf(double h) { return 4.0 * h * h * h / 27.0; }

ModelA homogeneous_model(double lambda, double claim_rate, double premium_rate) {
  return ModelA(PiecewisePoly::constant(lambda), PiecewisePoly::constant(premium_rate),
                TimeVaryingClaimFamily(Distribution::exponential(claim_rate)));
}

}  // namespace ruin::presets
