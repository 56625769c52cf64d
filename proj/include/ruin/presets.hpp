#pragma once

#include "ruin/risk_models.hpp"

#include <string>

namespace ruin::presets {

/// Unit-rate Poisson claims, Exp(1) sizes, premium density 4t repeated with
/// period 2. Exponent 3/4, window constant e^{3/2}.
ModelB periodic_premium_model();
inline constexpr double kPeriodicPremiumPeriod = 2.0;

/// Branch 0 from t=0 (λ=1, Exp(1), p=4) and an unprofitable branch 1 from
/// t=2 (λ=1, Exp(1), p=1).
UnitedModel two_branch_model();

/// Y_k ~ Normal(-(27/64)(2k-1), 1), so E S_n = -(27/64) n^2.
RenewalModel accelerating_drift_walk();

/// log sup_{n>=1} E e^{hS_n} with n relaxed to a continuous variable:
/// sup_x {x h^2/2 - (27/64) x^2 h} = 4h^3/27. An upper bound for the walk above.
double accelerating_drift_log_sup_mgf(double h);

/// Homogeneous compound Poisson: rate λ, Exp(mu) claims, premium rate p.
ModelA homogeneous_model(double lambda = 1.0, double claim_rate = 1.0, double premium_rate = 2.0);

}  // namespace ruin::presets
