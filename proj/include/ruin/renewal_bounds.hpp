#pragma once

#include "ruin/extended_real.hpp"
#include "ruin/risk_models.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ruin {

/// Truncation and exponent parameters of the moment-functional bounds.
/// Unset c_star / C_star fall back to the tightest values the checked
/// hypotheses permit (see corollary9_bound).
struct TruncationParams {
  double C = 0.0;  // premium truncation level
  double H = 0.0;  // claim exponent cap
  std::size_t m = 1;
  std::optional<double> c_star;
  std::optional<double> C_star;
};

struct RenewalBoundReport {
  int corollary = 8;
  std::size_t m = 1;
  double C = 0.0;
  double H = 0.0;
  double c_star = 0.0;
  double C_star = 0.0;
  double h = 0.0;
  double C_m = 0.0;
  std::vector<double> A;  // A_1..A_{n_max}
  std::vector<double> B;  // B_1..B_{n_max} at the checked exponent
  /// True when "for all n >= m" was decided exactly through the periodic tail;
  /// false means the hypotheses were only checked up to n_max.
  bool tail_closed = false;
  std::vector<std::string> hypotheses;

  /// e^{h (C_m - u)}, capped at 1.
  double bound(double u) const;
};

/// C_m = max_{k<=m} E S_k - E S_m.
double c_m_constant(const RenewalModel& model, std::size_t m_index);

/// M_m(h) = max_{k<=m} E e^{h S_k}. Asserts M_m(h) <= e^{h C_m} E e^{h S_m}.
ExtendedReal m_m_envelope(const RenewalModel& model, double h, std::size_t m_index);

/// A_n(C) = Σ_{k<=n} E[X_k ; X_k > C], X_k = p_k θ_k.
double a_n_functional(const RenewalModel& model, double C, std::size_t n);

/// B_n(H, C) = H^{-2} Σ E g(H Z_k) + (1/2) Σ E[X_k^2 ; X_k <= C].
ExtendedReal b_n_functional(const RenewalModel& model, double H, double C, std::size_t n);

/// Per-step summands used by the functionals (exposed for oracles and the CLI).
double step_tail_premium(const RenewalStep& step, double C);
double step_truncated_premium_square(const RenewalStep& step, double C);
ExtendedReal step_claim_g(const RenewalStep& step, double H);

/// Checks A_n(C) + h B_n(h, C) <= -E S_n for all n >= m; concludes
/// sup_n E e^{hS_n} <= e^{h C_m} and ψ(u) <= e^{h (C_m - u)}.
RenewalBoundReport corollary8_bound(const RenewalModel& model, const TruncationParams& params, double h,
                                    std::size_t n_max);

/// Checks A_n(C) <= -c* E S_n and B_n(H, C) <= C* (-E S_n) for n >= m, then
/// applies the conclusion above with h = min{H, (1 - c*)/C*}.
RenewalBoundReport corollary9_bound(const RenewalModel& model, const TruncationParams& params, std::size_t n_max);

/// Searches truncation levels C (and stabilisation indices m <= n_max) for
/// which the per-period ratios certify the hypotheses above.
RenewalBoundReport corollary10_search(const RenewalModel& model, double H, std::size_t n_max);

/// log sup_{n>=1} E e^{h S_n}. Exact for eventually periodic models (the
/// per-period log-MGF decides the tail); otherwise the max over n <= n_max.
ExtendedReal renewal_log_sup_mgf(const RenewalModel& model, double h, std::size_t n_max);

}  // namespace ruin
