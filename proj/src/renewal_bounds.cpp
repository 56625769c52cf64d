#include "ruin/renewal_bounds.hpp"

#include "ruin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace ruin {

namespace {

// Partial sums D_n = d_1 + ... + d_n of a per-step quantity. For eventually
// periodic models D_{n+P} = D_n + Δ once n passes the preperiod, which turns
// "for all n >= m" into finitely many comparisons.
class PartialSums {
 public:
  PartialSums(const RenewalModel& model, const std::function<double(std::size_t)>& per_step, std::size_t n_max)
      : periodic_(model.eventually_periodic()) {
    if (periodic_) {
      q_ = model.preperiod_length();
      P_ = model.period_length();
      horizon_ = q_ + P_;
    } else {
      horizon_ = model.length() ? std::min(*model.length(), n_max) : n_max;
      exact_ = model.length().has_value() && *model.length() <= n_max;
    }
    prefix_.assign(horizon_ + 1, 0.0);
    double mag = 0.0;
    for (std::size_t k = 1; k <= horizon_; ++k) {
      const double d = per_step(k);
      prefix_[k] = prefix_[k - 1] + d;
      mag += std::abs(d);
    }
    tol_ = 1e-12 * (1.0 + mag);
    if (periodic_) delta_ = prefix_[q_ + P_] - prefix_[q_];
    if (periodic_) exact_ = true;
  }

  /// True when checks cover every n (periodic tail or a finite walk).
  bool exact() const noexcept { return exact_; }
  std::size_t checked_horizon() const noexcept { return horizon_; }

  double at(std::size_t n) const {
    if (n <= horizon_) return prefix_[n];
    if (!periodic_) throw DomainError("partial sum beyond the checked horizon");
    const std::size_t j = (n - q_ - 1) / P_;
    const std::size_t r = n - q_ - j * P_;
    return prefix_[q_ + r] + static_cast<double>(j) * delta_;
  }

  double slope() const noexcept { return delta_; }

  /// Smallest n >= m with D_n < -tol, if any.
  std::optional<std::size_t> first_failure(std::size_t m) const {
    if (!periodic_) {
      for (std::size_t n = m; n <= horizon_; ++n) {
        if (prefix_[n] < -tol_) return n;
      }
      return std::nullopt;
    }
    const std::size_t start = std::max(m, q_ + 1);
    for (std::size_t n = m; n < start + P_; ++n) {
      if (at(n) < -tol_) return n;
    }
    if (delta_ >= -tol_) return std::nullopt;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t n0 = start; n0 < start + P_; ++n0) {
      const double j = std::floor((at(n0) + tol_) / -delta_) + 1.0;
      best = std::min(best, n0 + static_cast<std::size_t>(j) * P_);
    }
    return best;
  }

  /// Largest n with D_n < -tol (0 when none); nullopt when failures never stop.
  std::optional<std::size_t> last_failure() const {
    std::size_t last = 0;
    if (!periodic_) {
      for (std::size_t n = 1; n <= horizon_; ++n) {
        if (prefix_[n] < -tol_) last = n;
      }
      return last;
    }
    for (std::size_t n = 1; n <= q_; ++n) {
      if (prefix_[n] < -tol_) last = n;
    }
    for (std::size_t n0 = q_ + 1; n0 <= q_ + P_; ++n0) {
      const double d0 = prefix_[n0];
      if (d0 >= -tol_) continue;
      if (delta_ <= tol_) return std::nullopt;
      const double j_last = std::ceil((-tol_ - d0) / delta_) - 1.0;
      last = std::max(last, n0 + static_cast<std::size_t>(std::max(0.0, j_last)) * P_);
    }
    return last;
  }

  /// sup_{n>=m} num_n / den_n for two partial-sum sequences with positive
  /// denominators; ratios of affine sequences are monotone in the period count,
  /// so the supremum is a window maximum or the slope ratio.
  static double sup_ratio(const PartialSums& num, const PartialSums& den, std::size_t m) {
    double best = -std::numeric_limits<double>::infinity();
    const std::size_t end = num.periodic_ ? std::max(m, num.q_ + 1) + num.P_ : num.horizon_ + 1;
    for (std::size_t n = m; n < end; ++n) best = std::max(best, num.at(n) / den.at(n));
    if (num.periodic_ && den.delta_ > 0.0) best = std::max(best, num.delta_ / den.delta_);
    return best;
  }

 private:
  bool periodic_ = false;
  bool exact_ = false;
  std::size_t q_ = 0;
  std::size_t P_ = 0;
  std::size_t horizon_ = 0;
  std::vector<double> prefix_;
  double delta_ = 0.0;
  double tol_ = 0.0;
};

const DecomposedStep& as_decomposed(const RenewalStep& step) {
  const auto* d = std::get_if<DecomposedStep>(&step);
  if (!d) throw UnsupportedVariant("direct-increment steps have no claim/premium decomposition");
  return *d;
}

void require_decomposed(const RenewalModel& model) {
  if (!model.decomposed()) {
    throw UnsupportedVariant("moment-functional bounds need (claim, inter-time, premium) steps");
  }
}

std::size_t working_horizon(const RenewalModel& model, std::size_t n_max) {
  if (model.length()) return std::min(*model.length(), n_max);
  return n_max;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

double RenewalBoundReport::bound(double u) const { return std::min(1.0, std::exp(h * (C_m - u))); }

double c_m_constant(const RenewalModel& model, std::size_t m_index) {
  if (m_index == 0) throw DomainError("m must be >= 1");
  const auto sums = renewal_expected_sums(model, m_index);
  return std::max(0.0, *std::max_element(sums.begin(), sums.end()) - sums.back());
}

ExtendedReal m_m_envelope(const RenewalModel& model, double h, std::size_t m_index) {
  if (m_index == 0) throw DomainError("m must be >= 1");
  if (!(h >= 0.0)) throw DomainError("h must be >= 0");
  double best = -kInfinity;
  double acc = 0.0;
  for (std::size_t k = 1; k <= m_index; ++k) {
    const ExtendedReal v = h == 0.0 ? 0.0 : step_log_mgf(model.step(k), h);
    if (is_divergent(v)) return kInfinity;
    acc += v;
    best = std::max(best, acc);
  }
  const double envelope = h * c_m_constant(model, m_index) + acc;
  if (best > envelope + 1e-12 * std::max(1.0, std::abs(envelope))) {
    throw std::logic_error("prefix-max envelope exceeds e^{hC_m} E e^{hS_m}");
  }
  return std::exp(best);
}

double step_tail_premium(const RenewalStep& step, double C) {
  const auto& s = as_decomposed(step);
  if (s.premium_rate == 0.0) return 0.0;
  return s.premium_rate * upper_tail_mean(s.inter_time, C / s.premium_rate);
}

double step_truncated_premium_square(const RenewalStep& step, double C) {
  const auto& s = as_decomposed(step);
  if (s.premium_rate == 0.0) return 0.0;
  return s.premium_rate * s.premium_rate * truncated_second_moment(s.inter_time, C / s.premium_rate);
}

ExtendedReal step_claim_g(const RenewalStep& step, double H) { return g_moment(as_decomposed(step).claim, H); }

double a_n_functional(const RenewalModel& model, double C, std::size_t n) {
  if (n == 0) throw DomainError("n must be >= 1");
  if (!(C >= 0.0)) throw DomainError("C must be >= 0");
  double acc = 0.0;
  for (std::size_t k = 1; k <= n; ++k) acc += step_tail_premium(model.step(k), C);
  return acc;
}

ExtendedReal b_n_functional(const RenewalModel& model, double H, double C, std::size_t n) {
  if (n == 0) throw DomainError("n must be >= 1");
  if (!(H > 0.0)) throw DomainError("H must be positive");
  if (!(C >= 0.0)) throw DomainError("C must be >= 0");
  double claims = 0.0;
  double premiums = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto step = model.step(k);
    const ExtendedReal g = step_claim_g(step, H);
    if (is_divergent(g)) return kInfinity;
    claims += g;
    premiums += step_truncated_premium_square(step, C);
  }
  return claims / (H * H) + 0.5 * premiums;
}

RenewalBoundReport corollary8_bound(const RenewalModel& model, const TruncationParams& params, double h,
                                    std::size_t n_max) {
  require_decomposed(model);
  if (!(h > 0.0)) throw DomainError("h must be positive");
  if (!(params.C >= 0.0)) throw DomainError("C must be >= 0");
  if (params.m == 0 || n_max == 0) throw DomainError("m and n_max must be >= 1");

  // d_k = -E Y_k - E[X_k; X_k > C] - (E g(h Z_k)/h + (h/2) E[X_k^2; X_k <= C])
  auto per_step = [&](std::size_t k) {
    const auto step = model.step(k);
    const ExtendedReal g = step_claim_g(step, h);
    if (is_divergent(g)) return -kInfinity;
    return -step_mean(step) - step_tail_premium(step, params.C) - g / h -
           0.5 * h * step_truncated_premium_square(step, params.C);
  };
  const PartialSums slack(model, per_step, n_max);
  if (auto fail = slack.first_failure(params.m)) {
    throw HypothesisViolated("A_n(C) + h B_n(h,C) <= -E S_n fails at n = " + std::to_string(*fail),
                             static_cast<long>(*fail));
  }

  RenewalBoundReport rep;
  rep.corollary = 8;
  rep.m = params.m;
  rep.C = params.C;
  rep.H = h;
  rep.h = h;
  rep.C_m = c_m_constant(model, params.m);
  rep.tail_closed = slack.exact();
  const std::size_t horizon = working_horizon(model, n_max);
  double a = 0.0;
  double b = 0.0;
  for (std::size_t k = 1; k <= horizon; ++k) {
    const auto step = model.step(k);
    a += step_tail_premium(step, params.C);
    b += step_claim_g(step, h) / (h * h) + 0.5 * step_truncated_premium_square(step, params.C);
    rep.A.push_back(a);
    rep.B.push_back(b);
  }
  rep.hypotheses.push_back("A_n(C) + h B_n(h,C) <= -E S_n for all n >= " + std::to_string(params.m) +
                           (rep.tail_closed ? " (decided exactly)"
                                            : " (finite-horizon evidence up to n = " + std::to_string(horizon) + ")"));
  return rep;
}

RenewalBoundReport corollary9_bound(const RenewalModel& model, const TruncationParams& params, std::size_t n_max) {
  require_decomposed(model);
  if (!(params.H > 0.0)) throw DomainError("H must be positive");
  if (!(params.C >= 0.0)) throw DomainError("C must be >= 0");
  if (params.m == 0 || n_max == 0) throw DomainError("m and n_max must be >= 1");

  const PartialSums drift(model, [&](std::size_t k) { return -step_mean(model.step(k)); }, n_max);
  if (auto fail = drift.first_failure(params.m)) {
    throw HypothesisViolated("E S_n < 0 fails at n = " + std::to_string(*fail), static_cast<long>(*fail));
  }
  // strict negativity is needed for the ratios below
  for (std::size_t n = params.m; n <= std::min<std::size_t>(drift.checked_horizon(), params.m + 1); ++n) {
    if (!(drift.at(n) > 0.0)) {
      throw HypothesisViolated("E S_n < 0 fails at n = " + std::to_string(n), static_cast<long>(n));
    }
  }
  const PartialSums tail(model, [&](std::size_t k) { return step_tail_premium(model.step(k), params.C); }, n_max);
  const PartialSums bsum(
      model,
      [&](std::size_t k) {
        const auto step = model.step(k);
        const ExtendedReal g = step_claim_g(step, params.H);
        if (is_divergent(g)) return kInfinity;
        return g / (params.H * params.H) + 0.5 * step_truncated_premium_square(step, params.C);
      },
      n_max);

  double c_star;
  if (params.c_star) {
    c_star = *params.c_star;
  } else {
    const double ratio = PartialSums::sup_ratio(tail, drift, params.m);
    c_star = std::clamp(1.1 * ratio, 1e-3, 0.999);
  }
  if (!(c_star > 0.0 && c_star < 1.0)) throw DomainError("c* must lie in (0, 1)");
  double C_star;
  if (params.C_star) {
    C_star = *params.C_star;
  } else {
    C_star = std::max(0.0, PartialSums::sup_ratio(bsum, drift, params.m) * (1.0 + 1e-9));
  }
  if (!(C_star >= 0.0) || !std::isfinite(C_star)) throw DomainError("C* must be finite and >= 0");

  const PartialSums hyp_a(
      model, [&](std::size_t k) { return -c_star * step_mean(model.step(k)) - step_tail_premium(model.step(k), params.C); },
      n_max);
  if (auto fail = hyp_a.first_failure(params.m)) {
    throw HypothesisViolated("A_n(C) <= -c* E S_n fails at n = " + std::to_string(*fail), static_cast<long>(*fail));
  }
  const PartialSums hyp_b(
      model,
      [&](std::size_t k) {
        const auto step = model.step(k);
        const ExtendedReal g = step_claim_g(step, params.H);
        if (is_divergent(g)) return -kInfinity;
        return -C_star * step_mean(step) - g / (params.H * params.H) -
               0.5 * step_truncated_premium_square(step, params.C);
      },
      n_max);
  if (auto fail = hyp_b.first_failure(params.m)) {
    throw HypothesisViolated("B_n(H,C) <= C* (-E S_n) fails at n = " + std::to_string(*fail), static_cast<long>(*fail));
  }

  const double h = C_star > 0.0 ? std::min(params.H, (1.0 - c_star) / C_star) : params.H;
  TruncationParams p8 = params;
  auto rep = corollary8_bound(model, p8, h, n_max);
  rep.corollary = 9;
  rep.H = params.H;
  rep.c_star = c_star;
  rep.C_star = C_star;
  rep.tail_closed = rep.tail_closed && hyp_a.exact() && hyp_b.exact();
  rep.hypotheses.insert(rep.hypotheses.begin(),
                        {"A_n(C) <= -c* E S_n with c* = " + fmt(c_star) + " for n >= " + std::to_string(params.m),
                         "B_n(H,C) <= C* (-E S_n) with C* = " + fmt(C_star) + " for n >= " + std::to_string(params.m),
                         "h = min{H, (1 - c*)/C*} = " + fmt(h)});
  return rep;
}

RenewalBoundReport corollary10_search(const RenewalModel& model, double H, std::size_t n_max) {
  require_decomposed(model);
  if (!(H > 0.0)) throw DomainError("H must be positive");
  if (!model.eventually_periodic()) {
    throw NoCertificate("limit hypotheses are only decidable for eventually periodic models");
  }
  const PartialSums drift(model, [&](std::size_t k) { return -step_mean(model.step(k)); }, n_max);
  if (!(drift.slope() > 0.0)) throw NoCertificate("limsup E S_n is not negative; no certificate exists");

  // Truncation grid scaled to the typical premium per step.
  double x_scale = 0.0;
  const std::size_t horizon = model.preperiod_length() + model.period_length();
  for (std::size_t k = 1; k <= horizon; ++k) {
    const RenewalStep step = model.step(k);
    const auto& s = as_decomposed(step);
    x_scale = std::max(x_scale, s.premium_rate * mean(s.inter_time));
  }
  if (x_scale <= 0.0) x_scale = 1.0;

  std::optional<TruncationParams> best;
  double best_h = 0.0;
  double best_cm = 0.0;
  for (int j = -8; j <= 40; ++j) {
    const double C = x_scale * std::pow(2.0, 0.5 * j);
    const PartialSums tail(model, [&](std::size_t k) { return step_tail_premium(model.step(k), C); }, n_max);
    const double rho = tail.slope() / drift.slope();
    if (!(rho < 0.999 / 1.1) && !(rho == 0.0)) continue;
    const double c_star = std::clamp(1.1 * rho, 1e-3, 0.999);
    const PartialSums hyp_a(
        model, [&](std::size_t k) { return -c_star * step_mean(model.step(k)) - step_tail_premium(model.step(k), C); },
        n_max);
    const auto last_a = hyp_a.last_failure();
    const auto last_d = drift.last_failure();
    if (!last_a || !last_d) continue;
    // E S_n must be strictly negative from m on
    std::size_t m = std::max(*last_a, *last_d) + 1;
    while (m <= n_max && !(drift.at(m) > 0.0)) ++m;
    if (m > n_max) continue;
    const PartialSums bsum(
        model,
        [&](std::size_t k) {
          const auto step = model.step(k);
          const ExtendedReal g = step_claim_g(step, H);
          if (is_divergent(g)) return kInfinity;
          return g / (H * H) + 0.5 * step_truncated_premium_square(step, C);
        },
        n_max);
    const double C_star = std::max(0.0, PartialSums::sup_ratio(bsum, drift, m) * (1.0 + 1e-9));
    if (!std::isfinite(C_star)) continue;
    const double h = C_star > 0.0 ? std::min(H, (1.0 - c_star) / C_star) : H;
    const double cm = c_m_constant(model, m);
    if (!best || h > best_h * (1.0 + 1e-12) || (std::abs(h - best_h) <= 1e-12 * best_h && cm < best_cm)) {
      best = TruncationParams{C, H, m, c_star, C_star};
      best_h = h;
      best_cm = cm;
    }
  }
  if (!best) throw NoCertificate("no truncation level on the grid certifies the ratio hypotheses");
  auto rep = corollary9_bound(model, *best, n_max);
  rep.corollary = 10;
  return rep;
}

ExtendedReal renewal_log_sup_mgf(const RenewalModel& model, double h, std::size_t n_max) {
  if (!(h >= 0.0)) throw DomainError("h must be >= 0");
  if (h == 0.0) return 0.0;
  bool diverged = false;
  const PartialSums logs(
      model,
      [&](std::size_t k) {
        const ExtendedReal v = step_log_mgf(model.step(k), h);
        if (is_divergent(v)) diverged = true;
        return v;
      },
      n_max);
  if (diverged) return kInfinity;
  if (model.eventually_periodic() && logs.slope() > 0.0) return kInfinity;
  double best = -kInfinity;
  for (std::size_t n = 1; n <= logs.checked_horizon(); ++n) best = std::max(best, logs.at(n));
  return best;
}

}  // namespace ruin
