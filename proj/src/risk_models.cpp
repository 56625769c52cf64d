#include "ruin/risk_models.hpp"

#include "ruin/errors.hpp"
#include "ruin/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ruin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> segment_cuts(double a, double b, std::initializer_list<const PiecewisePoly*> fns) {
  std::vector<double> cuts{a, b};
  for (const auto* f : fns) {
    auto k = f->knots(a, b);
    cuts.insert(cuts.end(), k.begin(), k.end());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

void require_time_args(double h, double t) {
  if (!(h >= 0.0)) throw DomainError("cumulant requires h >= 0");
  if (!(t >= 0.0)) throw DomainError("cumulant requires t >= 0");
}

}  // namespace

ModelA::ModelA(PiecewisePoly intensity_density, PiecewisePoly premium_density, TimeVaryingClaimFamily claim_family)
    : intensity(std::move(intensity_density)), premium(std::move(premium_density)), claims(std::move(claim_family)) {
  if (!intensity.is_nonnegative()) throw DomainError("intensity density must be nonnegative");
  if (!premium.is_nonnegative()) throw DomainError("premium density must be nonnegative");
}

ModelB::ModelB(ModelA base_model, PiecewisePoly discount_fn) : base(std::move(base_model)), discount(std::move(discount_fn)) {
  if (discount(0.0) != 0.0) throw DomainError("discount must satisfy r(0) = 0");
  if (!discount.is_nondecreasing()) throw DomainError("discount must be nondecreasing");
}

UnitedModel::UnitedModel(std::vector<Branch> b) : branches(std::move(b)) {
  if (branches.empty()) throw DomainError("united model needs at least one branch");
  if (branches.front().start != 0.0) throw DomainError("first branch must open at t = 0");
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const auto& br = branches[i];
    if (i > 0 && !(br.start > branches[i - 1].start)) throw DomainError("branch start times must increase strictly");
    if (!std::isfinite(br.start)) throw DomainError("branch start must be finite");
    if (!(br.intensity > 0.0) || !std::isfinite(br.intensity)) throw DomainError("branch intensity must be positive");
    if (!(br.premium_rate >= 0.0) || !std::isfinite(br.premium_rate)) {
      throw DomainError("branch premium rate must be >= 0");
    }
    if (!br.claims.nonnegative_support()) throw UnsupportedVariant("branch claims need a nonnegative law");
  }
}

RenewalModel::RenewalModel(std::vector<RenewalStep> preperiod, std::vector<RenewalStep> period)
    : preperiod_(std::move(preperiod)), period_(std::move(period)) {
  if (preperiod_.empty() && period_.empty()) throw DomainError("renewal model needs at least one step");
  auto check = [this](const RenewalStep& s) {
    std::visit(overloaded{[this](const DecomposedStep& d) {
                            if (!d.claim.nonnegative_support() || !d.inter_time.nonnegative_support()) {
                              throw UnsupportedVariant("claim and inter-time laws must be nonnegative");
                            }
                            if (!(d.premium_rate >= 0.0) || !std::isfinite(d.premium_rate)) {
                              throw DomainError("premium rate must be >= 0");
                            }
                            (void)this;
                          },
                          [this](const DirectStep&) { decomposed_ = false; }},
               s);
  };
  for (const auto& s : preperiod_) check(s);
  for (const auto& s : period_) check(s);
}

RenewalModel::RenewalModel(std::function<RenewalStep(std::size_t)> generator, bool decomposed, std::string name)
    : generator_(std::move(generator)), decomposed_(decomposed), name_(std::move(name)) {}

RenewalStep RenewalModel::step(std::size_t k) const {
  if (k == 0) throw DomainError("renewal steps are indexed from 1");
  if (generator_) return generator_(k);
  if (k <= preperiod_.size()) return preperiod_[k - 1];
  if (period_.empty()) throw DomainError("renewal step index beyond the finite step list");
  return period_[(k - 1 - preperiod_.size()) % period_.size()];
}

std::optional<std::size_t> RenewalModel::length() const {
  if (generator_ || !period_.empty()) return std::nullopt;
  return preperiod_.size();
}

CumulantResult cumulant_increment(const ModelA& m, double h, double a, double b) {
  require_time_args(h, a);
  if (!(b >= a)) throw DomainError("cumulant increment needs a <= b");
  if (b == a || h == 0.0) return {0.0, 0.0};
  const auto& base = m.claims.base;
  if (h * m.claims.scale.max_on(a, b) >= abscissa(base)) return {kInfinity, 0.0};

  CumulantResult out;
  const auto cuts = segment_cuts(a, b, {&m.intensity, &m.claims.scale});
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo_t = cuts[i];
    const double hi_t = cuts[i + 1];
    const double lo = m.claims.scale.min_on(lo_t, hi_t);
    const double hi = m.claims.scale.max_on(lo_t, hi_t);
    if (lo == hi) {
      out.value += mgf_minus_one(base, h * lo) * m.intensity.integral(lo_t, hi_t);
    } else {
      auto f = [&](double x) { return m.claims.q(h, x) * m.intensity(x); };
      const auto r = quad::integrate(f, lo_t, hi_t);
      out.value += r.value;
      out.error += r.error;
    }
  }
  out.value -= h * m.premium.integral(a, b);
  return out;
}

CumulantResult cumulant_model_a(const ModelA& m, double h, double t) {
  require_time_args(h, t);
  return cumulant_increment(m, h, 0.0, t);
}

CumulantResult cumulant_increment(const ModelB& m, double h, double a, double b) {
  if (m.discount.is_identically_zero()) return cumulant_increment(m.base, h, a, b);
  require_time_args(h, a);
  if (!(b >= a)) throw DomainError("cumulant increment needs a <= b");
  if (b == a || h == 0.0) return {0.0, 0.0};
  const auto& A = m.base;
  const double abs_z = abscissa(A.claims.base);

  CumulantResult out;
  const auto cuts = segment_cuts(a, b, {&A.intensity, &A.premium, &A.claims.scale, &m.discount});
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo_t = cuts[i];
    const double hi_t = cuts[i + 1];
    // The effective exponent h e^{-r(x)} scale(x) is smooth on a segment, so
    // a fine scan locates where it meets the abscissa.
    if (std::isfinite(abs_z)) {
      constexpr int kProbe = 64;
      for (int j = 0; j <= kProbe; ++j) {
        const double x = lo_t + (hi_t - lo_t) * j / kProbe;
        if (h * std::exp(-m.discount(x)) * A.claims.scale(x) >= abs_z) return {kInfinity, 0.0};
      }
    }
    auto claims = [&](double x) {
      return mgf_minus_one(A.claims.base, h * std::exp(-m.discount(x)) * A.claims.scale(x)) * A.intensity(x);
    };
    auto premium = [&](double x) { return std::exp(-m.discount(x)) * A.premium(x); };
    const auto rc = quad::integrate(claims, lo_t, hi_t);
    const auto rp = quad::integrate(premium, lo_t, hi_t);
    if (!std::isfinite(rc.value)) return {kInfinity, 0.0};
    out.value += rc.value - h * rp.value;
    out.error += rc.error + h * rp.error;
  }
  return out;
}

CumulantResult cumulant_model_b(const ModelB& m, double h, double t) {
  require_time_args(h, t);
  return cumulant_increment(m, h, 0.0, t);
}

ExtendedReal branch_cumulant(const Branch& b, double h) {
  const ExtendedReal q = mgf_minus_one(b.claims, h);
  if (is_divergent(q)) return kInfinity;
  return b.intensity * q - h * b.premium_rate;
}

CumulantResult cumulant_united(const UnitedModel& m, double h, double t) {
  require_time_args(h, t);
  if (h == 0.0) return {0.0, 0.0};
  double value = 0.0;
  for (const auto& br : m.branches) {
    if (t <= br.start) continue;
    const ExtendedReal ai = branch_cumulant(br, h);
    if (is_divergent(ai)) return {kInfinity, 0.0};
    value += (t - br.start) * ai;
  }
  return {value, 0.0};
}

ExtendedReal step_log_mgf(const RenewalStep& step, double h) {
  return std::visit(overloaded{[h](const DecomposedStep& s) {
                                 const ExtendedReal z = log_mgf(s.claim, h);
                                 if (is_divergent(z)) return kInfinity;
                                 return z + log_mgf(s.inter_time, -h * s.premium_rate);
                               },
                               [h](const DirectStep& s) { return log_mgf(s.increment, h); }},
                    step);
}

double step_mean(const RenewalStep& step) {
  return std::visit(overloaded{[](const DecomposedStep& s) { return mean(s.claim) - s.premium_rate * mean(s.inter_time); },
                               [](const DirectStep& s) { return mean(s.increment); }},
                    step);
}

ExtendedReal step_abscissa(const RenewalStep& step) {
  return std::visit(overloaded{[](const DecomposedStep& s) { return abscissa(s.claim); },
                               [](const DirectStep& s) { return abscissa(s.increment); }},
                    step);
}

ExtendedReal renewal_log_mgf(const RenewalModel& m, double h, std::size_t n) {
  if (!(h >= 0.0)) throw DomainError("renewal_log_mgf requires h >= 0");
  if (n == 0) throw DomainError("renewal_log_mgf requires n >= 1");
  if (h == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const ExtendedReal v = step_log_mgf(m.step(k), h);
    if (is_divergent(v)) return kInfinity;
    acc += v;
  }
  return acc;
}

std::vector<double> renewal_expected_sums(const RenewalModel& m, std::size_t n) {
  std::vector<double> sums;
  sums.reserve(n);
  double acc = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    acc += step_mean(m.step(k));
    sums.push_back(acc);
  }
  return sums;
}

QuasiPeriodicReport check_quasi_periodic(const ModelB& m, double l, const std::vector<double>& h_grid,
                                         const std::vector<double>& t_grid) {
  if (!(l > 0.0)) throw DomainError("period must be positive");
  if (h_grid.empty() || t_grid.empty()) throw DomainError("grids must be nonempty");
  const auto& A = m.base;
  auto leq = [](double lhs, double rhs) {
    if (std::isinf(rhs) && rhs > 0) return true;
    return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
  };

  std::vector<double> ts = t_grid;
  std::sort(ts.begin(), ts.end());
  for (double t : ts) {
    const double r0 = m.discount(t);
    const double r1 = m.discount(t + l);
    {
      const double lhs = std::exp(-r1) * A.intensity(t + l);
      const double rhs = std::exp(-r0) * A.intensity(t);
      if (!leq(lhs, rhs)) return {false, "intensity", t, 0.0, lhs, rhs};
    }
    {
      // premium density must not decrease: compare with roles swapped
      const double lhs = std::exp(-r1) * A.premium(t + l);
      const double rhs = std::exp(-r0) * A.premium(t);
      if (!leq(rhs, lhs)) return {false, "premium", t, 0.0, lhs, rhs};
    }
    for (double h : h_grid) {
      const ExtendedReal q1 = mgf_minus_one(A.claims.base, h * std::exp(-r1) * A.claims.scale(t + l));
      const ExtendedReal q0 = mgf_minus_one(A.claims.base, h * std::exp(-r0) * A.claims.scale(t));
      const double lhs = is_divergent(q1) ? kInfinity : std::exp(r1) * q1;
      const double rhs = is_divergent(q0) ? kInfinity : std::exp(r0) * q0;
      if (!leq(lhs, rhs)) return {false, "claims", t, h, lhs, rhs};
    }
  }
  return {};
}

}  // namespace ruin
