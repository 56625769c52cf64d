#include "ruin/distributions.hpp"

#include "ruin/errors.hpp"
#include "ruin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ruin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_nonnegative_support(const Distribution& d, const char* op) {
  if (!d.nonnegative_support()) {
    throw UnsupportedVariant(std::string(op) + " requires a nonnegative law, got " + d.kind());
  }
}

double gamma_log_density(const dist::Gamma& g, double x) {
  return g.shape * std::log(g.rate) + (g.shape - 1.0) * std::log(x) - g.rate * x - std::lgamma(g.shape);
}

// (e^x - 1)/x, with the removable singularity filled in.
double expm1_ratio(double x) {
  if (std::abs(x) < 1e-8) return 1.0 + 0.5 * x;
  return std::expm1(x) / x;
}

}  // namespace

Distribution Distribution::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential rate must be positive");
  return Distribution(dist::Exponential{rate});
}

Distribution Distribution::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw DomainError("gamma shape and rate must be positive");
  }
  return Distribution(dist::Gamma{shape, rate});
}

Distribution Distribution::uniform(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) throw DomainError("uniform needs 0 <= lo < hi");
  return Distribution(dist::Uniform{lo, hi});
}

Distribution Distribution::deterministic(double point) {
  if (!(point >= 0.0) || !std::isfinite(point)) throw DomainError("deterministic point must be >= 0");
  return Distribution(dist::Deterministic{point});
}

Distribution Distribution::normal(double mean, double variance) {
  if (!std::isfinite(mean) || !(variance > 0.0) || !std::isfinite(variance)) {
    throw DomainError("normal needs finite mean and positive variance");
  }
  return Distribution(dist::Normal{mean, variance});
}

Distribution Distribution::discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) throw DomainError("discrete law needs matching values/probs");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || !(probs[i] >= 0.0)) throw DomainError("discrete law has invalid atom");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("discrete probabilities must sum to 1");
  return Distribution(dist::Discrete{std::move(values), std::move(probs)});
}

std::string Distribution::kind() const {
  return std::visit(overloaded{[](const dist::Exponential&) { return std::string("exponential"); },
                               [](const dist::Gamma&) { return std::string("gamma"); },
                               [](const dist::Uniform&) { return std::string("uniform"); },
                               [](const dist::Deterministic&) { return std::string("deterministic"); },
                               [](const dist::Normal&) { return std::string("normal"); },
                               [](const dist::Discrete&) { return std::string("discrete"); }},
                    v_);
}

bool Distribution::nonnegative_support() const {
  return std::visit(overloaded{[](const dist::Normal&) { return false; },
                               [](const dist::Discrete& d) {
                                 return std::all_of(d.values.begin(), d.values.end(),
                                                    [](double v) { return v >= 0.0; });
                               },
                               [](const auto&) { return true; }},
                    v_);
}

double g_function(double x) noexcept {
  if (std::abs(x) < 1e-3) {
    return x * x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)));
  }
  return std::expm1(x) - x;
}

ExtendedReal abscissa(const Distribution& d) {
  return std::visit(overloaded{[](const dist::Exponential& e) { return e.rate; },
                               [](const dist::Gamma& g) { return g.rate; },
                               [](const auto&) { return kInfinity; }},
                    d.variant());
}

ExtendedReal log_mgf(const Distribution& d, double s) {
  if (s >= abscissa(d)) return kInfinity;
  return std::visit(
      overloaded{[s](const dist::Exponential& e) { return -std::log1p(-s / e.rate); },
                 [s](const dist::Gamma& g) { return -g.shape * std::log1p(-s / g.rate); },
                 [s](const dist::Uniform& u) { return s * u.lo + std::log(expm1_ratio(s * (u.hi - u.lo))); },
                 [s](const dist::Deterministic& p) { return s * p.point; },
                 [s](const dist::Normal& n) { return s * n.mean + 0.5 * s * s * n.variance; },
                 [s](const dist::Discrete& d) {
                   // log-sum-exp for stability at large |s|
                   double top = -kInfinity;
                   for (std::size_t i = 0; i < d.values.size(); ++i) {
                     if (d.probs[i] > 0.0) top = std::max(top, s * d.values[i]);
                   }
                   double acc = 0.0;
                   for (std::size_t i = 0; i < d.values.size(); ++i) {
                     if (d.probs[i] > 0.0) acc += d.probs[i] * std::exp(s * d.values[i] - top);
                   }
                   return top + std::log(acc);
                 }},
      d.variant());
}

ExtendedReal mgf_minus_one(const Distribution& d, double h) {
  if (!(h >= 0.0)) throw DomainError("mgf_minus_one requires h >= 0");
  if (h >= abscissa(d)) return kInfinity;
  if (h == 0.0) return 0.0;
  return std::visit(overloaded{[h](const dist::Exponential& e) { return h / (e.rate - h); },
                               [h](const dist::Deterministic& p) { return std::expm1(h * p.point); },
                               [h](const dist::Normal& n) { return std::expm1(h * n.mean + 0.5 * h * h * n.variance); },
                               [&](const auto&) { return std::expm1(log_mgf(d, h)); }},
                    d.variant());
}

double mean(const Distribution& d) {
  return std::visit(overloaded{[](const dist::Exponential& e) { return 1.0 / e.rate; },
                               [](const dist::Gamma& g) { return g.shape / g.rate; },
                               [](const dist::Uniform& u) { return 0.5 * (u.lo + u.hi); },
                               [](const dist::Deterministic& p) { return p.point; },
                               [](const dist::Normal& n) { return n.mean; },
                               [](const dist::Discrete& d) {
                                 return std::inner_product(d.values.begin(), d.values.end(), d.probs.begin(), 0.0);
                               }},
                    d.variant());
}

double variance(const Distribution& d) {
  return std::visit(overloaded{[](const dist::Exponential& e) { return 1.0 / (e.rate * e.rate); },
                               [](const dist::Gamma& g) { return g.shape / (g.rate * g.rate); },
                               [](const dist::Uniform& u) { return (u.hi - u.lo) * (u.hi - u.lo) / 12.0; },
                               [](const dist::Deterministic&) { return 0.0; },
                               [](const dist::Normal& n) { return n.variance; },
                               [](const dist::Discrete& d) {
                                 const double m =
                                     std::inner_product(d.values.begin(), d.values.end(), d.probs.begin(), 0.0);
                                 double v = 0.0;
                                 for (std::size_t i = 0; i < d.values.size(); ++i) {
                                   v += d.probs[i] * (d.values[i] - m) * (d.values[i] - m);
                                 }
                                 return v;
                               }},
                    d.variant());
}

double upper_tail_mean(const Distribution& d, double C) {
  require_nonnegative_support(d, "upper_tail_mean");
  if (!(C >= 0.0)) throw DomainError("upper_tail_mean requires C >= 0");
  if (C == 0.0) return mean(d);
  return std::visit(
      overloaded{[C](const dist::Exponential& e) { return (C + 1.0 / e.rate) * std::exp(-e.rate * C); },
                 [C](const dist::Deterministic& p) { return p.point > C ? p.point : 0.0; },
                 [C](const dist::Uniform& u) {
                   if (C <= u.lo) return 0.5 * (u.lo + u.hi);
                   if (C >= u.hi) return 0.0;
                   return (u.hi * u.hi - C * C) / (2.0 * (u.hi - u.lo));
                 },
                 [C](const dist::Gamma& g) {
                   auto f = [&g](double x) { return x * std::exp(gamma_log_density(g, x)); };
                   return quad::integrate(f, C, kInfinity).value;
                 },
                 [C](const dist::Discrete& d) {
                   double acc = 0.0;
                   for (std::size_t i = 0; i < d.values.size(); ++i) {
                     if (d.values[i] > C) acc += d.probs[i] * d.values[i];
                   }
                   return acc;
                 },
                 [](const dist::Normal&) -> double { throw UnsupportedVariant("normal"); }},
      d.variant());
}

double truncated_second_moment(const Distribution& d, double C) {
  require_nonnegative_support(d, "truncated_second_moment");
  if (!(C >= 0.0)) throw DomainError("truncated_second_moment requires C >= 0");
  if (C == 0.0) return 0.0;
  return std::visit(
      overloaded{[C](const dist::Exponential& e) {
                   const double x = e.rate * C;
                   // 2/rate^2 * P(Gamma(3,1) <= x)
                   return 2.0 / (e.rate * e.rate) * (-std::expm1(-x) - std::exp(-x) * (x + 0.5 * x * x));
                 },
                 [C](const dist::Deterministic& p) { return p.point > 0.0 && p.point <= C ? p.point * p.point : 0.0; },
                 [C](const dist::Uniform& u) {
                   const double a = u.lo;
                   const double b = std::min(u.hi, C);
                   if (b <= a) return 0.0;
                   return (b * b * b - a * a * a) / (3.0 * (u.hi - u.lo));
                 },
                 [C](const dist::Gamma& g) {
                   auto f = [&g](double x) { return x > 0.0 ? x * x * std::exp(gamma_log_density(g, x)) : 0.0; };
                   return quad::integrate(f, 0.0, C).value;
                 },
                 [C](const dist::Discrete& d) {
                   double acc = 0.0;
                   for (std::size_t i = 0; i < d.values.size(); ++i) {
                     if (d.values[i] > 0.0 && d.values[i] <= C) acc += d.probs[i] * d.values[i] * d.values[i];
                   }
                   return acc;
                 },
                 [](const dist::Normal&) -> double { throw UnsupportedVariant("normal"); }},
      d.variant());
}

ExtendedReal g_moment(const Distribution& d, double h) {
  if (!(h >= 0.0)) throw DomainError("g_moment requires h >= 0");
  require_nonnegative_support(d, "g_moment");
  if (h >= abscissa(d)) return kInfinity;
  if (h == 0.0) return 0.0;
  const double value = std::visit(
      overloaded{[h](const dist::Exponential& e) { return h * h / (e.rate * (e.rate - h)); },
                 [h](const dist::Deterministic& p) { return g_function(h * p.point); },
                 [h](const dist::Discrete& d) {
                   double acc = 0.0;
                   for (std::size_t i = 0; i < d.values.size(); ++i) acc += d.probs[i] * g_function(h * d.values[i]);
                   return acc;
                 },
                 [h](const dist::Uniform& u) {
                   // E g(hZ) = integral of g(hx) over [lo, hi] / (hi - lo), antiderivative in closed form
                   const double w = u.hi - u.lo;
                   if (h * u.hi < 1e-2) {
                     auto f = [h](double x) { return g_function(h * x); };
                     return quad::panel(f, u.lo, u.hi) / w;
                   }
                   const double prim_hi = std::expm1(h * u.hi) / h - u.hi - 0.5 * h * u.hi * u.hi;
                   const double prim_lo = std::expm1(h * u.lo) / h - u.lo - 0.5 * h * u.lo * u.lo;
                   return (prim_hi - prim_lo) / w;
                 },
                 [&](const auto&) { return mgf_minus_one(d, h) - h * mean(d); }},
      d.variant());
  return std::max(0.0, value);
}

double sample(const Distribution& d, RandomStream& stream) {
  return std::visit(
      overloaded{[&](const dist::Exponential& e) { return -std::log(stream.uniform_pos()) / e.rate; },
                 [&](const dist::Gamma& g) { return std::gamma_distribution<double>(g.shape, 1.0 / g.rate)(stream); },
                 [&](const dist::Uniform& u) { return u.lo + (u.hi - u.lo) * stream.uniform(); },
                 [](const dist::Deterministic& p) { return p.point; },
                 [&](const dist::Normal& n) {
                   return std::normal_distribution<double>(n.mean, std::sqrt(n.variance))(stream);
                 },
                 [&](const dist::Discrete& d) {
                   const double x = stream.uniform();
                   double acc = 0.0;
                   for (std::size_t i = 0; i + 1 < d.values.size(); ++i) {
                     acc += d.probs[i];
                     if (x < acc) return d.values[i];
                   }
                   return d.values.back();
                 }},
      d.variant());
}

TimeVaryingClaimFamily::TimeVaryingClaimFamily(Distribution b, PiecewisePoly s)
    : base(std::move(b)), scale(std::move(s)) {
  if (!base.nonnegative_support()) {
    throw UnsupportedVariant("claim sizes need a nonnegative law, got " + base.kind());
  }
  if (!scale.is_nonnegative()) throw DomainError("claim scale must be nonnegative");
}

bool TimeVaryingClaimFamily::iid_in_time() const {
  const auto& p = scale.pieces();
  return scale.is_piecewise_constant() &&
         std::all_of(p.begin(), p.end(), [&](const auto& c) { return c[0] == p.front()[0]; });
}

}  // namespace ruin
