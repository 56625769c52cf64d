#include "ruin/simulator.hpp"

#include "ruin/errors.hpp"
#include "ruin/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

namespace ruin {

namespace {

constexpr double kZ99 = 2.5758293035489;

// Thinning sampler; yields accepted event times in ascending order.
class NhppSampler {
 public:
  NhppSampler(const PiecewisePoly& intensity, double T) : f_(intensity), T_(T) {
    if (!(T > 0.0)) throw DomainError("horizon must be positive");
    lmax_ = intensity.max_on(0.0, T);
  }

  /// Next event time, or a value > T when the path is exhausted.
  double next(RandomStream& rng) {
    if (!(lmax_ > 0.0)) return T_ + 1.0;
    for (;;) {
      t_ += -std::log(rng.uniform_pos()) / lmax_;
      if (t_ > T_) return t_;
      if (rng.uniform() * lmax_ < f_(t_)) return t_;
    }
  }

 private:
  const PiecewisePoly& f_;
  double T_;
  double lmax_ = 0.0;
  double t_ = 0.0;
};

double exp_draw(double rate, RandomStream& rng) { return -std::log(rng.uniform_pos()) / rate; }

double sample_step(const RenewalStep& step, RandomStream& rng) {
  if (const auto* d = std::get_if<DecomposedStep>(&step)) {
    const double z = sample(d->claim, rng);
    const double theta = sample(d->inter_time, rng);
    return z - d->premium_rate * theta;
  }
  return sample(std::get<DirectStep>(step).increment, rng);
}

PathOutcome walk(const std::vector<RenewalStep>& laws, double u, RandomStream& rng) {
  PathOutcome out;
  double s = 0.0;
  for (std::size_t k = 0; k < laws.size(); ++k) {
    s += sample_step(laws[k], rng);
    ++out.events;
    if (s > u) {
      out.ruined = true;
      out.ruin_time = static_cast<double>(k + 1);
      break;
    }
  }
  return out;
}

void validate(const SimConfig& cfg, bool renewal) {
  if (cfg.paths == 0) throw DomainError("paths must be positive");
  if (!(cfg.u > 0.0)) throw DomainError("initial reserve u must be positive");
  if (renewal) {
    if (cfg.steps == 0) throw DomainError("steps must be positive");
  } else if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
    throw DomainError("horizon must be positive and finite");
  }
}

// Static contiguous partition over workers; counts are summed in worker order,
// so the totals never depend on the partition.
template <class PathFn>
SimEstimate run_paths(const SimConfig& cfg, double horizon, PathFn&& path_fn) {
  const auto started = std::chrono::steady_clock::now();
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(cfg.workers == 0 ? 1 : cfg.workers, 1, cfg.paths));
  std::vector<std::size_t> ruins(workers, 0);
  std::vector<std::size_t> events(workers, 0);
  std::vector<std::exception_ptr> errors(workers);
  auto body = [&](unsigned w) {
    try {
      const std::size_t begin = cfg.paths * w / workers;
      const std::size_t end = cfg.paths * (w + 1) / workers;
      for (std::size_t i = begin; i < end; ++i) {
        RandomStream rng(cfg.seed, i);
        const PathOutcome o = path_fn(rng);
        ruins[w] += o.ruined ? 1 : 0;
        events[w] += o.events;
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SimEstimate est;
  est.paths = cfg.paths;
  for (unsigned w = 0; w < workers; ++w) {
    est.ruins += ruins[w];
    est.mean_events += static_cast<double>(events[w]);
  }
  est.mean_events /= static_cast<double>(cfg.paths);
  est.p_hat = static_cast<double>(est.ruins) / static_cast<double>(cfg.paths);
  const Interval ci = wilson99(est.ruins, est.paths);
  est.ci_lo = ci.lo;
  est.ci_hi = ci.hi;
  est.horizon = horizon;
  est.seed = cfg.seed;
  est.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return est;
}

HorizonChoice horizon_from_drift(double offset, double drift) {
  HorizonChoice c;
  const double raw = std::abs(drift) > 0.0 ? 20.0 / std::abs(drift) : kInfinity;
  c.T = offset + std::clamp(raw, 10.0, 1000.0);
  if (raw > 1000.0) c.warning = "drift is close to zero; horizon capped at " + std::to_string(c.T);
  return c;
}

// E S(t)/t at t = 100 for claims weighted by `weight(x)`.
double mean_drift(const ModelA& m, const std::function<double(double)>& weight, double premium_at_t) {
  constexpr double t = 100.0;
  const double ez = mean(m.claims.base);
  auto claims = [&](double x) { return weight(x) * m.claims.scale(x) * ez * m.intensity(x); };
  std::vector<double> cuts{0.0};
  for (double k : m.intensity.knots(0.0, t)) cuts.push_back(k);
  for (double k : m.claims.scale.knots(0.0, t)) cuts.push_back(k);
  cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += quad::integrate(claims, cuts[i], cuts[i + 1]).value;
  return (total - premium_at_t) / t;
}

}  // namespace

double SimEstimate::standard_error() const {
  if (paths == 0) return 0.0;
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(paths));
}

Interval wilson99(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw DomainError("trials must be positive");
  if (successes > trials) throw DomainError("successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ99 * kZ99;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ99 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (successes == 0) ci.lo = 0.0;
  if (successes == trials) ci.hi = 1.0;
  ci.lo = std::min(ci.lo, p);
  ci.hi = std::max(ci.hi, p);
  return ci;
}

std::vector<double> sample_nhpp(const PiecewisePoly& intensity, double T, RandomStream& rng) {
  NhppSampler s(intensity, T);
  std::vector<double> times;
  for (double t = s.next(rng); t <= T; t = s.next(rng)) times.push_back(t);
  return times;
}

DiscountedPremium::DiscountedPremium(const ModelB& m, double T)
    : model_(&m), undiscounted_(m.discount.is_identically_zero()) {
  if (undiscounted_) return;
  constexpr int kCells = 4096;
  nodes_.reserve(kCells + 1);
  for (int i = 0; i <= kCells; ++i) nodes_.push_back(T * i / kCells);
  for (double k : m.discount.knots(0.0, T)) nodes_.push_back(k);
  for (double k : m.base.premium.knots(0.0, T)) nodes_.push_back(k);
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  auto f = [&m](double x) { return std::exp(-m.discount(x)) * m.base.premium(x); };
  cumulative_.assign(nodes_.size(), 0.0);
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + quad::panel(f, nodes_[i - 1], nodes_[i]);
  }
}

double DiscountedPremium::operator()(double t) const {
  if (undiscounted_) return model_->base.premium.integral(t);
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  const std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const ModelB& m = *model_;
  auto f = [&m](double x) { return std::exp(-m.discount(x)) * m.base.premium(x); };
  return cumulative_[i] + quad::panel(f, nodes_[i], t);
}

PathOutcome simulate_path(const ModelA& m, double u, double T, RandomStream& rng) {
  PathOutcome out;
  NhppSampler events(m.intensity, T);
  double claims = 0.0;
  for (double t = events.next(rng); t <= T; t = events.next(rng)) {
    claims += m.claims.scale(t) * sample(m.claims.base, rng);
    ++out.events;
    // reserve u + p(t) - claims < 0
    if (claims - m.premium.integral(t) > u) {
      out.ruined = true;
      out.ruin_time = t;
      break;
    }
  }
  return out;
}

PathOutcome simulate_path(const ModelB& m, const DiscountedPremium& premium, double u, double T, RandomStream& rng) {
  PathOutcome out;
  NhppSampler events(m.base.intensity, T);
  const bool plain = m.discount.is_identically_zero();
  double claims = 0.0;
  for (double t = events.next(rng); t <= T; t = events.next(rng)) {
    const double z = m.base.claims.scale(t) * sample(m.base.claims.base, rng);
    claims += plain ? z : std::exp(-m.discount(t)) * z;
    ++out.events;
    if (claims - premium(t) > u) {
      out.ruined = true;
      out.ruin_time = t;
      break;
    }
  }
  return out;
}

PathOutcome simulate_path(const UnitedModel& m, double u, double T, RandomStream& rng) {
  PathOutcome out;
  const std::size_t nb = m.branches.size();
  std::vector<double> next(nb, kInfinity);
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& b = m.branches[i];
    if (b.intensity > 0.0) next[i] = b.start + exp_draw(b.intensity, rng);
  }
  double claims = 0.0;
  for (;;) {
    const std::size_t i = static_cast<std::size_t>(std::min_element(next.begin(), next.end()) - next.begin());
    const double t = next[i];
    if (!(t <= T)) break;
    claims += sample(m.branches[i].claims, rng);
    ++out.events;
    double premium = 0.0;
    for (const auto& b : m.branches) premium += b.premium_rate * std::max(0.0, t - b.start);
    if (claims - premium > u) {
      out.ruined = true;
      out.ruin_time = t;
      break;
    }
    next[i] = t + exp_draw(m.branches[i].intensity, rng);
  }
  return out;
}

PathOutcome simulate_path(const RenewalModel& m, double u, std::size_t steps, RandomStream& rng) {
  std::vector<RenewalStep> laws;
  laws.reserve(steps);
  for (std::size_t k = 1; k <= steps; ++k) laws.push_back(m.step(k));
  return walk(laws, u, rng);
}

SimEstimate estimate_ruin_model_a(const ModelA& m, const SimConfig& cfg) {
  validate(cfg, false);
  return run_paths(cfg, cfg.horizon, [&](RandomStream& rng) { return simulate_path(m, cfg.u, cfg.horizon, rng); });
}

SimEstimate estimate_ruin_model_b(const ModelB& m, const SimConfig& cfg) {
  validate(cfg, false);
  const DiscountedPremium premium(m, cfg.horizon);
  return run_paths(cfg, cfg.horizon,
                   [&](RandomStream& rng) { return simulate_path(m, premium, cfg.u, cfg.horizon, rng); });
}

SimEstimate estimate_ruin_united(const UnitedModel& m, const SimConfig& cfg) {
  validate(cfg, false);
  return run_paths(cfg, cfg.horizon, [&](RandomStream& rng) { return simulate_path(m, cfg.u, cfg.horizon, rng); });
}

SimEstimate estimate_ruin_renewal(const RenewalModel& m, const SimConfig& cfg) {
  validate(cfg, true);
  if (m.length() && *m.length() < cfg.steps) throw DomainError("walk has fewer steps than requested");
  std::vector<RenewalStep> laws;
  laws.reserve(cfg.steps);
  for (std::size_t k = 1; k <= cfg.steps; ++k) laws.push_back(m.step(k));
  return run_paths(cfg, static_cast<double>(cfg.steps), [&](RandomStream& rng) { return walk(laws, cfg.u, rng); });
}

HorizonChoice default_horizon(const ModelA& m) {
  return horizon_from_drift(0.0, mean_drift(m, [](double) { return 1.0; }, m.premium.integral(100.0)));
}

HorizonChoice default_horizon(const ModelB& m) {
  const DiscountedPremium premium(m, 100.0);
  return horizon_from_drift(0.0, mean_drift(m.base, [&m](double x) { return std::exp(-m.discount(x)); }, premium(100.0)));
}

HorizonChoice default_horizon(const UnitedModel& m) {
  double drift = 0.0;
  for (const auto& b : m.branches) drift += b.intensity * mean(b.claims) - b.premium_rate;
  return horizon_from_drift(m.branches.back().start, drift);
}

namespace {

struct Support {
  std::vector<double> values;
  std::vector<double> probs;
};

Support finite_support(const Distribution& d) {
  if (const auto* x = std::get_if<dist::Discrete>(&d.variant())) return {x->values, x->probs};
  if (const auto* x = std::get_if<dist::Deterministic>(&d.variant())) return {{x->point}, {1.0}};
  throw UnsupportedVariant("exact ruin needs finite-support laws, got " + d.kind());
}

Support step_support(const RenewalStep& step) {
  if (const auto* d = std::get_if<DirectStep>(&step)) return finite_support(d->increment);
  const auto& s = std::get<DecomposedStep>(step);
  const Support z = finite_support(s.claim);
  const Support th = finite_support(s.inter_time);
  Support out;
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    for (std::size_t j = 0; j < th.values.size(); ++j) {
      out.values.push_back(z.values[i] - s.premium_rate * th.values[j]);
      out.probs.push_back(z.probs[i] * th.probs[j]);
    }
  }
  return out;
}

bool near_integer(double x) { return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x)); }

}  // namespace

double dp_exact_ruin(const RenewalModel& m, double u, std::size_t n) {
  if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("u must be finite and >= 0");
  if (n == 0) return 0.0;
  if (m.length() && *m.length() < n) throw DomainError("walk has fewer steps than requested");

  std::vector<Support> supports;
  supports.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) supports.push_back(step_support(m.step(k)));

  int q = 0;
  for (int cand = 1; cand <= 10000 && q == 0; ++cand) {
    bool ok = true;
    for (const auto& s : supports) {
      for (double v : s.values) ok = ok && near_integer(v * cand);
    }
    if (ok) q = cand;
  }
  if (q == 0) throw DomainError("increments do not share a lattice of spacing 1/q, q <= 10000");

  std::vector<std::vector<long long>> offsets(n);
  long long lo = 0;
  for (std::size_t k = 0; k < n; ++k) {
    long long min_off = 0;
    for (double v : supports[k].values) {
      offsets[k].push_back(std::llround(v * q));
      min_off = std::min(min_off, offsets[k].back());
    }
    lo += min_off;
  }
  // ruin iff index > u q
  const double x = u * q;
  const long long thr = near_integer(x) ? std::llround(x) + 1 : static_cast<long long>(std::ceil(x));
  const long long width = thr - lo;
  if (width > 50'000'000) throw DomainError("lattice state space too large");

  std::vector<double> cur(static_cast<std::size_t>(width), 0.0);
  std::vector<double> nxt(cur.size(), 0.0);
  cur[static_cast<std::size_t>(-lo)] = 1.0;
  double ruined = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t j = 0; j < cur.size(); ++j) {
      const double mass = cur[j];
      if (mass == 0.0) continue;
      for (std::size_t a = 0; a < offsets[k].size(); ++a) {
        const long long idx = static_cast<long long>(j) + offsets[k][a];
        const double w = mass * supports[k].probs[a];
        if (idx + lo >= thr) {
          ruined += w;
        } else {
          nxt[static_cast<std::size_t>(idx)] += w;
        }
      }
    }
    cur.swap(nxt);
  }
  return std::min(1.0, ruined);
}

}  // namespace ruin
