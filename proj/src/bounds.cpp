#include "ruin/bounds.hpp"

#include "ruin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ruin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInvPhi = 0.6180339887498949;
constexpr double kTimeTol = 1e-10;
constexpr double kExpansionCap = 1e6;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) out.back() = b;
  return out;
}

// Golden-section search for the maximum of f on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

double window_end(const TimeWindow& w) {
  return std::visit(overloaded{[](const window::FiniteHorizon& f) { return f.T; },
                               [](const window::QuasiPeriodic& q) { return q.t0 + q.l; },
                               [](const window::Periodic& p) { return p.l; },
                               [](const window::United& u) { return u.breakpoints.back(); }},
                    w);
}

void validate(const TimeWindow& w) {
  std::visit(overloaded{[](const window::FiniteHorizon& f) {
                          if (!(f.T > 0.0) || !std::isfinite(f.T)) throw DomainError("horizon must be positive and finite");
                        },
                        [](const window::QuasiPeriodic& q) {
                          if (!(q.l > 0.0) || !(q.t0 >= 0.0) || !std::isfinite(q.l + q.t0)) {
                            throw DomainError("quasi-periodic window needs l > 0 and t0 >= 0");
                          }
                        },
                        [](const window::Periodic& p) {
                          if (!(p.l > 0.0) || !std::isfinite(p.l)) throw DomainError("period must be positive");
                        },
                        [](const window::United& u) {
                          if (u.breakpoints.empty() || u.breakpoints.front() != 0.0) {
                            throw DomainError("united window needs breakpoints starting at 0");
                          }
                        }},
             w);
}

// Largest per-period increment a(h, t + l) - a(h, t) over t in [t0, t0 + 3l].
ExtendedReal max_period_increment(const CumulantFn& a, double h, double t0, double l) {
  constexpr std::size_t kPerPeriod = 32;
  const auto ts = linspace(t0, t0 + 4.0 * l, 4 * kPerPeriod + 1);
  const auto vals = a.on_grid(h, ts);
  double worst = -kInfinity;
  for (std::size_t j = 0; j + kPerPeriod < ts.size(); ++j) {
    if (is_divergent(vals[j + kPerPeriod])) return kInfinity;
    worst = std::max(worst, vals[j + kPerPeriod] - vals[j]);
  }
  return worst;
}

std::vector<double> grid_by_increments(double h, const std::vector<double>& ts,
                                       const std::function<CumulantResult(double, double, double)>& increment) {
  std::vector<double> out(ts.size(), kInfinity);
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto r = increment(h, prev, ts[i]);
    if (r.diverged()) break;
    acc += r.value;
    out[i] = acc;
    prev = ts[i];
  }
  return out;
}

}  // namespace

std::vector<double> CumulantFn::on_grid(double h, const std::vector<double>& ts) const {
  if (eval_grid) return eval_grid(h, ts);
  std::vector<double> out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = eval(h, ts[i]);
  return out;
}

CumulantFn cumulant_fn(const ModelA& m) {
  CumulantFn f;
  f.eval = [m](double h, double t) { return cumulant_model_a(m, h, t).value; };
  f.eval_grid = [m](double h, const std::vector<double>& ts) {
    return grid_by_increments(h, ts, [&m](double hh, double a, double b) { return cumulant_increment(m, hh, a, b); });
  };
  const double min_scale = m.claims.scale.min_on(0.0, kInfinity);
  f.h_abscissa = min_scale > 0.0 ? abscissa(m.claims.base) / min_scale : kInfinity;
  return f;
}

CumulantFn cumulant_fn(const ModelB& m) {
  CumulantFn f;
  f.eval = [m](double h, double t) { return cumulant_model_b(m, h, t).value; };
  f.eval_grid = [m](double h, const std::vector<double>& ts) {
    return grid_by_increments(h, ts, [&m](double hh, double a, double b) { return cumulant_increment(m, hh, a, b); });
  };
  const double scale0 = m.base.claims.scale(0.0);
  f.h_abscissa = scale0 > 0.0 ? abscissa(m.base.claims.base) / scale0 : kInfinity;
  return f;
}

CumulantFn cumulant_fn(const UnitedModel& m) {
  CumulantFn f;
  f.eval = [m](double h, double t) { return cumulant_united(m, h, t).value; };
  f.h_abscissa = abscissa(m.branches.front().claims);
  return f;
}

std::string window_kind(const TimeWindow& w) {
  return std::visit(overloaded{[](const window::FiniteHorizon&) { return std::string("finite"); },
                               [](const window::QuasiPeriodic&) { return std::string("quasi_periodic"); },
                               [](const window::Periodic&) { return std::string("periodic"); },
                               [](const window::United&) { return std::string("united"); }},
                    w);
}

SupResult sup_cumulant(const CumulantFn& a, double h, const TimeWindow& w, std::size_t grid_points) {
  if (!(h >= 0.0)) throw DomainError("sup_cumulant requires h >= 0");
  validate(w);

  if (const auto* u = std::get_if<window::United>(&w)) {
    SupResult best{-kInfinity, 0.0};
    for (double t : u->breakpoints) {
      const ExtendedReal v = a.eval(h, t);
      if (is_divergent(v)) return {kInfinity, t};
      if (v > best.value) best = {v, t};
    }
    const double last = u->breakpoints.back();
    const ExtendedReal beyond = a.eval(h, last + 1.0);
    if (is_divergent(beyond)) return {kInfinity, last};
    if (beyond - a.eval(h, last) > 0.0) return {kInfinity, last};
    return best;
  }

  const double end = window_end(w);
  const auto ts = linspace(0.0, end, std::max<std::size_t>(grid_points, 3));
  const auto vals = a.on_grid(h, ts);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (is_divergent(vals[i])) return {kInfinity, ts[i]};
  }

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
    const bool right_ok = i + 1 == vals.size() || vals[i] >= vals[i + 1];
    if (left_ok && right_ok) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t x, std::size_t y) { return vals[x] > vals[y]; });
  if (peaks.size() > 3) peaks.resize(3);

  std::vector<std::pair<double, double>> candidates;
  candidates.reserve(ts.size() + peaks.size());
  for (std::size_t i = 0; i < ts.size(); ++i) candidates.emplace_back(ts[i], vals[i]);
  for (std::size_t i : peaks) {
    const double lo = ts[i == 0 ? 0 : i - 1];
    const double hi = ts[std::min(i + 1, ts.size() - 1)];
    auto f = [&](double t) { return a.eval(h, t); };
    const auto [t_star, v_star] = golden_max(f, lo, hi, kTimeTol);
    if (std::isfinite(v_star)) candidates.emplace_back(t_star, v_star);
  }

  double top = -kInfinity;
  for (const auto& c : candidates) top = std::max(top, c.second);
  const double tie = 1e-12 * std::max(1.0, std::abs(top));
  double argmax = kInfinity;
  for (const auto& [t, v] : candidates) {
    if (v >= top - tie) argmax = std::min(argmax, t);
  }
  return {top, argmax};
}

double BoundCertificate::bound(double u) const {
  if (degenerate || L <= 0.0) return 1.0;
  return std::min(1.0, C * std::exp(-L * u));
}

Bisection bisect_largest(const std::function<bool(double)>& predicate, ExtendedReal cap, double htol) {
  double lo = 0.0;
  double hi;
  if (std::isfinite(cap)) {
    hi = cap;
    if (predicate(hi)) return {hi, hi};
  } else {
    hi = 1.0;
    while (predicate(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > kExpansionCap) return {lo, lo};
    }
  }
  while (hi - lo > htol) {
    const double mid = 0.5 * (lo + hi);
    if (predicate(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

BoundCertificate adjustment_coefficient(const CumulantFn& a, const TimeWindow& w, ExtendedReal h_max_hint,
                                        Tolerances tol) {
  validate(w);
  if (is_divergent(a.eval(0.0, window_end(w)))) throw DomainError("cumulant must be finite at h = 0");

  std::function<bool(double)> predicate = std::visit(
      overloaded{[&](const window::Periodic& p) -> std::function<bool(double)> {
                   return [&a, l = p.l, &tol](double h) { return a.eval(h, l) <= tol.atol; };
                 },
                 [&](const window::QuasiPeriodic& q) -> std::function<bool(double)> {
                   return [&a, q, &tol](double h) { return max_period_increment(a, h, q.t0, q.l) <= tol.atol; };
                 },
                 [&](const auto&) -> std::function<bool(double)> {
                   return [&a, &w, &tol](double h) { return sup_cumulant(a, h, w).value <= tol.atol; };
                 }},
      w);

  const ExtendedReal cap = std::min(h_max_hint, a.h_abscissa);
  const auto br = bisect_largest(predicate, cap, tol.htol);

  BoundCertificate cert;
  cert.window = w;
  cert.htol = tol.htol;
  cert.atol = tol.atol;
  cert.h_lo = br.lo;
  cert.h_hi = br.hi;
  cert.L = br.lo;
  cert.method = "adjustment_coefficient/" + window_kind(w);
  const auto sup = sup_cumulant(a, cert.L, w);
  cert.sup_at_L = sup.value;
  cert.argmax_t = sup.argmax;
  cert.C = std::exp(std::max(0.0, sup.value));
  if (cert.L <= 0.0) {
    cert.L = 0.0;
    cert.C = 1.0;
    cert.degenerate = true;
    cert.notes.push_back("no positive exponent satisfies the predicate; bound degenerates to 1");
  }
  return cert;
}

BoundCertificate periodic_exponent(const ModelB& m, double l, Tolerances tol) {
  auto cert = adjustment_coefficient(cumulant_fn(m), window::Periodic{l}, kInfinity, tol);
  cert.method = "periodic_exponent";
  if (!cert.degenerate) {
    std::vector<double> hs;
    std::vector<double> ts;
    for (int i = 0; i <= 8; ++i) hs.push_back(cert.L * i / 8.0);
    for (int i = 0; i <= 60; ++i) ts.push_back(3.0 * l * i / 60.0);
    const auto rep = check_quasi_periodic(m, l, hs, ts);
    cert.notes.push_back(rep.pass ? "quasi-periodic conditions: PASS on grid (evidence, not proof)"
                                  : "quasi-periodic conditions: FAIL (" + rep.condition + " at t=" +
                                        std::to_string(rep.t) + "); window reduction not justified");
  }
  return cert;
}

BoundCertificate quasi_periodic_constant(const ModelB& m, double l, double t0, double L_tilde, Tolerances tol) {
  const TimeWindow w = window::QuasiPeriodic{t0, l};
  validate(w);
  if (!(L_tilde >= 0.0)) throw DomainError("exponent must be >= 0");
  BoundCertificate cert;
  cert.window = w;
  cert.htol = tol.htol;
  cert.atol = tol.atol;
  cert.method = "quasi_periodic_constant";
  if (L_tilde == 0.0) {
    cert.degenerate = true;
    cert.notes.push_back("zero exponent gives the vacuous bound 1");
    return cert;
  }
  const auto a = cumulant_fn(m);
  const ExtendedReal inc = max_period_increment(a, L_tilde, t0, l);
  if (!(inc <= tol.atol)) {
    throw HypothesisViolated("per-period contraction E exp(L(Y(t+l)-Y(t))) <= 1 fails on the grid", -1);
  }
  const auto sup = sup_cumulant(a, L_tilde, w);
  cert.L = L_tilde;
  cert.h_lo = cert.h_hi = L_tilde;
  cert.sup_at_L = sup.value;
  cert.argmax_t = sup.argmax;
  cert.C = std::exp(std::max(0.0, sup.value));
  return cert;
}

UnitedExponents united_exponents(const UnitedModel& m, Tolerances tol) {
  UnitedExponents out;
  for (const auto& br : m.branches) {
    auto pred = [&br](double h) { return branch_cumulant(br, h) <= 0.0; };
    out.branch.push_back(bisect_largest(pred, abscissa(br.claims), tol.htol).lo);
  }
  std::vector<double> starts;
  for (const auto& br : m.branches) starts.push_back(br.start);
  out.overall = adjustment_coefficient(cumulant_fn(m), window::United{starts}, kInfinity, tol);
  out.overall.method = "united_exponents";
  const double min_branch = *std::min_element(out.branch.begin(), out.branch.end());
  const double slack = 10.0 * tol.htol;
  if (out.overall.L > out.branch.front() + slack || out.overall.L < min_branch - slack) {
    out.overall.notes.push_back("sandwich L0 >= L >= min_i Li violated beyond tolerance");
  }
  return out;
}

OptimizedBound optimized_bound(const std::function<ExtendedReal(double)>& log_sup_mgf, double u, double h_lo,
                               double h_hi) {
  if (!(u >= 0.0)) throw DomainError("optimized_bound requires u >= 0");
  if (!(h_lo >= 0.0) || !(h_hi >= h_lo) || !std::isfinite(h_hi)) throw DomainError("invalid h domain");
  auto objective = [&](double h) {
    const ExtendedReal v = log_sup_mgf(h);
    return is_divergent(v) ? kInfinity : v - h * u;
  };
  constexpr std::size_t kGrid = 257;
  const auto hs = linspace(h_lo, h_hi, kGrid);
  std::size_t best = 0;
  double best_val = kInfinity;
  std::vector<double> vals(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    vals[i] = objective(hs[i]);
    if (vals[i] < best_val) {
      best_val = vals[i];
      best = i;
    }
  }
  if (!std::isfinite(best_val)) return {1.0, 0.0};
  double h_star = hs[best];
  if (hs.size() > 1 && h_hi > h_lo) {
    const double lo = hs[best == 0 ? 0 : best - 1];
    const double hi = hs[std::min(best + 1, hs.size() - 1)];
    auto neg = [&](double h) { return -objective(h); };
    const auto [h_ref, neg_val] = golden_max(neg, lo, hi, 1e-12 * std::max(1.0, hi));
    if (-neg_val < best_val) {
      best_val = -neg_val;
      h_star = h_ref;
    }
  }
  const double b = std::exp(best_val);
  if (b >= 1.0) return {1.0, 0.0};
  return {b, h_star};
}

std::function<ExtendedReal(double)> log_sup_mgf(const CumulantFn& a, const TimeWindow& w) {
  // Window suprema only stand in for all t >= 0 while the per-period
  // contraction holds at this h.
  return [a, w](double h) -> ExtendedReal {
    if (const auto* p = std::get_if<window::Periodic>(&w)) {
      const ExtendedReal step = a.eval(h, p->l);
      if (is_divergent(step) || step > 0.0) return kInfinity;
    } else if (const auto* q = std::get_if<window::QuasiPeriodic>(&w)) {
      if (!(max_period_increment(a, h, q->t0, q->l) <= 0.0)) return kInfinity;
    }
    return sup_cumulant(a, h, w).value;
  };
}

}  // namespace ruin
