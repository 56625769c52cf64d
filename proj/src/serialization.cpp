#include "ruin/serialization.hpp"

#include "ruin/errors.hpp"
#include "ruin/presets.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace ruin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_object(const Json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected an object");
}

void only_keys(const Json& j, const std::string& what, std::initializer_list<const char*> allowed) {
  require_object(j, what);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!ok.count(key)) throw ConfigError(what + ": unknown key \"" + key + "\"");
  }
}

const Json& need(const Json& j, const std::string& what, const char* key) {
  if (!j.contains(key)) throw ConfigError(what + ": missing key \"" + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(what + ": expected a finite number");
  return x;
}

double num_at(const Json& j, const std::string& what, const char* key) {
  return number(need(j, what, key), what + "." + key);
}

std::size_t count(const Json& j, const std::string& what, bool allow_zero = false) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(what + ": expected a non-negative integer");
  const auto v = j.get<unsigned long long>();
  if (v == 0 && !allow_zero) throw ConfigError(what + " must be positive");
  return static_cast<std::size_t>(v);
}

std::vector<double> numbers(const Json& j, const std::string& what) {
  if (j.is_number()) return {number(j, what)};
  if (!j.is_array()) throw ConfigError(what + ": expected a number array");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x, what));
  return out;
}

// Factories throw DomainError; surface them as config errors.
template <class F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

double extended_from_json(const Json& j) { return j.is_null() ? kInfinity : j.get<double>(); }

RenewalStep step_from_json(const Json& j, const std::string& what) {
  require_object(j, what);
  if (j.contains("increment")) {
    only_keys(j, what, {"increment"});
    return DirectStep{distribution_from_json(j.at("increment"))};
  }
  only_keys(j, what, {"claim", "inter_time", "premium_rate"});
  const double p = num_at(j, what, "premium_rate");
  if (p < 0.0) throw ConfigError(what + ".premium_rate must be >= 0");
  return DecomposedStep{distribution_from_json(need(j, what, "claim")),
                        distribution_from_json(need(j, what, "inter_time")), p};
}

std::vector<RenewalStep> steps_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array of steps");
  std::vector<RenewalStep> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(step_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

bool constant_poly(const PiecewisePoly& p) { return p.breakpoints().size() == 1 && p.is_piecewise_constant(); }

}  // namespace

Distribution distribution_from_json(const Json& j) {
  const std::string what = "distribution";
  require_object(j, what);
  const std::string kind = need(j, what, "kind").get<std::string>();
  return guarded(what + " (" + kind + ")", [&]() -> Distribution {
    if (kind == "exponential") {
      only_keys(j, what, {"kind", "rate"});
      return Distribution::exponential(num_at(j, what, "rate"));
    }
    if (kind == "gamma") {
      only_keys(j, what, {"kind", "shape", "rate"});
      return Distribution::gamma(num_at(j, what, "shape"), num_at(j, what, "rate"));
    }
    if (kind == "uniform") {
      only_keys(j, what, {"kind", "lo", "hi"});
      return Distribution::uniform(num_at(j, what, "lo"), num_at(j, what, "hi"));
    }
    if (kind == "deterministic") {
      only_keys(j, what, {"kind", "point"});
      return Distribution::deterministic(num_at(j, what, "point"));
    }
    if (kind == "normal") {
      only_keys(j, what, {"kind", "mean", "variance"});
      return Distribution::normal(num_at(j, what, "mean"), num_at(j, what, "variance"));
    }
    if (kind == "discrete") {
      only_keys(j, what, {"kind", "values", "probs"});
      return Distribution::discrete(numbers(need(j, what, "values"), what + ".values"),
                                    numbers(need(j, what, "probs"), what + ".probs"));
    }
    if (kind == "pareto" || kind == "lognormal" || kind == "weibull" || kind == "cauchy" || kind == "student_t") {
      throw ConfigError("distribution kind \"" + kind +
                        "\" is heavy-tailed; exponential bounds need a positive abscissa");
    }
    throw ConfigError("unknown distribution kind \"" + kind + "\"");
  });
}

Json to_json(const Distribution& d) {
  return std::visit(overloaded{
                        [](const dist::Exponential& x) { return Json{{"kind", "exponential"}, {"rate", x.rate}}; },
                        [](const dist::Gamma& x) { return Json{{"kind", "gamma"}, {"shape", x.shape}, {"rate", x.rate}}; },
                        [](const dist::Uniform& x) { return Json{{"kind", "uniform"}, {"lo", x.lo}, {"hi", x.hi}}; },
                        [](const dist::Deterministic& x) { return Json{{"kind", "deterministic"}, {"point", x.point}}; },
                        [](const dist::Normal& x) {
                          return Json{{"kind", "normal"}, {"mean", x.mean}, {"variance", x.variance}};
                        },
                        [](const dist::Discrete& x) {
                          return Json{{"kind", "discrete"}, {"values", x.values}, {"probs", x.probs}};
                        }},
                    d.variant());
}

PiecewisePoly poly_from_json(const Json& j) {
  const std::string what = "piecewise polynomial";
  if (j.is_number()) return PiecewisePoly::constant(number(j, what));
  only_keys(j, what, {"breakpoints", "pieces", "period"});
  const auto bps = numbers(need(j, what, "breakpoints"), what + ".breakpoints");
  const Json& pj = need(j, what, "pieces");
  if (!pj.is_array()) throw ConfigError(what + ".pieces: expected an array");
  std::vector<PiecewisePoly::Coeffs> pieces;
  for (const auto& piece : pj) {
    const auto c = numbers(piece, what + ".pieces");
    if (c.empty() || c.size() > 4) throw ConfigError(what + ".pieces: each piece needs 1 to 4 coefficients");
    PiecewisePoly::Coeffs coeffs{0, 0, 0, 0};
    std::copy(c.begin(), c.end(), coeffs.begin());
    pieces.push_back(coeffs);
  }
  const double period = j.contains("period") ? number(j.at("period"), what + ".period") : 0.0;
  return guarded(what, [&] { return PiecewisePoly(bps, pieces, period); });
}

Json to_json(const PiecewisePoly& p) {
  if (constant_poly(p) && p.period() == 0.0) return p.pieces()[0][0];
  Json pieces = Json::array();
  for (const auto& c : p.pieces()) pieces.push_back(Json(std::vector<double>(c.begin(), c.end())));
  Json out{{"breakpoints", p.breakpoints()}, {"pieces", pieces}};
  if (p.period() > 0.0) out["period"] = p.period();
  return out;
}

TimeWindow window_from_json(const Json& j) {
  const std::string what = "window";
  require_object(j, what);
  const std::string kind = need(j, what, "kind").get<std::string>();
  if (kind == "finite") {
    only_keys(j, what, {"kind", "T"});
    return window::FiniteHorizon{num_at(j, what, "T")};
  }
  if (kind == "periodic") {
    only_keys(j, what, {"kind", "l"});
    return window::Periodic{num_at(j, what, "l")};
  }
  if (kind == "quasi_periodic") {
    only_keys(j, what, {"kind", "t0", "l"});
    return window::QuasiPeriodic{num_at(j, what, "t0"), num_at(j, what, "l")};
  }
  if (kind == "united") {
    only_keys(j, what, {"kind", "breakpoints"});
    return window::United{numbers(need(j, what, "breakpoints"), what + ".breakpoints")};
  }
  throw ConfigError("unknown window kind \"" + kind + "\"");
}

Json to_json(const TimeWindow& w) {
  return std::visit(overloaded{[](const window::FiniteHorizon& x) { return Json{{"kind", "finite"}, {"T", x.T}}; },
                               [](const window::Periodic& x) { return Json{{"kind", "periodic"}, {"l", x.l}}; },
                               [](const window::QuasiPeriodic& x) {
                                 return Json{{"kind", "quasi_periodic"}, {"t0", x.t0}, {"l", x.l}};
                               },
                               [](const window::United& x) {
                                 return Json{{"kind", "united"}, {"breakpoints", x.breakpoints}};
                               }},
                    w);
}

std::optional<double> ModelSpec::natural_period() const {
  if (!continuous) return std::nullopt;
  const ModelA& a = continuous->base;
  std::optional<double> period;
  for (const PiecewisePoly* p : {&a.intensity, &a.premium, &a.claims.scale}) {
    if (constant_poly(*p) && p->period() == 0.0) continue;
    if (p->period() <= 0.0) return std::nullopt;
    if (period && std::abs(*period - p->period()) > 1e-12 * *period) return std::nullopt;
    period = p->period();
  }
  return period.value_or(1.0);
}

ModelSpec model_from_json(const Json& j) {
  const std::string what = "model";
  require_object(j, what);
  const std::string type = need(j, what, "model").get<std::string>();
  ModelSpec spec;
  spec.kind = type;
  if (type == "preset") {
    only_keys(j, what, {"model", "name"});
    const std::string name = need(j, what, "name").get<std::string>();
    spec.preset = name;
    if (name == "example1") {
      spec.kind = "compound_poisson";
      spec.continuous = presets::periodic_premium_model();
    } else if (name == "example2") {
      spec.kind = "united";
      spec.united = presets::two_branch_model();
    } else if (name == "example3") {
      spec.kind = "renewal";
      spec.renewal = presets::accelerating_drift_walk();
    } else if (name == "homogeneous") {
      spec.kind = "compound_poisson";
      spec.continuous = ModelB::undiscounted(presets::homogeneous_model());
    } else {
      throw ConfigError("unknown preset \"" + name + "\" (valid: example1, example2, example3, homogeneous)");
    }
    return spec;
  }
  if (type == "compound_poisson" || type == "discounted") {
    if (type == "compound_poisson") {
      only_keys(j, what, {"model", "intensity", "premium", "claims", "claim_scale"});
    } else {
      only_keys(j, what, {"model", "intensity", "premium", "claims", "claim_scale", "discount"});
    }
    auto claims = distribution_from_json(need(j, what, "claims"));
    auto scale = j.contains("claim_scale") ? poly_from_json(j.at("claim_scale")) : PiecewisePoly::constant(1.0);
    auto base = guarded(what, [&] {
      return ModelA(poly_from_json(need(j, what, "intensity")), poly_from_json(need(j, what, "premium")),
                    TimeVaryingClaimFamily(claims, scale));
    });
    if (type == "compound_poisson") {
      spec.continuous = ModelB::undiscounted(std::move(base));
    } else {
      const auto r = poly_from_json(need(j, what, "discount"));
      spec.continuous = guarded(what, [&] { return ModelB(base, r); });
    }
    return spec;
  }
  if (type == "united") {
    only_keys(j, what, {"model", "branches"});
    const Json& bj = need(j, what, "branches");
    if (!bj.is_array()) throw ConfigError("model.branches: expected an array");
    std::vector<Branch> branches;
    for (std::size_t i = 0; i < bj.size(); ++i) {
      const std::string bw = "model.branches[" + std::to_string(i) + "]";
      only_keys(bj[i], bw, {"start", "intensity", "premium_rate", "claims"});
      branches.push_back(Branch{num_at(bj[i], bw, "start"), num_at(bj[i], bw, "intensity"),
                                num_at(bj[i], bw, "premium_rate"), distribution_from_json(need(bj[i], bw, "claims"))});
    }
    spec.united = guarded(what, [&] { return UnitedModel(branches); });
    return spec;
  }
  if (type == "renewal") {
    only_keys(j, what, {"model", "preperiod", "period"});
    auto pre = j.contains("preperiod") ? steps_from_json(j.at("preperiod"), "model.preperiod") : std::vector<RenewalStep>{};
    auto per = j.contains("period") ? steps_from_json(j.at("period"), "model.period") : std::vector<RenewalStep>{};
    spec.renewal = guarded(what, [&] { return RenewalModel(pre, per); });
    return spec;
  }
  throw ConfigError("unknown model type \"" + type +
                    "\" (valid: compound_poisson, discounted, united, renewal, preset)");
}

RunConfig run_config_from_json(const Json& j) {
  require_object(j, "config");
  Json model = j;
  model.erase("run");
  RunConfig cfg{model_from_json(model), {}};
  if (!j.contains("run")) return cfg;
  const Json& r = j.at("run");
  const std::string w = "run";
  only_keys(r, w,
            {"u", "u_range", "horizon", "steps", "paths", "seed", "workers", "window", "exponent", "H", "C", "m",
             "c_star", "C_star", "h", "n_max"});
  RunParams& p = cfg.run;
  if (r.contains("u")) {
    p.u = numbers(r.at("u"), "run.u");
    if (p.u->empty()) throw ConfigError("run.u must not be empty");
    for (double u : *p.u) {
      if (!(u > 0.0)) throw ConfigError("run.u values must be positive");
    }
  }
  if (r.contains("u_range")) {
    const Json& ur = r.at("u_range");
    only_keys(ur, "run.u_range", {"from", "to", "step"});
    p.u_range = URange{num_at(ur, "run.u_range", "from"), num_at(ur, "run.u_range", "to"),
                       num_at(ur, "run.u_range", "step")};
  }
  if (r.contains("horizon")) {
    p.horizon = number(r.at("horizon"), "run.horizon");
    if (!(*p.horizon > 0.0)) throw ConfigError("run.horizon must be positive");
  }
  if (r.contains("steps")) p.steps = count(r.at("steps"), "run.steps");
  if (r.contains("paths")) p.paths = count(r.at("paths"), "run.paths");
  if (r.contains("seed")) {
    if (!r.at("seed").is_number_integer()) throw ConfigError("run.seed: expected an integer");
    p.seed = r.at("seed").get<std::uint64_t>();
  }
  if (r.contains("workers")) p.workers = static_cast<unsigned>(count(r.at("workers"), "run.workers"));
  if (r.contains("window")) p.window = window_from_json(r.at("window"));
  if (r.contains("exponent")) p.exponent = number(r.at("exponent"), "run.exponent");
  if (r.contains("H")) p.H = number(r.at("H"), "run.H");
  if (r.contains("C")) p.C = number(r.at("C"), "run.C");
  if (r.contains("m")) p.m = count(r.at("m"), "run.m");
  if (r.contains("c_star")) p.c_star = number(r.at("c_star"), "run.c_star");
  if (r.contains("C_star")) p.C_star = number(r.at("C_star"), "run.C_star");
  if (r.contains("h")) p.h = number(r.at("h"), "run.h");
  if (r.contains("n_max")) p.n_max = count(r.at("n_max"), "run.n_max");
  return cfg;
}

RunConfig parse_run_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  try {
    return run_config_from_json(j);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("schema error: ") + e.what());
  }
}

Json to_json(const BoundCertificate& c) {
  Json notes = Json::array();
  for (const auto& n : c.notes) notes.push_back(n);
  return Json{{"L", c.L},
              {"C", c.C},
              {"window", to_json(c.window)},
              {"sup_at_L", std::isfinite(c.sup_at_L) ? Json(c.sup_at_L) : Json(nullptr)},
              {"argmax_t", c.argmax_t},
              {"h_lo", c.h_lo},
              {"h_hi", c.h_hi},
              {"htol", c.htol},
              {"atol", c.atol},
              {"degenerate", c.degenerate},
              {"method", c.method},
              {"notes", notes}};
}

BoundCertificate certificate_from_json(const Json& j) {
  const std::string what = "certificate";
  require_object(j, what);
  try {
    BoundCertificate c;
    c.L = num_at(j, what, "L");
    c.C = num_at(j, what, "C");
    c.window = window_from_json(need(j, what, "window"));
    c.sup_at_L = extended_from_json(need(j, what, "sup_at_L"));
    c.argmax_t = num_at(j, what, "argmax_t");
    c.htol = num_at(j, what, "htol");
    c.atol = num_at(j, what, "atol");
    if (j.contains("h_lo")) c.h_lo = j.at("h_lo").get<double>();
    if (j.contains("h_hi")) c.h_hi = j.at("h_hi").get<double>();
    if (j.contains("degenerate")) c.degenerate = j.at("degenerate").get<bool>();
    if (j.contains("method")) c.method = j.at("method").get<std::string>();
    if (j.contains("notes")) c.notes = j.at("notes").get<std::vector<std::string>>();
    return c;
  } catch (const Json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

Json to_json(const SimEstimate& e) {
  return Json{{"paths", e.paths},     {"ruins", e.ruins},         {"p_hat", e.p_hat},
              {"ci99", {e.ci_lo, e.ci_hi}}, {"horizon", e.horizon}, {"seed", e.seed},
              {"mean_events", e.mean_events}};
}

SimEstimate estimate_from_json(const Json& j) {
  const std::string what = "estimate";
  require_object(j, what);
  try {
    SimEstimate e;
    e.paths = need(j, what, "paths").get<std::size_t>();
    e.ruins = need(j, what, "ruins").get<std::size_t>();
    e.p_hat = num_at(j, what, "p_hat");
    const auto ci = need(j, what, "ci99").get<std::vector<double>>();
    if (ci.size() != 2) throw ConfigError("estimate.ci99 must have two entries");
    e.ci_lo = ci[0];
    e.ci_hi = ci[1];
    e.horizon = num_at(j, what, "horizon");
    e.seed = need(j, what, "seed").get<std::uint64_t>();
    if (j.contains("mean_events")) e.mean_events = j.at("mean_events").get<double>();
    return e;
  } catch (const Json::exception& ex) {
    throw ConfigError(what + ": " + ex.what());
  }
}

Json to_json(const RenewalBoundReport& r) {
  return Json{{"corollary", r.corollary},
              {"m", r.m},
              {"C", r.C},
              {"H", r.H},
              {"c_star", r.c_star},
              {"C_star", r.C_star},
              {"h", r.h},
              {"C_m", r.C_m},
              {"tail_closed", r.tail_closed},
              {"hypotheses", r.hypotheses},
              {"A", r.A},
              {"B", r.B}};
}

RenewalBoundReport renewal_report_from_json(const Json& j) {
  const std::string what = "renewal report";
  require_object(j, what);
  try {
    RenewalBoundReport r;
    r.corollary = need(j, what, "corollary").get<int>();
    r.m = need(j, what, "m").get<std::size_t>();
    r.C = num_at(j, what, "C");
    r.H = num_at(j, what, "H");
    r.c_star = num_at(j, what, "c_star");
    r.C_star = num_at(j, what, "C_star");
    r.h = num_at(j, what, "h");
    r.C_m = num_at(j, what, "C_m");
    r.tail_closed = need(j, what, "tail_closed").get<bool>();
    if (j.contains("hypotheses")) r.hypotheses = j.at("hypotheses").get<std::vector<std::string>>();
    if (j.contains("A")) r.A = j.at("A").get<std::vector<double>>();
    if (j.contains("B")) r.B = j.at("B").get<std::vector<double>>();
    return r;
  } catch (const Json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Dominates:
      return "DOMINATES";
    case Verdict::Violation:
      return "VIOLATION";
    case Verdict::NotApplicable:
      break;
  }
  return "N/A";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "DOMINATES") return Verdict::Dominates;
  if (s == "VIOLATION") return Verdict::Violation;
  if (s == "N/A") return Verdict::NotApplicable;
  throw ConfigError("unknown verdict \"" + s + "\"");
}

Verdict judge(double bound, double ci_lo) { return bound < ci_lo ? Verdict::Violation : Verdict::Dominates; }

Json to_json(const ReportRow& r) {
  return Json{{"u", r.u},
              {"bound", optional_number(r.bound)},
              {"L", optional_number(r.L)},
              {"C", optional_number(r.C)},
              {"h_star", optional_number(r.h_star)},
              {"p_hat", optional_number(r.p_hat)},
              {"ci_lo", optional_number(r.ci_lo)},
              {"ci_hi", optional_number(r.ci_hi)},
              {"verdict", to_string(r.verdict)}};
}

ReportRow row_from_json(const Json& j) {
  require_object(j, "row");
  try {
    ReportRow r;
    r.u = num_at(j, "row", "u");
    r.bound = read_optional(j, "bound");
    r.L = read_optional(j, "L");
    r.C = read_optional(j, "C");
    r.h_star = read_optional(j, "h_star");
    r.p_hat = read_optional(j, "p_hat");
    r.ci_lo = read_optional(j, "ci_lo");
    r.ci_hi = read_optional(j, "ci_hi");
    r.verdict = verdict_from_string(need(j, "row", "verdict").get<std::string>());
    return r;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("row: ") + e.what());
  }
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_line(const ReportRow& r) {
  auto cell = [](const std::optional<double>& x) { return x ? format_number(*x) : std::string(); };
  std::string out = format_number(r.u);
  for (const auto* x : {&r.bound, &r.L, &r.C, &r.h_star, &r.p_hat, &r.ci_lo, &r.ci_hi}) out += "," + cell(*x);
  return out + "," + to_string(r.verdict);
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) out += csv_line(r) + "\n";
  return out;
}

std::vector<ReportRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("csv: unexpected header");
  auto parse = [](const std::string& cell) -> std::optional<double> {
    if (cell.empty()) return std::nullopt;
    if (cell == "inf") return kInfinity;
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) throw ConfigError("csv: bad number " + cell);
    return v;
  };
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 9) throw ConfigError("csv: expected 9 columns");
    ReportRow r;
    const auto u = parse(cells[0]);
    if (!u) throw ConfigError("csv: missing u");
    r.u = *u;
    r.bound = parse(cells[1]);
    r.L = parse(cells[2]);
    r.C = parse(cells[3]);
    r.h_star = parse(cells[4]);
    r.p_hat = parse(cells[5]);
    r.ci_lo = parse(cells[6]);
    r.ci_hi = parse(cells[7]);
    r.verdict = verdict_from_string(cells[8]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ruin
