#include "ruin/cli.hpp"

#include "ruin/bounds.hpp"
#include "ruin/errors.hpp"
#include "ruin/presets.hpp"
#include "ruin/renewal_bounds.hpp"
#include "ruin/serialization.hpp"
#include "ruin/simulator.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ruin::cli {

namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::vector<double> u;
  std::optional<std::size_t> paths;
  std::optional<double> horizon;
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string out_path;
  std::optional<unsigned> workers;
  std::string certificate_path;
  std::string example_name;
};

constexpr std::size_t kDefaultPaths = 100000;
constexpr std::size_t kDefaultSteps = 200;
constexpr std::size_t kDefaultNMax = 200;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Everything a command needs to turn u into a bound.
struct Certified {
  std::string model_kind;
  std::optional<BoundCertificate> cert;
  std::optional<RenewalBoundReport> renewal;
  std::function<ExtendedReal(double)> log_sup_mgf;
  double h_hi = 0.0;
  Json extra = Json::object();
  std::vector<std::string> notes;

  bool degenerate() const { return cert && cert->degenerate; }

  double bound(double u) const {
    if (cert) return cert->bound(u);
    if (renewal) return renewal->bound(u);
    return optimized(u).bound;
  }

  OptimizedBound optimized(double u) const {
    if (!log_sup_mgf || !(h_hi > 0.0)) return {1.0, 0.0};
    return optimized_bound(log_sup_mgf, u, 0.0, h_hi);
  }

  std::optional<double> exponent() const {
    if (cert) return cert->L;
    if (renewal) return renewal->h;
    return std::nullopt;
  }

  std::optional<double> constant() const {
    if (cert) return cert->C;
    if (renewal) return std::exp(renewal->h * renewal->C_m);
    return std::nullopt;
  }

  Json report() const {
    Json j = cert ? to_json(*cert) : renewal ? to_json(*renewal) : Json::object();
    j["model"] = model_kind;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    if (!notes.empty()) {
      if (!j.contains("notes")) j["notes"] = Json::array();
      for (const auto& n : notes) j["notes"].push_back(n);
    }
    return j;
  }
};

TimeWindow choose_window(const ModelSpec& spec, const RunParams& run) {
  if (run.window) return *run.window;
  if (auto l = spec.natural_period()) return window::Periodic{*l};
  return window::FiniteHorizon{run.horizon.value_or(default_horizon(*spec.continuous).T)};
}

ExtendedReal min_step_abscissa(const RenewalModel& m, std::size_t n) {
  ExtendedReal a = kInfinity;
  for (std::size_t k = 1; k <= n; ++k) a = std::min(a, step_abscissa(m.step(k)));
  return a;
}

Certified certify(const ModelSpec& spec, const RunParams& run) {
  Certified out;
  out.model_kind = spec.kind;
  if (spec.continuous) {
    const ModelB& m = *spec.continuous;
    const TimeWindow w = choose_window(spec, run);
    BoundCertificate cert;
    if (const auto* p = std::get_if<window::Periodic>(&w)) {
      cert = periodic_exponent(m, p->l);
    } else if (const auto* q = std::get_if<window::QuasiPeriodic>(&w)) {
      const double L = run.exponent ? *run.exponent : periodic_exponent(m, q->l).L;
      cert = quasi_periodic_constant(m, q->l, q->t0, L);
    } else {
      cert = adjustment_coefficient(cumulant_fn(m), w);
    }
    out.log_sup_mgf = log_sup_mgf(cumulant_fn(m), cert.window);
    out.h_hi = cert.L;
    out.cert = cert;
    return out;
  }
  if (spec.united) {
    const auto ue = united_exponents(*spec.united);
    out.cert = ue.overall;
    out.extra["branch_L"] = ue.branch;
    out.log_sup_mgf = log_sup_mgf(cumulant_fn(*spec.united), ue.overall.window);
    out.h_hi = ue.overall.L;
    return out;
  }
  const RenewalModel& m = *spec.renewal;
  const std::size_t n_max = run.n_max.value_or(kDefaultNMax);
  if (spec.preset == "example3") {
    out.log_sup_mgf = [](double h) -> ExtendedReal { return presets::accelerating_drift_log_sup_mgf(h); };
    out.extra["evaluator"] = "continuous relaxation in n: 4h^3/27";
  } else {
    out.log_sup_mgf = [&m, n_max](double h) { return renewal_log_sup_mgf(m, h, n_max); };
    out.extra["evaluator"] = m.eventually_periodic() ? "exact (periodic tail)" : "max over n <= n_max";
  }
  const ExtendedReal abscissa = min_step_abscissa(m, m.length() ? std::min(*m.length(), n_max) : n_max);
  out.h_hi = std::isfinite(abscissa) ? abscissa * (1.0 - 1e-9) : 64.0;
  if (!m.decomposed()) {
    out.extra["method"] = "optimized_mgf";
    return out;
  }
  TruncationParams params;
  // Default claim exponent cap: half the smallest claim abscissa.
  ExtendedReal claim_abscissa = kInfinity;
  for (std::size_t k = 1; k <= (m.length() ? std::min(*m.length(), n_max) : n_max); ++k) {
    claim_abscissa = std::min(claim_abscissa, ruin::abscissa(std::get<DecomposedStep>(m.step(k)).claim));
  }
  params.H = run.H.value_or(std::isfinite(claim_abscissa) ? 0.5 * claim_abscissa : 1.0);
  params.C = run.C.value_or(1.0);
  params.m = run.m.value_or(1);
  params.c_star = run.c_star;
  params.C_star = run.C_star;
  if (run.h) {
    out.renewal = corollary8_bound(m, params, *run.h, n_max);
  } else if (run.C) {
    out.renewal = corollary9_bound(m, params, n_max);
  } else {
    out.renewal = corollary10_search(m, params.H, n_max);
  }
  return out;
}

Certified certified_from_file(const std::string& path, const std::string& kind) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("certificate: JSON parse error: ") + e.what());
  }
  Certified c;
  c.model_kind = kind;
  if (j.contains("C_m")) {
    c.renewal = renewal_report_from_json(j);
  } else {
    c.cert = certificate_from_json(j);
  }
  return c;
}

SimEstimate simulate(const ModelSpec& spec, SimConfig cfg, std::ostream& err) {
  if (spec.renewal) return estimate_ruin_renewal(*spec.renewal, cfg);
  if (!(cfg.horizon > 0.0)) {
    const HorizonChoice hc = spec.united ? default_horizon(*spec.united) : default_horizon(*spec.continuous);
    if (!hc.warning.empty()) err << "warning: " << hc.warning << "\n";
    cfg.horizon = hc.T;
  }
  if (spec.united) return estimate_ruin_united(*spec.united, cfg);
  if (spec.kind == "compound_poisson") return estimate_ruin_model_a(spec.continuous->base, cfg);
  return estimate_ruin_model_b(*spec.continuous, cfg);
}

struct Context {
  Options opt;
  RunConfig cfg;
  std::ostream& err;

  std::vector<double> u_values(std::vector<double> fallback) const {
    if (!opt.u.empty()) return opt.u;
    if (cfg.run.u) return *cfg.run.u;
    return fallback;
  }

  SimConfig sim_config(double u) const {
    SimConfig s;
    s.u = u;
    s.paths = opt.paths ? *opt.paths : cfg.run.paths.value_or(kDefaultPaths);
    if (s.paths == 0) throw ConfigError("paths must be positive");
    s.seed = opt.seed.value_or(cfg.run.seed.value_or(1));
    s.workers = opt.workers ? *opt.workers : cfg.run.workers.value_or(1);
    if (cfg.model.renewal) {
      s.steps = opt.steps ? *opt.steps
                          : opt.horizon ? static_cast<std::size_t>(std::llround(*opt.horizon))
                                        : cfg.run.steps.value_or(kDefaultSteps);
    } else {
      s.horizon = opt.horizon ? *opt.horizon : cfg.run.horizon.value_or(0.0);
    }
    return s;
  }
};

std::string render_rows(const std::vector<ReportRow>& rows, const std::string& format, Json head) {
  if (format == "csv") return to_csv(rows);
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  head["rows"] = arr;
  return head.dump(2) + "\n";
}

ReportRow bound_row(const Certified& c, double u) {
  ReportRow r;
  r.u = u;
  r.bound = c.bound(u);
  r.L = c.exponent();
  r.C = c.constant();
  return r;
}

int cmd_bound(Context& ctx, std::string& report) {
  const Certified c = certify(ctx.cfg.model, ctx.cfg.run);
  std::vector<ReportRow> rows;
  for (double u : ctx.u_values({1.0, 2.0, 5.0})) rows.push_back(bound_row(c, u));
  report = render_rows(rows, ctx.opt.format, c.report());
  if (c.degenerate()) {
    ctx.err << "degenerate certificate: L = 0\n";
    return kDegenerate;
  }
  return kOk;
}

int cmd_simulate(Context& ctx, std::string& report) {
  std::vector<ReportRow> rows;
  Json estimates = Json::array();
  for (double u : ctx.u_values({1.0})) {
    const SimEstimate e = simulate(ctx.cfg.model, ctx.sim_config(u), ctx.err);
    estimates.push_back(to_json(e));
    ReportRow r;
    r.u = u;
    r.p_hat = e.p_hat;
    r.ci_lo = e.ci_lo;
    r.ci_hi = e.ci_hi;
    rows.push_back(r);
  }
  if (ctx.opt.format == "csv") {
    report = to_csv(rows);
  } else {
    report = (estimates.size() == 1 ? estimates[0] : Json{{"estimates", estimates}}).dump(2) + "\n";
  }
  return kOk;
}

int cmd_verify(Context& ctx, std::string& report) {
  const Certified c = ctx.opt.certificate_path.empty()
                          ? certify(ctx.cfg.model, ctx.cfg.run)
                          : certified_from_file(ctx.opt.certificate_path, ctx.cfg.model.kind);
  std::vector<ReportRow> rows;
  std::size_t violations = 0;
  Json head{{"model", ctx.cfg.model.kind}, {"certificate", c.report()}};
  for (double u : ctx.u_values({1.0, 2.0, 5.0})) {
    const SimConfig sc = ctx.sim_config(u);
    const SimEstimate e = simulate(ctx.cfg.model, sc, ctx.err);
    ReportRow r = bound_row(c, u);
    r.p_hat = e.p_hat;
    r.ci_lo = e.ci_lo;
    r.ci_hi = e.ci_hi;
    r.verdict = judge(*r.bound, e.ci_lo);
    if (r.verdict == Verdict::Violation) ++violations;
    rows.push_back(r);
    head["paths"] = e.paths;
    head["seed"] = e.seed;
    head["horizon"] = e.horizon;
  }
  head["violations"] = violations;
  report = render_rows(rows, ctx.opt.format, head);
  if (violations > 0) {
    ctx.err << violations << " row(s) violate the certified bound\n";
    return kViolation;
  }
  return kOk;
}

std::vector<double> sweep_values(const Context& ctx) {
  if (!ctx.opt.u.empty()) return ctx.opt.u;
  if (ctx.cfg.run.u_range) {
    const URange r = *ctx.cfg.run.u_range;
    if (!(r.step > 0.0) || !(r.to >= r.from) || !(r.from > 0.0)) {
      throw ConfigError("run.u_range must satisfy 0 < from <= to and step > 0");
    }
    const auto n = static_cast<std::size_t>(std::floor((r.to - r.from) / r.step + 1e-9)) + 1;
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(r.from + static_cast<double>(i) * r.step);
    return out;
  }
  if (ctx.cfg.run.u) return *ctx.cfg.run.u;
  throw ConfigError("sweep needs --u or run.u_range");
}

int cmd_sweep(Context& ctx, std::string& report) {
  const auto us = sweep_values(ctx);
  if (us.empty()) throw ConfigError("empty u range");
  const Certified c = certify(ctx.cfg.model, ctx.cfg.run);
  const bool with_mc = ctx.opt.paths.has_value() || ctx.cfg.run.paths.has_value();
  std::vector<ReportRow> rows;
  for (double u : us) {
    const OptimizedBound ob = c.optimized(u);
    ReportRow r;
    r.u = u;
    r.bound = ob.bound;
    r.L = c.exponent();
    r.C = c.constant();
    r.h_star = ob.h_star;
    if (with_mc) {
      const SimEstimate e = simulate(ctx.cfg.model, ctx.sim_config(u), ctx.err);
      r.p_hat = e.p_hat;
      r.ci_lo = e.ci_lo;
      r.ci_hi = e.ci_hi;
      r.verdict = judge(ob.bound, e.ci_lo);
    }
    rows.push_back(r);
  }
  report = render_rows(rows, ctx.opt.format, Json{{"model", ctx.cfg.model.kind}});
  for (const auto& r : rows) {
    if (r.verdict == Verdict::Violation) return kViolation;
  }
  return kOk;
}

std::string fixed(double x, int digits) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << x;
  return os.str();
}

int cmd_example(Context& ctx, std::string& report) {
  const std::string& name = ctx.opt.example_name;
  if (name != "example1" && name != "example2" && name != "example3") {
    throw ConfigError("unknown example \"" + name + "\" (valid: example1, example2, example3)");
  }
  ctx.cfg.model = model_from_json(Json{{"model", "preset"}, {"name", name}});
  Certified c = certify(ctx.cfg.model, ctx.cfg.run);
  std::vector<double> us;
  if (name == "example1") {
    us = {1.0, 2.0, 5.0};
    c.notes.push_back("window constant C = e^{1.5} = " + fixed(c.cert->C, 6) +
                      "; the value 3/2 sometimes printed for it is log C, the peak of a(0.75, t) at t = 1");
  } else if (name == "example2") {
    us = {1.0, 2.0, 5.0};
    const auto branch = c.extra["branch_L"].get<std::vector<double>>();
    const double lmin = *std::min_element(branch.begin(), branch.end());
    c.notes.push_back("sandwich L(0) >= L >= min L(i): " + fixed(branch[0], 6) + " >= " + fixed(c.cert->L, 6) +
                      " >= " + fixed(lmin, 6));
    c.notes.push_back("L is computed numerically; it falls below L(0) because a(h, t) keeps growing after the "
                      "unprofitable branch opens unless h <= 0.6");
  } else {
    us = {1.0, 4.0, 9.0};
    c.notes.push_back("optimized bound exp(-u^{3/2}) at h* = 1.5 sqrt(u)");
  }
  if (!ctx.opt.u.empty()) us = ctx.opt.u;
  const bool with_mc = ctx.opt.paths.has_value();
  std::vector<ReportRow> rows;
  std::size_t violations = 0;
  for (double u : us) {
    ReportRow r = bound_row(c, u);
    if (name == "example3") {
      const OptimizedBound ob = c.optimized(u);
      r.bound = ob.bound;
      r.h_star = ob.h_star;
    }
    if (with_mc) {
      const SimEstimate e = simulate(ctx.cfg.model, ctx.sim_config(u), ctx.err);
      r.p_hat = e.p_hat;
      r.ci_lo = e.ci_lo;
      r.ci_hi = e.ci_hi;
      r.verdict = judge(*r.bound, e.ci_lo);
      if (r.verdict == Verdict::Violation) ++violations;
    }
    rows.push_back(r);
  }
  Json head = c.report();
  head["example"] = name;
  report = render_rows(rows, ctx.opt.format, head);
  return violations ? kViolation : kOk;
}

int dispatch(Context& ctx, std::string& report) {
  const std::string& cmd = ctx.opt.command;
  if (cmd != "example") {
    if (ctx.opt.config_path.empty()) throw ConfigError("--config is required for " + cmd);
    ctx.cfg = parse_run_config(read_file(ctx.opt.config_path));
  }
  if (cmd == "bound") return cmd_bound(ctx, report);
  if (cmd == "simulate") return cmd_simulate(ctx, report);
  if (cmd == "verify") return cmd_verify(ctx, report);
  if (cmd == "sweep") return cmd_sweep(ctx, report);
  return cmd_example(ctx, report);
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("RUIN_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != std::string(s).size()) throw ConfigError("RUIN_SEED must be an integer");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("RUIN_SEED must be an integer");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential ruin-probability bounds and Monte-Carlo checks", "ruin_cli"};
  app.require_subcommand(1, 1);
  Options opt;
  std::size_t paths = 0;
  double horizon = 0.0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config_path, "Model/run JSON document");
    if (!needs_config) c->description("unused");
    sub->add_option("--u", opt.u, "Initial reserves, comma separated")->delimiter(',');
    sub->add_option("--paths", paths, "Monte-Carlo paths");
    sub->add_option("--horizon", horizon, "Simulation horizon T");
    sub->add_option("--steps", steps, "Renewal walk length");
    sub->add_option("--seed", seed, "Master seed (overrides RUIN_SEED)");
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", opt.out_path, "Write the report here instead of stdout");
    sub->add_option("--workers", workers, "Worker threads (results do not depend on it)");
  };
  auto* bound = app.add_subcommand("bound", "Certify an exponential bound");
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo ruin estimate");
  auto* verify = app.add_subcommand("verify", "Bound versus Monte-Carlo dominance table");
  auto* sweep = app.add_subcommand("sweep", "Optimized bound over a range of u");
  auto* example = app.add_subcommand("example", "Run a built-in example");
  for (auto* s : {bound, sim, verify, sweep}) add_common(s, true);
  add_common(example, false);
  verify->add_option("--certificate", opt.certificate_path, "Check a stored certificate instead of computing one");
  example->add_option("name", opt.example_name, "example1, example2 or example3")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  for (auto* s : {bound, sim, verify, sweep, example}) {
    if (s->parsed()) {
      opt.command = s->get_name();
      if (s->count("--paths")) opt.paths = paths;
      if (s->count("--horizon")) opt.horizon = horizon;
      if (s->count("--steps")) opt.steps = steps;
      if (s->count("--seed")) opt.seed = seed;
      if (s->count("--workers")) opt.workers = workers;
    }
  }

  Context ctx{opt, RunConfig{ModelSpec{}, RunParams{}}, err};
  std::string report;
  int code = kOk;
  try {
    if (!ctx.opt.seed) ctx.opt.seed = env_seed();
    if (ctx.opt.paths && *ctx.opt.paths == 0) throw ConfigError("--paths must be positive");
    if (ctx.opt.horizon && !(*ctx.opt.horizon > 0.0)) throw ConfigError("--horizon must be positive");
    for (double u : ctx.opt.u) {
      if (!(u > 0.0)) throw ConfigError("--u values must be positive");
    }
    code = dispatch(ctx, report);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const HypothesisViolated& e) {
    err << "no certificate: " << e.what() << "\n";
    return kDegenerate;
  } catch (const NoCertificate& e) {
    err << "no certificate: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  if (opt.out_path.empty()) {
    out << report;
  } else {
    std::ofstream f(opt.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << opt.out_path << "\n";
      return kInputError;
    }
    f << report;
  }
  return code;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ruin::cli
