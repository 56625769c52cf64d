// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "generators.hpp"
#include "ruin/bounds.hpp"
#include "ruin/cli.hpp"
#include "ruin/errors.hpp"
#include "ruin/presets.hpp"
#include "ruin/renewal_bounds.hpp"
#include "ruin/simulator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace ruin;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string num(double x, int digits = 8) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

int failures = 0;

void criterion(const std::string& id, const std::string& title, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0 && secs >= time_limit_s) {
    o.pass = false;
    o.note("runtime " + num(secs, 3) + " s exceeds " + num(time_limit_s, 3) + " s");
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %s %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

ModelA homogeneous() { return presets::homogeneous_model(1.0, 1.0, 2.0); }

// Random decomposed walk on the half-integer lattice with strictly negative step means.
RenewalModel lattice_walk(gen::Gen& G) {
  std::vector<RenewalStep> period;
  for (int i = G.integer(1, 2); i > 0; --i) {
    for (;;) {
      std::vector<double> zv, zp, tv, tp;
      double zs = 0, ts = 0;
      for (int k = G.integer(1, 3); k > 0; --k) {
        zv.push_back(G.integer(0, 6) / 2.0);
        zp.push_back(G.real(0.1, 1.0));
        zs += zp.back();
      }
      for (int k = G.integer(1, 2); k > 0; --k) {
        tv.push_back(G.integer(1, 4) / 2.0);
        tp.push_back(G.real(0.1, 1.0));
        ts += tp.back();
      }
      for (auto& p : zp) p /= zs;
      for (auto& p : tp) p /= ts;
      DecomposedStep s{Distribution::discrete(zv, zp), Distribution::discrete(tv, tp), static_cast<double>(G.integer(1, 3))};
      if (mean(s.claim) - s.premium_rate * mean(s.inter_time) < -0.05) {
        period.push_back(std::move(s));
        break;
      }
    }
  }
  return RenewalModel({}, period);
}

}  // namespace

int main() {
  criterion("AC1", "periodic-premium exponent", 1.0, [] {
    Outcome o;
    const auto cert = periodic_exponent(presets::periodic_premium_model(), presets::kPeriodicPremiumPeriod);
    o.require(std::abs(cert.L - 0.75) <= 1e-6, "|L - 0.75| <= 1e-6");
    o.note("L = " + num(cert.L, 12));
    return o;
  });

  criterion("AC2", "periodic-premium window constant", 0.0, [] {
    Outcome o;
    const auto cert = periodic_exponent(presets::periodic_premium_model(), presets::kPeriodicPremiumPeriod);
    // a(0.75, t) = -1.5 t^2 + 3 t on [0, 2]; vertex at t = 1
    double best = -1e300;
    for (int i = 0; i <= 200000; ++i) {
      const double t = 2.0 * i / 200000;
      best = std::max(best, -1.5 * t * t + 3.0 * t);
    }
    const double closed = std::exp(best);
    o.require(std::abs(cert.C / closed - 1.0) <= 1e-6, "C within relative 1e-6 of the closed form");
    o.require(std::abs(closed / std::exp(1.5) - 1.0) <= 1e-12, "closed form peak equals e^{1.5}");
    o.note("C = " + num(cert.C, 12) + ", closed form " + num(closed, 12) +
           "; note: the printed value 3/2 is log C, not C");
    return o;
  });

  criterion("AC3", "accelerating-drift optimized bound", 1.0, [] {
    Outcome o;
    const auto f = [](double h) { return presets::accelerating_drift_log_sup_mgf(h); };
    for (double u : {1.0, 4.0, 9.0}) {
      const auto ob = optimized_bound(f, u, 0.0, 64.0);
      const double want = std::exp(-std::pow(u, 1.5));
      const double h_want = 1.5 * std::sqrt(u);
      o.require(std::abs(ob.bound / want - 1.0) <= 1e-6, "bound at u = " + num(u) + " within relative 1e-6");
      o.require(std::abs(ob.h_star - h_want) <= 1e-4, "h* at u = " + num(u) + " within 1e-4");
      o.note("u=" + num(u) + ": bound " + num(ob.bound) + ", h* " + num(ob.h_star));
    }
    return o;
  });

  criterion("AC4", "homogeneous oracle", 60.0, [] {
    Outcome o;
    const auto cert = adjustment_coefficient(cumulant_fn(homogeneous()), window::FiniteHorizon{200.0});
    o.require(std::abs(cert.L - 0.5) <= 1e-9, "|L - 0.5| <= 1e-9");
    SimConfig cfg;
    cfg.paths = 1000000;
    cfg.horizon = 200.0;
    cfg.u = 1.0;
    cfg.seed = 1;
    const auto e = estimate_ruin_model_a(homogeneous(), cfg);
    const double exact = 0.5 * std::exp(-0.5);
    o.require(e.ci_lo <= exact && exact <= e.ci_hi, "99% interval contains 0.5e^{-0.5}");
    o.require(cert.bound(1.0) >= e.p_hat - 3.0 * e.standard_error(), "e^{-0.5u} dominates the estimate");
    o.note("L = " + num(cert.L, 12) + ", p_hat = " + num(e.p_hat, 6) + " [" + num(e.ci_lo, 6) + ", " +
           num(e.ci_hi, 6) + "], bound " + num(cert.bound(1.0), 6));
    return o;
  });

  criterion("AC5", "united sandwich", 120.0, [] {
    Outcome o;
    gen::Gen G(2024);
    int ok = 0;
    for (int i = 0; i < 200; ++i) {
      const auto ue = united_exponents(G.united(2, 5));
      const double lmin = *std::min_element(ue.branch.begin(), ue.branch.end());
      if (ue.branch[0] >= ue.overall.L - 1e-8 && ue.overall.L >= lmin - 1e-8) ++ok;
    }
    o.require(ok == 200, "sandwich holds on all instances (" + std::to_string(ok) + "/200)");
    const auto m = presets::two_branch_model();
    const auto ue = united_exponents(m);
    for (double u : {1.0, 2.0, 5.0}) {
      SimConfig cfg;
      cfg.paths = 100000;
      cfg.horizon = 50.0;
      cfg.u = u;
      cfg.seed = 5;
      const auto e = estimate_ruin_united(m, cfg);
      o.require(ue.overall.bound(u) >= e.p_hat - 3.0 * e.standard_error(), "dominance at u = " + num(u));
      o.note("u=" + num(u) + ": bound " + num(ue.overall.bound(u), 6) + " vs p_hat " + num(e.p_hat, 6));
    }
    return o;
  });

  criterion("AC6", "renewal machinery", 120.0, [] {
    Outcome o;
    gen::Gen G(606);
    int checks = 0;
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const RenewalModel m = G.periodic_renewal();
      const auto mi = static_cast<std::size_t>(G.integer(1, 6));
      const auto n = static_cast<std::size_t>(G.integer(1, 12));
      ExtendedReal cap = kInfinity;
      for (std::size_t k = 1; k <= std::max(mi, n); ++k) cap = std::min(cap, abscissa(std::get<DecomposedStep>(m.step(k)).claim));
      const double H = std::isfinite(cap) ? 0.9 * cap : 2.0;
      const double es = renewal_expected_sums(m, n).back();
      for (int i = 1; i <= 5; ++i) {
        const double h = H * i / 5.0;
        const double envelope_rhs = std::exp(h * c_m_constant(m, mi) + renewal_log_mgf(m, h, mi));
        ++checks;
        if (!(m_m_envelope(m, h, mi) <= envelope_rhs * (1 + 1e-12))) ++bad;
        for (double C : {0.0, 1.0, 4.0}) {
          const double lhs = renewal_log_mgf(m, h, n);
          const double rhs = h * es + h * a_n_functional(m, C, n) + h * h * b_n_functional(m, h, C, n);
          ++checks;
          if (!(lhs <= rhs + 1e-10 * (1 + std::abs(rhs)))) ++bad;
        }
      }
    }
    o.require(bad == 0, "envelope and master inequality (" + std::to_string(bad) + " failures of " +
                            std::to_string(checks) + ")");

    gen::Gen L(607);
    int certified = 0;
    int attempts = 0;
    int dominated = 0;
    while (certified < 100 && attempts < 1000) {
      ++attempts;
      const RenewalModel m = lattice_walk(L);
      double cmax = 0.0;
      for (std::size_t k = 1; k <= m.period_length(); ++k) {
        const RenewalStep step = m.step(k);
        const auto& s = std::get<DecomposedStep>(step);
        const auto& tv = std::get<dist::Discrete>(s.inter_time.variant()).values;
        cmax = std::max(cmax, s.premium_rate * *std::max_element(tv.begin(), tv.end()));
      }
      RenewalBoundReport rep;
      try {
        rep = corollary9_bound(m, TruncationParams{cmax, 1.0, 1, {}, {}}, 50);
      } catch (const HypothesisViolated&) {
        continue;
      }
      ++certified;
      const double u = L.integer(1, 8) / 2.0;
      const auto steps = static_cast<std::size_t>(L.integer(1, 20));
      if (rep.bound(u) >= dp_exact_ruin(m, u, steps)) ++dominated;
    }
    o.require(certified == 100, "100 certified lattice instances (" + std::to_string(certified) + " in " +
                                    std::to_string(attempts) + " attempts)");
    o.require(dominated == certified, "bound >= exact ruin on " + std::to_string(dominated) + "/" +
                                          std::to_string(certified));
    o.note(std::to_string(checks) + " inequality checks, " + std::to_string(dominated) + " DP comparisons");
    return o;
  });

  criterion("AC7", "Model B reduction and discounting", 60.0, [] {
    Outcome o;
    const ModelA base = homogeneous();
    const ModelB plain = ModelB::undiscounted(base);
    const DiscountedPremium premium(plain, 50.0);
    bool identical = true;
    for (std::uint64_t i = 0; i < 20000 && identical; ++i) {
      RandomStream ra(31, i);
      RandomStream rb(31, i);
      const auto a = simulate_path(base, 1.0, 50.0, ra);
      const auto b = simulate_path(plain, premium, 1.0, 50.0, rb);
      identical = a.ruined == b.ruined && a.events == b.events && a.ruin_time == b.ruin_time && ra() == rb();
    }
    o.require(identical, "r = 0 paths identical to Model A paths");
    SimConfig cfg;
    cfg.paths = 100000;
    cfg.horizon = 50.0;
    cfg.u = 1.0;
    cfg.seed = 9;
    const auto e0 = estimate_ruin_model_b(plain, cfg);
    const auto e1 = estimate_ruin_model_b(ModelB(base, PiecewisePoly::linear(0.0, 0.5)), cfg);
    o.require(e1.ci_hi < e0.ci_lo, "discounted interval lies strictly below");
    o.note("r=0: " + num(e0.p_hat, 6) + " [" + num(e0.ci_lo, 6) + ", " + num(e0.ci_hi, 6) + "], r=0.5t: " +
           num(e1.p_hat, 6) + " [" + num(e1.ci_lo, 6) + ", " + num(e1.ci_hi, 6) + "]");
    return o;
  });

  criterion("AC8", "verify determinism across worker counts", 0.0, [] {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / ("ruin_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto cfg = (dir / "united.json").string();
    std::ofstream(cfg) << R"({"model":"preset","name":"example2"})";
    std::string outputs[2];
    int codes[2];
    const char* workers[2] = {"1", "4"};
    for (int i = 0; i < 2; ++i) {
      std::ostringstream out;
      std::ostringstream err;
      codes[i] = cli::run({"verify", "--config", cfg, "--paths", "50000", "--horizon", "50", "--seed", "42",
                           "--workers", workers[i]},
                          out, err);
      outputs[i] = out.str();
    }
    std::filesystem::remove_all(dir);
    o.require(codes[0] == 0 && codes[1] == 0, "both runs exit 0");
    o.require(!outputs[0].empty() && outputs[0] == outputs[1], "reports byte-identical");
    o.note(std::to_string(outputs[0].size()) + " bytes compared");
    return o;
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
