#include "generators.hpp"
#include "ruin/errors.hpp"
#include "ruin/presets.hpp"
#include "ruin/simulator.hpp"

#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <cmath>
#include <map>

using namespace ruin;

namespace {

bool inside(const SimEstimate& e, double x) { return e.ci_lo <= x && x <= e.ci_hi; }

ModelA homogeneous(double premium_rate) {
  return ModelA(PiecewisePoly::constant(1.0), PiecewisePoly::constant(premium_rate),
                TimeVaryingClaimFamily(Distribution::exponential(1.0)));
}

RenewalModel coin_walk(double p_up) {
  return RenewalModel({}, {DirectStep{Distribution::discrete({1.0, -1.0}, {p_up, 1.0 - p_up})}});
}

// Enumerates every sign sequence of a ±1 walk.
double enumerate_coin_walk(double p_up, double u, int n) {
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double s = 0.0;
    double prob = 1.0;
    bool ruined = false;
    for (int k = 0; k < n; ++k) {
      const bool up = (mask >> k) & 1u;
      s += up ? 1.0 : -1.0;
      prob *= up ? p_up : 1.0 - p_up;
      ruined = ruined || s > u;
    }
    if (ruined) total += prob;
  }
  return total;
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("Wilson interval") {
    const auto z = 2.5758293035489;
    const auto oracle = [z](double k, double n) {
      const double p = k / n;
      const double den = 1 + z * z / n;
      const double c = (p + z * z / (2 * n)) / den;
      const double w = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den;
      return std::pair{c - w, c + w};
    };
    for (auto [k, n] : {std::pair{0, 10}, {3, 10}, {500, 1000}, {1000, 1000}, {7, 100000}}) {
      const auto iv = wilson99(k, n);
      const auto [lo, hi] = oracle(k, n);
      CHECK(iv.lo == doctest::Approx(std::max(0.0, lo)).epsilon(1e-12).scale(1.0));
      CHECK(iv.hi == doctest::Approx(std::min(1.0, hi)).epsilon(1e-12).scale(1.0));
      CHECK(iv.lo <= static_cast<double>(k) / n);
      CHECK(static_cast<double>(k) / n <= iv.hi);
    }
    CHECK(wilson99(0, 10).lo == 0.0);
    // width shrinks like n^{-1/2}
    const auto a = wilson99(300, 1000);
    const auto b = wilson99(1200, 4000);
    CHECK((a.hi - a.lo) / (b.hi - b.lo) == doctest::Approx(2.0).epsilon(0.02));
  }

  TEST_CASE("NHPP thinning") {
    RandomStream rng(7, 0);
    double total = 0.0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) total += static_cast<double>(sample_nhpp(PiecewisePoly::constant(1.0), 10.0, rng).size());
    CHECK(std::abs(total / reps - 10.0) < 4.0 * std::sqrt(10.0 / reps));

    for (int i = 0; i < 100; ++i) CHECK(sample_nhpp(PiecewisePoly::constant(0.0), 5.0, rng).empty());

    const auto ev = sample_nhpp(PiecewisePoly::linear(0.0, 1.0), 20.0, rng);
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    for (double t : ev) CHECK((t >= 0.0 && t <= 20.0));
  }

  TEST_CASE("NHPP counts against Poisson(9) by chi-square") {
    const auto intensity = PiecewisePoly::linear(0.0, 2.0);
    const int reps = 100000;
    std::map<std::size_t, int> counts;
    double time_sum = 0.0;
    std::size_t events = 0;
    for (int i = 0; i < reps; ++i) {
      RandomStream rng(11, static_cast<std::uint64_t>(i));
      const auto ev = sample_nhpp(intensity, 3.0, rng);
      ++counts[ev.size()];
      for (double t : ev) time_sum += t;
      events += ev.size();
    }
    // Bins 0..3 pooled, 4..15 single, 16+ pooled.
    const boost::math::poisson_distribution<> pois(9.0);
    std::vector<double> expected;
    std::vector<double> observed;
    auto observed_range = [&](std::size_t lo, std::size_t hi) {
      double o = 0;
      for (const auto& [k, c] : counts)
        if (k >= lo && k <= hi) o += c;
      return o;
    };
    expected.push_back(reps * boost::math::cdf(pois, 3));
    observed.push_back(observed_range(0, 3));
    for (std::size_t k = 4; k <= 15; ++k) {
      expected.push_back(reps * boost::math::pdf(pois, static_cast<double>(k)));
      observed.push_back(observed_range(k, k));
    }
    expected.push_back(reps * boost::math::cdf(boost::math::complement(pois, 15)));
    observed.push_back(observed_range(16, 1000));
    double chi2 = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    const boost::math::chi_squared_distribution<> ref(static_cast<double>(expected.size() - 1));
    CHECK(chi2 < boost::math::quantile(ref, 0.999));
    // event times have density 2t/9 on [0,3], mean 2
    CHECK(time_sum / events == doctest::Approx(2.0).epsilon(0.005));
  }

  TEST_CASE("Model A estimates") {
    SimConfig cfg;
    cfg.paths = 40000;
    cfg.horizon = 200.0;
    cfg.u = 1.0;
    cfg.seed = 3;
    const auto e = estimate_ruin_model_a(homogeneous(2.0), cfg);
    CHECK(inside(e, 0.5 * std::exp(-0.5)));
    CHECK(e.ci_lo <= e.p_hat);
    CHECK(e.p_hat <= e.ci_hi);
    CHECK(e.mean_events > 0.0);

    cfg.u = 100.0;
    cfg.paths = 5000;
    CHECK(estimate_ruin_model_a(homogeneous(2.0), cfg).ruins == 0);

    cfg.u = 1.0;
    cfg.paths = 5000;
    CHECK(estimate_ruin_model_a(homogeneous(0.0), cfg).p_hat > 0.99);

    cfg.paths = 0;
    CHECK_THROWS_AS(estimate_ruin_model_a(homogeneous(2.0), cfg), DomainError);
  }

  TEST_CASE("Model B reduction and discounting") {
    const auto base = homogeneous(2.0);
    const auto plain = ModelB::undiscounted(base);
    const DiscountedPremium premium(plain, 50.0);
    for (std::uint64_t i = 0; i < 2000; ++i) {
      RandomStream ra(99, i);
      RandomStream rb(99, i);
      const auto pa = simulate_path(base, 1.0, 50.0, ra);
      const auto pb = simulate_path(plain, premium, 1.0, 50.0, rb);
      REQUIRE(pa.ruined == pb.ruined);
      REQUIRE(pa.events == pb.events);
      REQUIRE(pa.ruin_time == pb.ruin_time);
    }

    SimConfig cfg;
    cfg.paths = 20000;
    cfg.horizon = 50.0;
    cfg.seed = 5;
    const auto ea = estimate_ruin_model_a(base, cfg);
    const auto eb = estimate_ruin_model_b(plain, cfg);
    CHECK(ea.ruins == eb.ruins);

    const ModelB discounted(base, PiecewisePoly::linear(0.0, 0.5));
    const auto ed = estimate_ruin_model_b(discounted, cfg);
    CHECK(ed.ci_hi < eb.ci_lo);
  }

  TEST_CASE("Model B one-claim check") {
    // With tiny u and horizon 0.2 ruin is almost always caused by the first claim:
    // P(first claim ruins) = ∫_0^T e^{-t} exp(-4(e^{t/2} - 1)) dt.
    const double T = 0.2;
    const int cells = 2000;
    double first = 0.0;
    for (int i = 0; i <= cells; ++i) {
      const double t = T * i / cells;
      const double w = (i == 0 || i == cells) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      first += w * std::exp(-t) * std::exp(-4.0 * (std::exp(0.5 * t) - 1.0));
    }
    first *= T / cells / 3.0;
    const double two_or_more = 1.0 - std::exp(-T) * (1.0 + T);
    const ModelB discounted(homogeneous(2.0), PiecewisePoly::linear(0.0, 0.5));
    SimConfig cfg;
    cfg.paths = 50000;
    cfg.horizon = T;
    cfg.u = 1e-9;
    cfg.seed = 8;
    const auto e = estimate_ruin_model_b(discounted, cfg);
    CHECK(e.ci_hi >= first);
    CHECK(e.ci_lo <= first + two_or_more);
  }

  TEST_CASE("DiscountedPremium matches the closed form") {
    const ModelB discounted(homogeneous(2.0), PiecewisePoly::linear(0.0, 0.5));
    const DiscountedPremium premium(discounted, 30.0);
    for (double t : {0.0, 0.3, 1.0, 7.5, 29.0, 30.0})
      CHECK(premium(t) == doctest::Approx(4.0 * (1.0 - std::exp(-0.5 * t))).epsilon(1e-9).scale(1.0));
  }

  TEST_CASE("united estimates") {
    const UnitedModel single({Branch{0.0, 1.0, 2.0, Distribution::exponential(1.0)}});
    SimConfig cfg;
    cfg.paths = 20000;
    cfg.horizon = 100.0;
    cfg.seed = 12;
    const auto eu = estimate_ruin_united(single, cfg);
    const auto ea = estimate_ruin_model_a(homogeneous(2.0), cfg);
    CHECK(eu.ci_lo <= ea.ci_hi);
    CHECK(ea.ci_lo <= eu.ci_hi);

    const UnitedModel flood({Branch{0.0, 1.0, 2.0, Distribution::exponential(1.0)},
                             Branch{1.0, 50.0, 0.0, Distribution::exponential(1.0)}});
    cfg.paths = 2000;
    cfg.horizon = 10.0;
    cfg.u = 0.5;
    CHECK(estimate_ruin_united(flood, cfg).p_hat > 0.99);
  }

  TEST_CASE("renewal walk estimates") {
    SimConfig cfg;
    cfg.paths = 20000;
    cfg.steps = 200;
    cfg.u = 1.0;
    cfg.seed = 21;
    const auto ex3 = estimate_ruin_renewal(presets::accelerating_drift_walk(), cfg);
    CHECK(ex3.p_hat <= std::exp(-1.0) + 3.0 * ex3.standard_error());

    const RenewalModel down({}, {DecomposedStep{Distribution::deterministic(0.0), Distribution::deterministic(1.0), 1.0}});
    CHECK(estimate_ruin_renewal(down, cfg).ruins == 0);

    cfg.u = 2.0;
    cfg.steps = 500;
    const auto gr = estimate_ruin_renewal(coin_walk(0.4), cfg);
    CHECK(inside(gr, 8.0 / 27.0));

    cfg.steps = 0;
    CHECK_THROWS_AS(estimate_ruin_renewal(down, cfg), DomainError);
  }

  TEST_CASE("DP exact ruin") {
    CHECK(dp_exact_ruin(coin_walk(0.4), 2.0, 0) == 0.0);
    const RenewalModel up({}, {DirectStep{Distribution::deterministic(1.0)}});
    CHECK(dp_exact_ruin(up, 0.5, 1) == 1.0);
    CHECK(dp_exact_ruin(up, 1.0, 1) == 0.0);  // S_1 = u is not ruin
    for (int n : {1, 5, 10, 14})
      for (double u : {0.0, 0.5, 2.0, 3.0})
        CHECK(dp_exact_ruin(coin_walk(0.4), u, n) == doctest::Approx(enumerate_coin_walk(0.4, u, n)).epsilon(1e-12));
    CHECK_THROWS_AS(dp_exact_ruin(coin_walk(0.4), -1.0, 3), DomainError);
    CHECK_THROWS(dp_exact_ruin(presets::accelerating_drift_walk(), 1.0, 3));

    SimConfig cfg;
    cfg.paths = 50000;
    cfg.steps = 10;
    cfg.u = 2.0;
    cfg.seed = 4;
    CHECK(inside(estimate_ruin_renewal(coin_walk(0.4), cfg), dp_exact_ruin(coin_walk(0.4), 2.0, 10)));
  }

  TEST_CASE("property: DP and MC agree on random lattice walks") {
    gen::Gen G(61);
    int agree = 0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> v;
      std::vector<double> p;
      double total = 0.0;
      for (int i = G.integer(2, 4); i > 0; --i) {
        v.push_back(G.integer(-6, 4) / 2.0);
        p.push_back(G.real(0.1, 1.0));
        total += p.back();
      }
      for (auto& x : p) x /= total;
      const RenewalModel walk({}, {DirectStep{Distribution::discrete(v, p)}});
      SimConfig cfg;
      cfg.paths = 4000;
      cfg.steps = static_cast<std::size_t>(G.integer(1, 20));
      cfg.u = G.integer(1, 8) / 2.0;
      cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
      const double exact = dp_exact_ruin(walk, cfg.u, cfg.steps);
      if (inside(estimate_ruin_renewal(walk, cfg), exact)) ++agree;
    }
    CHECK(agree >= 99);
  }

  TEST_CASE("results do not depend on the worker count") {
    SimConfig cfg;
    cfg.paths = 10001;
    cfg.horizon = 40.0;
    cfg.seed = 77;
    const auto m = presets::two_branch_model();
    cfg.workers = 1;
    const auto one = estimate_ruin_united(m, cfg);
    cfg.workers = 3;
    const auto three = estimate_ruin_united(m, cfg);
    CHECK(one.ruins == three.ruins);
    CHECK(one.mean_events == three.mean_events);
  }

  TEST_CASE("default horizon") {
    CHECK(default_horizon(homogeneous(2.0)).T == doctest::Approx(20.0));
    CHECK(default_horizon(homogeneous(2.0)).warning.empty());
    const auto flat = default_horizon(homogeneous(1.0));
    CHECK(flat.T == doctest::Approx(1000.0));
    CHECK_FALSE(flat.warning.empty());
    CHECK(default_horizon(presets::periodic_premium_model()).T >= 10.0);
  }
}
