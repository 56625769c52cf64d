#include "generators.hpp"
#include "ruin/bounds.hpp"
#include "ruin/errors.hpp"
#include "ruin/presets.hpp"

#include <doctest.h>

#include <cmath>

using namespace ruin;

namespace {

double united_sup_oracle(const UnitedModel& m, double h) {
  // breakpoint values plus the terminal slope, straight from the branch closed forms
  double best = 0.0;
  for (std::size_t k = 0; k < m.branches.size(); ++k) {
    double v = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      v += (m.branches[k].start - m.branches[i].start) * branch_cumulant(m.branches[i], h);
    }
    best = std::max(best, v);
  }
  double slope = 0.0;
  for (const auto& b : m.branches) slope += branch_cumulant(b, h);
  return slope > 0.0 ? kInfinity : best;
}

double grid_exponent_oracle(const UnitedModel& m, double hi, double step) {
  double last = 0.0;
  for (double h = 0.0; h <= hi; h += step) {
    if (united_sup_oracle(m, h) <= 0.0) last = h;
    else break;
  }
  return last;
}

double fine_sup(const CumulantFn& a, double h, double end, int n) {
  double best = -kInfinity;
  for (int i = 0; i <= n; ++i) best = std::max(best, a.eval(h, end * i / n));
  return best;
}

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("sup_cumulant examples") {
    const auto a = cumulant_fn(presets::periodic_premium_model());
    const auto s = sup_cumulant(a, 0.75, window::FiniteHorizon{2.0});
    CHECK(s.value == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(s.argmax == doctest::Approx(1.0).epsilon(1e-6));
    const auto z = sup_cumulant(a, 0.0, window::Periodic{2.0});
    CHECK(z.value == 0.0);
    CHECK(z.argmax == 0.0);

    const auto u = cumulant_fn(presets::two_branch_model());
    const auto su = sup_cumulant(u, 0.5, window::United{{0.0, 2.0}});
    CHECK(su.value == 0.0);
    CHECK(su.argmax == 0.0);
    CHECK(std::isinf(sup_cumulant(u, 0.7, window::United{{0.0, 2.0}}).value));
  }

  TEST_CASE("adjustment coefficients") {
    const ModelB hom = ModelB::undiscounted(presets::homogeneous_model());
    const auto c = adjustment_coefficient(cumulant_fn(hom), window::Periodic{1.0});
    CHECK(std::abs(c.L - 0.5) <= 1e-9);
    CHECK(c.C == 1.0);
    CHECK(c.bound(2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));

    const auto ex1 = adjustment_coefficient(cumulant_fn(presets::periodic_premium_model()), window::Periodic{2.0});
    CHECK(std::abs(ex1.L - 0.75) <= 1e-9);

    const ModelB broke = ModelB::undiscounted(ModelA(PiecewisePoly::constant(1.0), PiecewisePoly(),
                                                     TimeVaryingClaimFamily(Distribution::exponential(1.0))));
    const auto d = adjustment_coefficient(cumulant_fn(broke), window::FiniteHorizon{10.0});
    CHECK(d.degenerate);
    CHECK(d.L == 0.0);
    CHECK(d.C == 1.0);
    CHECK(d.bound(100.0) == 1.0);
  }

  TEST_CASE("periodic exponent and window constant") {
    const auto c = periodic_exponent(presets::periodic_premium_model(), 2.0);
    CHECK(std::abs(c.L - 0.75) <= 1e-9);
    CHECK(c.C == doctest::Approx(std::exp(1.5)).epsilon(1e-9));
    const ModelB hom = ModelB::undiscounted(presets::homogeneous_model());
    for (double l : {0.5, 1.0, 3.0}) CHECK(std::abs(periodic_exponent(hom, l).L - 0.5) <= 1e-9);
    const ModelB up = ModelB::undiscounted(presets::homogeneous_model(2.0, 1.0, 1.0));
    CHECK(periodic_exponent(up, 1.0).degenerate);
  }

  TEST_CASE("quasi-periodic window constant") {
    const auto c = quasi_periodic_constant(presets::periodic_premium_model(), 2.0, 0.0, 0.75);
    CHECK(c.C == doctest::Approx(std::exp(1.5)).epsilon(1e-9));
    const auto z = quasi_periodic_constant(presets::periodic_premium_model(), 2.0, 0.0, 0.0);
    CHECK(z.C == 1.0);
    CHECK(z.bound(10.0) == 1.0);
    const ModelB hom = ModelB::undiscounted(presets::homogeneous_model());
    CHECK(quasi_periodic_constant(hom, 1.0, 0.0, 0.5).C == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(quasi_periodic_constant(hom, 1.0, 0.0, 0.8), HypothesisViolated);
  }

  TEST_CASE("united exponents") {
    const UnitedModel single({Branch{0.0, 1.0, 2.0, Distribution::exponential(1.0)}});
    const auto s = united_exponents(single);
    CHECK(std::abs(s.overall.L - 0.5) <= 1e-9);
    CHECK(std::abs(s.branch[0] - 0.5) <= 1e-9);

    const auto two = united_exponents(presets::two_branch_model());
    CHECK(std::abs(two.branch[0] - 0.75) <= 1e-9);
    CHECK(two.branch[1] < 1e-6);
    // after t = 2 the slope is 2h/(1-h) - 5h, which vanishes at h = 0.6
    CHECK(std::abs(two.overall.L - 0.6) <= 1e-8);
    CHECK(std::abs(two.overall.L - grid_exponent_oracle(presets::two_branch_model(), 0.75, 1e-5)) <= 1e-5);

    const Branch b{0.0, 1.5, 3.0, Distribution::deterministic(1.0)};
    Branch b2 = b;
    b2.start = 1.0;
    Branch b3 = b;
    b3.start = 4.0;
    const auto same = united_exponents(UnitedModel({b, b2, b3}));
    CHECK(std::abs(same.overall.L - same.branch[0]) <= 1e-8);
  }

  TEST_CASE("optimized bound") {
    auto m = [](double h) -> ExtendedReal { return presets::accelerating_drift_log_sup_mgf(h); };
    const auto b1 = optimized_bound(m, 1.0, 0.0, 64.0);
    CHECK(b1.bound == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK(b1.h_star == doctest::Approx(1.5).epsilon(1e-6));
    const auto b4 = optimized_bound(m, 4.0, 0.0, 64.0);
    CHECK(b4.bound == doctest::Approx(std::exp(-8.0)).epsilon(1e-9));
    CHECK(b4.h_star == doctest::Approx(3.0).epsilon(1e-6));
    const auto b0 = optimized_bound(m, 0.0, 0.0, 64.0);
    CHECK(b0.bound == 1.0);
    CHECK(b0.h_star == 0.0);
  }

  TEST_CASE("property: certificate soundness and bracket tightness") {
    std::vector<std::pair<CumulantFn, TimeWindow>> cases{
        {cumulant_fn(presets::periodic_premium_model()), window::Periodic{2.0}},
        {cumulant_fn(ModelB::undiscounted(presets::homogeneous_model())), window::Periodic{1.0}},
        {cumulant_fn(ModelB(presets::homogeneous_model(1.0, 1.0, 1.2), PiecewisePoly::linear(0.0, 0.05))),
         window::FiniteHorizon{15.0}},
    };
    for (const auto& [a, w] : cases) {
      const auto c = adjustment_coefficient(a, w);
      REQUIRE_FALSE(c.degenerate);
      if (const auto* p = std::get_if<window::Periodic>(&w)) {
        CHECK(a.eval(c.L, p->l) <= 1e-8);
        CHECK(a.eval(c.L + 10.0 * c.htol, p->l) > 0.0);
        // the constant covers a 3x finer grid of the window
        CHECK(fine_sup(a, c.L, p->l, 1536) <= std::log(c.C) + 1e-8);
      } else {
        const double T = std::get<window::FiniteHorizon>(w).T;
        CHECK(fine_sup(a, c.L, T, 1536) <= 1e-8);
        CHECK(sup_cumulant(a, c.L + 10.0 * c.htol, w).value > 0.0);
      }
    }
  }

  TEST_CASE("property: window reduction for periodic models") {
    const auto a = cumulant_fn(presets::periodic_premium_model());
    for (int i = 0; i <= 10; ++i) {
      const double h = 0.75 * i / 10.0;
      const double short_sup = sup_cumulant(a, h, window::FiniteHorizon{2.0}).value;
      const double long_sup = sup_cumulant(a, h, window::FiniteHorizon{6.0}).value;
      CHECK(std::exp(short_sup) == doctest::Approx(std::exp(long_sup)).epsilon(1e-7));
    }
  }

  TEST_CASE("property: united sandwich on random instances") {
    gen::Gen G(41);
    for (int trial = 0; trial < 50; ++trial) {
      const UnitedModel m = G.united();
      const auto e = united_exponents(m);
      const double lmin = *std::min_element(e.branch.begin(), e.branch.end());
      CHECK(e.branch[0] >= e.overall.L - 1e-8);
      CHECK(e.overall.L >= lmin - 1e-8);
    }
  }

  TEST_CASE("property: optimized bound is nonincreasing in u") {
    const auto a = cumulant_fn(ModelB::undiscounted(presets::homogeneous_model()));
    const auto f = log_sup_mgf(a, window::Periodic{1.0});
    double prev = 1.0;
    for (double u = 0.0; u <= 10.0; u += 0.5) {
      const double b = optimized_bound(f, u, 0.0, 0.5).bound;
      CHECK(b <= prev + 1e-15);
      prev = b;
    }
  }
}
