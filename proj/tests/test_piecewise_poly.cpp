#include "ruin/errors.hpp"
#include "ruin/piecewise_poly.hpp"

#include <doctest.h>

#include <cmath>

using namespace ruin;

TEST_SUITE("piecewise_poly") {
  TEST_CASE("evaluation and closed-form integrals") {
    const PiecewisePoly f({0.0, 1.0, 3.0}, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
    CHECK(f(0.5) == 1.0);
    CHECK(f(2.0) == 2.0);
    CHECK(f(4.0) == 16.0);
    // 1 + (9 - 1)/2 + (64 - 27)/3
    CHECK(f.integral(4.0) == doctest::Approx(1.0 + 4.0 + 37.0 / 3.0));
    CHECK(f.integral(0.5, 2.0) == doctest::Approx(0.5 + 1.5));
  }

  TEST_CASE("periodic wrap") {
    const PiecewisePoly saw({0.0}, {{0, 4, 0, 0}}, 2.0);
    CHECK(saw(1.0) == 4.0);
    CHECK(saw(3.0) == doctest::Approx(4.0));
    CHECK(saw.integral(2.0) == doctest::Approx(8.0));
    CHECK(saw.integral(5.0) == doctest::Approx(16.0 + 2.0));
    CHECK(saw.max_on(0.0, 10.0) <= 8.0);
    CHECK(saw.knots(0.0, 5.0) == std::vector<double>{2.0, 4.0});
  }

  TEST_CASE("exact extrema of a cubic") {
    // t^3 - 3t has a local max 2 at t = -1 (outside) and local min -2 at t = 1
    const PiecewisePoly f({0.0}, {{0, -3, 0, 1}});
    CHECK(f.min_on(0.0, 2.0) == doctest::Approx(-2.0));
    CHECK(f.max_on(0.0, 2.0) == doctest::Approx(2.0));
    CHECK(f.max_on(0.0, 1.5) == doctest::Approx(0.0));
  }

  TEST_CASE("predicates") {
    CHECK(PiecewisePoly().is_identically_zero());
    CHECK(PiecewisePoly::linear(0.0, 0.5).is_nondecreasing());
    CHECK_FALSE(PiecewisePoly::linear(1.0, -0.5).is_nonnegative());
    CHECK(PiecewisePoly::constant(3.0).is_piecewise_constant());
    CHECK_FALSE(PiecewisePoly({0.0}, {{0, 1, 0, 0}}, 1.0).is_nondecreasing());
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(PiecewisePoly({1.0}, {{1, 0, 0, 0}}), DomainError);
    CHECK_THROWS_AS(PiecewisePoly({0.0, 2.0, 1.0}, {{1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}}), DomainError);
    CHECK_THROWS_AS(PiecewisePoly({0.0, 3.0}, {{1, 0, 0, 0}, {1, 0, 0, 0}}, 2.0), DomainError);
  }
}
