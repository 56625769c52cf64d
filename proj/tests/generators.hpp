#pragma once

// Hand-rolled random instance generators for property tests.

#include "ruin/distributions.hpp"
#include "ruin/random_stream.hpp"
#include "ruin/risk_models.hpp"

#include <cmath>
#include <vector>

namespace gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed, std::uint64_t stream = 0) : rng_(seed, stream) {}

  double real(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_.uniform() * (hi - lo + 1)); }
  bool coin(double p = 0.5) { return rng_.uniform() < p; }
  ruin::RandomStream& stream() { return rng_; }

  /// Nonnegative law with finite MGF near zero.
  ruin::Distribution nonnegative_law() {
    switch (integer(0, 4)) {
      case 0:
        return ruin::Distribution::exponential(real(0.5, 3.0));
      case 1:
        return ruin::Distribution::gamma(real(0.5, 4.0), real(0.5, 3.0));
      case 2: {
        const double lo = real(0.0, 1.0);
        return ruin::Distribution::uniform(lo, lo + real(0.1, 2.0));
      }
      case 3:
        return ruin::Distribution::deterministic(real(0.0, 2.0));
      default:
        return small_discrete(0.0, 3.0);
    }
  }

  ruin::Distribution small_discrete(double lo, double hi) {
    const int k = integer(2, 4);
    std::vector<double> v;
    std::vector<double> p;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      v.push_back(real(lo, hi));
      p.push_back(real(0.1, 1.0));
      total += p.back();
    }
    for (auto& x : p) x /= total;
    return ruin::Distribution::discrete(v, p);
  }

  /// Claim law for united instances: exponential or deterministic.
  ruin::Distribution united_claim() {
    return coin() ? ruin::Distribution::exponential(real(0.5, 3.0)) : ruin::Distribution::deterministic(real(0.1, 2.0));
  }

  ruin::UnitedModel united(int min_branches = 2, int max_branches = 5) {
    const int n = integer(min_branches, max_branches);
    std::vector<ruin::Branch> b;
    double start = 0.0;
    for (int i = 0; i < n; ++i) {
      b.push_back(ruin::Branch{start, real(0.2, 3.0), real(0.0, 6.0), united_claim()});
      start += real(0.2, 3.0);
    }
    return ruin::UnitedModel(std::move(b));
  }

  /// Decomposed renewal step with nonnegative claim and inter-time laws.
  ruin::RenewalStep decomposed_step() {
    return ruin::DecomposedStep{nonnegative_law(), nonnegative_law(), real(0.0, 4.0)};
  }

  ruin::RenewalModel periodic_renewal(int max_pre = 2, int max_period = 3) {
    std::vector<ruin::RenewalStep> pre;
    std::vector<ruin::RenewalStep> per;
    for (int i = integer(0, max_pre); i > 0; --i) pre.push_back(decomposed_step());
    for (int i = integer(1, max_period); i > 0; --i) per.push_back(decomposed_step());
    return ruin::RenewalModel(pre, per);
  }

 private:
  ruin::RandomStream rng_;
};

}  // namespace gen
