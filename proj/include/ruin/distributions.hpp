#pragma once

#include "ruin/extended_real.hpp"
#include "ruin/piecewise_poly.hpp"
#include "ruin/random_stream.hpp"

#include <string>
#include <variant>
#include <vector>

namespace ruin {

namespace dist {

struct Exponential {
  double rate;
};
struct Gamma {
  double shape;
  double rate;
};
struct Uniform {
  double lo;
  double hi;
};
struct Deterministic {
  double point;
};
/// Admitted only as a direct renewal increment; never as a claim size.
struct Normal {
  double mean;
  double variance;
};
/// Finite support law. Used for lattice walks and two-point increments.
struct Discrete {
  std::vector<double> values;
  std::vector<double> probs;
};

}  // namespace dist

/// Immutable law of a claim size, inter-occurrence time, or renewal increment.
class Distribution {
 public:
  using Variant = std::variant<dist::Exponential, dist::Gamma, dist::Uniform, dist::Deterministic, dist::Normal,
                               dist::Discrete>;

  static Distribution exponential(double rate);
  static Distribution gamma(double shape, double rate);
  static Distribution uniform(double lo, double hi);
  static Distribution deterministic(double point);
  static Distribution normal(double mean, double variance);
  static Distribution discrete(std::vector<double> values, std::vector<double> probs);

  const Variant& variant() const noexcept { return v_; }
  std::string kind() const;
  bool nonnegative_support() const;

 private:
  explicit Distribution(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// g(x) = e^x - 1 - x, accurate near zero.
double g_function(double x) noexcept;

/// Supremum of h with E e^{hZ} finite.
ExtendedReal abscissa(const Distribution& d);

/// log E e^{sZ} for any real s; +inf beyond the abscissa.
ExtendedReal log_mgf(const Distribution& d, double s);

/// E e^{hZ} - 1 for h >= 0; +inf iff h >= abscissa.
ExtendedReal mgf_minus_one(const Distribution& d, double h);

double mean(const Distribution& d);
double variance(const Distribution& d);

/// E[X 1{X > C}] for nonnegative laws.
double upper_tail_mean(const Distribution& d, double C);

/// E[X^2 1{0 < X <= C}] for nonnegative laws.
double truncated_second_moment(const Distribution& d, double C);

/// E g(hZ) = (E e^{hZ} - 1) - h E Z for nonnegative laws; +inf iff h >= abscissa.
ExtendedReal g_moment(const Distribution& d, double h);

double sample(const Distribution& d, RandomStream& stream);

/// Time-indexed claim law: a claim arriving at time t is scale(t) * Z_base.
struct TimeVaryingClaimFamily {
  Distribution base;
  PiecewisePoly scale = PiecewisePoly::constant(1.0);

  TimeVaryingClaimFamily(Distribution b, PiecewisePoly s = PiecewisePoly::constant(1.0));

  /// Q(h, t) = E e^{h Z(t)} - 1.
  ExtendedReal q(double h, double t) const { return mgf_minus_one(base, h * scale(t)); }
  bool iid_in_time() const;
};

}  // namespace ruin
