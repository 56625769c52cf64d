#pragma once

#include "ruin/bounds.hpp"
#include "ruin/renewal_bounds.hpp"
#include "ruin/risk_models.hpp"
#include "ruin/simulator.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace ruin {

using Json = nlohmann::ordered_json;

/// One parsed model document. Exactly one of the model slots is set.
struct ModelSpec {
  std::string kind;  // compound_poisson | discounted | united | renewal
  std::optional<ModelB> continuous;  // compound_poisson is stored with r = 0
  std::optional<UnitedModel> united;
  std::optional<RenewalModel> renewal;
  std::string preset;  // non-empty for built-in models

  /// Common period of all time-varying inputs, if any (constants count as periodic).
  std::optional<double> natural_period() const;
};

struct URange {
  double from;
  double to;
  double step;
};

/// Optional run parameters carried next to the model.
struct RunParams {
  std::optional<std::vector<double>> u;
  std::optional<URange> u_range;
  std::optional<double> horizon;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> paths;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<TimeWindow> window;
  std::optional<double> exponent;  // quasi-periodic window exponent
  std::optional<double> H;
  std::optional<double> C;
  std::optional<std::size_t> m;
  std::optional<double> c_star;
  std::optional<double> C_star;
  std::optional<double> h;
  std::optional<std::size_t> n_max;
};

struct RunConfig {
  ModelSpec model;
  RunParams run;
};

/// Throw ConfigError on malformed input or unknown keys.
Distribution distribution_from_json(const Json& j);
PiecewisePoly poly_from_json(const Json& j);
TimeWindow window_from_json(const Json& j);
ModelSpec model_from_json(const Json& j);
RunConfig run_config_from_json(const Json& j);
RunConfig parse_run_config(const std::string& text);

Json to_json(const Distribution& d);
Json to_json(const PiecewisePoly& p);
Json to_json(const TimeWindow& w);

Json to_json(const BoundCertificate& c);
BoundCertificate certificate_from_json(const Json& j);

Json to_json(const SimEstimate& e);
SimEstimate estimate_from_json(const Json& j);

Json to_json(const RenewalBoundReport& r);
RenewalBoundReport renewal_report_from_json(const Json& j);

enum class Verdict { Dominates, Violation, NotApplicable };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// One line of a bound / simulate / verify / sweep table.
struct ReportRow {
  double u = 0.0;
  std::optional<double> bound;
  std::optional<double> L;
  std::optional<double> C;
  std::optional<double> h_star;
  std::optional<double> p_hat;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
  Verdict verdict = Verdict::NotApplicable;
};

/// bound < ci_lo.
Verdict judge(double bound, double ci_lo);

Json to_json(const ReportRow& r);
ReportRow row_from_json(const Json& j);

inline constexpr const char* kCsvHeader = "u,bound,L,C,h_star,p_hat,ci_lo,ci_hi,verdict";
/// Locale-independent; absent cells are empty.
std::string csv_line(const ReportRow& r);
std::string to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_csv(const std::string& text);

/// Shortest round-trip decimal, always with '.' as separator.
std::string format_number(double x);

}  // namespace ruin
