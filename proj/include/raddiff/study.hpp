#pragma once

#include "raddiff/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace raddiff::study {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct StudyRecord {
  double eps = 0.0;
  bool ok = false;
  std::string error;  ///< what went wrong when !ok
  std::string layout;
  std::size_t nodes = 0;
  bool resolved = false;
  double sup_error = 0.0;  ///< sup |u_eps - v| at depth >= margin
  double l2_error = 0.0;
  double relative_sup = 0.0;
  std::size_t compared = 0;
  int iterations = 0;
  double contraction = 0.0;
  double residual = 0.0;
  double error_estimate = 0.0;
  double layer_match = 0.0;  ///< max over the layer samples
  double layer_depth = 0.0;  ///< where that max sits
  double runtime_s = 0.0;    ///< wall clock; kept out of the deterministic outputs
};

struct LimitInfo {
  std::string method;  ///< "constant" or "finite-difference"
  double data_min = 0.0;
  double data_max = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct StudyReport {
  std::string config_hash;
  Json config;
  LimitInfo limit;
  std::vector<StudyRecord> records;  ///< eps descending
  std::vector<Check> checks;

  [[nodiscard]] bool pass() const;
  /// One row per eps; columns carry units in brackets.
  [[nodiscard]] std::string csv() const;
  [[nodiscard]] Json json() const;
  [[nodiscard]] std::string timings_csv() const;
};

/// A sequence passes when it is strictly decreasing, or when every entry is
/// at most floor (the equilibrium case, where the errors are roundoff).
bool decreasing_or_floor(const std::vector<double>& values, double floor, bool strict = true);

/// Per eps: transport solve, compare_fields against the limit solution
/// (solved once) at depth >= margin, and boundary_layer_match at
/// layer_samples boundary points. A failing eps is recorded and skipped.
StudyReport run_convergence_study(const RunConfig& config, std::ostream* log = nullptr);

/// study.csv, study.json (deterministic) and timings.csv in dir.
void write_study(const StudyReport& report, const std::string& dir);

/// x, K, E1, head, tail, first_moment_tail, fourier for x = lo + k step up to
/// hi. Throws std::invalid_argument when a row would land on 0.
std::string kernel_table_csv(double lo, double hi, double step);

struct VerifyReport {
  Json json;
  std::vector<Check> checks;
  [[nodiscard]] bool pass() const;
};

/// Positivity harnesses (Milne and every sweep operator, seeded by
/// config.seed), row-sign audits, the supersolution search with margins and
/// domination per eps, and the empirical eps0: the largest sweep eps from
/// which every smaller one keeps nonnegative margins.
VerifyReport run_verify_suite(const RunConfig& config, std::ostream* log = nullptr);

/// %.17g
std::string format_double(double x);
void write_text(const std::string& path, const std::string& text);

}  // namespace raddiff::study
