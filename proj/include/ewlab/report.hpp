#ifndef EWLAB_REPORT_HPP
#define EWLAB_REPORT_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewlab/lattice.hpp"

namespace ewlab {

// shortest decimal that round-trips to the same double
std::string format_double(double x);

// one verdict; pass/fail is always a comparison against a stated bound,
// with the SE multiple k recorded when the bound is statistical
struct CheckResult {
  std::string name;
  double value = 0.0;
  double reference = 0.0;   // target or bound
  double tolerance = 0.0;   // |value - reference| <= tolerance, or bound semantics in `mode`
  std::string mode = "abs"; // abs | rel | less_equal | greater_equal | in_range
  double range_lo = 0.0, range_hi = 0.0;
  double k_se = 0.0;        // 0 when deterministic
  double se = 0.0;
  bool pass = false;
  std::string note;
};

// one sampled quantity; serializes to the CSV row
// quantity, t, x1..xd, value, reference, ratio
struct SampleRow {
  std::string quantity;
  double t = 0.0;
  std::array<double, kMaxDim> x{0, 0, 0, 0};
  double value = 0.0;
  double reference = 0.0;
  double ratio = 0.0;
};

struct ExperimentReport {
  std::string name;
  nlohmann::json params;  // inputs that produced the numbers
  std::vector<SampleRow> rows;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool passed() const;
  CheckResult& add_check(CheckResult c);
  // abs/rel comparison helpers; they fill pass and return the stored check
  CheckResult& check_abs(const std::string& name, double value, double reference, double tol,
                         double k_se = 0.0, double se = 0.0);
  CheckResult& check_rel(const std::string& name, double value, double reference, double tol);
  CheckResult& check_range(const std::string& name, double value, double lo, double hi,
                           double k_se = 0.0, double se = 0.0);
  CheckResult& check_le(const std::string& name, double value, double bound);
  CheckResult& check_ge(const std::string& name, double value, double bound);

  nlohmann::json to_json() const;
  void write_csv(std::ostream& os, int d) const;
};

}  // namespace ewlab

#endif
