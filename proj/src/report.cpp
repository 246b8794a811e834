#include "ewlab/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace ewlab {

std::string format_double(double x) {
  std::array<char, 40> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

bool ExperimentReport::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

CheckResult& ExperimentReport::add_check(CheckResult c) {
  checks.push_back(std::move(c));
  return checks.back();
}

CheckResult& ExperimentReport::check_abs(const std::string& name, double value, double reference,
                                         double tol, double k_se, double se) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.reference = reference;
  c.tolerance = tol;
  c.mode = "abs";
  c.k_se = k_se;
  c.se = se;
  c.pass = std::isfinite(value) && std::abs(value - reference) <= tol;
  return add_check(std::move(c));
}

CheckResult& ExperimentReport::check_rel(const std::string& name, double value, double reference,
                                         double tol) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.reference = reference;
  c.tolerance = tol;
  c.mode = "rel";
  double denom = std::abs(reference);
  c.pass = std::isfinite(value) && (denom > 0.0 ? std::abs(value - reference) / denom <= tol
                                                : std::abs(value) <= tol);
  return add_check(std::move(c));
}

CheckResult& ExperimentReport::check_range(const std::string& name, double value, double lo,
                                           double hi, double k_se, double se) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.mode = "in_range";
  c.range_lo = lo;
  c.range_hi = hi;
  c.k_se = k_se;
  c.se = se;
  c.pass = std::isfinite(value) && value >= lo && value <= hi;
  return add_check(std::move(c));
}

CheckResult& ExperimentReport::check_le(const std::string& name, double value, double bound) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.reference = bound;
  c.mode = "less_equal";
  c.pass = std::isfinite(value) && value <= bound;
  return add_check(std::move(c));
}

CheckResult& ExperimentReport::check_ge(const std::string& name, double value, double bound) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.reference = bound;
  c.mode = "greater_equal";
  c.pass = std::isfinite(value) && value >= bound;
  return add_check(std::move(c));
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["params"] = params;
  j["passed"] = passed();
  nlohmann::json jr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row;
    row["quantity"] = r.quantity;
    row["t"] = r.t;
    row["x"] = std::vector<double>(r.x.begin(), r.x.end());
    row["value"] = r.value;
    row["reference"] = r.reference;
    row["ratio"] = r.ratio;
    jr.push_back(std::move(row));
  }
  j["rows"] = std::move(jr);
  nlohmann::json jc = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["value"] = c.value;
    e["reference"] = c.reference;
    e["tolerance"] = c.tolerance;
    e["mode"] = c.mode;
    if (c.mode == "in_range") {
      e["range_lo"] = c.range_lo;
      e["range_hi"] = c.range_hi;
    }
    e["k_se"] = c.k_se;
    e["se"] = c.se;
    e["pass"] = c.pass;
    if (!c.note.empty()) e["note"] = c.note;
    jc.push_back(std::move(e));
  }
  j["checks"] = std::move(jc);
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

void ExperimentReport::write_csv(std::ostream& os, int d) const {
  os << "quantity,t";
  for (int i = 1; i <= d; ++i) os << ",x" << i;
  os << ",value,reference,ratio\n";
  for (const auto& r : rows) {
    os << r.quantity << ',' << format_double(r.t);
    for (int i = 0; i < d; ++i) os << ',' << format_double(r.x[static_cast<std::size_t>(i)]);
    os << ',' << format_double(r.value) << ',' << format_double(r.reference) << ','
       << format_double(r.ratio) << '\n';
  }
}

}  // namespace ewlab
