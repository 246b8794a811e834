#include "ewlab/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ewlab {

static bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Lattice build_lattice(int d, int n, double h, std::size_t memory_budget_cells) {
  if (d < 3) throw std::invalid_argument("build_lattice: dimension must be >= 3, got " + std::to_string(d));
  if (d > kMaxDim) throw std::invalid_argument("build_lattice: dimension must be <= " + std::to_string(kMaxDim));
  if (!is_power_of_two(n) || n < 8)
    throw std::invalid_argument("build_lattice: n must be a power of two >= 8, got " + std::to_string(n));
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("build_lattice: spacing h must be positive");
  double cells = std::pow(static_cast<double>(n), d);
  if (cells > static_cast<double>(memory_budget_cells))
    throw std::invalid_argument("build_lattice: n^d = " + std::to_string(static_cast<long long>(cells)) +
                                " cells exceeds the memory budget of " + std::to_string(memory_budget_cells));
  Lattice lat;
  lat.d = d;
  lat.n = n;
  lat.h = h;
  return lat;
}

double GridField::sum() const {
  CompensatedSum acc;
  for (double x : v) acc.add(x);
  return acc.value();
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace ewlab
