#ifndef EWLAB_LATTICE_HPP
#define EWLAB_LATTICE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ewlab {

inline constexpr int kMaxDim = 4;

// Periodic d-dimensional grid. Cell centers sit at h*k per axis with
// k in {-n/2, ..., n/2-1}; storage is row-major over the index
// j in {0, ..., n-1} with the usual FFT wrap (j <= n/2-1 means k = j,
// otherwise k = j - n), so x = 0 lives at linear index 0.
struct Lattice {
  int d = 3;
  int n = 64;
  double h = 0.25;

  double period() const { return n * h; }
  std::size_t cells() const {
    std::size_t c = 1;
    for (int i = 0; i < d; ++i) c *= static_cast<std::size_t>(n);
    return c;
  }
  double cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < d; ++i) v *= h;
    return v;
  }

  // signed grid offset for a storage index along one axis
  int signed_offset(int j) const { return j <= n / 2 - 1 ? j : j - n; }
  // storage index for a signed offset (offset may be any integer)
  int wrap_offset(long long k) const {
    long long m = k % n;
    if (m < 0) m += n;
    return static_cast<int>(m);
  }
  double coordinate(int j) const { return h * signed_offset(j); }
  // torus distance of one axis offset to the origin, in length units
  double axis_distance(int j) const {
    int a = j % n;
    if (a < 0) a += n;
    return h * (a <= n / 2 ? a : n - a);
  }

  void decode(std::size_t linear, std::array<int, kMaxDim>& idx) const {
    for (int i = d - 1; i >= 0; --i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(linear % static_cast<std::size_t>(n));
      linear /= static_cast<std::size_t>(n);
    }
  }
  std::size_t encode(const std::array<int, kMaxDim>& idx) const {
    std::size_t lin = 0;
    for (int i = 0; i < d; ++i) lin = lin * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
    return lin;
  }
  // squared torus distance from cell `linear` to the origin
  double dist2(std::size_t linear) const {
    double s = 0.0;
    for (int i = d - 1; i >= 0; --i) {
      int j = static_cast<int>(linear % static_cast<std::size_t>(n));
      linear /= static_cast<std::size_t>(n);
      double r = axis_distance(j);
      s += r * r;
    }
    return s;
  }

  bool operator==(const Lattice& o) const { return d == o.d && n == o.n && h == o.h; }
};

// Scalar field on a lattice, row-major doubles.
struct GridField {
  Lattice lat;
  std::vector<double> v;

  GridField() = default;
  explicit GridField(const Lattice& l, double fill = 0.0) : lat(l), v(l.cells(), fill) {}

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }

  double sum() const;
  double mean() const { return sum() / static_cast<double>(v.size()); }
  double max_abs() const;
  // h^d * sum, the lattice quadrature of the field
  double integral() const { return lat.cell_volume() * sum(); }
};

// default per-field allocation guard (cells); ~1 GiB of doubles
inline constexpr std::size_t kDefaultCellBudget = std::size_t{1} << 27;

Lattice build_lattice(int d, int n, double h, std::size_t memory_budget_cells = kDefaultCellBudget);

// compensated (Neumaier) summation; used wherever accumulation order
// must not leak into reported digits
struct CompensatedSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

}  // namespace ewlab

#endif
