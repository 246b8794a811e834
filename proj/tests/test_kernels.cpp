#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ewlab/kernels.hpp"
#include "ewlab/lattice.hpp"
#include "ewlab/spectral.hpp"

using namespace ewlab;
using std::numbers::pi;

TEST_CASE("build_lattice accepts valid shapes and rejects bad ones") {
  Lattice lat = build_lattice(3, 32, 0.25);
  CHECK(lat.period() == doctest::Approx(8.0));
  CHECK(lat.cells() == 32768);

  Lattice minimal = build_lattice(3, 8, 1.0);
  CHECK(minimal.period() == doctest::Approx(8.0));

  CHECK_THROWS_AS(build_lattice(2, 32, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(build_lattice(3, 24, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(build_lattice(3, 4, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(build_lattice(3, 32, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_lattice(3, 1024, 0.25), std::invalid_argument);  // over the cell budget
}

TEST_CASE("lattice indexing round-trips and the torus metric wraps") {
  Lattice lat = build_lattice(3, 16, 0.5);
  CHECK(lat.signed_offset(0) == 0);
  CHECK(lat.signed_offset(7) == 7);
  CHECK(lat.signed_offset(8) == -8);
  CHECK(lat.signed_offset(15) == -1);
  CHECK(lat.axis_distance(15) == doctest::Approx(0.5));
  CHECK(lat.axis_distance(8) == doctest::Approx(4.0));
  std::array<int, kMaxDim> idx{3, 15, 8, 0};
  CHECK(lat.encode(idx) < lat.cells());
  std::array<int, kMaxDim> back{};
  lat.decode(lat.encode(idx), back);
  for (int a = 0; a < 3; ++a) CHECK(back[a] == idx[a]);
}

TEST_CASE("transform round-trips, is h^d-weighted, and satisfies Parseval") {
  Lattice lat = build_lattice(3, 16, 0.5);
  SpectralTransform tr(lat);
  std::mt19937_64 gen(42);
  std::normal_distribution<double> nd;
  GridField f(lat);
  for (auto& x : f.v) x = nd(gen);

  std::vector<std::complex<double>> spec;
  tr.forward(f.v, spec);
  CHECK(spec[0].real() == doctest::Approx(f.integral()).epsilon(1e-12));

  std::vector<double> back;
  tr.inverse(spec, back);
  double err = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) err = std::max(err, std::abs(back[i] - f.v[i]));
  CHECK(err < 1e-13 * f.max_abs());

  // h^d sum f^2 == L^-d sum |F|^2
  double lhs = 0.0;
  for (double x : f.v) lhs += x * x;
  lhs *= lat.cell_volume();
  double rhs = tr.mode_sum([&](std::size_t m) { return std::norm(spec[m]); });
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("bump mollifier: peak, normalization, transform at zero") {
  Lattice lat = build_lattice(3, 64, 0.25);
  SpectralTransform tr(lat);
  MollifierSpec phi = bump_mollifier(tr, 0.5);

  double peak = 0.0;
  for (double v : phi.values.v) {
    CHECK(v >= 0.0);
    peak = std::max(peak, v);
  }
  CHECK(phi.values[0] == peak);
  CHECK(phi.values.integral() == doctest::Approx(1.0).epsilon(1e-12));

  // phi_hat(0) = h^d sum phi, by direct summation
  double direct = 0.0;
  for (double v : phi.values.v) direct += v;
  direct *= lat.cell_volume();
  CHECK(std::abs(phi.fourier[0] - direct) < 1e-12);
  CHECK(std::abs(phi.fourier[0] - 1.0) < 1e-12);

  // support and evenness are exact
  for (std::size_t i = 0; i < lat.cells(); ++i) {
    if (lat.dist2(i) >= 0.25) CHECK(phi.values[i] == 0.0);
  }
  std::array<int, kMaxDim> idx{}, ridx{};
  for (std::size_t i = 0; i < lat.cells(); i += 97) {
    lat.decode(i, idx);
    for (int a = 0; a < 3; ++a) ridx[a] = (lat.n - idx[a]) % lat.n;
    CHECK(phi.values[i] == phi.values[lat.encode(ridx)]);
  }

  CHECK_THROWS_AS(bump_mollifier(tr, 0.3), std::invalid_argument);  // r0 < 2h
  CHECK_THROWS_AS(bump_mollifier(tr, 2.5), std::invalid_argument);  // 8 r0 > L
}

TEST_CASE("covariance kernel: integral, lag-zero value, support, symmetry, spd") {
  Lattice lat = build_lattice(3, 64, 0.25);
  SpectralTransform tr(lat);
  MollifierSpec phi = bump_mollifier(tr, 0.5);
  CovarianceKernel R = covariance_of(tr, phi);

  CHECK(std::abs(R.values.integral() - 1.0) < 1e-10);

  double phi2 = 0.0;
  for (double v : phi.values.v) phi2 += v * v;
  phi2 *= lat.cell_volume();
  CHECK(R.at_zero() == doctest::Approx(phi2).epsilon(1e-10));

  double maxR = 0.0;
  for (double v : R.values.v) maxR = std::max(maxR, std::abs(v));
  CHECK(R.at_zero() == doctest::Approx(maxR).epsilon(1e-12));

  for (std::size_t i = 0; i < lat.cells(); ++i)
    if (lat.dist2(i) > 1.0 + 1e-9) CHECK(std::abs(R.values[i]) < 1e-12);

  std::array<int, kMaxDim> idx{}, ridx{};
  for (std::size_t i = 0; i < lat.cells(); i += 131) {
    lat.decode(i, idx);
    for (int a = 0; a < 3; ++a) ridx[a] = (lat.n - idx[a]) % lat.n;
    CHECK(R.values[i] == R.values[lat.encode(ridx)]);  // bitwise
  }

  double max_hat = 0.0;
  for (double v : R.fourier) max_hat = std::max(max_hat, v);
  for (double v : R.fourier) CHECK(v >= -1e-12 * max_hat);
}

TEST_CASE("heat kernel: mass, pointwise value, validity window") {
  Lattice wide = build_lattice(3, 64, 1.0);  // L = 64 so t = 1 is comfortably valid
  GridField p = heat_kernel_field(1.0, wide);
  CHECK(p.integral() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(p[0] == doctest::Approx(std::pow(4.0 * pi, -1.5)).epsilon(1e-12));

  Lattice lat = build_lattice(3, 32, 0.25);
  HeatTimeWindow w = heat_time_window(lat);
  CHECK(w.t_min < w.t_max);
  CHECK_THROWS_WITH_AS(heat_kernel_field(50.0, lat) /* too wide */, doctest::Contains("need period"),
                       std::invalid_argument);
  CHECK_THROWS_AS(heat_kernel_field(1e-4, lat), std::invalid_argument);  // under-resolved
}

TEST_CASE("Chapman-Kolmogorov on the lattice, with a direct-convolution oracle") {
  Lattice lat = build_lattice(3, 32, 0.25);
  SpectralTransform tr(lat);
  double t = 0.06, s = 0.09;
  GridField pt = heat_kernel_field(t, lat);
  GridField ps = heat_kernel_field(s, lat);
  GridField conv = convolve(tr, pt, ps);
  GridField pts = heat_kernel_field(t + s, lat);

  // spectral convolution against a direct O(N) sum at a few points
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::size_t> pick(0, lat.cells() - 1);
  std::array<int, kMaxDim> xi{}, yi{}, di{};
  for (int rep = 0; rep < 6; ++rep) {
    std::size_t target = pick(gen);
    lat.decode(target, xi);
    CompensatedSum acc;
    for (std::size_t y = 0; y < lat.cells(); ++y) {
      lat.decode(y, yi);
      for (int a = 0; a < 3; ++a) di[a] = lat.wrap_offset(xi[a] - yi[a]);
      acc.add(pt.v[y] * ps.v[lat.encode(di)]);
    }
    double direct = acc.value() * lat.cell_volume();
    CHECK(conv[target] == doctest::Approx(direct).epsilon(1e-11));
  }

  double sup_ref = pts.max_abs();
  double gap = 0.0;
  for (std::size_t i = 0; i < lat.cells(); ++i) gap = std::max(gap, std::abs(conv[i] - pts[i]));
  CHECK(gap / sup_ref < 1e-8);
}

TEST_CASE("semigroup: constants fixed bitwise, mean kept, composition, mode decay") {
  Lattice lat = build_lattice(3, 32, 0.25);
  SpectralTransform tr(lat);
  HeatSemigroupPlan plan(tr);

  GridField ones(lat, 1.0);
  GridField evolved = semigroup_apply(plan, 0.37, ones);
  for (std::size_t i = 0; i < lat.cells(); ++i) CHECK(evolved[i] == 1.0);

  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  GridField f(lat);
  for (auto& x : f.v) x = nd(gen);
  double mean0 = f.mean();
  GridField g1 = semigroup_apply(plan, 0.2, f);
  CHECK(std::abs(g1.mean() - mean0) < 1e-12 * std::max(1.0, std::abs(mean0)));
  CHECK(g1.max_abs() <= f.max_abs() * (1.0 + 1e-12));  // sup-norm contraction

  GridField g2 = semigroup_apply(plan, 0.15, g1);
  GridField g12 = semigroup_apply(plan, 0.35, f);
  double err = 0.0;
  for (std::size_t i = 0; i < lat.cells(); ++i) err = std::max(err, std::abs(g2[i] - g12[i]));
  CHECK(err < 1e-12 * std::max(1.0, g12.max_abs()));

  // single Fourier mode decays by the continuum factor
  GridField mode(lat);
  std::array<int, kMaxDim> idx{};
  for (std::size_t i = 0; i < lat.cells(); ++i) {
    lat.decode(i, idx);
    mode[i] = std::cos(2.0 * pi * idx[0] / lat.n);
  }
  double tmode = 0.4;
  GridField decayed = semigroup_apply(plan, tmode, mode);
  double k1 = 2.0 * pi / lat.period();
  double factor = std::exp(-tmode * k1 * k1);
  for (std::size_t i = 0; i < lat.cells(); i += 41)
    CHECK(decayed[i] == doctest::Approx(factor * mode[i]).epsilon(1e-11));
}

static CovarianceKernel default_R(SpectralTransform& tr) {
  MollifierSpec phi = bump_mollifier(tr, 0.5);
  return covariance_of(tr, phi);
}

TEST_CASE("ppR bound: slope, small-t limit, nonnegativity, dual route") {
  Lattice lat = build_lattice(3, 64, 0.25);
  SpectralTransform tr(lat);
  CovarianceKernel R = default_R(tr);

  std::vector<double> times;
  times.push_back(1e-4 * 0.25);  // small-t probe at 1e-4 r0^2
  for (int i = 0; i <= 24; ++i) times.push_back(0.008 * std::pow(230.0, i / 24.0));
  ExperimentReport rep = check_ppR_bound(tr, R, times);
  REQUIRE(rep.passed());

  for (const auto& c : rep.checks) {
    if (c.name == "ppR_tail_slope") CHECK(std::abs(c.value + 1.5) <= 0.1);
    if (c.name == "ppR_small_t_ratio") {
      CHECK(c.value >= 0.9);
      CHECK(c.value <= 1.0);
    }
  }

  // dual route: spectral I(t) vs sampled-kernel convolution quadrature
  double t = 0.1;
  GridField pt = heat_kernel_field(t, lat);
  GridField pp = convolve(tr, pt, pt);
  CompensatedSum acc;
  for (std::size_t i = 0; i < lat.cells(); ++i) acc.add(pp[i] * R.values[i]);
  double direct = acc.value() * lat.cell_volume();
  CHECK(pp_r_integral(tr, R, t) == doctest::Approx(direct).epsilon(1e-8));

  CHECK_THROWS_AS(check_ppR_bound(tr, R, std::vector<double>{0.1, 0.2, 0.3, 0.4}), std::invalid_argument);
}

TEST_CASE("Fourier identity: both routes agree, peak at zero, tail slope") {
  Lattice lat = build_lattice(3, 64, 0.25);
  SpectralTransform tr(lat);
  CovarianceKernel R = default_R(tr);
  std::vector<int> offset{3, 0, 0};
  ExperimentReport rep = check_fourier_identity(tr, R, 0.125, offset);
  CHECK(rep.passed());
  for (const auto& c : rep.checks)
    if (c.name == "fourier_identity_tail_slope") CHECK(std::abs(c.value + 1.5) <= 0.1);
}

TEST_CASE("F-tilde profile: Newtonian tail, monotone, positive") {
  Lattice lat = build_lattice(3, 64, 0.25);
  SpectralTransform tr(lat);
  CovarianceKernel R = default_R(tr);
  std::vector<double> radii{1.25, 1.5, 2.0, 2.5, 3.0, 3.5};
  ExperimentReport rep = f_tilde_profile(tr, R, radii);
  CHECK(rep.passed());
  for (const auto& c : rep.checks)
    if (c.name == "f_tilde_tail_exponent") CHECK(std::abs(c.value + 1.0) <= 0.2);
  CHECK_THROWS_AS(f_tilde_profile(tr, R, std::vector<double>{0.5, 1.5, 2.0}), std::invalid_argument);
}

TEST_CASE("d = 4 smoke: mollifier, covariance, heat mass, composition") {
  Lattice lat = build_lattice(4, 32, 0.35);
  SpectralTransform tr(lat);
  MollifierSpec phi = bump_mollifier(tr, 0.7);
  CovarianceKernel R = covariance_of(tr, phi);
  CHECK(std::abs(R.values.integral() - 1.0) < 1e-10);

  HeatTimeWindow w = heat_time_window(lat);
  double t = 0.15;
  REQUIRE(t > convolution_time_floor(lat));
  REQUIRE(2.0 * t < w.t_max);
  GridField pt = heat_kernel_field(t, lat);
  CHECK(pt.integral() == doctest::Approx(1.0).epsilon(1e-8));
  GridField conv = convolve(tr, pt, pt);
  GridField p2t = heat_kernel_field(2.0 * t, lat);
  double gap = 0.0;
  for (std::size_t i = 0; i < lat.cells(); ++i) gap = std::max(gap, std::abs(conv[i] - p2t[i]));
  CHECK(gap / p2t.max_abs() < 1e-8);
}
