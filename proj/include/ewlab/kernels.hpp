#ifndef EWLAB_KERNELS_HPP
#define EWLAB_KERNELS_HPP

#include <complex>
#include <span>
#include <vector>

#include "ewlab/lattice.hpp"
#include "ewlab/report.hpp"
#include "ewlab/spectral.hpp"

namespace ewlab {

// Smooth compactly supported bump, phi(x) = c exp(-1/(1-(|x|/r0)^2)) for
// |x| < r0, zero outside, normalized so h^d sum phi = 1. The Fourier
// samples follow the h^d-weighted transform convention, phi_hat(0) = 1.
struct MollifierSpec {
  double r0 = 0.5;
  GridField values;
  std::vector<double> fourier;  // real part on the half spectrum; phi is even
};

// R = phi * phi~ computed spectrally, R_hat = |phi_hat|^2 >= 0.
struct CovarianceKernel {
  double r0 = 0.5;
  double support_radius = 1.0;  // 2 r0
  GridField values;
  std::vector<double> fourier;  // R_hat >= 0 on the half spectrum
  double at_zero() const { return values[0]; }
  double integral() const { return fourier[0]; }
};

MollifierSpec bump_mollifier(const SpectralTransform& tr, double r0);
CovarianceKernel covariance_of(const SpectralTransform& tr, const MollifierSpec& phi);

// Valid sampled-kernel time window on a lattice: below t_min the grid
// under-resolves the Gaussian (mass off by > 1e-8), above t_max the
// periodization leaks more than 1e-10 of mass past L/2.
struct HeatTimeWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};
HeatTimeWindow heat_time_window(const Lattice& lat);

// Periodized continuum heat kernel samples; throws when t is outside the
// valid window, reporting the period the request would need.
GridField heat_kernel_field(double t, const Lattice& lat);

// smallest t at which sampled-kernel convolutions hold to 1e-8
double convolution_time_floor(const Lattice& lat);

// e^{-t symbol(xi)} multiplier applied spectrally. Exactly constant fields
// are fixed points (returned unchanged, which also keeps beta = 0 solver
// runs bitwise exact).
class HeatSemigroupPlan {
 public:
  HeatSemigroupPlan(const SpectralTransform& tr, Symbol sym = Symbol::Continuum);
  const SpectralTransform& transform() const { return *tr_; }
  Symbol symbol() const { return sym_; }
  const std::vector<double>& multipliers(double t) const;
  void apply(double t, GridField& f) const;

 private:
  const SpectralTransform* tr_;
  Symbol sym_;
  mutable double cached_t_ = -1.0;
  mutable std::vector<double> mult_;
  mutable std::vector<std::complex<double>> spec_;
};

GridField semigroup_apply(const HeatSemigroupPlan& plan, double t, const GridField& f);

// I(t) = h^d sum_x (p(t) (*) p(t))(x) R(x), evaluated spectrally; valid
// while the torus value tracks the free-space one to 1e-8.
double pp_r_integral(const SpectralTransform& tr, const CovarianceKernel& R, double t);

ExperimentReport check_ppR_bound(const SpectralTransform& tr, const CovarianceKernel& R,
                                 std::span<const double> times);
ExperimentReport check_fourier_identity(const SpectralTransform& tr, const CovarianceKernel& R,
                                        double t, std::span<const int> offset);
ExperimentReport f_tilde_profile(const SpectralTransform& tr, const CovarianceKernel& R,
                                 std::span<const double> radii);

}  // namespace ewlab

#endif
