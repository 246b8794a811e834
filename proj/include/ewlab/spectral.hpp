#ifndef EWLAB_SPECTRAL_HPP
#define EWLAB_SPECTRAL_HPP

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "ewlab/lattice.hpp"

namespace ewlab {

// Transform convention: the forward transform carries the h^d quadrature
// weight, F(xi_m) = h^d sum_x f(x) e^{-i xi_m . x}, so F(0) equals the
// lattice integral of f and spectral identities match their continuum
// counterparts without stray factors. The inverse is
// f(x) = L^{-d} sum_m F(xi_m) e^{+i xi_m . x}.
//
// Real fields are stored in FFTW half-spectrum layout: the last axis keeps
// n/2+1 entries, the remaining axes the full n. A half mode stands for
// itself and its conjugate; multiplicity() gives the weight for sums over
// the full mode set.
enum class Symbol { Continuum, DiscreteLaplacian };

class SpectralTransform {
 public:
  explicit SpectralTransform(const Lattice& lat);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  const Lattice& lattice() const { return lat_; }
  std::size_t spectrum_size() const { return nspec_; }

  void forward(const std::vector<double>& field, std::vector<std::complex<double>>& spec) const;
  void inverse(const std::vector<std::complex<double>>& spec, std::vector<double>& field) const;

  // |xi|^2 for the given symbol at half-spectrum index m
  double symbol_value(std::size_t m, Symbol s) const { return s == Symbol::Continuum ? sym_cont_[m] : sym_disc_[m]; }
  const std::vector<double>& symbol_table(Symbol s) const { return s == Symbol::Continuum ? sym_cont_ : sym_disc_; }
  // 1 for self-conjugate modes (last-axis index 0 or n/2), else 2
  double multiplicity(std::size_t m) const { return mult_[m]; }
  // signed integer frequencies of half-spectrum index m
  void frequencies(std::size_t m, std::array<int, kMaxDim>& s) const;

  // sum over the full mode set of w(m) * g(m), where g is evaluated on the
  // half spectrum; equals L^{-d} sum_m g when scale_by_volume
  double mode_sum(const std::function<double(std::size_t)>& g, bool scale_by_volume = true) const;

 private:
  Lattice lat_;
  std::size_t nspec_ = 0;
  std::vector<double> sym_cont_, sym_disc_, mult_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// circular convolution with lattice quadrature weight:
// (f (*) g)(x) = h^d sum_y f(y) g(x - y); spectrally F.G
GridField convolve(const SpectralTransform& tr, const GridField& f, const GridField& g);

}  // namespace ewlab

#endif
