#include "ewlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ewlab {

// FFTW planning is not thread-safe; execution of distinct plans is.
static std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct SpectralTransform::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::size_t nreal = 0, nspec = 0;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real) fftw_free(real);
    if (spec) fftw_free(spec);
  }
};

SpectralTransform::SpectralTransform(const Lattice& lat) : lat_(lat), impl_(std::make_unique<Impl>()) {
  const int d = lat.d;
  const int n = lat.n;
  std::size_t nreal = lat.cells();
  nspec_ = nreal / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);

  impl_->nreal = nreal;
  impl_->nspec = nspec_;
  impl_->real = fftw_alloc_real(nreal);
  impl_->spec = fftw_alloc_complex(nspec_);
  if (!impl_->real || !impl_->spec) throw std::bad_alloc();

  std::vector<int> dims(static_cast<std::size_t>(d), n);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->fwd = fftw_plan_dft_r2c(d, dims.data(), impl_->real, impl_->spec, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_c2r(d, dims.data(), impl_->spec, impl_->real, FFTW_ESTIMATE);
  }
  if (!impl_->fwd || !impl_->bwd) throw std::runtime_error("SpectralTransform: FFTW planning failed");

  // symbol and multiplicity tables on the half spectrum
  sym_cont_.resize(nspec_);
  sym_disc_.resize(nspec_);
  mult_.resize(nspec_);
  const double dxi = 2.0 * std::numbers::pi / lat.period();
  const double two_over_h2 = 2.0 / (lat.h * lat.h);
  const int nhalf = n / 2 + 1;
  for (std::size_t m = 0; m < nspec_; ++m) {
    std::size_t rest = m;
    int mlast = static_cast<int>(rest % static_cast<std::size_t>(nhalf));
    rest /= static_cast<std::size_t>(nhalf);
    double c = 0.0, dsc = 0.0;
    int s = mlast;  // last axis holds 0..n/2
    c += static_cast<double>(s) * s;
    dsc += 1.0 - std::cos(2.0 * std::numbers::pi * s / n);
    for (int ax = d - 2; ax >= 0; --ax) {
      int j = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      int sj = lat.signed_offset(j);
      c += static_cast<double>(sj) * sj;
      dsc += 1.0 - std::cos(2.0 * std::numbers::pi * sj / n);
    }
    sym_cont_[m] = dxi * dxi * c;
    sym_disc_[m] = two_over_h2 * dsc;
    mult_[m] = (mlast == 0 || mlast == n / 2) ? 1.0 : 2.0;
  }
}

SpectralTransform::~SpectralTransform() = default;

void SpectralTransform::frequencies(std::size_t m, std::array<int, kMaxDim>& s) const {
  const int n = lat_.n;
  const int nhalf = n / 2 + 1;
  std::size_t rest = m;
  s[static_cast<std::size_t>(lat_.d - 1)] = static_cast<int>(rest % static_cast<std::size_t>(nhalf));
  rest /= static_cast<std::size_t>(nhalf);
  for (int ax = lat_.d - 2; ax >= 0; --ax) {
    int j = static_cast<int>(rest % static_cast<std::size_t>(n));
    rest /= static_cast<std::size_t>(n);
    s[static_cast<std::size_t>(ax)] = lat_.signed_offset(j);
  }
}

void SpectralTransform::forward(const std::vector<double>& field, std::vector<std::complex<double>>& spec) const {
  if (field.size() != impl_->nreal) throw std::invalid_argument("SpectralTransform::forward: field size mismatch");
  spec.resize(nspec_);
  std::memcpy(impl_->real, field.data(), impl_->nreal * sizeof(double));
  fftw_execute(impl_->fwd);
  const double scale = lat_.cell_volume();
  for (std::size_t m = 0; m < nspec_; ++m)
    spec[m] = scale * std::complex<double>(impl_->spec[m][0], impl_->spec[m][1]);
}

void SpectralTransform::inverse(const std::vector<std::complex<double>>& spec, std::vector<double>& field) const {
  if (spec.size() != nspec_) throw std::invalid_argument("SpectralTransform::inverse: spectrum size mismatch");
  field.resize(impl_->nreal);
  for (std::size_t m = 0; m < nspec_; ++m) {
    impl_->spec[m][0] = spec[m].real();
    impl_->spec[m][1] = spec[m].imag();
  }
  fftw_execute(impl_->bwd);
  double vol = 1.0;
  for (int i = 0; i < lat_.d; ++i) vol *= lat_.period();
  const double scale = 1.0 / vol;
  for (std::size_t m = 0; m < impl_->nreal; ++m) field[m] = scale * impl_->real[m];
}

double SpectralTransform::mode_sum(const std::function<double(std::size_t)>& g, bool scale_by_volume) const {
  CompensatedSum acc;
  for (std::size_t m = 0; m < nspec_; ++m) acc.add(mult_[m] * g(m));
  double s = acc.value();
  if (scale_by_volume) {
    double vol = 1.0;
    for (int i = 0; i < lat_.d; ++i) vol *= lat_.period();
    s /= vol;
  }
  return s;
}

GridField convolve(const SpectralTransform& tr, const GridField& f, const GridField& g) {
  if (!(f.lat == tr.lattice()) || !(g.lat == tr.lattice()))
    throw std::invalid_argument("convolve: lattice mismatch");
  std::vector<std::complex<double>> sf, sg;
  tr.forward(f.v, sf);
  tr.forward(g.v, sg);
  for (std::size_t m = 0; m < sf.size(); ++m) sf[m] *= sg[m];
  GridField out(f.lat);
  tr.inverse(sf, out.v);
  return out;
}

}  // namespace ewlab
