#ifndef EWLAB_NOISE_HPP
#define EWLAB_NOISE_HPP

#include <functional>
#include <utility>
#include <vector>

#include "ewlab/kernels.hpp"
#include "ewlab/lattice.hpp"
#include "ewlab/report.hpp"
#include "ewlab/rng.hpp"
#include "ewlab/spectral.hpp"

namespace ewlab {

// One time-step increment of the smoothed noise; values carry
// Delta W_phi with spatial covariance dt * R (lattice exact).
struct NoiseSlice {
  double dt = 0.0;
  std::int64_t time_index = 0;
  GridField values;
};

// independent N(0, dt h^{-d}) per cell, a pure function of
// (seed, time_index, cell_index)
GridField sample_raw_slice(const SeedSpec& seed, const Lattice& lat, double dt,
                           std::int64_t time_index);

// Delta W_phi = h^d (phi circ-conv raw), spectrally
NoiseSlice smooth_slice(const SpectralTransform& tr, const MollifierSpec& phi,
                        const GridField& raw, double dt, std::int64_t time_index);

NoiseSlice make_noise_slice(const SpectralTransform& tr, const MollifierSpec& phi,
                            const SeedSpec& seed, double dt, std::int64_t time_index);

// Random-access slice stream over [from, to); indices at or past
// shared_from use the shared window id so two consumers see
// bit-identical increments there.
class SliceIterator {
 public:
  SliceIterator(const SpectralTransform& tr, const MollifierSpec& phi, SeedSpec seed,
                std::uint32_t private_window, std::uint32_t shared_window, double dt,
                std::int64_t from, std::int64_t to, std::int64_t shared_from);

  bool has_next() const { return current_ < to_; }
  NoiseSlice next();
  NoiseSlice at(std::int64_t time_index) const;
  std::int64_t current() const { return current_; }
  SliceIterator clone() const { return *this; }

 private:
  const SpectralTransform* tr_;
  const MollifierSpec* phi_;
  SeedSpec seed_;
  std::uint32_t private_window_, shared_window_;
  double dt_;
  std::int64_t from_, to_, shared_from_, current_;
};

struct CouplingWindow {
  double k1 = 0.0;  // longer path starts at -k1
  double k2 = 0.0;  // shared window is [-k2, 0)
};

// iterator A spans [-K1, 0), iterator B spans [-K2, 0); on the shared
// window both yield identical slices
std::pair<SliceIterator, SliceIterator> coupled_streams(const SpectralTransform& tr,
                                                        const MollifierSpec& phi,
                                                        const SeedSpec& seed,
                                                        const CouplingWindow& window, double dt);

// Covariance certification: per-slice spatially averaged lag products
// against dt R(lag), a Hotelling T^2 aggregate over the lags at the 1%
// level, and inter-slice temporal correlations.
ExperimentReport empirical_covariance(const std::function<NoiseSlice(std::int64_t)>& slice_at,
                                      std::size_t n_slices,
                                      const std::vector<std::array<int, kMaxDim>>& lags,
                                      const CovarianceKernel& R, double dt);

// default lag set for certification: spread over the support of R
std::vector<std::array<int, kMaxDim>> default_certification_lags(const Lattice& lat, double r0,
                                                                 std::size_t count = 20);

}  // namespace ewlab

#endif
