#include "ewlab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ewlab {

GridField sample_raw_slice(const SeedSpec& seed, const Lattice& lat, double dt,
                           std::int64_t time_index) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_raw_slice: dt must be positive");
  GridField raw(lat);
  const double sd = std::sqrt(dt / lat.cell_volume());
  const std::uint64_t key = stream_key(seed);
  const std::size_t N = lat.cells();
  for (std::size_t i = 0; i < N; ++i) raw[i] = sd * normal_sample(key, time_index, i);
  return raw;
}

NoiseSlice smooth_slice(const SpectralTransform& tr, const MollifierSpec& phi,
                        const GridField& raw, double dt, std::int64_t time_index) {
  if (!(raw.lat == tr.lattice())) throw std::invalid_argument("smooth_slice: lattice mismatch");
  NoiseSlice s;
  s.dt = dt;
  s.time_index = time_index;
  std::vector<std::complex<double>> spec;
  tr.forward(raw.v, spec);
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= phi.fourier[m];
  s.values = GridField(raw.lat);
  tr.inverse(spec, s.values.v);
  return s;
}

NoiseSlice make_noise_slice(const SpectralTransform& tr, const MollifierSpec& phi,
                            const SeedSpec& seed, double dt, std::int64_t time_index) {
  return smooth_slice(tr, phi, sample_raw_slice(seed, tr.lattice(), dt, time_index), dt, time_index);
}

SliceIterator::SliceIterator(const SpectralTransform& tr, const MollifierSpec& phi, SeedSpec seed,
                             std::uint32_t private_window, std::uint32_t shared_window, double dt,
                             std::int64_t from, std::int64_t to, std::int64_t shared_from)
    : tr_(&tr),
      phi_(&phi),
      seed_(seed),
      private_window_(private_window),
      shared_window_(shared_window),
      dt_(dt),
      from_(from),
      to_(to),
      shared_from_(shared_from),
      current_(from) {}

NoiseSlice SliceIterator::at(std::int64_t time_index) const {
  SeedSpec s = seed_;
  s.stream.window = time_index >= shared_from_ ? shared_window_ : private_window_;
  return make_noise_slice(*tr_, *phi_, s, dt_, time_index);
}

NoiseSlice SliceIterator::next() {
  if (!has_next()) throw std::out_of_range("SliceIterator::next past the end of the window");
  return at(current_++);
}

static std::int64_t steps_of(double k, double dt, const char* what) {
  double ratio = k / dt;
  std::int64_t n = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, std::abs(ratio)))
    throw std::invalid_argument(std::string(what) + " must be an integer multiple of dt");
  return n;
}

std::pair<SliceIterator, SliceIterator> coupled_streams(const SpectralTransform& tr,
                                                        const MollifierSpec& phi,
                                                        const SeedSpec& seed,
                                                        const CouplingWindow& window, double dt) {
  if (!(window.k1 >= window.k2) || window.k2 < 0.0)
    throw std::invalid_argument("coupled_streams: need K1 >= K2 >= 0");
  std::int64_t n1 = steps_of(window.k1, dt, "coupled_streams: K1");
  std::int64_t n2 = steps_of(window.k2, dt, "coupled_streams: K2");
  // window id 0 = shared tail, 1 = private head of the longer path
  SliceIterator a(tr, phi, seed, 1, 0, dt, -n1, 0, -n2);
  SliceIterator b(tr, phi, seed, 1, 0, dt, -n2, 0, -n2);
  return {a, b};
}

std::vector<std::array<int, kMaxDim>> default_certification_lags(const Lattice& lat, double r0,
                                                                 std::size_t count) {
  int reach = std::max(1, static_cast<int>(std::floor(2.0 * r0 / lat.h)));
  std::vector<std::array<int, kMaxDim>> lags;
  lags.push_back({0, 0, 0, 0});
  for (int step = 1; step <= reach && lags.size() < count; ++step)
    for (int ax = 0; ax < lat.d && lags.size() < count; ++ax) {
      std::array<int, kMaxDim> lag{0, 0, 0, 0};
      lag[static_cast<std::size_t>(ax)] = step;
      lags.push_back(lag);
    }
  for (int step = 1; step <= reach / 2 + 1 && lags.size() < count; ++step) {
    lags.push_back({step, step, 0, 0});
    if (lags.size() < count) lags.push_back({step, step, step, 0});
  }
  for (int ax = 0; ax < lat.d && lags.size() < count; ++ax) {
    std::array<int, kMaxDim> lag{0, 0, 0, 0};
    lag[static_cast<std::size_t>(ax)] = std::min(reach + 2, lat.n / 2 - 1);  // past the support
    lags.push_back(lag);
  }
  while (lags.size() < count) {
    std::array<int, kMaxDim> lag{0, 0, 0, 0};
    lag[0] = static_cast<int>(lags.size()) % (lat.n / 2);
    lag[1] = 1;
    lags.push_back(lag);
  }
  lags.resize(count);
  return lags;
}

ExperimentReport empirical_covariance(const std::function<NoiseSlice(std::int64_t)>& slice_at,
                                      std::size_t n_slices,
                                      const std::vector<std::array<int, kMaxDim>>& lags,
                                      const CovarianceKernel& R, double dt) {
  if (n_slices < 100) throw std::invalid_argument("empirical_covariance: need at least 100 slices");
  if (lags.empty()) throw std::invalid_argument("empirical_covariance: no lags given");
  const Lattice& lat = R.values.lat;
  const std::size_t N = lat.cells();
  const std::size_t L = lags.size();
  SpectralTransform tr(lat);

  // per-slice spatially averaged products at each lag, read off the
  // spectral autocorrelation (one transform pair per slice)
  std::vector<std::vector<double>> samples(L, std::vector<double>(n_slices));
  std::vector<double> temporal(n_slices > 1 ? n_slices - 1 : 0);
  std::vector<std::size_t> lag_index(L);
  std::array<int, kMaxDim> shifted{};
  for (std::size_t l = 0; l < L; ++l) {
    for (int a = 0; a < lat.d; ++a)
      shifted[static_cast<std::size_t>(a)] = lat.wrap_offset(lags[l][static_cast<std::size_t>(a)]);
    lag_index[l] = lat.encode(shifted);
  }

  GridField prev;
  std::vector<std::complex<double>> spec;
  std::vector<double> autocorr;
  const double inv_nh = 1.0 / (static_cast<double>(N) * lat.cell_volume());
  for (std::size_t s = 0; s < n_slices; ++s) {
    NoiseSlice slice = slice_at(static_cast<std::int64_t>(s));
    const auto& w = slice.values.v;
    tr.forward(w, spec);
    for (auto& z : spec) z = std::norm(z);
    tr.inverse(spec, autocorr);
    for (std::size_t l = 0; l < L; ++l) samples[l][s] = autocorr[lag_index[l]] * inv_nh;
    if (s > 0) {
      CompensatedSum acc;
      for (std::size_t y = 0; y < N; ++y) acc.add(prev[y] * w[y]);
      temporal[s - 1] = acc.value() / static_cast<double>(N);
    }
    prev = slice.values;
  }

  ExperimentReport rep;
  rep.name = "noise_covariance";
  rep.params = {{"n_slices", n_slices}, {"dt", dt}, {"lags", L}};

  // per-lag rows and z-scores
  std::vector<double> zs(L), means(L), ses(L);
  double max_abs_z = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    MeanSe m = mean_with_se(samples[l]);
    means[l] = m.mean;
    ses[l] = m.se;
    double target = dt * R.values[lag_index[l]];
    zs[l] = (m.mean - target) / m.se;
    max_abs_z = std::max(max_abs_z, std::abs(zs[l]));
    SampleRow row;
    row.quantity = "lag_covariance";
    for (int a = 0; a < lat.d; ++a)
      row.x[static_cast<std::size_t>(a)] = lat.h * lags[l][static_cast<std::size_t>(a)];
    row.value = m.mean;
    row.reference = target;
    row.ratio = target != 0.0 ? m.mean / target : m.mean / m.se;
    rep.rows.push_back(row);
  }

  // Hotelling T^2 against dt R over all lags; with n_slices >> lags the
  // null is chi-square with L dof
  std::vector<double> cov(L * L, 0.0);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = i; j < L; ++j) {
      CompensatedSum acc;
      for (std::size_t s = 0; s < n_slices; ++s)
        acc.add((samples[i][s] - means[i]) * (samples[j][s] - means[j]));
      double c = acc.value() / (static_cast<double>(n_slices) - 1.0);
      cov[i * L + j] = c;
      cov[j * L + i] = c;
    }
  // Cholesky solve of cov * x = delta
  std::vector<double> chol = cov;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = chol[i * L + j];
      for (std::size_t k = 0; k < j; ++k) sum -= chol[i * L + k] * chol[j * L + k];
      if (i == j) {
        if (!(sum > 0.0)) throw std::runtime_error("empirical_covariance: singular lag covariance");
        chol[i * L + i] = std::sqrt(sum);
      } else {
        chol[i * L + j] = sum / chol[j * L + j];
      }
    }
  }
  std::vector<double> delta(L), y(L);
  for (std::size_t l = 0; l < L; ++l) delta[l] = means[l] - dt * R.values[lag_index[l]];
  for (std::size_t i = 0; i < L; ++i) {
    double sum = delta[i];
    for (std::size_t k = 0; k < i; ++k) sum -= chol[i * L + k] * y[k];
    y[i] = sum / chol[i * L + i];
  }
  double t2 = 0.0;
  for (std::size_t i = 0; i < L; ++i) t2 += y[i] * y[i];
  t2 *= static_cast<double>(n_slices);
  double crit = chi_square_quantile(static_cast<int>(L), 0.99);
  auto& hc = rep.check_le("covariance_hotelling_t2", t2, crit);
  hc.note = "chi-square 1% critical value for " + std::to_string(L) + " lags";

  rep.check_le("covariance_max_abs_z", max_abs_z, 4.5).note = "worst single-lag z-score";

  MeanSe tm = mean_with_se(temporal);
  double tz = tm.mean / tm.se;
  auto& tc = rep.check_abs("temporal_correlation_z", tz, 0.0, 3.0, 3.0, 1.0);
  tc.note = "consecutive-slice site-product mean over its SE";
  SampleRow trow;
  trow.quantity = "temporal_covariance";
  trow.t = dt;
  trow.value = tm.mean;
  trow.reference = 0.0;
  trow.ratio = tz;
  rep.rows.push_back(trow);
  return rep;
}

}  // namespace ewlab
