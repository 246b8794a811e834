#include "ewlab/solver.hpp"

#include <algorithm>
#include <cmath>

namespace ewlab {

Solver::Solver(const SpectralTransform& tr, const MollifierSpec& phi, const SolverConfig& cfg,
               const SigmaSpec& sigma)
    : tr_(&tr), phi_(&phi), cfg_(cfg), sigma_(sigma), plan_(tr, Symbol::Continuum) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("Solver: dt must be positive");
  if (cfg.beta < 0.0) throw std::invalid_argument("Solver: beta must be nonnegative");
  const Lattice& lat = tr.lattice();
  if (cfg.scheme == Scheme::ExplicitFD) {
    double bound = lat.h * lat.h / (2.0 * lat.d);
    if (cfg.dt > bound)
      throw SchemeStabilityError("explicit scheme needs dt <= h^2/(2d) = " + std::to_string(bound) +
                                 ", got " + std::to_string(cfg.dt));
  }
  if (cfg.initial_perturbation && !(cfg.initial_perturbation->lat == lat))
    throw std::invalid_argument("Solver: initial perturbation lattice mismatch");
}

FieldState Solver::initial_state(double t0) const {
  FieldState s;
  s.time = t0;
  s.time_index = static_cast<std::int64_t>(std::llround(t0 / cfg_.dt));
  if (std::abs(s.time_index * cfg_.dt - t0) > 1e-9 * std::max(1.0, std::abs(t0)))
    throw std::invalid_argument("Solver: start time must sit on the step grid");
  s.u = GridField(tr_->lattice(), cfg_.lambda0);
  if (cfg_.initial_perturbation)
    for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] += cfg_.initial_perturbation->v[i];
  return s;
}

void Solver::check_finite(const FieldState& state) const {
  for (double v : state.u.v)
    if (!std::isfinite(v)) throw BlowUpError(state.time);
}

void Solver::advance(FieldState& state, const GridField& noise_values) const {
  const Lattice& lat = tr_->lattice();
  GridField& u = state.u;
  if (cfg_.scheme == Scheme::SpectralExponential) {
    // u <- S_dt [u + beta sigma(u) dW], Ito left-endpoint evaluation
    if (cfg_.beta != 0.0)
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += cfg_.beta * sigma_(u[i]) * noise_values[i];
    plan_.apply(cfg_.dt, u);
  } else {
    // u <- u + dt lap_h u + beta sigma(u) dW with the (2d+1)-point Laplacian
    const int n = lat.n;
    const double inv_h2 = 1.0 / (lat.h * lat.h);
    const std::size_t N = lat.cells();
    std::vector<double> lap(N, 0.0);
    std::size_t stride = 1;
    for (int ax = lat.d - 1; ax >= 0; --ax) {
      const std::size_t block = stride * static_cast<std::size_t>(n);
      for (std::size_t base = 0; base < N; base += block)
        for (int j = 0; j < n; ++j) {
          const std::size_t row = base + static_cast<std::size_t>(j) * stride;
          const std::size_t up = base + static_cast<std::size_t>(j + 1 == n ? 0 : j + 1) * stride;
          const std::size_t dn = base + static_cast<std::size_t>(j == 0 ? n - 1 : j - 1) * stride;
          for (std::size_t k = 0; k < stride; ++k)
            lap[row + k] += u[up + k] + u[dn + k] - 2.0 * u[row + k];
        }
      stride = block;
    }
    if (cfg_.beta != 0.0) {
      for (std::size_t i = 0; i < N; ++i)
        u[i] += cfg_.dt * inv_h2 * lap[i] + cfg_.beta * sigma_(u[i]) * noise_values[i];
    } else {
      for (std::size_t i = 0; i < N; ++i) u[i] += cfg_.dt * inv_h2 * lap[i];
    }
  }
  state.time_index += 1;
  state.time = static_cast<double>(state.time_index) * cfg_.dt;
  check_finite(state);
}

void Solver::step(FieldState& state, const NoiseSlice& slice) const {
  if (slice.time_index != state.time_index)
    throw std::invalid_argument("Solver::step: slice time index " + std::to_string(slice.time_index) +
                                " does not match state index " + std::to_string(state.time_index));
  if (slice.dt != cfg_.dt) throw std::invalid_argument("Solver::step: slice dt mismatch");
  if (!(slice.values.lat == tr_->lattice())) throw std::invalid_argument("Solver::step: lattice mismatch");
  advance(state, slice.values);
}

TrajectoryProbe Solver::run(const SeedSpec& seed, const ProbeSpec& probes) const {
  const std::int64_t nsteps = static_cast<std::int64_t>(std::llround(cfg_.horizon / cfg_.dt));
  if (std::abs(nsteps * cfg_.dt - cfg_.horizon) > 1e-9)
    throw std::invalid_argument("Solver::run: horizon must be a multiple of dt");

  std::vector<std::int64_t> record_at;
  for (double t : probes.times) {
    std::int64_t k = static_cast<std::int64_t>(std::llround(t / cfg_.dt));
    if (std::abs(k * cfg_.dt - t) > 0.5 * cfg_.dt)
      throw std::invalid_argument("Solver::run: probe time off the step grid");
    record_at.push_back(k);
  }

  TrajectoryProbe probe;
  FieldState state = initial_state(0.0);
  auto record = [&](const FieldState& s) {
    ProbeRecord rec;
    rec.time = s.time;
    for (std::size_t site : probes.sites) rec.site_values.push_back(s.u[site]);
    rec.field_mean = s.u.mean();
    CompensatedSum dev2;
    double mx = 0.0;
    for (double v : s.u.v) {
      double d = v - cfg_.lambda0;
      dev2.add(d * d);
      mx = std::max(mx, std::abs(d));
    }
    rec.rms_about_lambda = std::sqrt(dev2.value() / static_cast<double>(s.u.size()));
    rec.max_abs_about_lambda = mx;
    probe.records.push_back(std::move(rec));
  };

  if (std::find(record_at.begin(), record_at.end(), 0) != record_at.end()) record(state);
  for (std::int64_t k = 0; k < nsteps; ++k) {
    NoiseSlice slice = make_noise_slice(*tr_, *phi_, seed, cfg_.dt, k);
    advance(state, slice.values);
    if (std::find(record_at.begin(), record_at.end(), state.time_index) != record_at.end())
      record(state);
  }
  probe.final_state = std::move(state);
  return probe;
}

FieldState Solver::run_shifted(double K, const SeedSpec& seed) const {
  if (K < 0.0) throw std::invalid_argument("run_shifted: K must be nonnegative");
  const std::int64_t n = static_cast<std::int64_t>(std::llround(K / cfg_.dt));
  if (std::abs(n * cfg_.dt - K) > 1e-9) throw std::invalid_argument("run_shifted: K must be a multiple of dt");
  FieldState state = initial_state(-static_cast<double>(n) * cfg_.dt);
  for (std::int64_t k = -n; k < 0; ++k) {
    NoiseSlice slice = make_noise_slice(*tr_, *phi_, seed, cfg_.dt, k);
    advance(state, slice.values);
  }
  return state;
}

std::pair<FieldState, FieldState> Solver::run_coupled_pair(double K1, double K2,
                                                           const SeedSpec& seed) const {
  CouplingWindow window{K1, K2};
  auto [ita, itb] = coupled_streams(*tr_, *phi_, seed, window, cfg_.dt);
  FieldState a = initial_state(-K1);
  while (ita.has_next()) {
    NoiseSlice slice = ita.next();
    advance(a, slice.values);
  }
  FieldState b = initial_state(-K2);
  while (itb.has_next()) {
    NoiseSlice slice = itb.next();
    advance(b, slice.values);
  }
  return {std::move(a), std::move(b)};
}

ResponseProbe Solver::noise_response_probe(const SeedSpec& seed, double bump_time,
                                           std::size_t bump_site, double amplitude,
                                           double target_time,
                                           const std::vector<std::size_t>& target_sites) const {
  const Lattice& lat = tr_->lattice();
  const std::int64_t r_idx = static_cast<std::int64_t>(std::llround(bump_time / cfg_.dt));
  const std::int64_t t_idx = static_cast<std::int64_t>(std::llround(target_time / cfg_.dt));
  if (std::abs(r_idx * cfg_.dt - bump_time) > 1e-9 || std::abs(t_idx * cfg_.dt - target_time) > 1e-9)
    throw std::invalid_argument("noise_response_probe: times must sit on the step grid");
  if (t_idx <= r_idx) throw std::invalid_argument("noise_response_probe: target time must exceed bump time");
  if (!(amplitude > 0.0)) throw std::invalid_argument("noise_response_probe: amplitude must be positive");

  // eps_b h^{-d} delta at z smoothed by phi = eps_b phi(. - z)
  GridField bump(lat);
  std::array<int, kMaxDim> zi{}, xi{}, di{};
  lat.decode(bump_site, zi);
  for (std::size_t i = 0; i < lat.cells(); ++i) {
    lat.decode(i, xi);
    for (int a = 0; a < lat.d; ++a)
      di[static_cast<std::size_t>(a)] = lat.wrap_offset(xi[static_cast<std::size_t>(a)] - zi[static_cast<std::size_t>(a)]);
    bump[i] = amplitude * phi_->values[lat.encode(di)];
  }

  FieldState base = initial_state(0.0);
  FieldState pert = initial_state(0.0);
  for (std::int64_t k = 0; k < t_idx; ++k) {
    NoiseSlice slice = make_noise_slice(*tr_, *phi_, seed, cfg_.dt, k);
    advance(base, slice.values);
    if (k == r_idx)
      for (std::size_t i = 0; i < slice.values.size(); ++i) slice.values[i] += bump[i];
    advance(pert, slice.values);
  }

  ResponseProbe rp;
  rp.time = target_time;
  rp.bump_time = bump_time;
  rp.bump_site = bump_site;
  rp.amplitude = amplitude;
  double max_diff = 0.0;
  for (std::size_t i = 0; i < base.u.size(); ++i)
    max_diff = std::max(max_diff, std::abs(pert.u[i] - base.u[i]));
  rp.cancellation_warning = max_diff < 1e-10 * std::max(base.u.max_abs(), 1.0) && cfg_.beta != 0.0;
  for (std::size_t site : target_sites) rp.responses.push_back((pert.u[site] - base.u[site]) / amplitude);
  return rp;
}

}  // namespace ewlab
