#ifndef EWLAB_SOLVER_HPP
#define EWLAB_SOLVER_HPP

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ewlab/kernels.hpp"
#include "ewlab/lattice.hpp"
#include "ewlab/noise.hpp"
#include "ewlab/sigma.hpp"
#include "ewlab/spectral.hpp"

namespace ewlab {

enum class Scheme { SpectralExponential, ExplicitFD };

struct SolverConfig {
  Scheme scheme = Scheme::SpectralExponential;
  double dt = 0.25 * 0.25 / 12.0;  // h^2/12 at the default spacing
  double beta = 0.1;
  double horizon = 1.0;
  double lambda0 = 1.0;
  const GridField* initial_perturbation = nullptr;  // optional bounded f
};

struct FieldState {
  double time = 0.0;
  std::int64_t time_index = 0;
  GridField u;
};

struct BlowUpError : std::runtime_error {
  double time;
  explicit BlowUpError(double t)
      : std::runtime_error("solution lost finiteness at t = " + std::to_string(t) +
                           " (beta too large for this horizon)"),
        time(t) {}
};

struct SchemeStabilityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ProbeSpec {
  std::vector<std::size_t> sites;
  std::vector<double> times;  // must sit on the step grid
};

struct ProbeRecord {
  double time = 0.0;
  std::vector<double> site_values;
  double field_mean = 0.0;
  double rms_about_lambda = 0.0;
  double max_abs_about_lambda = 0.0;
};

struct TrajectoryProbe {
  std::vector<ProbeRecord> records;
  FieldState final_state;
};

struct ResponseProbe {
  double time = 0.0;                 // target time
  double bump_time = 0.0;            // perturbation insertion time r
  std::size_t bump_site = 0;         // z
  double amplitude = 0.0;            // eps_b
  std::vector<double> responses;     // (u_pert - u_base)/eps_b at target sites
  bool cancellation_warning = false; // response below 1e-10 of field scale
};

class Solver {
 public:
  Solver(const SpectralTransform& tr, const MollifierSpec& phi, const SolverConfig& cfg,
         const SigmaSpec& sigma);

  const SolverConfig& config() const { return cfg_; }
  const Lattice& lattice() const { return tr_->lattice(); }

  FieldState initial_state(double t0) const;
  // advances by one dt consuming the slice; slice.time_index must match
  void step(FieldState& state, const NoiseSlice& slice) const;

  TrajectoryProbe run(const SeedSpec& seed, const ProbeSpec& probes) const;
  // start from constant data at t = -K, return the state at t = 0
  FieldState run_shifted(double K, const SeedSpec& seed) const;
  std::pair<FieldState, FieldState> run_coupled_pair(double K1, double K2,
                                                     const SeedSpec& seed) const;
  ResponseProbe noise_response_probe(const SeedSpec& seed, double bump_time,
                                     std::size_t bump_site, double amplitude, double target_time,
                                     const std::vector<std::size_t>& target_sites) const;

 private:
  void advance(FieldState& state, const GridField& noise_values) const;
  void check_finite(const FieldState& state) const;

  const SpectralTransform* tr_;
  const MollifierSpec* phi_;
  SolverConfig cfg_;
  SigmaSpec sigma_;
  HeatSemigroupPlan plan_;
};

}  // namespace ewlab

#endif
