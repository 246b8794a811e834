#ifndef EWLAB_STATS_HPP
#define EWLAB_STATS_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "ewlab/kernels.hpp"
#include "ewlab/lattice.hpp"
#include "ewlab/report.hpp"
#include "ewlab/sigma.hpp"
#include "ewlab/solver.hpp"
#include "ewlab/stats_basic.hpp"

namespace ewlab {

// unit-mass Gaussian bump of width sigma_g, truncated where it falls
// below `truncation` of its peak
struct TestFunctionG {
  int d = 3;
  double width = 0.2;
  double truncation = 1e-12;

  double radius() const { return width * std::sqrt(-2.0 * std::log(truncation)); }
  double value_r2(double r2) const {
    double peak_scaled = std::exp(-0.5 * r2 / (width * width));
    if (peak_scaled < truncation) return 0.0;
    return std::pow(2.0 * std::numbers::pi * width * width, -0.5 * d) * peak_scaled;
  }
  double fourier_xi2(double xi2) const { return std::exp(-0.5 * width * width * xi2); }
};

struct MarginalSample {
  double t = 0.0;
  std::size_t site = 0;
  std::vector<double> values;
};

// two-sample Kolmogorov-Smirnov distance plus its 1% critical value
KsResult ks_distance(const MarginalSample& a, const MarginalSample& b);

// Consecutive-time KS diagnostic on disjoint replica halves; T_stat is the
// earliest time from which every following pair sits under its 1% critical
// value. Returns T_stat through t_stat_out (last time when never stable).
ExperimentReport stationarity_diagnostic(const std::vector<MarginalSample>& marginals,
                                         double lambda_ref, double* t_stat_out);

struct NuSigmaEstimate {
  double nu2 = 0.0;            // spatially averaged estimator (variance reduced)
  double se = 0.0;
  double nu2_ensemble = 0.0;   // single-site ensemble estimator (authoritative)
  double se_ensemble = 0.0;
  double disagreement_z = 0.0;
  std::size_t replicas = 0;
  bool below_t_stat_warning = false;
  std::vector<double> lag_profile;          // C_sigma on the R-support cells
  std::vector<std::size_t> lag_cells;
};

NuSigmaEstimate nu_sigma_estimate(const std::function<const GridField&(std::size_t)>& snapshot_at,
                                  std::size_t n_snapshots, const SigmaSpec& sigma,
                                  const CovarianceKernel& R, const SpectralTransform& tr,
                                  double snapshot_time = 0.0, double t_stat = 0.0);

struct SigmaGValue {
  double value = 0.0;
  double quadrature_error = 0.0;
  double real_space_value = 0.0;  // independent s-quadrature of the same integral
  double nu2 = 0.0, beta = 0.0, t = 0.0;
  int lattice_n = 0;
  double lattice_h = 0.0;
};

// Sigma_g = beta^2 nu^2 (2pi)^{-d} int |g_hat|^2 (1 - e^{-2t|xi|^2})/(2|xi|^2) dxi,
// mode sum on an internally sized macroscopic lattice with refinement and a
// real-space s-quadrature cross-check
SigmaGValue sigma_g(double nu2, double beta, double t, const TestFunctionG& g);
// closed form for the Gaussian bump (test oracle and plotting aid)
double sigma_g_closed_form(double nu2, double beta, double t, const TestFunctionG& g);

// weights g(eps y) on the microscopic lattice; throws when the support
// plus diffusion margin does not fit the box
GridField fluctuation_weights(const Lattice& lat, double eps, const TestFunctionG& g,
                              double macro_time);
// X_eps = eps^{1+d/2} h^d sum_y (u - lambda) g(eps y)
double fluctuation_statistic(const FieldState& field, double eps, const TestFunctionG& g,
                             const GridField& weights, double lambda_ref, double macro_time,
                             double dt);

struct EwEpsilonRow {
  double eps = 0.0;
  std::size_t n_replicas = 0;
  double var_x = 0.0, se_var = 0.0;
  double sigma_g = 0.0, sigma_g_err = 0.0;
  double ratio = 0.0, ratio_se = 0.0;
  double ks_stat = 0.0, ks_crit_1pct = 0.0;
};

ExperimentReport ew_limit_experiment(const std::vector<std::pair<double, std::vector<double>>>& x_by_eps,
                                     const std::vector<SigmaGValue>& sigma_by_eps, double beta,
                                     std::vector<EwEpsilonRow>* rows_out = nullptr);

// mean squared coupled difference over sites, one value per replica pair
double coupled_pair_sq_difference(const FieldState& a, const FieldState& b,
                                  std::span<const std::size_t> sites);
MeanSe gamma_estimate(std::span<const double> pair_values);

ExperimentReport structure_function(const std::function<const GridField&(std::size_t)>& snapshot_at,
                                    std::size_t n_snapshots, int order_2n,
                                    const std::vector<int>& offsets_cells, double beta,
                                    const Lattice& lat, double support_radius);

}  // namespace ewlab

#endif
