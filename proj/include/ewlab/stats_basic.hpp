#ifndef EWLAB_STATS_BASIC_HPP
#define EWLAB_STATS_BASIC_HPP

#include <span>
#include <utility>
#include <vector>

#include "ewlab/lattice.hpp"

namespace ewlab {

// least-squares slope of log(value) vs log(scale)
struct DecayFit {
  double exponent = 0.0;
  double exponent_se = 0.0;
  double intercept = 0.0;
  double scale_lo = 0.0, scale_hi = 0.0;
  int points = 0;
};

DecayFit fit_power_law(std::span<const std::pair<double, double>> points);

struct KsResult {
  double stat = 0.0;
  double crit_1pct = 0.0;  // asymptotic critical value at the 1% level
  std::size_t n_a = 0, n_b = 0;
};

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
// one-sample test against the standard normal CDF
KsResult ks_vs_standard_normal(std::span<const double> a);

double standard_normal_cdf(double x);
// inverse of the standard normal CDF (Acklam's rational approximation,
// relative error below 1.2e-9; adequate for sampling and quantiles here)
double standard_normal_inv_cdf(double p);
// upper quantile of the chi-square distribution with k dof at level q
double chi_square_quantile(int k, double q);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};
MeanSe mean_with_se(std::span<const double> xs);

// sample variance with a moment-based (distribution-free) standard error
struct VarianceSe {
  double var = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};
VarianceSe variance_with_se(std::span<const double> xs);

// leave-one-out jackknife SE of the mean of xs
double jackknife_se(std::span<const double> xs);

}  // namespace ewlab

#endif
