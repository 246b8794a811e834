#include "ewlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ewlab {

using std::numbers::pi;

KsResult ks_distance(const MarginalSample& a, const MarginalSample& b) {
  if (a.values.size() < 50 || b.values.size() < 50)
    throw std::invalid_argument("ks_distance: need at least 50 replicas per sample");
  return ks_two_sample(a.values, b.values);
}

ExperimentReport stationarity_diagnostic(const std::vector<MarginalSample>& marginals,
                                         double lambda_ref, double* t_stat_out) {
  if (marginals.size() < 2) throw std::invalid_argument("stationarity_diagnostic: need >= 2 times");
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    if (marginals[i].values.size() < 500)
      throw std::invalid_argument("stationarity_diagnostic: need >= 500 replicas");
    if (i > 0 && !(marginals[i].t > marginals[i - 1].t))
      throw std::invalid_argument("stationarity_diagnostic: times must increase");
  }

  ExperimentReport rep;
  rep.name = "stationarity";
  rep.params = {{"times", marginals.size()}, {"replicas", marginals[0].values.size()}};

  // consecutive pairs on disjoint replica halves so the two-sample null holds
  std::vector<bool> pair_ok(marginals.size() - 1, false);
  for (std::size_t i = 0; i + 1 < marginals.size(); ++i) {
    std::vector<double> lo, hi;
    for (std::size_t r = 0; r < marginals[i].values.size(); r += 2) lo.push_back(marginals[i].values[r]);
    for (std::size_t r = 1; r < marginals[i + 1].values.size(); r += 2) hi.push_back(marginals[i + 1].values[r]);
    // degenerate marginals (beta = 0) have zero distance by convention
    double stat, crit;
    bool degen_lo = std::adjacent_find(lo.begin(), lo.end(), std::not_equal_to<>()) == lo.end();
    bool degen_hi = std::adjacent_find(hi.begin(), hi.end(), std::not_equal_to<>()) == hi.end();
    if (degen_lo && degen_hi && lo.front() == hi.front()) {
      stat = 0.0;
      double ne = static_cast<double>(lo.size()) * static_cast<double>(hi.size()) /
                  static_cast<double>(lo.size() + hi.size());
      crit = std::sqrt(-std::log(0.005) / 2.0) / std::sqrt(ne);
    } else {
      KsResult ks = ks_two_sample(lo, hi);
      stat = ks.stat;
      crit = ks.crit_1pct;
    }
    pair_ok[i] = stat <= crit;
    SampleRow row;
    row.quantity = "ks_consecutive";
    row.t = marginals[i].t;
    row.x[0] = marginals[i + 1].t;
    row.value = stat;
    row.reference = crit;
    row.ratio = crit > 0.0 ? stat / crit : 0.0;
    rep.rows.push_back(row);
  }

  // means stay at lambda within 3 SE at every time
  double worst_mean_z = 0.0;
  for (const auto& m : marginals) {
    bool degen = std::adjacent_find(m.values.begin(), m.values.end(), std::not_equal_to<>()) == m.values.end();
    double z = 0.0;
    if (!degen) {
      MeanSe ms = mean_with_se(m.values);
      z = (ms.mean - lambda_ref) / ms.se;
    } else if (m.values.front() != lambda_ref) {
      z = std::numeric_limits<double>::infinity();
    }
    worst_mean_z = std::max(worst_mean_z, std::abs(z));
    SampleRow row;
    row.quantity = "marginal_mean";
    row.t = m.t;
    row.value = degen ? m.values.front() : mean_with_se(m.values).mean;
    row.reference = lambda_ref;
    row.ratio = z;
    rep.rows.push_back(row);
  }
  rep.check_le("marginal_mean_worst_z", worst_mean_z, 3.0).note = "ensemble mean vs lambda over all times";

  // T_stat: earliest time from which all later consecutive pairs pass
  double t_stat = marginals.back().t;
  bool stabilized = !pair_ok.empty() && pair_ok.back();
  for (std::size_t i = pair_ok.size(); i-- > 0;) {
    if (!pair_ok[i]) break;
    t_stat = marginals[i].t;
  }
  // beta = 0 style instant stabilization: every pair degenerate-equal
  if (stabilized && std::all_of(pair_ok.begin(), pair_ok.end(), [](bool b) { return b; })) {
    bool all_degenerate = true;
    for (const auto& m : marginals)
      if (std::adjacent_find(m.values.begin(), m.values.end(), std::not_equal_to<>()) != m.values.end())
        all_degenerate = false;
    if (all_degenerate) t_stat = 0.0;
  }
  rep.check_ge("stabilized", stabilized ? 1.0 : 0.0, 1.0).note =
      "last consecutive KS below its 1% critical value";
  rep.params["t_stat"] = t_stat;
  if (t_stat_out) *t_stat_out = t_stat;
  return rep;
}

NuSigmaEstimate nu_sigma_estimate(const std::function<const GridField&(std::size_t)>& snapshot_at,
                                  std::size_t n_snapshots, const SigmaSpec& sigma,
                                  const CovarianceKernel& R, const SpectralTransform& tr,
                                  double snapshot_time, double t_stat) {
  if (n_snapshots < 2) throw std::invalid_argument("nu_sigma_estimate: need >= 2 snapshots");
  const Lattice& lat = tr.lattice();
  const std::size_t N = lat.cells();

  // lags carrying R support
  std::vector<std::size_t> lag_cells;
  double thresh = 1e-14 * std::abs(R.at_zero());
  for (std::size_t i = 0; i < N; ++i)
    if (std::abs(R.values[i]) > thresh) lag_cells.push_back(i);

  std::vector<double> v_spatial(n_snapshots);   // h^d sum_x Chat_sigma(x) R(x), spatial average
  std::vector<double> v_ensemble(n_snapshots);  // same contraction from site-0 products
  std::vector<double> accum_spec;               // accumulated |sigma(u)_hat|^2 for the profile
  std::vector<std::complex<double>> spec;
  GridField w(lat);
  const double inv_nh = 1.0 / (static_cast<double>(N) * lat.cell_volume());
  for (std::size_t s = 0; s < n_snapshots; ++s) {
    const GridField& u = snapshot_at(s);
    for (std::size_t i = 0; i < N; ++i) w[i] = sigma(u[i]);
    tr.forward(w.v, spec);
    if (accum_spec.empty()) accum_spec.assign(spec.size(), 0.0);
    CompensatedSum acc;
    for (std::size_t m = 0; m < spec.size(); ++m) {
      double p = std::norm(spec[m]);
      accum_spec[m] += p;
      acc.add(tr.multiplicity(m) * p * R.fourier[m]);
    }
    double vol = 1.0;
    for (int i = 0; i < lat.d; ++i) vol *= lat.period();
    // h^d sum_x A_w(x) R(x) with A_w the normalized circular autocorrelation
    v_spatial[s] = acc.value() / vol * inv_nh;

    double w0 = w[0];
    CompensatedSum ens;
    for (std::size_t cell : lag_cells) ens.add(w0 * w[cell] * R.values[cell]);
    v_ensemble[s] = ens.value() * lat.cell_volume();
  }

  NuSigmaEstimate est;
  est.replicas = n_snapshots;
  MeanSe ms = mean_with_se(v_spatial);
  est.nu2 = ms.mean;
  est.se = jackknife_se(v_spatial);
  MeanSe me = mean_with_se(v_ensemble);
  est.nu2_ensemble = me.mean;
  est.se_ensemble = jackknife_se(v_ensemble);
  double dz_den = std::sqrt(est.se * est.se + est.se_ensemble * est.se_ensemble);
  est.disagreement_z = dz_den > 0.0 ? (est.nu2 - est.nu2_ensemble) / dz_den : 0.0;
  est.below_t_stat_warning = snapshot_time < t_stat;
  est.lag_cells = lag_cells;

  // averaged two-point sigma profile on the support cells
  std::vector<std::complex<double>> avg_spec(accum_spec.size());
  for (std::size_t m = 0; m < avg_spec.size(); ++m)
    avg_spec[m] = accum_spec[m] / static_cast<double>(n_snapshots);
  std::vector<double> prof;
  tr.inverse(avg_spec, prof);
  est.lag_profile.reserve(lag_cells.size());
  for (std::size_t cell : lag_cells) est.lag_profile.push_back(prof[cell] * inv_nh);
  return est;
}

double sigma_g_closed_form(double nu2, double beta, double t, const TestFunctionG& g) {
  if (g.d != 3) throw std::invalid_argument("sigma_g_closed_form: d = 3 only");
  double s = g.width;
  double q = (1.0 / (8.0 * std::pow(pi, 1.5))) * (1.0 / s - 1.0 / std::sqrt(s * s + 2.0 * t));
  return beta * beta * nu2 * q;
}

// mode sum of |g_hat|^2 (1-e^{-2t xi^2})/(2 xi^2) over the dual grid of an
// (n, h) box, zero mode by its analytic limit
static double sigma_g_mode_sum(double t, const TestFunctionG& g, int n, double h) {
  const double L = n * h;
  const double dxi = 2.0 * pi / L;
  const int half = n / 2;
  double vol = std::pow(L, g.d);
  CompensatedSum acc;
  std::vector<double> xi2_axis(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    int s = j <= half - 1 ? j : j - n;
    xi2_axis[static_cast<std::size_t>(j)] = dxi * dxi * s * s;
  }
  auto term = [&](double xi2) {
    if (xi2 == 0.0) return t;  // analytic limit of (1-e^{-2t xi^2})/(2 xi^2)
    return g.fourier_xi2(xi2) * g.fourier_xi2(xi2) * (1.0 - std::exp(-2.0 * t * xi2)) / (2.0 * xi2);
  };
  if (g.d == 3) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double ab = xi2_axis[static_cast<std::size_t>(a)] + xi2_axis[static_cast<std::size_t>(b)];
        for (int c = 0; c < n; ++c) acc.add(term(ab + xi2_axis[static_cast<std::size_t>(c)]));
      }
  } else {
    throw std::invalid_argument("sigma_g: quadrature implemented for d = 3");
  }
  return acc.value() / vol;
}

// independent route: s-quadrature of h^d sum_x (g*g~)(x) p(2(t-s), x)
static double sigma_g_real_space(double t, const TestFunctionG& g, int n, double h) {
  const double L = n * h;
  // (g * g~) for the Gaussian bump is the width-sqrt(2) sigma Gaussian
  const double s2 = 2.0 * g.width * g.width;
  // one axis of the correlation and of the periodized heat kernel
  std::vector<double> gax(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    int s = j <= n / 2 - 1 ? j : j - n;
    double x = h * s;
    gax[static_cast<std::size_t>(j)] = std::exp(-0.5 * x * x / s2) / std::sqrt(2.0 * pi * s2);
  }
  // 16-node Gauss-Legendre on [0, t]
  static const double gl_x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
  static const double gl_w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
  CompensatedSum total;
  for (int node = 0; node < 16; ++node) {
    double xi = node < 8 ? -gl_x[node] : gl_x[node - 8];
    double wgt = gl_w[node % 8] * 0.5 * t;
    double s = 0.5 * t * (1.0 + xi);
    double tau = 2.0 * (t - s);
    // per-axis contraction sum_j g1(x_j) p1per(tau, x_j) h; d identical axes
    double axis;
    if (tau == 0.0) {
      axis = 0.0;
      for (int j = 0; j < n; ++j) axis += gax[static_cast<std::size_t>(j)] * gax[static_cast<std::size_t>(j)];
    }
    std::vector<double> pax(static_cast<std::size_t>(n));
    int K = static_cast<int>(std::ceil((std::sqrt(2.0 * tau * 80.0) + 0.5 * L) / L)) + 1;
    double norm = 1.0 / std::sqrt(4.0 * pi * 0.5 * tau * 2.0);
    CompensatedSum ax;
    for (int j = 0; j < n; ++j) {
      int sj = j <= n / 2 - 1 ? j : j - n;
      double x = h * sj;
      double val = 0.0;
      for (int k = -K; k <= K; ++k) {
        double y = x + k * L;
        val += norm * std::exp(-y * y / (4.0 * 0.5 * tau * 2.0));
      }
      ax.add(val * gax[static_cast<std::size_t>(j)] * h);
    }
    axis = ax.value();
    total.add(wgt * axis * axis * axis);
  }
  return total.value();
}

SigmaGValue sigma_g(double nu2, double beta, double t, const TestFunctionG& g) {
  if (!(t > 0.0)) throw std::invalid_argument("sigma_g: t must be positive");
  if (nu2 < 0.0) throw std::invalid_argument("sigma_g: nu^2 must be nonnegative");
  SigmaGValue out;
  out.nu2 = nu2;
  out.beta = beta;
  out.t = t;
  if (beta == 0.0) return out;

  // size the quadrature box to the correlation support plus heat spread
  double h = g.width / 6.0;
  double L_need = 2.0 * (2.0 * g.radius() + 7.0 * std::sqrt(2.0 * t)) + 2.0;
  int n = 16;
  while (n * h < L_need && n < 1024) n *= 2;
  if (n * h < L_need) throw std::runtime_error("sigma_g: macroscopic lattice cannot cover the support");
  if (g.fourier_xi2(std::pow(pi / h, 2)) > 1e-12)
    throw std::runtime_error("sigma_g: macroscopic lattice under-resolves g_hat");
  out.lattice_n = n;
  out.lattice_h = h;

  double v1 = sigma_g_mode_sum(t, g, n, h);
  double v2 = sigma_g_mode_sum(t, g, 2 * n, 0.5 * h);  // finer and wider in xi
  double vr = sigma_g_real_space(t, g, n, h);
  double scale = beta * beta * nu2;
  out.value = scale * v2;
  out.quadrature_error = scale * std::abs(v2 - v1);
  out.real_space_value = scale * vr;
  return out;
}

GridField fluctuation_weights(const Lattice& lat, double eps, const TestFunctionG& g,
                              double macro_time) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("fluctuation_weights: eps must be in (0,1]");
  if (g.d != lat.d) throw std::invalid_argument("fluctuation_weights: dimension mismatch");
  double needed = 2.0 * g.radius() / eps + 8.0 * std::sqrt(macro_time);
  if (lat.period() < needed)
    throw std::invalid_argument("fluctuation_weights: period " + std::to_string(lat.period()) +
                                " below support + diffusion margin " + std::to_string(needed));
  GridField w(lat);
  for (std::size_t i = 0; i < lat.cells(); ++i) w[i] = g.value_r2(eps * eps * lat.dist2(i));
  return w;
}

double fluctuation_statistic(const FieldState& field, double eps, const TestFunctionG& g,
                             const GridField& weights, double lambda_ref, double macro_time,
                             double dt) {
  const Lattice& lat = field.u.lat;
  double micro_time = macro_time / (eps * eps);
  if (std::abs(field.time - micro_time) > 0.5 * dt)
    throw std::invalid_argument("fluctuation_statistic: field time " + std::to_string(field.time) +
                                " does not match t/eps^2 = " + std::to_string(micro_time));
  CompensatedSum acc;
  for (std::size_t i = 0; i < lat.cells(); ++i)
    acc.add((field.u[i] - lambda_ref) * weights[i]);
  return std::pow(eps, 1.0 + 0.5 * lat.d) * lat.cell_volume() * acc.value();
}

ExperimentReport ew_limit_experiment(const std::vector<std::pair<double, std::vector<double>>>& x_by_eps,
                                     const std::vector<SigmaGValue>& sigma_by_eps, double beta,
                                     std::vector<EwEpsilonRow>* rows_out) {
  if (x_by_eps.size() != sigma_by_eps.size() || x_by_eps.empty())
    throw std::invalid_argument("ew_limit_experiment: inputs misaligned");
  ExperimentReport rep;
  rep.name = "ew_limit";
  rep.params = {{"beta", beta}, {"eps_count", x_by_eps.size()}};

  std::vector<EwEpsilonRow> rows;
  for (std::size_t i = 0; i < x_by_eps.size(); ++i) {
    const auto& [eps, xs] = x_by_eps[i];
    EwEpsilonRow row;
    row.eps = eps;
    row.n_replicas = xs.size();
    if (beta == 0.0) {
      bool all_zero = std::all_of(xs.begin(), xs.end(), [](double x) { return x == 0.0; });
      rep.check_ge("ew_trivial_pass_eps_" + format_double(eps), all_zero ? 1.0 : 0.0, 1.0).note =
          "beta = 0: every X_eps vanishes exactly";
      rows.push_back(row);
      continue;
    }
    VarianceSe vs = variance_with_se(xs);
    row.var_x = vs.var;
    row.se_var = vs.se;
    row.sigma_g = sigma_by_eps[i].value;
    row.sigma_g_err = sigma_by_eps[i].quadrature_error;
    row.ratio = vs.var / row.sigma_g;
    row.ratio_se = row.ratio * std::sqrt(std::pow(vs.se / vs.var, 2) +
                                         std::pow(row.sigma_g_err / row.sigma_g, 2));
    std::vector<double> standardized(xs.size());
    double sd = std::sqrt(row.sigma_g);
    for (std::size_t k = 0; k < xs.size(); ++k) standardized[k] = xs[k] / sd;
    KsResult ks = ks_vs_standard_normal(standardized);
    row.ks_stat = ks.stat;
    row.ks_crit_1pct = ks.crit_1pct;
    rows.push_back(row);

    SampleRow sr;
    sr.quantity = "var_ratio";
    sr.t = eps;
    sr.value = vs.var;
    sr.reference = row.sigma_g;
    sr.ratio = row.ratio;
    rep.rows.push_back(sr);

    rep.check_abs("ew_ratio_eps_" + format_double(eps), row.ratio, 1.0, 3.0 * row.ratio_se, 3.0,
                  row.ratio_se);
    rep.check_le("ew_normality_ks_eps_" + format_double(eps), row.ks_stat, row.ks_crit_1pct);
  }
  if (rows_out) *rows_out = rows;
  return rep;
}

double coupled_pair_sq_difference(const FieldState& a, const FieldState& b,
                                  std::span<const std::size_t> sites) {
  if (sites.empty()) throw std::invalid_argument("coupled_pair_sq_difference: no sites");
  CompensatedSum acc;
  for (std::size_t s : sites) {
    double d = a.u[s] - b.u[s];
    acc.add(d * d);
  }
  return acc.value() / static_cast<double>(sites.size());
}

MeanSe gamma_estimate(std::span<const double> pair_values) {
  if (pair_values.size() < 100) throw std::invalid_argument("gamma_estimate: need >= 100 replica pairs");
  return mean_with_se(pair_values);
}

ExperimentReport structure_function(const std::function<const GridField&(std::size_t)>& snapshot_at,
                                    std::size_t n_snapshots, int order_2n,
                                    const std::vector<int>& offsets_cells, double beta,
                                    const Lattice& lat, double support_radius) {
  if (n_snapshots < 100) throw std::invalid_argument("structure_function: need >= 100 snapshots");
  if (order_2n < 2 || order_2n % 2 != 0) throw std::invalid_argument("structure_function: order must be even and >= 2");
  for (int c : offsets_cells)
    if (c < 1 || lat.h * c >= support_radius)
      throw std::invalid_argument("structure_function: offsets must lie in [h, 2 r0)");

  ExperimentReport rep;
  rep.name = "structure_function";
  rep.params = {{"order", order_2n}, {"snapshots", n_snapshots}, {"offsets", offsets_cells.size()}};

  const std::size_t N = lat.cells();
  const int n = lat.n;
  std::vector<std::vector<double>> per_snap(offsets_cells.size(), std::vector<double>(n_snapshots));
  for (std::size_t s = 0; s < n_snapshots; ++s) {
    const GridField& u = snapshot_at(s);
    for (std::size_t oi = 0; oi < offsets_cells.size(); ++oi) {
      int off = offsets_cells[oi];
      CompensatedSum acc;
      // averaged over all sites and the d axes
      std::size_t stride = 1;
      for (int ax = lat.d - 1; ax >= 0; --ax) {
        const std::size_t block = stride * static_cast<std::size_t>(n);
        for (std::size_t base = 0; base < N; base += block)
          for (int j = 0; j < n; ++j) {
            const std::size_t row = base + static_cast<std::size_t>(j) * stride;
            const std::size_t fwd = base + static_cast<std::size_t>((j + off) % n) * stride;
            for (std::size_t k = 0; k < stride; ++k) {
              double d = u[fwd + k] - u[row + k];
              double p = d * d;
              for (int q = 2; q < order_2n; q += 2) p *= d * d;
              acc.add(p);
            }
          }
        stride = block;
      }
      per_snap[oi][s] = acc.value() / (static_cast<double>(N) * lat.d);
    }
  }

  bool trivial = beta == 0.0;
  std::vector<std::pair<double, double>> pts;
  std::vector<double> means(offsets_cells.size()), ses(offsets_cells.size());
  for (std::size_t oi = 0; oi < offsets_cells.size(); ++oi) {
    MeanSe m = mean_with_se(per_snap[oi]);
    means[oi] = m.mean;
    ses[oi] = m.se;
    SampleRow row;
    row.quantity = "structure_function";
    row.x[0] = lat.h * offsets_cells[oi];
    row.value = m.mean;
    row.reference = m.se;
    row.ratio = m.se > 0.0 ? m.mean / m.se : 0.0;
    rep.rows.push_back(row);
    if (m.mean > 0.0) pts.emplace_back(lat.h * offsets_cells[oi], m.mean);
  }

  if (trivial) {
    double total = 0.0;
    for (const auto& v : means) total += std::abs(v);
    rep.check_le("structure_trivial_zero", total, 0.0).note = "beta = 0: increments vanish";
    return rep;
  }

  const double delta = 0.9;
  double required = 2.0 * delta * (order_2n / 2) * 0.75;
  DecayFit fit = fit_power_law(pts);
  auto& c = rep.check_ge("structure_small_r_slope", fit.exponent, required);
  c.se = fit.exponent_se;
  c.note = "fit over [" + format_double(fit.scale_lo) + ", " + format_double(fit.scale_hi) + "]";

  bool monotone = true;
  for (std::size_t oi = 1; oi < means.size(); ++oi) {
    double se = 2.0 * std::sqrt(ses[oi] * ses[oi] + ses[oi - 1] * ses[oi - 1]);
    if (means[oi] < means[oi - 1] - se) monotone = false;
  }
  rep.check_ge("structure_monotone_2se", monotone ? 1.0 : 0.0, 1.0);
  return rep;
}

}  // namespace ewlab
