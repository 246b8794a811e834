#include "ewlab/stats_basic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ewlab {

DecayFit fit_power_law(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
  std::vector<double> lx, ly;
  lx.reserve(points.size());
  ly.reserve(points.size());
  double prev = 0.0;
  for (const auto& [s, v] : points) {
    if (!(s > 0.0)) throw std::invalid_argument("fit_power_law: scales must be positive");
    if (!(s > prev)) throw std::invalid_argument("fit_power_law: scales must be strictly increasing");
    if (!(v > 0.0)) throw std::invalid_argument("fit_power_law: values must be positive");
    prev = s;
    lx.push_back(std::log(s));
    ly.push_back(std::log(v));
  }
  const std::size_t n = lx.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  DecayFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.points = static_cast<int>(n);
  fit.scale_lo = points.front().first;
  fit.scale_hi = points.back().first;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
    rss += r * r;
  }
  fit.exponent_se = n > 2 ? std::sqrt(rss / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
  return fit;
}

// c(alpha) sqrt((n+m)/(nm)) with c(0.01) = sqrt(-ln(0.005)/2)
static double ks_critical_1pct(double n_eff) { return std::sqrt(-std::log(0.005) / 2.0) / std::sqrt(n_eff); }

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  std::size_t ia = 0, ib = 0;
  double diff = 0.0, dmax = 0.0;
  while (ia < sa.size() && ib < sb.size()) {
    double xa = sa[ia], xb = sb[ib];
    if (xa <= xb) {
      diff -= 1.0 / na;
      ++ia;
    }
    if (xb <= xa) {
      diff += 1.0 / nb;
      ++ib;
    }
    dmax = std::max(dmax, std::abs(diff));
  }
  KsResult r;
  r.stat = dmax;
  r.n_a = sa.size();
  r.n_b = sb.size();
  r.crit_1pct = ks_critical_1pct(na * nb / (na + nb));
  return r;
}

KsResult ks_vs_standard_normal(std::span<const double> a) {
  if (a.empty()) throw std::invalid_argument("ks_vs_standard_normal: empty sample");
  std::vector<double> s(a.begin(), a.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double F = standard_normal_cdf(s[i]);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    dmax = std::max({dmax, std::abs(F - lo), std::abs(F - hi)});
  }
  KsResult r;
  r.stat = dmax;
  r.n_a = s.size();
  r.n_b = 0;
  r.crit_1pct = ks_critical_1pct(n);
  return r;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double standard_normal_inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("standard_normal_inv_cdf: p outside (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01, -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - plow) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Wilson-Hilferty approximation refined by bisection on the regularized
// gamma tail computed from the series/continued fraction.
static double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  double b0 = x + 1.0 - a, c0 = 1e300, d0 = 1.0 / b0, h = d0;
  for (int i = 1; i < 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b0 += 2.0;
    d0 = an * d0 + b0;
    if (std::abs(d0) < 1e-300) d0 = 1e-300;
    c0 = b0 + an / c0;
    if (std::abs(c0) < 1e-300) c0 = 1e-300;
    d0 = 1.0 / d0;
    double del = d0 * c0;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double chi_square_quantile(int k, double q) {
  if (k <= 0 || !(q > 0.0 && q < 1.0)) throw std::invalid_argument("chi_square_quantile: bad arguments");
  double lo = 0.0, hi = static_cast<double>(k) + 20.0 * std::sqrt(2.0 * k) + 20.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (gamma_p(0.5 * k, 0.5 * mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

MeanSe mean_with_se(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("mean_with_se: need at least 2 values");
  CompensatedSum s;
  for (double x : xs) s.add(x);
  double n = static_cast<double>(xs.size());
  double m = s.value() / n;
  CompensatedSum s2;
  for (double x : xs) s2.add((x - m) * (x - m));
  MeanSe r;
  r.mean = m;
  r.se = std::sqrt(s2.value() / (n - 1.0) / n);
  r.count = xs.size();
  return r;
}

VarianceSe variance_with_se(std::span<const double> xs) {
  if (xs.size() < 4) throw std::invalid_argument("variance_with_se: need at least 4 values");
  double n = static_cast<double>(xs.size());
  CompensatedSum s;
  for (double x : xs) s.add(x);
  double m = s.value() / n;
  CompensatedSum s2, s4;
  for (double x : xs) {
    double d2 = (x - m) * (x - m);
    s2.add(d2);
    s4.add(d2 * d2);
  }
  VarianceSe r;
  r.var = s2.value() / (n - 1.0);
  double m4 = s4.value() / n;
  // Var[s^2] = (m4 - sigma^4 (n-3)/(n-1)) / n
  double v = (m4 - r.var * r.var * (n - 3.0) / (n - 1.0)) / n;
  r.se = std::sqrt(std::max(v, 0.0));
  r.count = xs.size();
  return r;
}

double jackknife_se(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("jackknife_se: need at least 2 values");
  CompensatedSum tot;
  for (double x : xs) tot.add(x);
  double sum = tot.value();
  double nn = static_cast<double>(n);
  double mean = sum / nn;
  CompensatedSum dev;
  for (double x : xs) {
    double loo = (sum - x) / (nn - 1.0);
    dev.add((loo - mean) * (loo - mean));
  }
  return std::sqrt((nn - 1.0) / nn * dev.value());
}

}  // namespace ewlab
