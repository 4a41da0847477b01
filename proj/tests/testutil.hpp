#ifndef CHRON_TESTS_TESTUTIL_HPP
#define CHRON_TESTS_TESTUTIL_HPP

// Shared statistical helpers for the test suites. These are independent
// oracles: keep them free of calls into the library under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "chron/calibration.hpp"

namespace testutil {

// Kolmogorov asymptotic survival function Q_KS(lambda).
inline double ks_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
inline double ks_p_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::runtime_error("empty KS sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    const double fa = double(i) / a.size();
    const double fb = double(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  const double ne = double(a.size()) * b.size() / (a.size() + b.size());
  const double sq = std::sqrt(ne);
  return ks_q((sq + 0.12 + 0.11 / sq) * d);
}

// One-sample KS p-value against an exact CDF.
inline double ks_p_one_sample(std::vector<double> a,
                              const std::function<double(double)>& cdf) {
  if (a.empty()) throw std::runtime_error("empty KS sample");
  std::sort(a.begin(), a.end());
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max(d, std::abs(f - double(i) / a.size()));
    d = std::max(d, std::abs(double(i + 1) / a.size() - f));
  }
  const double sq = std::sqrt(double(a.size()));
  return ks_q((sq + 0.12 + 0.11 / sq) * d);
}

// Regularized incomplete gamma P(a, x) by series / continued fraction.
inline double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::runtime_error("gamma_p domain");
  if (x == 0) return 0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {  // series
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-14) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // continued fraction for Q, return 1 - Q
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// Chi-square survival function with k degrees of freedom.
inline double chi2_sf(double x, double k) { return 1.0 - gamma_p(k / 2.0, x / 2.0); }

// Pearson chi-square p-value of observed counts vs expected counts.
inline double chi2_p(const std::vector<double>& observed,
                     const std::vector<double>& expected) {
  if (observed.size() != expected.size())
    throw std::runtime_error("chi2 size mismatch");
  double stat = 0;
  int df = -1;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) continue;
    const double r = observed[i] - expected[i];
    stat += r * r / expected[i];
    ++df;
  }
  if (df < 1) throw std::runtime_error("chi2 needs >= 2 usable bins");
  return chi2_sf(stat, df);
}

// Total variation distance between two discrete distributions given as maps
// from outcome key to probability.
template <typename K>
double tv_distance(const std::map<K, double>& p, const std::map<K, double>& q) {
  double tv = 0;
  for (const auto& [k, v] : p) {
    const auto it = q.find(k);
    tv += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (p.find(k) == p.end()) tv += v;
  return 0.5 * tv;
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

inline double correlation(const std::vector<double>& a,
                          const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Identity calibration curve mu(theta) = theta on [lo, hi] with constant
// error, already on the unit grid.
inline chron::CalibrationCurve identity_curve(long lo, long hi, double err) {
  std::vector<chron::CurveEntry> entries;
  for (long a = lo; a <= hi; ++a)
    entries.push_back({double(a), double(a), err});
  return chron::CalibrationCurve(std::move(entries),
                                 chron::Material::terrestrial);
}

}  // namespace testutil

#endif
