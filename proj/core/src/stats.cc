//
// Copyright 2026 The trajaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "trajaudit/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "trajaudit/error.h"

namespace trajaudit {
namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

// Sample mean and (n - 1)-denominator standard deviation.
Moments moments(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  Moments m;
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.stddev = std::sqrt(ss / (n - 1.0));
  return m;
}

bool all_equal(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(),
                            std::not_equal_to<>()) == values.end();
}

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta: continued fraction did not converge");
}

}  // namespace

std::string to_string(DistanceMetric metric) {
  switch (metric) {
    case DistanceMetric::kL1: return "l1";
    case DistanceMetric::kL2: return "l2";
    case DistanceMetric::kCosine: return "cosine";
    case DistanceMetric::kWasserstein: return "wasserstein";
  }
  return "?";
}

DistanceMetric parse_distance_metric(const std::string& text) {
  if (text == "l1") return DistanceMetric::kL1;
  if (text == "l2") return DistanceMetric::kL2;
  if (text == "cosine") return DistanceMetric::kCosine;
  if (text == "wasserstein") return DistanceMetric::kWasserstein;
  throw InvalidArgument("unknown distance metric '" + text +
                        "' (expected l1, l2, cosine or wasserstein)");
}

double distance(DistanceMetric metric, std::span<const double> u,
                std::span<const double> v) {
  if (u.size() != v.size()) {
    throw InvalidArgument("distance: length mismatch (" + std::to_string(u.size()) +
                          " vs " + std::to_string(v.size()) + ")");
  }
  if (u.empty()) throw InvalidArgument("distance: empty sequences");
  const std::size_t n = u.size();
  switch (metric) {
    case DistanceMetric::kL1: {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += std::abs(u[i] - v[i]);
      return sum;
    }
    case DistanceMetric::kL2: {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += (u[i] - v[i]) * (u[i] - v[i]);
      return std::sqrt(sum);
    }
    case DistanceMetric::kCosine: {
      double dot = 0.0, uu = 0.0, vv = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
      }
      if (uu == 0.0 || vv == 0.0) {
        throw InvalidArgument("distance: cosine distance undefined for a zero vector");
      }
      if (std::equal(u.begin(), u.end(), v.begin())) return 0.0;
      return std::max(0.0, 1.0 - dot / (std::sqrt(uu) * std::sqrt(vv)));
    }
    case DistanceMetric::kWasserstein: {
      std::vector<double> su(u.begin(), u.end());
      std::vector<double> sv(v.begin(), v.end());
      std::sort(su.begin(), su.end());
      std::sort(sv.begin(), sv.end());
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += std::abs(su[i] - sv[i]);
      return sum / static_cast<double>(n);
    }
  }
  throw InvalidArgument("distance: unknown metric");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("incomplete beta: a, b must be > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fast for x < (a + 1)/(a + b + 2).
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_upper_tail(double t, double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("student t: nu must be > 0");
  if (std::isnan(t)) throw InvalidArgument("student t: t is NaN");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double x = nu / (nu + t * t);
  const double half_tail = 0.5 * regularized_incomplete_beta(0.5 * nu, 0.5, x);
  return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

double student_t_cdf(double t, double nu) { return 1.0 - student_t_upper_tail(t, nu); }

double t_upper_critical(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("t_upper_critical: p must lie in (0, 1)");
  if (!(nu >= 1.0)) throw InvalidArgument("t_upper_critical: nu must be >= 1");
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -t_upper_critical(1.0 - p, nu);
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_upper_tail(hi, nu) > p) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw Error("t_upper_critical: bracket overflow");
  }
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (student_t_upper_tail(mid, nu) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double anderson_darling_critical_value(double level) {
  struct Entry {
    double level;
    double value;
  };
  static constexpr Entry kTable[] = {
      {0.15, 0.576}, {0.10, 0.656}, {0.05, 0.787}, {0.025, 0.918}, {0.01, 1.092}};
  for (const Entry& e : kTable) {
    if (std::abs(e.level - level) < 1e-12) return e.value;
  }
  throw InvalidArgument("anderson-darling: unsupported level " + std::to_string(level) +
                        " (supported: 0.15, 0.10, 0.05, 0.025, 0.01)");
}

AndersonDarlingResult anderson_darling_normal(std::span<const double> samples,
                                              double level) {
  const std::size_t n = samples.size();
  if (n < 5) throw InvalidArgument("anderson-darling: need at least 5 samples");
  const Moments m = moments(samples);
  if (!(m.stddev > 0.0)) throw InvalidArgument("anderson-darling: zero variance sample");

  std::vector<double> y(samples.begin(), samples.end());
  std::sort(y.begin(), y.end());
  for (double& v : y) v = (v - m.mean) / m.stddev;

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = 2.0 * static_cast<double>(i + 1) - 1.0;
    // 1 - Phi(y) evaluated as Phi(-y) keeps precision in the upper tail.
    sum += weight * (std::log(normal_cdf(y[i])) + std::log(normal_cdf(-y[n - 1 - i])));
  }
  const double dn = static_cast<double>(n);
  AndersonDarlingResult result;
  result.sample_size = n;
  result.level = level;
  result.statistic = -dn - sum / dn;
  result.adjusted = result.statistic * (1.0 + 0.75 / dn + 2.25 / (dn * dn));
  result.critical_value = anderson_darling_critical_value(level);
  result.passes = result.adjusted < result.critical_value;
  return result;
}

std::string to_string(GrubbsSample sample) {
  return sample == GrubbsSample::kWithSuspect ? "with-suspect" : "shadows-only";
}

GrubbsSample parse_grubbs_sample(const std::string& text) {
  if (text == "with-suspect") return GrubbsSample::kWithSuspect;
  if (text == "shadows-only") return GrubbsSample::kShadowsOnly;
  throw InvalidArgument("unknown grubbs sample '" + text +
                        "' (expected with-suspect or shadows-only)");
}

double grubbs_threshold(std::size_t n, double alpha) {
  if (n < 3) throw InvalidArgument("grubbs: need n >= 3");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("grubbs: alpha must lie in (0, 1)");
  const double dn = static_cast<double>(n);
  const double t = t_upper_critical(alpha / dn, dn - 2.0);
  const double t2 = t * t;
  return (dn - 1.0) / std::sqrt(dn) * std::sqrt(t2 / (dn - 2.0 + t2));
}

TestOutcome grubbs_decide(std::span<const double> shadow_distances,
                          double suspect_distance, double alpha,
                          GrubbsSample sample) {
  const std::size_t k = shadow_distances.size();
  if (k < 2) throw InvalidArgument("grubbs: need at least 2 shadow distances");
  TestOutcome outcome;
  outcome.sample_size = k + 1;
  outcome.threshold = grubbs_threshold(k + 1, alpha);

  std::vector<double> values(shadow_distances.begin(), shadow_distances.end());
  if (sample == GrubbsSample::kWithSuspect) values.push_back(suspect_distance);
  const Moments m = moments(values);
  outcome.mean = m.mean;
  outcome.stddev = m.stddev;
  if (m.stddev == 0.0 || all_equal(values)) {
    outcome.degenerate = true;
    outcome.stddev = 0.0;
    const bool differs = suspect_distance != shadow_distances.front();
    outcome.statistic = differs ? std::numeric_limits<double>::infinity() : 0.0;
    outcome.is_outlier = differs;
    return outcome;
  }
  outcome.statistic = std::abs(suspect_distance - m.mean) / m.stddev;
  outcome.is_outlier = outcome.statistic > outcome.threshold;
  return outcome;
}

TestOutcome three_sigma_decide(std::span<const double> shadow_distances,
                               double suspect_distance) {
  const std::size_t k = shadow_distances.size();
  if (k < 2) throw InvalidArgument("three-sigma: need at least 2 shadow distances");
  const Moments m = moments(shadow_distances);
  TestOutcome outcome;
  outcome.sample_size = k;
  outcome.threshold = 3.0;
  outcome.mean = m.mean;
  outcome.stddev = all_equal(shadow_distances) ? 0.0 : m.stddev;
  if (outcome.stddev == 0.0) {
    outcome.degenerate = true;
    const bool differs = suspect_distance != shadow_distances.front();
    outcome.statistic = differs ? std::numeric_limits<double>::infinity() : 0.0;
    outcome.is_outlier = differs;
    return outcome;
  }
  outcome.statistic = std::abs(suspect_distance - m.mean) / m.stddev;
  outcome.is_outlier = outcome.statistic > outcome.threshold;
  return outcome;
}

}  // namespace trajaudit
