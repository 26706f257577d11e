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

// Distances between fingerprint sequences and the outlier tests applied to
// them, with the special functions those tests need.

#ifndef TRAJAUDIT_STATS_H_
#define TRAJAUDIT_STATS_H_

#include <cstddef>
#include <span>
#include <string>

namespace trajaudit {

enum class DistanceMetric { kL1, kL2, kCosine, kWasserstein };

std::string to_string(DistanceMetric metric);
DistanceMetric parse_distance_metric(const std::string& text);

// L1 = sum |u - v|; L2 = sqrt(sum (u - v)^2); Cosine = 1 - <u,v>/(|u||v|);
// Wasserstein-1 between the two equal-size empirical distributions, i.e. the
// mean absolute difference of the sorted samples. Lengths must match and be
// >= 1; Cosine is undefined for a zero vector.
double distance(DistanceMetric metric, std::span<const double> u,
                std::span<const double> v);

// Standard normal CDF.
double normal_cdf(double x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// P(T > t) for Student-t with nu degrees of freedom.
double student_t_upper_tail(double t, double nu);
double student_t_cdf(double t, double nu);

// t such that P(T > t) = p; bisection on the upper tail. 0 < p < 1, nu >= 1.
double t_upper_critical(double p, double nu);

struct AndersonDarlingResult {
  double statistic = 0.0;  // A^2
  double adjusted = 0.0;   // A*^2 = A^2 (1 + 0.75/n + 2.25/n^2)
  double critical_value = 0.0;
  double level = 0.0;
  bool passes = false;     // adjusted < critical_value
  std::size_t sample_size = 0;
};

// Critical value of A*^2 for a normal with estimated mean and variance.
// Supported levels: 0.15, 0.10, 0.05, 0.025, 0.01.
double anderson_darling_critical_value(double level);

// Normality check with parameters estimated from the sample. n >= 5 and a
// nonzero sample standard deviation are required.
AndersonDarlingResult anderson_darling_normal(std::span<const double> samples,
                                              double level = 0.05);

struct TestOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  bool is_outlier = false;
  std::size_t sample_size = 0;
  double mean = 0.0;
  double stddev = 0.0;
  bool degenerate = false;  // zero spread; decided by exact equality
};

enum class GrubbsSample {
  kWithSuspect,  // moments over shadows plus suspect, n = k + 1
  kShadowsOnly,  // moments over shadows only; threshold still uses n = k + 1
};

std::string to_string(GrubbsSample sample);
GrubbsSample parse_grubbs_sample(const std::string& text);

// Critical value of the Grubbs statistic for n samples:
// (n - 1)/sqrt(n) * sqrt(t^2 / (n - 2 + t^2)), t = t_upper_critical(alpha/n, n - 2).
double grubbs_threshold(std::size_t n, double alpha);

// G = |suspect - mean| / stddev (sample stddev, n - 1 denominator); the
// suspect is an outlier iff G exceeds grubbs_threshold(k + 1, alpha). With
// zero spread the suspect is an outlier iff it differs from the common value.
TestOutcome grubbs_decide(std::span<const double> shadow_distances,
                          double suspect_distance, double alpha,
                          GrubbsSample sample = GrubbsSample::kWithSuspect);

// Outlier iff |suspect - mean| > 3 stddev, moments over shadows only. The
// outcome reports the statistic in stddev units against threshold 3.
TestOutcome three_sigma_decide(std::span<const double> shadow_distances,
                               double suspect_distance);

}  // namespace trajaudit

#endif  // TRAJAUDIT_STATS_H_
