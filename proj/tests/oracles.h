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

// Independent reference computations used as test oracles. None of these
// call the library routine they check.

#ifndef TRAJAUDIT_TESTS_ORACLES_H_
#define TRAJAUDIT_TESTS_ORACLES_H_

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "trajaudit/neural.h"

namespace trajaudit::oracle {

// MSE loss mean_b ||f(x_b) - y_b||^2 evaluated column by column.
double mse_loss(const Mlp& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets);

// Central finite-difference gradient of mse_loss for every parameter,
// in the layout of Mlp::layers().
std::vector<DenseLayer> finite_difference_gradient(const Mlp& net,
                                                   const Eigen::MatrixXd& inputs,
                                                   const Eigen::MatrixXd& targets, double h);

// G_t = sum_{j >= t} gamma^(j - t) r_j by a forward double loop.
std::vector<double> discounted_returns_quadratic(const std::vector<double>& rewards,
                                                 double gamma);

// min over all pairings pi of mean |u_i - v_pi(i)|.
double wasserstein_bruteforce(const std::vector<double>& u, const std::vector<double>& v);

// Composite Simpson rule with `intervals` (rounded up to even) panels.
double simpson(const std::function<double(double)>& f, double a, double b,
               std::size_t intervals);

// Phi(x) = 1/2 + integral_0^x phi(t) dt.
double normal_cdf_by_integration(double x);

// Upper tail P(T > t) of Student-t(nu) by integrating the density.
double t_upper_tail_by_integration(double t, double nu);

// Bisection on t_upper_tail_by_integration.
double t_critical_by_integration(double p, double nu);

// Anderson-Darling A^2 against a normal with estimated parameters, using the
// rearranged sum -n - (1/n) sum [(2i-1) ln F_i + (2(n-i)+1) ln(1 - F_i)].
double anderson_darling_a2(const std::vector<double>& samples);

struct GrubbsReference {
  double statistic = 0.0;
  double threshold = 0.0;
};

// Grubbs statistic over shadows plus suspect and threshold with the t
// critical value from t_critical_by_integration.
GrubbsReference grubbs_reference(const std::vector<double>& shadows, double suspect,
                                 double alpha);

}  // namespace trajaudit::oracle

#endif  // TRAJAUDIT_TESTS_ORACLES_H_
