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

#include <benchmark/benchmark.h>

#include <vector>

#include "trajaudit/critic.h"
#include "trajaudit/envgen.h"
#include "trajaudit/fingerprint.h"
#include "trajaudit/neural.h"
#include "trajaudit/policy.h"
#include "trajaudit/rng.h"
#include "trajaudit/stats.h"

namespace trajaudit {
namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

void BM_MlpForwardBatch(benchmark::State& state) {
  const auto batch = static_cast<Eigen::Index>(state.range(0));
  const Mlp net({3, 64, 64, 1}, Activation::kIdentity, 1);
  const Eigen::MatrixXd x = random_matrix(3, batch, 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward_batch(x));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForwardBatch)->Arg(1)->Arg(64)->Arg(1024);

void BM_MlpTrainingStep(benchmark::State& state) {
  Mlp net({3, 64, 64, 1}, Activation::kIdentity, 1);
  AdamState adam(net, 1e-3);
  const Eigen::MatrixXd x = random_matrix(3, 64, 2);
  const Eigen::MatrixXd y = random_matrix(1, 64, 3);
  for (auto _ : state) {
    const MlpGradients grads = mlp_gradient(net, x, y);
    adam_update(adam, net, grads);
  }
}
BENCHMARK(BM_MlpTrainingStep);

void BM_Distance(benchmark::State& state) {
  const auto metric = static_cast<DistanceMetric>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  Rng rng(4);
  std::vector<double> u(n), v(n);
  for (double& x : u) x = rng.normal();
  for (double& x : v) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(distance(metric, u, v));
  state.SetLabel(to_string(metric));
}
BENCHMARK(BM_Distance)
    ->ArgsProduct({{static_cast<int>(DistanceMetric::kL2),
                    static_cast<int>(DistanceMetric::kWasserstein)},
                   {40, 1000}});

void BM_TUpperCritical(benchmark::State& state) {
  const double nu = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(t_upper_critical(0.01 / (nu + 2.0), nu));
}
BENCHMARK(BM_TUpperCritical)->Arg(7)->Arg(14)->Arg(20);

void BM_GrubbsDecide(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> shadows(static_cast<std::size_t>(state.range(0)));
  for (double& d : shadows) d = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(grubbs_decide(shadows, 3.0, 0.01));
}
BENCHMARK(BM_GrubbsDecide)->Arg(9)->Arg(15)->Arg(21);

void BM_AndersonDarling(benchmark::State& state) {
  Rng rng(6);
  std::vector<double> sample(static_cast<std::size_t>(state.range(0)));
  for (double& d : sample) d = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(anderson_darling_normal(sample));
}
BENCHMARK(BM_AndersonDarling)->Arg(15);

void BM_CollectFingerprint(benchmark::State& state) {
  const Dataset d = generate_dataset(LinearControlEnv{}, benchmark_controllers()[0], 4, 7, "bm");
  PolicyNetConfig policy_config;
  policy_config.train.epochs = 1;
  const PolicyPtr policy = train_bc(d, policy_config, 1);
  CriticConfig critic_config;
  critic_config.epochs = 1;
  const Critic critic = train_critic(d, critic_config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(collect_fingerprint(*policy, critic, d.trajectories[0], 1.0));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(d.trajectories[0].size()));
}
BENCHMARK(BM_CollectFingerprint);

}  // namespace
}  // namespace trajaudit

BENCHMARK_MAIN();
