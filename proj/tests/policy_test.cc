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

#include "trajaudit/policy.h"

#include <cmath>
#include <set>
#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "fixtures.h"
#include "trajaudit/envgen.h"
#include "trajaudit/error.h"
#include "trajaudit/parallel.h"

namespace trajaudit {
namespace {

using ::testing::HasSubstr;

class ConstantPolicy final : public Policy {
 public:
  ConstantPolicy(Vector action, std::string label)
      : action_(std::move(action)), label_(std::move(label)) {}
  Vector act(std::span<const double>) const override { return action_; }
  std::size_t state_dim() const override { return 2; }
  std::size_t action_dim() const override { return action_.size(); }
  const std::string& label() const override { return label_; }
  void write(std::ostream&) const override {}

 private:
  Vector action_;
  std::string label_;
};

PolicyPtr constant(double a, const std::string& label = "const") {
  return std::make_shared<ConstantPolicy>(Vector{a}, label);
}

const Dataset& control_dataset() {
  static const Dataset d =
      generate_dataset(LinearControlEnv{}, benchmark_controllers()[1], 100, 21, "ctrl1");
  return d;
}

PolicyNetConfig quick_config() {
  PolicyNetConfig c;
  c.hidden = {8};
  c.train.epochs = 2;
  return c;
}

std::vector<Vector> probe_grid() {
  std::vector<Vector> grid;
  for (double p = -1.0; p <= 1.0; p += 0.25) {
    for (double v = -1.0; v <= 1.0; v += 0.25) grid.push_back({p, v});
  }
  return grid;
}

double bc_training_mse(const Policy& policy, const Dataset& d) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& t : d.trajectories) {
    for (const auto& tr : t.transitions) {
      const Vector a = policy.act(tr.state);
      total += (a[0] - tr.action[0]) * (a[0] - tr.action[0]);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

TEST(TrainBc, DefaultConfigFitsControllerData) {
  const PolicyPtr policy = train_bc(control_dataset(), PolicyNetConfig{}, 0);
  const double mse = bc_training_mse(*policy, control_dataset());
  RecordProperty("training_mse", std::to_string(mse));
  EXPECT_LT(mse, 0.05);
  EXPECT_EQ(policy->label(), "ctrl1/bc-0");
  EXPECT_EQ(policy->state_dim(), 2u);
  EXPECT_EQ(policy->action_dim(), 1u);
}

TEST(TrainBc, SameSeedIdenticalDifferentSeedDiffers) {
  const PolicyPtr a = train_bc(control_dataset(), quick_config(), 0);
  const PolicyPtr b = train_bc(control_dataset(), quick_config(), 0);
  const PolicyPtr c = train_bc(control_dataset(), quick_config(), 1);
  double max_diff = 0.0;
  for (const auto& s : probe_grid()) {
    EXPECT_EQ(a->act(s), b->act(s));
    max_diff = std::max(max_diff, std::abs(a->act(s)[0] - c->act(s)[0]));
  }
  EXPECT_GT(max_diff, 0.0);
}

TEST(TrainBc, RejectsInvalidDataset) {
  Dataset d = control_dataset();
  d.trajectories[0].transitions[0].action.clear();
  EXPECT_THROW(train_bc(d, quick_config(), 0), InvalidArgument);
}

TEST(TrainBc, LearnsInNormalizedActionSpace) {
  Dataset d = testing::random_dataset(10, 10, 2, 1, 3);
  d.action_low = {0.0};
  d.action_high = {4.0};
  for (auto& t : d.trajectories) {
    for (auto& tr : t.transitions) tr.action = {3.0};  // normalizes to 0.5
  }
  PolicyNetConfig config;
  config.hidden = {8};
  config.train = {.epochs = 200, .batch_size = 32, .lr = 1e-2, .lr_decay_every = 0};
  const PolicyPtr p = train_bc(d, config, 1);
  EXPECT_NEAR(p->act(d.trajectories[0].transitions[0].state)[0], 0.5, 0.05);
}

TEST(TrainShadows, FifteenDistinctSeeds) {
  const auto shadows = train_shadows(control_dataset(), 15, quick_config(), 42);
  ASSERT_EQ(shadows.size(), 15u);
  std::set<std::string> labels;
  for (std::size_t i = 0; i < shadows.size(); ++i) {
    labels.insert(shadows[i]->label());
    EXPECT_EQ(shadows[i]->label(), "ctrl1/bc-" + std::to_string(42 + i));
  }
  EXPECT_EQ(labels.size(), 15u);
  const auto again = train_shadows(control_dataset(), 15, quick_config(), 42);
  for (std::size_t i = 0; i < 15; ++i) {
    const auto* a = dynamic_cast<const BcPolicy*>(shadows[i].get());
    const auto* b = dynamic_cast<const BcPolicy*>(again[i].get());
    EXPECT_EQ(a->net(), b->net());
  }
}

TEST(TrainShadows, SingleShadowIsError) {
  EXPECT_THROW(train_shadows(control_dataset(), 1, quick_config(), 0), InvalidArgument);
}

TEST(TrainShadows, NineAndTwentyOneSucceed) {
  EXPECT_EQ(train_shadows(control_dataset(), 9, quick_config(), 0).size(), 9u);
  EXPECT_EQ(train_shadows(control_dataset(), 21, quick_config(), 0).size(), 21u);
}

TEST(GaussianDistort, ZeroSigmaPassesThrough) {
  const PolicyPtr inner = train_bc(control_dataset(), quick_config(), 3);
  const PolicyPtr wrapped = gaussian_distort(inner, 0.0, 1);
  for (const auto& s : probe_grid()) EXPECT_EQ(wrapped->act(s), inner->act(s));
}

TEST(GaussianDistort, OutputsStayInBounds) {
  const PolicyPtr wrapped = gaussian_distort(constant(0.95), 0.5, 2);
  for (int i = 0; i < 10000; ++i) {
    const double a = wrapped->act(std::vector<double>{0.0, 0.0})[0];
    EXPECT_GE(a, -1.0);
    EXPECT_LE(a, 1.0);
  }
}

TEST(GaussianDistort, EmpiricalNoiseStdMatchesSigma) {
  for (double sigma : {0.01, 0.1}) {
    const PolicyPtr wrapped = gaussian_distort(constant(0.0), sigma, 3);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double e = wrapped->act(std::vector<double>{0.1, 0.2})[0];
      sum += e;
      sum_sq += e * e;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));
    EXPECT_NEAR(sd, sigma, 0.15 * sigma);
  }
}

TEST(GaussianDistort, ReproducibleQueryForQuery) {
  const PolicyPtr a = gaussian_distort(constant(0.1), 0.2, 9);
  const PolicyPtr b = gaussian_distort(constant(0.1), 0.2, 9);
  const PolicyPtr c = gaussian_distort(constant(0.1), 0.2, 10);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const Vector s = {0.01 * i, -0.3};
    const Vector va = a->act(s);
    EXPECT_EQ(va, b->act(s));
    differs = differs || va != c->act(s);
  }
  EXPECT_TRUE(differs);
}

TEST(GaussianDistort, RejectsNegativeSigma) {
  EXPECT_THROW(gaussian_distort(constant(0.0), -0.1, 0), InvalidArgument);
}

TEST(GaussianDistort, SafeUnderParallelQueries) {
  const PolicyPtr wrapped = gaussian_distort(constant(0.0), 0.3, 4);
  std::vector<double> out(2000);
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = wrapped->act(std::vector<double>{0.0, 0.0})[0];
  });
  for (double a : out) EXPECT_LE(std::abs(a), 1.0);
}

TEST(Ensemble, IdenticalConstantsGiveConstant) {
  const auto e = ensemble_defended({constant(0.3), constant(0.3), constant(0.3)}, {},
                                   EnsembleMode::kMeanAll, "d");
  EXPECT_DOUBLE_EQ(e->act(std::vector<double>{0.5, 0.5})[0], 0.3);
}

TEST(Ensemble, MeanAllOfTwoConstants) {
  const auto e =
      ensemble_defended({constant(0.2), constant(0.4)}, {}, EnsembleMode::kMeanAll, "d");
  EXPECT_DOUBLE_EQ(e->act(std::vector<double>{0.0, 0.0})[0], 0.3);
}

TEST(Ensemble, ExcludeSourceDropsTheTrainingSubset) {
  std::vector<PolicyPtr> members;
  for (int i = 0; i < 5; ++i) members.push_back(constant(0.1 * (i + 1)));
  const MembershipMap membership = {{7, 2}, {8, 0}};
  const auto e = ensemble_defended(members, membership, EnsembleMode::kExcludeSource, "d");
  EXPECT_EQ(e->selected_members(7), (std::vector<std::size_t>{0, 1, 3, 4}));
  const double expected = (0.1 + 0.2 + 0.4 + 0.5) / 4.0;
  EXPECT_DOUBLE_EQ(e->act_for_source(std::vector<double>{0.0, 0.0}, 7)[0], expected);
  const PolicyPtr bound = e->bound_to("d", 7);
  EXPECT_DOUBLE_EQ(bound->act(std::vector<double>{0.0, 0.0})[0], expected);
  // Another dataset's trajectory is not a training example: mean over all.
  EXPECT_DOUBLE_EQ(e->bound_to("other", 7)->act(std::vector<double>{0.0, 0.0})[0], 0.3);
  // Unknown source id: nothing to exclude.
  EXPECT_EQ(e->selected_members(99).size(), 5u);
}

TEST(Ensemble, MeanAllIgnoresSource) {
  const auto e = ensemble_defended({constant(0.2), constant(0.4)}, {{1, 0}},
                                   EnsembleMode::kMeanAll, "d");
  EXPECT_DOUBLE_EQ(e->act_for_source(std::vector<double>{0.0, 0.0}, 1)[0], 0.3);
}

TEST(Ensemble, FallsBackToAllWhenExclusionEmptiesSet) {
  const auto e =
      ensemble_defended({constant(0.6)}, {{0, 0}}, EnsembleMode::kExcludeSource, "d");
  EXPECT_DOUBLE_EQ(e->act_for_source(std::vector<double>{0.0, 0.0}, 0)[0], 0.6);
}

TEST(Ensemble, RejectsEmptyOrInconsistentMembers) {
  EXPECT_THROW(ensemble_defended({}, {}, EnsembleMode::kMeanAll, "d"), InvalidArgument);
  EXPECT_THROW(ensemble_defended({constant(0.1)}, {{0, 3}}, EnsembleMode::kMeanAll, "d"),
               InvalidArgument);
}

TEST(Ensemble, TrainedEnsembleMembershipIsTotal) {
  const auto e = train_ensemble(control_dataset(), 5, quick_config(), 500, 7,
                                EnsembleMode::kExcludeSource);
  EXPECT_EQ(e->members().size(), 5u);
  EXPECT_EQ(e->membership().size(), control_dataset().trajectories.size());
  for (const auto& t : control_dataset().trajectories) {
    EXPECT_EQ(e->selected_members(t.id).size(), 4u);
  }
  const SuspectResolver resolver = ensemble_suspect(e, "ctrl1");
  const Vector s = {0.2, -0.1};
  const std::size_t excluded = e->membership().at(3);
  Vector expected(1, 0.0);
  for (std::size_t i = 0; i < 5; ++i) {
    if (i != excluded) expected[0] += e->members()[i]->act(s)[0] / 4.0;
  }
  EXPECT_NEAR(resolver(3)->act(s)[0], expected[0], 1e-15);
}

TEST(PolicyBounds, RandomProbesStayInBoundsForEveryKind) {
  const PolicyPtr bc = train_bc(control_dataset(), quick_config(), 5);
  const auto ens = train_ensemble(control_dataset(), 3, quick_config(), 1, 2,
                                  EnsembleMode::kExcludeSource);
  const std::vector<PolicyPtr> policies = {bc, gaussian_distort(bc, 0.1, 6), ens,
                                           ens->bound_to("ctrl1", 0)};
  Rng rng(11);
  for (const auto& policy : policies) {
    for (int i = 0; i < 100000 / static_cast<int>(policies.size()); ++i) {
      const Vector s = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
      const Vector a = policy->act(s);
      ASSERT_EQ(a.size(), 1u);
      ASSERT_TRUE(std::isfinite(a[0]));
      ASSERT_LE(std::abs(a[0]), 1.0);
    }
  }
}

TEST(PolicyIo, RoundTripsEveryKind) {
  const PolicyPtr bc = train_bc(control_dataset(), quick_config(), 5);
  const auto ens = train_ensemble(control_dataset(), 3, quick_config(), 1, 2,
                                  EnsembleMode::kExcludeSource);
  testing::TempDir dir("policy-io");
  for (const PolicyPtr& p : std::vector<PolicyPtr>{bc, gaussian_distort(bc, 0.1, 6), ens}) {
    const auto path = dir.path() / "p.policy";
    save_policy(*p, path);
    const PolicyPtr loaded = load_policy(path);
    EXPECT_EQ(loaded->label(), p->label());
    std::ostringstream a, b;
    write_policy(*p, a);
    write_policy(*loaded, b);
    EXPECT_EQ(a.str(), b.str());
  }
  const PolicyPtr loaded_ens = load_policy(dir.path() / "p.policy");
  const auto* e = dynamic_cast<const EnsemblePolicy*>(loaded_ens.get());
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->membership(), ens->membership());
  for (const auto& s : probe_grid()) {
    EXPECT_EQ(e->act_for_source(s, 4), ens->act_for_source(s, 4));
  }
}

TEST(PolicyIo, MissingFileIsNotFound) {
  try {
    load_policy("/nonexistent/dir/x.policy");
    FAIL();
  } catch (const NotFound& e) {
    EXPECT_THAT(e.what(), HasSubstr("policy not found"));
  }
}

}  // namespace
}  // namespace trajaudit
