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

#include "trajaudit/fingerprint.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "trajaudit/envgen.h"
#include "trajaudit/error.h"
#include "trajaudit/rng.h"

namespace trajaudit {
namespace {

class ControllerPolicy final : public Policy {
 public:
  explicit ControllerPolicy(GainController controller) : controller_(controller) {}
  Vector act(std::span<const double> state) const override {
    Rng unused(0);
    return {controller_action(controller_, state, unused)};
  }
  std::size_t state_dim() const override { return 2; }
  std::size_t action_dim() const override { return 1; }
  const std::string& label() const override { return label_; }
  void write(std::ostream&) const override {}

 private:
  GainController controller_;
  std::string label_ = "controller";
};

class CountingPolicy final : public Policy {
 public:
  Vector act(std::span<const double>) const override {
    ++calls;
    return {0.0};
  }
  std::size_t state_dim() const override { return 2; }
  std::size_t action_dim() const override { return 1; }
  const std::string& label() const override { return label_; }
  void write(std::ostream&) const override {}
  mutable std::size_t calls = 0;

 private:
  std::string label_ = "counting";
};

struct Fixture {
  Dataset dataset;
  Critic critic;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Dataset d =
        generate_dataset(LinearControlEnv{}, benchmark_controllers()[2], 100, 9, "ctrl2");
    Critic critic = train_critic(d, CriticConfig{});
    return Fixture{std::move(d), std::move(critic)};
  }();
  return f;
}

TEST(AuditedLength, CeilOfFraction) {
  EXPECT_EQ(audited_length(40, 1.0), 40u);
  EXPECT_EQ(audited_length(40, 0.5), 20u);
  EXPECT_EQ(audited_length(40, 0.25), 10u);
  EXPECT_EQ(audited_length(41, 0.5), 21u);
  EXPECT_EQ(audited_length(30, 0.1), 3u);
  EXPECT_EQ(audited_length(3, 0.01), 1u);
  EXPECT_THROW(audited_length(40, 0.0), InvalidArgument);
  EXPECT_THROW(audited_length(40, 1.5), InvalidArgument);
}

TEST(CollectFingerprint, LengthFollowsFraction) {
  const Trajectory& t = fixture().dataset.trajectories[0];
  ASSERT_EQ(t.size(), 40u);
  const ControllerPolicy policy(benchmark_controllers()[2]);
  EXPECT_EQ(collect_fingerprint(policy, fixture().critic, t, 1.0).values.size(), 40u);
  EXPECT_EQ(collect_fingerprint(policy, fixture().critic, t, 0.5).values.size(), 20u);
  const Fingerprint fp = collect_fingerprint(policy, fixture().critic, t, 0.25);
  EXPECT_EQ(fp.values.size(), 10u);
  EXPECT_EQ(fp.trajectory, t.id);
  EXPECT_EQ(fp.policy_label, "controller");
}

TEST(CollectFingerprint, UsesRecordedStatesOnly) {
  const Trajectory& t = fixture().dataset.trajectories[1];
  CountingPolicy policy;
  const Fingerprint fp = collect_fingerprint(policy, fixture().critic, t, 0.5);
  EXPECT_EQ(policy.calls, 20u);
  for (std::size_t s = 0; s < 20; ++s) {
    EXPECT_EQ(fp.values[s],
              fixture().critic.evaluate(t.transitions[s].state, std::vector<double>{0.0}));
  }
}

TEST(CollectFingerprint, GeneratingControllerTracksDatasetPairs) {
  const GainController controller = benchmark_controllers(0.0)[2];
  const Dataset d = generate_dataset(LinearControlEnv{}, controller, 50, 9, "ctrl2");
  CriticConfig config;
  config.epochs = 20;
  const Critic critic = train_critic(d, config);
  const ControllerPolicy policy(controller);
  double worst = 0.0;
  for (const auto& t : d.trajectories) {
    const Fingerprint fp = collect_fingerprint(policy, critic, t, 1.0);
    for (std::size_t s = 0; s < t.size(); ++s) {
      const double own = critic.evaluate(t.transitions[s].state, t.transitions[s].action);
      worst = std::max(worst, std::abs(fp.values[s] - own));
    }
  }
  RecordProperty("max_gap", std::to_string(worst));
  EXPECT_LT(worst, 0.3);
}

TEST(CollectFingerprint, DeterministicForDeterministicPolicy) {
  const ControllerPolicy policy(benchmark_controllers()[2]);
  const Trajectory& t = fixture().dataset.trajectories[3];
  EXPECT_EQ(collect_fingerprint(policy, fixture().critic, t, 1.0),
            collect_fingerprint(policy, fixture().critic, t, 1.0));
}

TEST(CollectFingerprint, DistortedPolicyReproducibleGivenSeed) {
  const auto inner = std::make_shared<ControllerPolicy>(benchmark_controllers()[2]);
  const Trajectory& t = fixture().dataset.trajectories[3];
  const auto a = collect_fingerprint(*gaussian_distort(inner, 0.1, 5), fixture().critic, t, 1.0);
  const auto b = collect_fingerprint(*gaussian_distort(inner, 0.1, 5), fixture().critic, t, 1.0);
  EXPECT_EQ(a, b);
}

TEST(CollectFingerprint, EmptyTrajectoryIsError) {
  const ControllerPolicy policy(benchmark_controllers()[2]);
  EXPECT_THROW(collect_fingerprint(policy, fixture().critic, Trajectory{}, 1.0),
               InvalidArgument);
}

TEST(Prefix, TakesLeadingValues) {
  const Fingerprint fp{4, "p", {1.0, 2.0, 3.0}};
  EXPECT_EQ(prefix(fp, 2), (Fingerprint{4, "p", {1.0, 2.0}}));
  EXPECT_THROW(prefix(fp, 0), InvalidArgument);
  EXPECT_THROW(prefix(fp, 4), InvalidArgument);
}

TEST(MeanFingerprint, SingleIsItself) {
  const std::vector<Fingerprint> fps = {{1, "a", {0.5, -1.0, 2.0}}};
  EXPECT_EQ(mean_fingerprint(fps), fps[0].values);
}

TEST(MeanFingerprint, ElementwiseMean) {
  const std::vector<Fingerprint> fps = {{1, "a", {0.0, 2.0}}, {1, "b", {2.0, 4.0}}};
  EXPECT_EQ(mean_fingerprint(fps), (std::vector<double>{1.0, 3.0}));
}

TEST(MeanFingerprint, MismatchesAreErrors) {
  const std::vector<Fingerprint> lengths = {{1, "a", std::vector<double>(5, 0.0)},
                                            {1, "b", std::vector<double>(6, 0.0)}};
  EXPECT_THROW(mean_fingerprint(lengths), InvalidArgument);
  const std::vector<Fingerprint> ids = {{1, "a", {0.0}}, {2, "b", {0.0}}};
  EXPECT_THROW(mean_fingerprint(ids), InvalidArgument);
  EXPECT_THROW(mean_fingerprint({}), InvalidArgument);
}

TEST(WriteFingerprints, OneRecordPerFingerprint) {
  const std::vector<Fingerprint> fps = {{1, "a", {0.5, 2.0}}, {7, "b", {-1.0}}};
  std::ostringstream out;
  write_fingerprints(fps, out);
  EXPECT_EQ(out.str(), "F 1 a 2 0.5 2\nF 7 b 1 -1\n");
}

}  // namespace
}  // namespace trajaudit
