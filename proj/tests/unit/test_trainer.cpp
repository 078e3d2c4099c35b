#include <gtest/gtest.h>

#include "plumeig/rl/trainer.hpp"

using namespace plumeig;
using namespace plumeig::rl;

namespace {

TrainConfig tiny(int episodes = 2) {
  TrainConfig c;
  c.env.grid = {0.0, 8.0, 0.0, 8.0, 8, 8, 8, 8};
  c.env.plume.length_scale = 2.0;
  c.env.plume.noise_sigma = 0.2;
  c.env.n_agents = 2;
  c.env.horizon = 40;
  c.dqn.hidden = {16};
  c.dqn.batch_size = 8;
  c.dqn.replay_capacity = 200;
  c.dqn.target_sync = 25;
  c.dqn.epsilon.decay_steps = 60;
  c.episodes = episodes;
  c.smoothing_window = 10;
  return c;
}

}  // namespace

TEST(ChooseAction, MaskedActionNeverChosen) {
  QNet net({kObservationSize, kActionCount});
  net.layers()[0].bias << 0.0, 0.0, 0.0, 0.0, 5.0;
  const Observation o{};
  Rng rng = make_stream(1, Stream::Exploration);
  const auto mask = action_mask(TrainMode::Individual);
  EXPECT_EQ(choose_action(net, o, 0.0, mask, rng), Action::DoNothing);
  EXPECT_EQ(choose_action(net, o, 0.0, kAllActions, rng), Action::Communicate);
  int do_nothing = 0;
  for (int k = 0; k < 10000; ++k) {
    const Action a = choose_action(net, o, 1.0, mask, rng);
    ASSERT_NE(a, Action::Communicate);
    do_nothing += a == Action::DoNothing;
  }
  EXPECT_NEAR(do_nothing / 10000.0, 0.4, 0.02);  // own share plus the remapped one
}

TEST(Train, ZeroEpisodesGivesEmptyCurves) {
  const auto r = train(tiny(0), TrainMode::Communicating, 1);
  ASSERT_EQ(r.smoothed.size(), 2u);
  EXPECT_TRUE(r.smoothed[0].empty());
  EXPECT_EQ(r.nets.size(), 2u);
}

TEST(Train, DeterministicPerSeedAndMode) {
  const auto a = train(tiny(), TrainMode::Communicating, 3);
  const auto b = train(tiny(), TrainMode::Communicating, 3);
  EXPECT_EQ(a.rewards, b.rewards);
  EXPECT_EQ(a.nets[1].parameters(), b.nets[1].parameters());
  const auto c = train(tiny(), TrainMode::Communicating, 4);
  EXPECT_NE(a.rewards, c.rewards);
  ASSERT_EQ(a.rewards[0].size(), 80u);
  EXPECT_EQ(a.smoothed[0], trailing_mean(a.rewards[0], 10));
}

TEST(Train, IndividualModeNeverLogsCommunicate) {
  const auto r = train(tiny(3), TrainMode::Individual, 5);
  for (const auto& counts : r.action_counts) EXPECT_EQ(counts[static_cast<int>(Action::Communicate)], 0);
  const auto c = train(tiny(3), TrainMode::Communicating, 5);
  long comm = 0;
  for (const auto& counts : c.action_counts) comm += counts[static_cast<int>(Action::Communicate)];
  EXPECT_GT(comm, 0);
}

TEST(TrailingMean, Window) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_EQ(trailing_mean(v, 2), (std::vector<double>{1.0, 1.5, 2.5, 3.5}));
  EXPECT_EQ(trailing_mean(v, 10), (std::vector<double>{1.0, 1.5, 2.0, 2.5}));
}
