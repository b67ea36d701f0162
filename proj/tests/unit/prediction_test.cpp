#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <thread>

#include "rpaf/parallel/batch_reduce.hpp"
#include "rpaf/prediction/losses.hpp"
#include "rpaf/prediction/networks.hpp"
#include "rpaf/prediction/penalty.hpp"
#include "rpaf/prediction/replay_buffer.hpp"
#include "rpaf/prediction/state_encoding.hpp"
#include "rpaf/prediction/trainer.hpp"

namespace rpaf::prediction {
namespace {

// Critic whose heads are exactly (q0, q1) for every state: zero weights and
// the values placed in the output biases.
nn::DenseNet constant_critic(std::size_t dim, double q0, double q1) {
  auto net = make_critic(dim, NetworkShape{4, 2});
  const auto& out = net.layers().back();
  net.parameters()[out.bias_offset] = q0;
  net.parameters()[out.bias_offset + 1] = q1;
  return net;
}

Transition make_transition(std::vector<double> s, int a, double r, bool done, std::uint64_t period) {
  Transition t;
  t.state = s;
  t.next_state = std::move(s);
  t.action = a;
  t.reward = r;
  t.done = done;
  t.period = period;
  return t;
}

TEST(CriticValueTest, AffineInterpolation) {
  const QPair q{1.0, 2.0};
  EXPECT_DOUBLE_EQ(critic_value(q, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(critic_value(q, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(critic_value(q, 0.25), 1.25);
  EXPECT_THROW(critic_value(q, 1.5), std::domain_error);
  EXPECT_THROW(critic_value(q, -0.1), std::domain_error);
}

TEST(CriticValueTest, NetworkValueIsExactlyAffine) {
  std::mt19937_64 rng(1);
  NetPair critic(make_critic(6, NetworkShape{8, 3}), rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> s(6);
    for (auto& x : s) x = normal(rng);
    const auto heads = critic.online.predict(s);
    const double a = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    EXPECT_EQ(critic_value(critic.online, s, a) - (a * heads[1] + (1.0 - a) * heads[0]), 0.0);
  }
}

TEST(PenaltyTest, Examples) {
  auto mse = penalty(PenaltyKind::kMse, 0.3, 0.3);
  EXPECT_EQ(mse.value, 0.0);
  EXPECT_EQ(mse.derivative, 0.0);
  EXPECT_NEAR(penalty(PenaltyKind::kMse, 0.5, 0.3).value, 0.04, 1e-15);
  const auto kl = penalty(PenaltyKind::kKl, 0.5, 0.5);
  EXPECT_NEAR(kl.value, std::log(2.0), 1e-15);
  EXPECT_NEAR(kl.value, 0.6931, 1e-4);
  EXPECT_NEAR(kl.derivative, 0.0, 1e-15);
  EXPECT_THROW(penalty(PenaltyKind::kKl, 0.0, 0.5), std::domain_error);
  EXPECT_THROW(penalty(PenaltyKind::kKl, 1.0, 0.5), std::domain_error);
  EXPECT_EQ(penalty(PenaltyKind::kNone, 0.9, 0.1).value, 0.0);
  EXPECT_DOUBLE_EQ(penalty(Penalty{PenaltyKind::kMse, 3.0}, 0.5, 0.3).value, 0.12);
}

TEST(PenaltyTest, DerivativeMatchesDifferences) {
  for (auto kind : {PenaltyKind::kMse, PenaltyKind::kKl}) {
    for (double x : {0.1, 0.5, 0.8, 1.0}) {
      for (double xh : {0.05, 0.3, 0.6, 0.95}) {
        const double h = 1e-6;
        const double numeric =
            (penalty(kind, xh + h, x).value - penalty(kind, xh - h, x).value) / (2 * h);
        EXPECT_NEAR(penalty(kind, xh, x).derivative, numeric, 1e-6 * std::max(1.0, std::abs(numeric)));
      }
    }
  }
}

// The value at x_hat = x is the grid minimum, and second differences are >= 0.
TEST(PenaltyTest, MinimumAtTargetAndConvex) {
  for (auto kind : {PenaltyKind::kMse, PenaltyKind::kKl}) {
    for (double x : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      const double at_x = penalty(kind, x, x).value;
      double prev2 = NAN, prev1 = NAN;
      for (int k = 1; k < 1000; ++k) {
        const double xh = k / 1000.0;
        const double v = penalty(kind, xh, x).value;
        EXPECT_GE(v, at_x - 1e-12);
        if (!std::isnan(prev2)) EXPECT_GE(v - 2 * prev1 + prev2, -1e-12);
        prev2 = prev1;
        prev1 = v;
      }
    }
  }
}

TEST(PenaltyTest, Names) {
  EXPECT_EQ(parse_penalty("mse"), PenaltyKind::kMse);
  EXPECT_EQ(parse_penalty("kl"), PenaltyKind::kKl);
  EXPECT_EQ(parse_penalty("none"), PenaltyKind::kNone);
  EXPECT_THROW(parse_penalty("l2"), std::invalid_argument);
  EXPECT_EQ(to_string(PenaltyKind::kKl), "kl");
}

TEST(MtTest, Examples) {
  EXPECT_DOUBLE_EQ(compute_m_t(4500, 9000).value(), 0.5);
  EXPECT_DOUBLE_EQ(compute_m_t(4500, 4000).value(), 1.0);
  EXPECT_DOUBLE_EQ(compute_m_t(1, 4).value(), 0.25);
  EXPECT_FALSE(compute_m_t(5, 0).has_value());
}

TEST(StateEncodingTest, Anchors) {
  sim::SimConfig c;
  sim::UserSessionState u;
  u.preference.assign(c.preference_dim, 0.5);
  u.cache_occupancy = c.cache_capacity();
  const auto x = encode_state(u, c);
  ASSERT_EQ(x.size(), state_dim(c));
  EXPECT_EQ(x[c.preference_dim], 0.0);
  EXPECT_EQ(x[c.preference_dim + 1], 1.0);
  u.hour_of_day = 0;
  const auto h0 = encode_state(u, c);
  u.hour_of_day = 24;
  EXPECT_EQ(encode_state(u, c), h0);
  u.hour_of_day = 6;
  EXPECT_NEAR(encode_state(u, c)[c.preference_dim + 2], 1.0, 1e-15);
}

TEST(ReplayBufferTest, CapacityAndInactiveDrop) {
  ReplayBuffer buf(3);
  EXPECT_THROW(ReplayBuffer(0), std::invalid_argument);
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(buf.push(make_transition({double(i)}, 1, 1.0, false, 7)));
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.active_count(7), 5u);
  auto inactive = make_transition({9.0}, 0, 0.0, true, 7);
  inactive.active = false;
  EXPECT_FALSE(buf.push(inactive));
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.active_count(7), 5u);
  EXPECT_THROW(buf.push(make_transition({1.0}, 2, 1.0, false, 0)), std::invalid_argument);
  EXPECT_THROW(buf.push(make_transition({1.0}, 1, -1.0, false, 0)), std::invalid_argument);

  // Only the newest three remain.
  std::mt19937_64 rng(2);
  std::set<double> seen;
  for (const auto& s : buf.sample(200, rng)) seen.insert(s.transition.state[0]);
  EXPECT_EQ(seen, (std::set<double>{2.0, 3.0, 4.0}));
}

TEST(ReplayBufferTest, SamplingIsRoughlyUniformAndSeeded) {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push(make_transition({double(i)}, 0, 0.0, true, 0));
  std::mt19937_64 a(5), b(5);
  std::vector<int> counts(10, 0);
  const auto sa = buf.sample(20000, a);
  const auto sb = buf.sample(20000, b);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    ASSERT_EQ(sa[i].transition.state, sb[i].transition.state);
    counts[static_cast<int>(sa[i].transition.state[0])] += 1;
  }
  for (int c : counts) EXPECT_NEAR(c, 2000, 200);
  ReplayBuffer empty(4);
  EXPECT_THROW(empty.sample(1, a), std::logic_error);
}

TEST(ReplayBufferTest, ConcurrentWriterAndReader) {
  ReplayBuffer buf(64);
  buf.push(make_transition({0.0}, 0, 0.0, true, 0));
  std::thread writer([&] {
    for (int i = 1; i <= 5000; ++i) buf.push(make_transition({double(i)}, 1, 1.0, false, 0));
  });
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    for (const auto& s : buf.sample(16, rng)) ASSERT_EQ(s.transition.state.size(), 1u);
    ASSERT_LE(buf.size(), 64u);
  }
  writer.join();
  EXPECT_EQ(buf.active_count(0), 5001u);
}

TEST(ActorLossTest, NoPenaltyIsNegativeCriticValue) {
  std::mt19937_64 rng(4);
  NetPair actor(make_actor(3, NetworkShape{5, 2}), rng);
  const auto critic = constant_critic(3, 1.0, 2.0);
  const std::vector<double> s{0.1, 0.2, -0.3};
  std::vector<double> grad(actor.online.parameter_count(), 0.0);
  const auto terms = actor_loss(actor.online, critic, s, 0.3, Penalty{PenaltyKind::kMse, 0.0}, grad);
  EXPECT_DOUBLE_EQ(terms.loss, -critic_value(QPair{1.0, 2.0}, terms.a_tilde));
}

TEST(ActorLossTest, EqualHeadsMinimizeAtTarget) {
  // With Q(s,1) = Q(s,0), the loss is alpha T(a, m) + const; grid search.
  const QPair q{1.5, 1.5};
  double best_a = -1, best = INFINITY;
  for (int k = 0; k <= 10000; ++k) {
    const double a = k / 10000.0;
    const double f = -critic_value(q, a) + penalty(Penalty{PenaltyKind::kMse, 1.0}, a, 0.37).value;
    if (f < best) {
      best = f;
      best_a = a;
    }
  }
  EXPECT_NEAR(best_a, 0.37, 1e-12);
}

TEST(CriticLossTest, TerminalFixedPointAndGammaZero) {
  const auto critic = constant_critic(2, 3.0, 5.0);
  std::mt19937_64 rng(6);
  NetPair actor(make_actor(2, NetworkShape{4, 2}), rng);
  const auto target_critic = constant_critic(2, 100.0, 200.0);
  std::vector<double> grad(critic.parameter_count(), 0.0);

  auto t = make_transition({0.2, 0.4}, 1, 5.0, true, 0);
  EXPECT_EQ(critic_loss(critic, actor.target, target_critic, t, 0.9, grad).loss, 0.0);

  t.done = false;
  t.reward = 5.0;
  EXPECT_EQ(critic_loss(critic, actor.target, target_critic, t, 0.0, grad).loss, 0.0);

  t.active = false;
  EXPECT_THROW(critic_loss(critic, actor.target, target_critic, t, 0.9, grad), std::invalid_argument);
}

TEST(CriticLossTest, HandComputedOneStepChain) {
  // Q(s, 0) = 3, target heads (4, 10), target actor output a', reward 2,
  // gamma 0.9: y = 2 + 0.9 (a' 10 + (1 - a') 4), loss = (3 - y)^2.
  const auto critic = constant_critic(2, 3.0, 5.0);
  const auto target_critic = constant_critic(2, 4.0, 10.0);
  std::mt19937_64 rng(7);
  NetPair actor(make_actor(2, NetworkShape{4, 2}), rng);
  const auto t = make_transition({0.5, -0.5}, 0, 2.0, false, 0);
  const double a_next = actor_output(actor.target, t.next_state);
  const double y = 2.0 + 0.9 * (a_next * 10.0 + (1.0 - a_next) * 4.0);
  std::vector<double> grad(critic.parameter_count(), 0.0);
  const auto terms = critic_loss(critic, actor.target, target_critic, t, 0.9, grad);
  EXPECT_NEAR(terms.loss, (3.0 - y) * (3.0 - y), 1e-12);
  EXPECT_NEAR(terms.td_error, 3.0 - y, 1e-12);
  // Only the logged head's bias sees the error.
  const auto& out = critic.layers().back();
  EXPECT_NEAR(grad[out.bias_offset], 2.0 * (3.0 - y), 1e-12);
  EXPECT_EQ(grad[out.bias_offset + 1], 0.0);
}

TEST(BatchReduceTest, ParallelMatchesSerialAndIsThreadInvariant) {
  std::mt19937_64 rng(8);
  std::vector<std::vector<double>> rows(300, std::vector<double>(17));
  for (auto& r : rows) {
    for (auto& x : r) x = std::normal_distribution<double>(0, 1)(rng);
  }
  auto fn = [&](std::size_t i, std::span<double> g) {
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += rows[i][k] * 0.1;
    return rows[i][0];
  };
  std::vector<double> serial(17), par1(17), par4(17);
  const double s = parallel::reduce_gradients_serial(rows.size(), serial, fn);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double p1 = parallel::reduce_gradients_parallel(rows.size(), par1, fn);
  omp_set_num_threads(4);
  const double p4 = parallel::reduce_gradients_parallel(rows.size(), par4, fn);
  omp_set_num_threads(saved);
  EXPECT_EQ(par1, par4);
  EXPECT_EQ(p1, p4);
  EXPECT_NEAR(s, p1, 1e-12);
  for (std::size_t k = 0; k < 17; ++k) EXPECT_NEAR(serial[k], par1[k], 1e-12);
}

TEST(BatchReduceTest, ExceptionsPropagate) {
  std::vector<double> out(2);
  auto bad = [](std::size_t i, std::span<double>) -> double {
    if (i == 7) throw std::runtime_error("boom");
    return 0.0;
  };
  EXPECT_THROW(parallel::reduce_gradients_parallel(20, out, bad), std::runtime_error);
  EXPECT_THROW(parallel::parallel_for(20, [](std::size_t i) {
                 if (i == 3) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TrainerConfig small_trainer(Backbone backbone) {
  TrainerConfig c;
  c.backbone = backbone;
  c.batch_size = 32;
  c.shape = NetworkShape{8, 2};
  c.budget = 30;
  c.seed = 11;
  return c;
}

void fill_one_step(ReplayBuffer& buf, std::size_t n) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = static_cast<int>(i % 2);
    buf.push(make_transition({normal(rng), normal(rng), 1.0}, a, a ? 1.05 : 1.0, i % 3 == 0, i / 100));
  }
}

TEST(TrainerTest, SameSeedSameDiagnostics) {
  for (auto backbone : {Backbone::kDdpg, Backbone::kTd3}) {
    ReplayBuffer buf(1000);
    fill_one_step(buf, 400);
    Trainer a(3, small_trainer(backbone));
    Trainer b(3, small_trainer(backbone));
    for (int k = 0; k < 10; ++k) {
      const auto da = a.train_step(buf);
      const auto db = b.train_step(buf);
      EXPECT_EQ(da.critic_loss, db.critic_loss);
      EXPECT_EQ(da.mean_a_tilde, db.mean_a_tilde);
      EXPECT_EQ(da.mean_td_error, db.mean_td_error);
    }
    EXPECT_EQ(a.export_networks(), b.export_networks());
  }
}

TEST(TrainerTest, SerialAndParallelReductionsAgree) {
  ReplayBuffer buf(1000);
    fill_one_step(buf, 400);
  auto cs = small_trainer(Backbone::kTd3);
  cs.parallel = false;
  Trainer serial(3, cs);
  Trainer par(3, small_trainer(Backbone::kTd3));
  for (int k = 0; k < 5; ++k) {
    const auto ds = serial.train_step(buf);
    const auto dp = par.train_step(buf);
    EXPECT_NEAR(ds.critic_loss, dp.critic_loss, 1e-9);
  }
  const auto a = serial.export_networks();
  const auto b = par.export_networks();
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (std::size_t i = 0; i < a[n].parameter_count(); ++i) {
      EXPECT_NEAR(a[n].parameters()[i], b[n].parameters()[i], 1e-9);
    }
  }
}

TEST(TrainerTest, PolicyDelayFreezesActorOnOddSteps) {
  ReplayBuffer buf(1000);
    fill_one_step(buf, 400);
  Trainer t(3, small_trainer(Backbone::kTd3));
  for (int k = 1; k <= 6; ++k) {
    const auto before = t.actor().online;
    const auto d = t.train_step(buf);
    if (k % 2 == 1) {
      EXPECT_FALSE(d.actor_updated);
      EXPECT_EQ(t.actor().online, before);
    } else {
      EXPECT_TRUE(d.actor_updated);
      EXPECT_NE(t.actor().online, before);
    }
  }
}

TEST(TrainerTest, IdenticalTwinsReduceToDdpgTarget) {
  // One stored transition, so every batch is identical whatever the sampler state.
  ReplayBuffer buf(4);
  buf.push(make_transition({0.3, -0.7, 1.0}, 1, 1.0, false, 0));
  auto td3_cfg = small_trainer(Backbone::kTd3);
  td3_cfg.target_noise = 0.0;
  Trainer td3(3, td3_cfg);
  Trainer ddpg(3, small_trainer(Backbone::kDdpg));
  // Same actor and same first critic; the second critic is a copy.
  ddpg.mutable_actor() = td3.actor();
  ddpg.mutable_critic(0) = td3.critic(0);
  td3.mutable_critic(1) = td3.critic(0);
  td3.train_step(buf);
  ddpg.train_step(buf);
  EXPECT_EQ(td3.critic(0).online, ddpg.critic(0).online);
  EXPECT_EQ(td3.critic(1).online, td3.critic(0).online);
}

TEST(TrainerTest, InactiveTransitionsNeverTrain) {
  ReplayBuffer buf(100);
  auto t = make_transition({1.0, 2.0, 3.0}, 1, 50.0, true, 0);
  t.active = false;
  for (int i = 0; i < 50; ++i) buf.push(t);
  EXPECT_EQ(buf.size(), 0u);
  Trainer trainer(3, small_trainer(Backbone::kDdpg));
  EXPECT_THROW(trainer.train_step(buf), std::logic_error);
}

TEST(TrainerTest, ImportRejectsMismatchedNetworks) {
  Trainer ddpg(3, small_trainer(Backbone::kDdpg));
  Trainer td3(3, small_trainer(Backbone::kTd3));
  EXPECT_THROW(ddpg.import_networks(td3.export_networks()), std::invalid_argument);
  Trainer other(4, small_trainer(Backbone::kDdpg));
  EXPECT_THROW(ddpg.import_networks(other.export_networks()), std::invalid_argument);
  Trainer copy(3, small_trainer(Backbone::kDdpg));
  copy.import_networks(ddpg.export_networks());
  EXPECT_EQ(copy.export_networks(), ddpg.export_networks());
}

TEST(TrainerTest, ConfigValidation) {
  auto c = small_trainer(Backbone::kTd3);
  c.gamma = 1.0;
  EXPECT_THROW(Trainer(3, c), std::invalid_argument);
  c = small_trainer(Backbone::kTd3);
  c.penalty.weight = -1.0;
  EXPECT_THROW(Trainer(3, c), std::invalid_argument);
  EXPECT_EQ(parse_backbone("td3"), Backbone::kTd3);
  EXPECT_THROW(parse_backbone("sac"), std::invalid_argument);
}

}  // namespace
}  // namespace rpaf::prediction
