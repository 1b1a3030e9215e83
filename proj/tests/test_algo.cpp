#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "mrl/algo/checkpoint.hpp"
#include "mrl/algo/dqn.hpp"
#include "mrl/algo/mlp.hpp"
#include "mrl/algo/replay.hpp"
#include "mrl/algo/sumtree.hpp"
#include "mrl/errors.hpp"
#include "test_helpers.hpp"

using namespace mrl;
using namespace mrl::algo;

namespace {

// Second, independent forward implementation used as an oracle.
std::vector<double> reference_forward(const Mlp& net, const std::vector<double>& input) {
  const auto& sizes = net.layer_sizes();
  const auto& p = net.params();
  std::vector<double> cur = input;
  size_t off = 0;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int n_in = sizes[l], n_out = sizes[l + 1];
    std::vector<double> next(n_out);
    for (int o = 0; o < n_out; ++o) {
      double acc = p[off + static_cast<size_t>(n_out) * n_in + o];  // bias
      for (int i = 0; i < n_in; ++i)
        acc += p[off + static_cast<size_t>(o) * n_in + i] * cur[i];
      next[o] = acc;
    }
    if (l + 2 < sizes.size())
      for (auto& v : next) v = std::max(0.0, v);
    cur = std::move(next);
    off += static_cast<size_t>(n_in + 1) * n_out;
  }
  return cur;
}

double loss_for_fd(const Mlp& net, const std::vector<double>& input,
                   const std::vector<double>& coeff) {
  const auto out = net.forward(input);
  double s = 0.0;
  for (size_t i = 0; i < out.size(); ++i) s += coeff[i] * out[i];
  return s;
}

}  // namespace

TEST_CASE("mlp forward basics") {
  Mlp net({3, 4, 2});
  // all-zero parameters -> all-zero output
  auto out = net.forward(std::vector<double>{1.0, -2.0, 0.5});
  CHECK(out == std::vector<double>{0.0, 0.0});

  // single linear layer with identity weights
  Mlp id({3, 3});
  auto& p = id.params();
  p[0 * 3 + 0] = 1.0;
  p[1 * 3 + 1] = 1.0;
  p[2 * 3 + 2] = 1.0;
  std::vector<double> x{0.3, -0.7, 2.0};
  CHECK(id.forward(x) == x);

  CHECK_THROWS_AS(net.forward(std::vector<double>{1.0}), Error);
}

TEST_CASE("mlp forward matches an independent implementation") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Mlp net({5, 9, 7, 3});
    net.init_weights(rng);
    std::vector<double> x(5);
    for (auto& v : x) v = rng.uniform(-2, 2);
    const auto got = net.forward(x);
    const auto want = reference_forward(net, x);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i)
      CHECK(std::abs(got[i] - want[i]) < 1e-12);
  }
}

TEST_CASE("batched forward equals single forward") {
  Rng rng(31);
  Mlp net({4, 16, 16, 6});
  net.init_weights(rng);
  const int B = 7;
  std::vector<double> batch(B * 4);
  for (auto& v : batch) v = rng.uniform(-1, 1);
  Mlp::BatchTrace trace;
  std::vector<double> out;
  net.forward_batch(batch, B, &trace, &out);
  for (int s = 0; s < B; ++s) {
    const auto single = net.forward(
        std::span<const double>(batch.data() + s * 4, 4));
    for (int k = 0; k < 6; ++k)
      CHECK(out[s * 6 + k] == doctest::Approx(single[k]).epsilon(1e-14));
  }
}

TEST_CASE("mlp backward: zero output gradient gives zero parameter gradient") {
  Rng rng(5);
  Mlp net({3, 8, 2});
  net.init_weights(rng);
  auto grad = net.backward(std::vector<double>{0.1, 0.2, 0.3},
                           std::vector<double>{0.0, 0.0});
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("mlp backward matches central finite differences") {
  Rng rng(77);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    Mlp net({4, 8, 8, 3});
    net.init_weights(rng);
    std::vector<double> x(4), coeff(3);
    for (auto& v : x) v = rng.uniform(-1.5, 1.5);
    for (auto& c : coeff) c = rng.uniform(-1.0, 1.0);

    const auto grad = net.backward(x, coeff);
    double max_rel = 0.0;
    for (size_t i = 0; i < net.param_count(); ++i) {
      const double orig = net.params()[i];
      net.params()[i] = orig + h;
      const double up = loss_for_fd(net, x, coeff);
      net.params()[i] = orig - h;
      const double dn = loss_for_fd(net, x, coeff);
      net.params()[i] = orig;
      const double fd = (up - dn) / (2 * h);
      const double rel = std::abs(grad[i] - fd) / std::max({1.0, std::abs(grad[i]), std::abs(fd)});
      max_rel = std::max(max_rel, rel);
    }
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("linear net gradient equals the least-squares closed form") {
  Rng rng(13);
  Mlp net({4, 1});
  net.init_weights(rng);
  std::vector<double> x(4);
  for (auto& v : x) v = rng.uniform(-1, 1);
  const double target = 0.7;
  const double pred = net.forward(x)[0];
  // d/dw (pred - target)^2 = 2 (pred - target) * x
  auto grad = net.backward(x, std::vector<double>{2.0 * (pred - target)});
  for (int i = 0; i < 4; ++i)
    CHECK(grad[i] == doctest::Approx(2.0 * (pred - target) * x[i]).epsilon(1e-10));
  CHECK(grad[4] == doctest::Approx(2.0 * (pred - target)).epsilon(1e-10));
}

TEST_CASE("dueling combine") {
  auto q = dueling_combine(1.0, std::vector<double>{1.0, 2.0, 3.0});
  CHECK(q[0] == doctest::Approx(0.0));
  CHECK(q[1] == doctest::Approx(1.0));
  CHECK(q[2] == doctest::Approx(2.0));

  q = dueling_combine(0.5, std::vector<double>{2.0, 2.0, 2.0});
  for (double v : q) CHECK(v == doctest::Approx(0.5));

  // constant shifts of the advantages cancel
  auto q2 = dueling_combine(1.0, std::vector<double>{11.0, 12.0, 13.0});
  for (size_t i = 0; i < q.size(); ++i) CHECK(q2[i] == doctest::Approx(dueling_combine(1.0, std::vector<double>{1.0, 2.0, 3.0})[i]));

  CHECK_THROWS_AS(dueling_combine(1.0, std::vector<double>{}), Error);
}

TEST_CASE("double dqn target") {
  CHECK(double_dqn_target(1.0, true, 0.99, std::vector<double>{9, 9},
                          std::vector<double>{9, 9}) == doctest::Approx(1.0));
  CHECK(double_dqn_target(1.0, false, 0.9, std::vector<double>{0.2, 0.8},
                          std::vector<double>{0.5, 0.3}) == doctest::Approx(1.27));
}

TEST_CASE("toy MDP targets converge to the value-iteration fixed point") {
  // 4 states on a line, 2 actions (left/right), reward 1 on reaching state 3
  // (terminal), gamma 0.9.
  const int S = 4, A = 2;
  const double gamma = 0.9;
  auto next_state = [](int s, int a) { return a == 0 ? std::max(0, s - 1) : s + 1; };
  auto reward = [](int s, int a) { return (a == 1 && s == 2) ? 1.0 : 0.0; };
  auto terminal = [](int s) { return s == 3; };

  // value-iteration oracle over Q
  std::vector<std::vector<double>> q_star(S, std::vector<double>(A, 0.0));
  for (int it = 0; it < 500; ++it) {
    auto next_q = q_star;
    for (int s = 0; s < 3; ++s)
      for (int a = 0; a < A; ++a) {
        const int sn = next_state(s, a);
        const double vn = terminal(sn) ? 0.0 : std::max(q_star[sn][0], q_star[sn][1]);
        next_q[s][a] = reward(s, a) + gamma * vn;
      }
    q_star = next_q;
  }

  // linear net over one-hot states = a table; plain gradient descent plus
  // periodic target sync, targets from double_dqn_target
  Mlp online({S, A}), target({S, A});
  auto one_hot = [&](int s) {
    std::vector<double> x(S, 0.0);
    x[s] = 1.0;
    return x;
  };
  for (int sync = 0; sync < 200; ++sync) {
    for (int inner = 0; inner < 60; ++inner) {
      for (int s = 0; s < 3; ++s) {
        for (int a = 0; a < A; ++a) {
          const int sn = next_state(s, a);
          const auto x = one_hot(s);
          // plain (non-dueling) nets here, so the algebraic target form applies
          const double y = terminal(sn)
                               ? reward(s, a)
                               : double_dqn_target(reward(s, a), false, gamma,
                                                   online.forward(one_hot(sn)),
                                                   target.forward(one_hot(sn)));
          const double pred = online.forward(x)[a];
          std::vector<double> og(A, 0.0);
          og[a] = 2.0 * (pred - y);
          auto grad = online.backward(x, og);
          for (size_t i = 0; i < grad.size(); ++i) online.params()[i] -= 0.25 * grad[i];
        }
      }
    }
    target.params() = online.params();
  }
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < A; ++a)
      CHECK(std::abs(online.forward(one_hot(s))[a] - q_star[s][a]) < 1e-6);
}

TEST_CASE("sum tree basics and documented examples") {
  SumTree t(4);
  t.update(0, 1.0);
  t.update(1, 2.0);
  t.update(2, 3.0);
  t.update(3, 4.0);
  CHECK(t.total() == doctest::Approx(10.0));
  CHECK(t.sample(2.5) == 1);  // leaf 1 owns [1, 3)
  t.update(0, 5.0);
  CHECK(t.total() == doctest::Approx(14.0));
  CHECK_THROWS_AS(t.sample(14.0), RangeError);
  CHECK_THROWS_AS(t.sample(-0.1), RangeError);
  CHECK_THROWS_AS(t.update(0, -1.0), RangeError);
  CHECK_THROWS_AS(t.update(9, 1.0), RangeError);
}

TEST_CASE("sum tree agrees exactly with a linear prefix scan") {
  Rng rng(404);
  for (int round = 0; round < 50; ++round) {
    const size_t n = 1 + rng.next_u64() % 60;
    SumTree tree(n);
    std::vector<double> prios(n, 0.0);
    for (int op = 0; op < 200; ++op) {
      const size_t leaf = rng.next_u64() % n;
      const double p = rng.uniform() < 0.15 ? 0.0 : rng.uniform(0.0, 5.0);
      tree.update(leaf, p);
      prios[leaf] = p;

      if (tree.total() <= 0.0) continue;
      const double prefix = rng.uniform() * tree.total();
      if (prefix >= tree.total()) continue;
      const size_t got = tree.sample(prefix);

      // linear prefix scan: leaf i owns [sum(p_0..p_{i-1}), sum(p_0..p_i))
      double rem = prefix;
      size_t want = n - 1;
      for (size_t i = 0; i < n; ++i) {
        if (rem < prios[i]) {
          want = i;
          break;
        }
        rem -= prios[i];
      }
      CHECK(got == want);
    }
  }
}

TEST_CASE("sum tree root stays consistent over many updates") {
  Rng rng(88);
  SumTree tree(4096);
  std::vector<double> prios(4096, 0.0);
  for (int i = 0; i < 1000000; ++i) {
    const size_t leaf = rng.next_u64() % 4096;
    const double p = rng.uniform(0.0, 2.0);
    tree.update(leaf, p);
    prios[leaf] = p;
  }
  double sum = 0.0;
  for (double p : prios) sum += p;
  CHECK(std::abs(tree.total() - sum) < 1e-9 * std::max(1.0, sum));
}

TEST_CASE("prioritized replay: weights, readiness, refresh") {
  PrioritizedReplay replay(64, 0.6, 1e-3);
  Rng rng(3);

  Transition t;
  t.obs = {0.0};
  t.next_obs = {0.0};

  CHECK_FALSE(replay.sample(4, 0.4, rng).has_value());  // not ready

  for (int i = 0; i < 16; ++i) replay.add(t, 1.0);  // uniform priorities
  auto batch = replay.sample(8, 0.4, rng);
  REQUIRE(batch.has_value());
  for (double w : batch->weights) CHECK(w == doctest::Approx(1.0));

  const double before = replay.priority(batch->indices[0]);
  replay.update_priority(batch->indices[0], 9.0);
  CHECK(replay.priority(batch->indices[0]) != doctest::Approx(before));
  CHECK(replay.priority(batch->indices[0]) ==
        doctest::Approx(std::pow(9.0 + 1e-3, 0.6)));
}

TEST_CASE("replay sampling frequency follows priority^alpha") {
  const double alpha = 0.6;
  PrioritizedReplay replay(8, alpha, 1e-9);
  Rng rng(17);
  Transition t;
  t.obs = {0.0};
  t.next_obs = {0.0};
  const std::vector<double> tds = {0.5, 1.0, 2.0, 4.0};
  for (double td : tds) replay.add(t, td);

  std::vector<double> expected(4);
  double z = 0.0;
  for (int i = 0; i < 4; ++i) z += std::pow(tds[i] + 1e-9, alpha);
  for (int i = 0; i < 4; ++i) expected[i] = std::pow(tds[i] + 1e-9, alpha) / z;

  std::vector<int> counts(4, 0);
  const int draws = 100000;
  const int batch = 4;
  for (int i = 0; i < draws / batch; ++i) {
    auto b = replay.sample(batch, 0.4, rng);
    for (size_t idx : b->indices) counts[idx]++;
  }
  for (int i = 0; i < 4; ++i) {
    const double freq = static_cast<double>(counts[i]) / draws;
    CHECK(std::abs(freq - expected[i]) < 0.02);
  }
}

TEST_CASE("replay ring buffer overwrites at capacity") {
  PrioritizedReplay replay(4, 0.6, 1e-3);
  Transition t;
  t.obs = {0.0};
  t.next_obs = {0.0};
  for (int i = 0; i < 6; ++i) {
    t.reward = i;
    replay.add(t, 0.1);
  }
  CHECK(replay.size() == 4);
  CHECK(replay.at(0).reward == doctest::Approx(4.0));  // slot 0 overwritten by #5
  CHECK(replay.at(1).reward == doctest::Approx(5.0));
}

namespace {
DqnHyper small_hyper() {
  DqnHyper h;
  h.obs_dim = 4;
  h.n_actions = 3;
  h.hidden = {16, 16};
  h.batch_size = 8;
  h.learn_start = 8;
  h.replay_capacity = 256;
  h.learning_rate = 1e-3;
  h.target_sync_steps = 50;
  h.obs_scale = 1.0;
  return h;
}

Transition make_transition(Rng& rng, int n_obs, int n_actions) {
  Transition t;
  t.obs.resize(n_obs);
  t.next_obs.resize(n_obs);
  for (auto& v : t.obs) v = rng.uniform(-1, 1);
  for (auto& v : t.next_obs) v = rng.uniform(-1, 1);
  t.action = rng.uniform_int(0, n_actions - 1);
  t.reward = rng.uniform(-1, 1);
  t.done = rng.uniform() < 0.1;
  return t;
}
}  // namespace

TEST_CASE("epsilon-greedy selection: argmax, frequencies, scale invariance") {
  DqnAgent agent(small_hyper(), 99);
  std::vector<double> obs{0.2, -0.4, 0.8, 0.1};

  // eps = 0: argmax of the dueling Q
  const auto q = agent.q_values(obs);
  const int greedy = static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
  for (int i = 0; i < 10; ++i) CHECK(agent.select_action(obs, 0.0) == greedy);

  // eps = 1: near-uniform over the 3 actions
  std::vector<int> counts(3, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[agent.select_action(obs, 1.0)]++;
  for (int c : counts)
    CHECK(std::abs(static_cast<double>(c) / draws - 1.0 / 3) < 0.01);

  // positive scaling of the head layer leaves the argmax unchanged
  DqnAgent scaled(small_hyper(), 99);
  auto& params = scaled.online_mut().params();
  const auto& sizes = scaled.online().layer_sizes();
  size_t head_off = 0;
  for (size_t l = 0; l + 2 < sizes.size(); ++l)
    head_off += static_cast<size_t>(sizes[l] + 1) * sizes[l + 1];
  for (size_t i = head_off; i < params.size(); ++i) params[i] *= 3.0;
  CHECK(scaled.select_action(obs, 0.0) == greedy);
}

TEST_CASE("training drives the TD error of a repeated transition toward zero") {
  auto h = small_hyper();
  h.learn_start = 8;
  DqnAgent agent(h, 7);
  Transition t;
  t.obs = {0.5, -0.5, 0.2, 0.0};
  t.next_obs = {0.0, 0.0, 0.0, 0.0};
  t.action = 1;
  t.reward = 2.0;
  t.done = true;
  for (int i = 0; i < 8; ++i) agent.store(t);

  const double q0 = agent.q_values(t.obs)[1];
  double first_loss = 0.0, last_loss = 0.0;
  for (int i = 0; i < 500; ++i) {
    auto loss = agent.train_step(0.4);
    REQUIRE(loss.has_value());
    if (i == 0) first_loss = *loss;
    last_loss = *loss;
  }
  const double q1 = agent.q_values(t.obs)[1];
  CHECK(std::abs(q1 - 2.0) < std::abs(q0 - 2.0));
  CHECK(std::abs(q1 - 2.0) < 0.05);
  CHECK(last_loss < first_loss);
}

TEST_CASE("gamma=0 terminal-only batch loss is the weighted mean squared error") {
  auto h = small_hyper();
  h.gamma = 0.0;
  h.learn_start = 8;
  h.batch_size = 8;
  DqnAgent agent(h, 21);
  Rng rng(5);
  std::vector<Transition> stored;
  for (int i = 0; i < 8; ++i) {
    auto t = make_transition(rng, 4, 3);
    t.done = true;
    stored.push_back(t);
    agent.store(t);
  }
  // all priorities equal? no; compute expected loss by re-sampling logic is
  // fragile, so check against the agent's own pre-step Q values instead
  std::vector<double> qs;
  for (const auto& t : stored) qs.push_back(agent.q_values(t.obs)[t.action]);
  auto loss = agent.train_step(0.4);
  REQUIRE(loss.has_value());
  // every sampled transition is terminal, so each TD error is q - r; the
  // sampled subset and weights are internal, but the loss must be bounded by
  // the largest (q - r)^2
  double max_sq = 0.0;
  for (size_t i = 0; i < stored.size(); ++i)
    max_sq = std::max(max_sq, (qs[i] - stored[i].reward) * (qs[i] - stored[i].reward));
  CHECK(*loss <= max_sq + 1e-9);
  CHECK(*loss >= 0.0);
}

TEST_CASE("sampled priorities refresh after a train step") {
  auto h = small_hyper();
  DqnAgent agent(h, 31);
  Rng rng(6);
  for (int i = 0; i < 16; ++i) agent.store(make_transition(rng, 4, 3));

  // the first step recomputes TDs with the same parameters they were stored
  // under, so priorities only move once the parameters have moved
  REQUIRE(agent.train_step(0.4).has_value());

  std::vector<double> before;
  for (size_t i = 0; i < agent.replay_size(); ++i)
    before.push_back(agent.replay().priority(i));

  for (int k = 0; k < 3; ++k) REQUIRE(agent.train_step(0.4).has_value());

  int changed = 0;
  for (size_t i = 0; i < agent.replay_size(); ++i)
    if (agent.replay().priority(i) != before[i]) ++changed;
  CHECK(changed > 0);
}

TEST_CASE("target network is frozen between syncs") {
  auto h = small_hyper();
  h.target_sync_steps = 1000000;  // never within this test
  DqnAgent agent(h, 44);
  Rng rng(9);
  for (int i = 0; i < 32; ++i) agent.store(make_transition(rng, 4, 3));

  std::vector<double> obs{0.1, 0.2, 0.3, 0.4};
  const auto before = agent.target().forward(obs);
  for (int i = 0; i < 20; ++i) agent.train_step(0.4);
  const auto after = agent.target().forward(obs);
  CHECK(before == after);  // bit-identical

  agent.sync_target();
  CHECK(agent.target().params() == agent.online().params());
}

TEST_CASE("fixed seed gives identical parameter trajectories") {
  auto h = small_hyper();
  DqnAgent a(h, 123), b(h, 123);
  Rng rng_a(55), rng_b(55);
  for (int i = 0; i < 64; ++i) {
    a.store(make_transition(rng_a, 4, 3));
    b.store(make_transition(rng_b, 4, 3));
  }
  for (int i = 0; i < 50; ++i) {
    a.train_step(0.5);
    b.train_step(0.5);
  }
  CHECK(a.online().params() == b.online().params());
}

TEST_CASE("divergence guard aborts on a blown-up loss") {
  auto h = small_hyper();
  h.learning_rate = 1e-3;
  DqnAgent agent(h, 77);
  Transition t;
  t.obs = {1.0, 1.0, 1.0, 1.0};
  t.next_obs = {0.0, 0.0, 0.0, 0.0};
  t.action = 0;
  t.reward = 1e200;  // loss overflows to inf
  t.done = true;
  for (int i = 0; i < 8; ++i) agent.store(t);
  CHECK_THROWS_AS(
      {
        for (int i = 0; i < 50; ++i) agent.train_step(0.4);
      },
      TrainingDivergedError);
}

TEST_CASE("multi-dqn joint selection and storage") {
  AlgorithmConfig cfg;
  cfg.hidden = {16, 16};
  cfg.batch_size = 4;
  cfg.learn_start = 4;
  auto sc = mrl_test::three_robots();
  auto algo = make_algorithm(cfg, sc, 9);
  REQUIRE(algo->n_agents() == 3);
  CHECK(algo->n_actions() == 5);
  CHECK(algo->obs_dim() == 17);

  env::JointObservation obs;
  obs.per_robot.assign(3, std::vector<double>(17, 1.0));
  auto action = algo->select_actions(obs, 0.0);
  CHECK(action.discrete.size() == 3);

  algo->store_transitions(obs, action, {0.1, 0.2, 0.3}, obs, false);
  auto* dqn = dynamic_cast<MultiDqn*>(algo.get());
  REQUIRE(dqn != nullptr);
  for (int i = 0; i < 3; ++i) CHECK(dqn->agent(i).replay_size() == 1);

  CHECK_THROWS_AS(make_algorithm(AlgorithmConfig{.name = "nope"}, sc, 1), NotFoundError);
}

TEST_CASE("parameter sharing uses one agent for every robot") {
  AlgorithmConfig cfg;
  cfg.hidden = {16, 16};
  cfg.parameter_sharing = true;
  cfg.batch_size = 4;
  cfg.learn_start = 4;
  auto sc = mrl_test::three_robots();
  auto algo = make_algorithm(cfg, sc, 9);
  CHECK(algo->n_agents() == 1);
  auto* dqn = dynamic_cast<MultiDqn*>(algo.get());
  env::JointObservation obs;
  obs.per_robot.assign(3, std::vector<double>(17, 0.5));
  auto action = algo->select_actions(obs, 0.0);
  algo->store_transitions(obs, action, {0, 0, 0}, obs, false);
  CHECK(dqn->agent(0).replay_size() == 3);
}

TEST_CASE("epsilon schedule is linear with a floor") {
  AlgorithmConfig cfg;
  cfg.hidden = {8};
  cfg.epsilon_start = 1.0;
  cfg.epsilon_final = 0.05;
  cfg.epsilon_decay_episodes = 500;
  MultiDqn dqn(cfg, 1, 17, 5.0, 3);
  CHECK(dqn.epsilon_for_episode(0) == doctest::Approx(1.0));
  CHECK(dqn.epsilon_for_episode(250) == doctest::Approx(0.525));
  CHECK(dqn.epsilon_for_episode(500) == doctest::Approx(0.05));
  CHECK(dqn.epsilon_for_episode(5000) == doctest::Approx(0.05));
}

TEST_CASE("checkpoint round trip is bit-exact") {
  AlgorithmConfig cfg;
  cfg.hidden = {16, 16};
  auto sc = mrl_test::three_robots();
  MultiDqn dqn(cfg, 3, 17, 5.0, 1234);
  const auto image = dqn.parameter_image();

  const std::string path = "/tmp/mrl_test_ckpt.mrl";
  save_checkpoint(dqn, "scenario1", path);
  auto loaded = load_checkpoint(path);
  CHECK(loaded.scenario_name == "scenario1");
  CHECK(loaded.seed == 1234);
  CHECK(loaded.n_robots == 3);
  CHECK(loaded.algorithm->parameter_image() == image);

  ensure_compatible(loaded, sc);  // must not throw
}

TEST_CASE("checkpoint load failures are distinct") {
  AlgorithmConfig cfg;
  cfg.hidden = {8};
  MultiDqn dqn(cfg, 3, 17, 5.0, 5);
  const std::string path = "/tmp/mrl_test_ckpt2.mrl";
  save_checkpoint(dqn, "s", path);

  auto mutate = [&](size_t offset, char value, CheckpointError::Kind want) {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bytes[offset] = value;
    const std::string mpath = path + ".mut";
    std::ofstream out(mpath, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    try {
      load_checkpoint(mpath);
      FAIL("expected a checkpoint error");
    } catch (const CheckpointError& e) {
      CHECK(e.kind() == want);
    }
  };
  mutate(0, 'X', CheckpointError::Kind::BadMagic);

  // truncation
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() - 9);
    const std::string tpath = path + ".trunc";
    std::ofstream out(tpath, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    try {
      load_checkpoint(tpath);
      FAIL("expected a checkpoint error");
    } catch (const CheckpointError& e) {
      CHECK(e.kind() == CheckpointError::Kind::Truncated);
    }
  }

  // robot-count mismatch against a 2-robot scenario
  auto loaded = load_checkpoint(path);
  auto sc = mrl_test::three_robots();
  sc.robots.pop_back();
  sc.goals.pop_back();
  try {
    ensure_compatible(loaded, sc);
    FAIL("expected a checkpoint error");
  } catch (const CheckpointError& e) {
    CHECK(e.kind() == CheckpointError::Kind::ArchMismatch);
  }

  CHECK_THROWS_AS(load_checkpoint("/tmp/does_not_exist.mrl"), CheckpointError);
}
