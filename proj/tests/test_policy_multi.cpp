#include <doctest.h>

#include <cmath>
#include <vector>

#include "e3lab/env.hpp"
#include "e3lab/policy_multi.hpp"
#include "e3lab/regret.hpp"

using namespace e3lab;

namespace {

const std::vector<std::vector<double>> kExampleMatrix{{0.2, 0.25, 0.3}, {0.4, 0.6, 0.5}, {0.7, 0.9, 0.8}};

TeamConfig team_config(IndexKind kind, int m, int n, int gamma, ExplorationCharge charge, double c = 1.0) {
  TeamConfig tc;
  tc.kind = kind;
  tc.players = m;
  tc.arms = n;
  tc.gamma = GammaSchedule::known(gamma);
  tc.epsilon = EpsilonSchedule::fixed(0.001);
  tc.cost = CostModel::constant(c);
  tc.charge = charge;
  return tc;
}

// Drives a team for whole epochs; returns per-slot actions by phase.
struct Drive {
  std::int64_t explore_collisions = 0;
  std::int64_t exploit_collisions = 0;
  double cost = 0.0;
  std::vector<std::int64_t> epoch_ends;
};

Drive drive(DecentralizedTeam& team, const BanditInstance& inst, int epochs, std::uint32_t rep = 0) {
  std::vector<RngStream> rewards;
  for (int i = 0; i < inst.players(); ++i) {
    rewards.emplace_back(5, StreamKey{Purpose::Reward, static_cast<std::uint32_t>(i), rep});
  }
  Drive d;
  std::vector<double> drawn(inst.players());
  for (std::int64_t t = 1; static_cast<int>(d.epoch_ends.size()) < epochs; ++t) {
    const auto phase = team.phase();
    const auto a = team.act();
    for (int i = 0; i < inst.players(); ++i) drawn[i] = sample_reward(inst.arm(i, a[i]), rewards[i]);
    const int coll = count_collisions(a);
    (phase == Phase::Explore ? d.explore_collisions : d.exploit_collisions) += coll;
    const auto ev = team.observe(a, resolve_collisions(a, drawn));
    d.cost += ev.cost;
    if (ev.epoch_completed) d.epoch_ends.push_back(t);
  }
  return d;
}

}  // namespace

TEST_CASE("multiplayer gamma") {
  CHECK(gamma_multi(3, 0.15, 0.001) == 845);
  CHECK(gamma_beta_multi(3, 0.15, 0.001) == 3378);
  CHECK(gamma_multi(1, 0.1, 1e-13) == 200);
  CHECK(gamma_beta_multi(1, 0.1, 1e-13) == 800);
  CHECK_THROWS_AS(gamma_multi(3, 0.15, 0.15 / 4), std::invalid_argument);
  CHECK_THROWS_AS(gamma_beta_multi(3, 0.15, 0.15 / 4), std::invalid_argument);
  CHECK_THROWS(gamma_multi(3, 0.15, 0.0));
  try {
    gamma_multi(2, 0.3, 0.2);
    FAIL("expected a precondition error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("eps < delta_min/(M+1)") != std::string::npos);
  }
}

TEST_CASE("epsilon schedules") {
  CHECK(epsilon_decay(2, 0.5) == doctest::Approx(1.0));
  CHECK(epsilon_decay(65536, 0.5) == doctest::Approx(0.25));
  double prev = 2.0;
  for (std::int64_t t = 2; t < (std::int64_t{1} << 40); t *= 3) {
    const double e = epsilon_decay(t, 0.3);
    CHECK(e <= prev);
    CHECK(e > 0.0);
    prev = e;
  }
  CHECK(EpsilonSchedule::fixed(0.01).at(12345) == 0.01);
  CHECK_NOTHROW(EpsilonSchedule::fixed_checked(0.001, 0.15, 3));
  CHECK_THROWS(EpsilonSchedule::fixed_checked(0.0375, 0.15, 3));
  CHECK_THROWS(EpsilonSchedule::fixed(0.0));
  CHECK_THROWS(EpsilonSchedule::decaying(1.0));
  CHECK(EpsilonSchedule::decaying(0.5).at(65536) == doctest::Approx(0.25));
}

TEST_CASE("cost models") {
  CHECK(CostModel::constant(2.0).unit_cost(0.1) == 2.0);
  CHECK(CostModel::inverse_epsilon().unit_cost(0.01) == doctest::Approx(100.0));
  CHECK(CostModel::constant(1.0).epoch_charge(3, 3, 0.001) == 9.0);
  CHECK(CostModel::inverse_epsilon().unit_cost(1e-6) > CostModel::inverse_epsilon().unit_cost(1e-3));
  CHECK_THROWS(CostModel::constant(-1.0));
}

TEST_CASE("staggered exploration never collides") {
  PlayerState p0(0, 3), p1(1, 3);
  EpochClock clock(3, GammaSchedule::known(1));
  std::vector<int> a0, a1;
  for (int k = 0; k < 3; ++k) {
    a0.push_back(de3_act(p0, clock));
    a1.push_back(de3_act(p1, clock));
    clock.advance();
  }
  CHECK(a0 == std::vector<int>{0, 1, 2});
  CHECK(a1 == std::vector<int>{1, 2, 0});
}

TEST_CASE("zero exploration collisions for random team shapes") {
  RngStream s(31, {Purpose::Test, 0, 0});
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(s.uniform() * 5);
    const int m = 1 + static_cast<int>(s.uniform() * n);
    const int gamma = 1 + static_cast<int>(s.uniform() * 4);
    std::vector<std::vector<double>> means(m, std::vector<double>(n));
    for (auto& r : means) {
      for (auto& x : r) x = s.uniform();
    }
    const auto inst = BanditInstance::multi_bernoulli(means);
    for (auto charge : {ExplorationCharge::Actual, ExplorationCharge::Paper}) {
      for (auto kind : {IndexKind::SampleMean, IndexKind::Posterior}) {
        DecentralizedTeam team(team_config(kind, m, n, gamma, charge), 3, trial);
        const auto d = drive(team, inst, 5, trial);
        CHECK(d.explore_collisions == 0);
        CHECK(d.exploit_collisions == 0);
      }
    }
  }
}

TEST_CASE("exploitation plays the matched arm and each player records gamma plays per arm") {
  const auto inst = BanditInstance::multi_bernoulli(kExampleMatrix);
  for (auto charge : {ExplorationCharge::Actual, ExplorationCharge::Paper}) {
    DecentralizedTeam team(team_config(IndexKind::SampleMean, 3, 3, 4, charge), 1, 0);
    std::vector<RngStream> rewards;
    for (int i = 0; i < 3; ++i) rewards.emplace_back(1, StreamKey{Purpose::Reward, static_cast<std::uint32_t>(i), 0});
    std::vector<double> drawn(3);
    int epochs = 0;
    while (epochs < 4) {
      const auto phase = team.phase();
      const auto a = team.act();
      if (phase == Phase::Exploit) {
        CHECK(a == team.last_matching()->matching.arm_of_player);
      }
      for (int i = 0; i < 3; ++i) drawn[i] = sample_reward(inst.arm(i, a[i]), rewards[i]);
      const auto ev = team.observe(a, resolve_collisions(a, drawn));
      if (ev.exploration_completed) {
        for (const auto& p : team.players()) {
          for (int j = 0; j < 3; ++j) CHECK(p.counts[j] == 4 * (epochs + 1));
        }
      }
      if (ev.epoch_completed) ++epochs;
    }
    CHECK(team.matchings() == 4);
  }
}

TEST_CASE("multiplayer epoch boundaries follow the accounting mode") {
  const auto inst = BanditInstance::multi_bernoulli(kExampleMatrix);
  for (auto charge : {ExplorationCharge::Actual, ExplorationCharge::Paper}) {
    const std::int64_t explore = (charge == ExplorationCharge::Paper ? 3 : 1) * 3 * 5;
    DecentralizedTeam team(team_config(IndexKind::SampleMean, 3, 3, 5, charge), 2, 0);
    const auto d = drive(team, inst, 10);
    for (int l = 1; l <= 10; ++l) {
      CHECK(d.epoch_ends[l - 1] == explore * l + (std::int64_t{1} << (l + 1)) - 2);
    }
  }
}

TEST_CASE("cost is charged once per matching") {
  const auto inst = BanditInstance::multi_bernoulli(kExampleMatrix);
  DecentralizedTeam team(team_config(IndexKind::Posterior, 3, 3, 3, ExplorationCharge::Paper, 1.0), 4, 0);
  const auto d = drive(team, inst, 7);
  CHECK(team.matchings() == 7);
  CHECK(d.cost == doctest::Approx(3 * 3 * 1.0 * 7));
}

TEST_CASE("epoch matching on the exact means") {
  const ValueMatrix v(kExampleMatrix);
  EpochClock clock(3, GammaSchedule::known(1));
  const auto r = run_epoch_matching(v, EpsilonSchedule::fixed(0.001), CostModel::constant(1.0), clock);
  CHECK(r.matching.surplus(v) >= 1.599);
  CHECK(r.epsilon == 0.001);
  CHECK(r.cost == 9.0);
  CHECK(r.comm_slots == r.trace.iterations * 3);

  const auto inv = run_epoch_matching(v, EpsilonSchedule::fixed(0.01), CostModel::inverse_epsilon(), clock);
  CHECK(inv.cost == doctest::Approx(900.0));
}

TEST_CASE("teams with equal seeds make identical matchings") {
  const auto inst = BanditInstance::multi_bernoulli(kExampleMatrix);
  DecentralizedTeam a(team_config(IndexKind::Posterior, 3, 3, 2, ExplorationCharge::Paper), 8, 3);
  DecentralizedTeam b(team_config(IndexKind::Posterior, 3, 3, 2, ExplorationCharge::Paper), 8, 3);
  drive(a, inst, 6, 3);
  drive(b, inst, 6, 3);
  CHECK(a.players() == b.players());
  CHECK(a.last_matching()->matching == b.last_matching()->matching);
  CHECK(a.last_matching()->trace == b.last_matching()->trace);
}

TEST_CASE("posterior draws stay inside the unit interval") {
  const auto inst = BanditInstance::multi_bernoulli(kExampleMatrix);
  DecentralizedTeam team(team_config(IndexKind::Posterior, 3, 3, 2, ExplorationCharge::Actual), 9, 0);
  drive(team, inst, 3);
  for (const auto& p : team.players()) {
    for (int j = 0; j < 3; ++j) {
      CHECK(p.theta[j] > 0.0);
      CHECK(p.theta[j] < 1.0);
      CHECK(p.successes[j] + p.failures[j] == p.counts[j]);
    }
  }
}

TEST_CASE("suboptimal matching frequency respects the exponential tail") {
  const auto inst = BanditInstance::multi_bernoulli(kExampleMatrix);
  const auto gaps = gap_summary(inst);
  const int gamma = gamma_multi(3, gaps.delta_min, 0.001);
  const int reps = 150;
  const int epochs = 4;
  std::vector<int> wrong(epochs + 1, 0);
  for (int r = 0; r < reps; ++r) {
    auto tc = team_config(IndexKind::SampleMean, 3, 3, gamma, ExplorationCharge::Paper);
    DecentralizedTeam team(tc, 77, static_cast<std::uint32_t>(r));
    std::vector<RngStream> rewards;
    for (int i = 0; i < 3; ++i) {
      rewards.emplace_back(77, StreamKey{Purpose::Reward, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(r)});
    }
    std::vector<double> drawn(3);
    while (team.epoch() <= epochs) {
      const int l = team.epoch();
      const auto a = team.act();
      for (int i = 0; i < 3; ++i) drawn[i] = sample_reward(inst.arm(i, a[i]), rewards[i]);
      const auto ev = team.observe(a, resolve_collisions(a, drawn));
      if (ev.exploration_completed) {
        const auto& k = team.last_matching()->matching.arm_of_player;
        if (assignment_value(inst, k) < gaps.optimal_surplus - kTieTolerance) ++wrong[l];
      }
    }
  }
  for (int l = 1; l <= epochs; ++l) {
    const double bound = 9 * 2 * std::exp(-static_cast<double>(l));
    CHECK(static_cast<double>(wrong[l]) / reps <= bound + 3 * std::sqrt(bound / reps) + 1e-3);
  }
}
