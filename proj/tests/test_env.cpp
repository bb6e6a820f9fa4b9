#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "e3lab/assignments.hpp"
#include "e3lab/env.hpp"
#include "e3lab/rng.hpp"

using namespace e3lab;

namespace {

RngStream test_stream(std::uint32_t player = 0, std::uint64_t seed = 42) {
  return RngStream(seed, StreamKey{Purpose::Test, player, 0});
}

}  // namespace

TEST_CASE("rng streams are reproducible and keyed") {
  auto a = test_stream(0);
  auto b = test_stream(0);
  auto c = test_stream(1);
  int same_as_c = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    if (x == c.uniform()) ++same_as_c;
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(same_as_c == 0);
  CHECK(derive_seed(1, {Purpose::Reward, 0, 0}) != derive_seed(1, {Purpose::Trial, 0, 0}));
  CHECK(derive_seed(1, {Purpose::Reward, 0, 0}) != derive_seed(1, {Purpose::Reward, 0, 1}));
  CHECK(derive_seed(1, {Purpose::Reward, 0, 0}) != derive_seed(2, {Purpose::Reward, 0, 0}));
}

TEST_CASE("independent substreams are uncorrelated") {
  auto a = test_stream(0);
  auto b = test_stream(1);
  const int n = 100000;
  double sa = 0, sb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform() - 0.5;
    const double y = b.uniform() - 0.5;
    sa += x;
    sb += y;
    sab += x * y;
  }
  const double corr = (sab / n - (sa / n) * (sb / n)) / (1.0 / 12.0);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(n));
}

TEST_CASE("arm model validates its mean") {
  CHECK_THROWS_AS(ArmModel(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(ArmModel(1.1), std::invalid_argument);
  CHECK_NOTHROW(ArmModel(0.0));
  CHECK_NOTHROW(ArmModel(1.0, RewardFamily::Uniform));
  CHECK(reward_family_from_string(to_string(RewardFamily::Uniform)) == RewardFamily::Uniform);
  CHECK_THROWS(reward_family_from_string("gaussian"));
}

TEST_CASE("degenerate bernoulli arms") {
  auto s = test_stream();
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_reward(ArmModel(1.0), s) == 1.0);
    CHECK(sample_reward(ArmModel(0.0), s) == 0.0);
  }
}

TEST_CASE("bernoulli sample mean matches the declared mean") {
  auto s = test_stream();
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += sample_reward(ArmModel(0.9), s);
  CHECK(std::abs(sum / n - 0.9) <= 3.0 * std::sqrt(0.09 / n));
}

TEST_CASE("every family draws inside [0,1] with the declared mean") {
  auto s = test_stream(3);
  for (auto fam : {RewardFamily::Bernoulli, RewardFamily::Uniform}) {
    for (double mu : {0.0, 0.05, 0.3, 0.5, 0.77, 1.0}) {
      const ArmModel m(mu, fam);
      const int n = 50000;
      double sum = 0;
      for (int i = 0; i < n; ++i) {
        const double r = sample_reward(m, s);
        REQUIRE(r >= 0.0);
        REQUIRE(r <= 1.0);
        sum += r;
      }
      CHECK(std::abs(sum / n - mu) <= 4.0 * std::sqrt(0.25 / n) + 1e-12);
    }
  }
}

TEST_CASE("collision resolution") {
  const std::vector<int> a{0, 0, 1};
  const std::vector<double> d{0.7, 0.9, 0.5};
  CHECK(resolve_collisions(a, d) == std::vector<double>{0, 0, 0.5});
  CHECK(count_collisions(a) == 2);

  const std::vector<int> distinct{2, 0, 1};
  CHECK(resolve_collisions(distinct, d) == d);
  CHECK(count_collisions(distinct) == 0);

  const std::vector<int> one{1};
  const std::vector<double> d1{0.3};
  CHECK(resolve_collisions(one, d1) == d1);

  const std::vector<int> idle{kNoAction, kNoAction, 0};
  CHECK(resolve_collisions(idle, d) == std::vector<double>{0, 0, 0.5});
  CHECK(count_collisions(idle) == 0);
}

TEST_CASE("collision resolution is idempotent and permutation equivariant") {
  auto s = test_stream(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(s.uniform() * 5);
    const int n = 2 + static_cast<int>(s.uniform() * 4);
    std::vector<int> actions(m);
    std::vector<double> drawn(m);
    for (int i = 0; i < m; ++i) {
      actions[i] = static_cast<int>(s.uniform() * (n + 1)) - 1;
      drawn[i] = s.uniform();
    }
    const auto once = resolve_collisions(actions, drawn);
    CHECK(resolve_collisions(actions, once) == once);
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), s.engine());
    std::vector<int> pa(m);
    std::vector<double> pd(m);
    for (int i = 0; i < m; ++i) {
      pa[i] = actions[perm[i]];
      pd[i] = drawn[perm[i]];
    }
    const auto permuted = resolve_collisions(pa, pd);
    for (int i = 0; i < m; ++i) CHECK(permuted[i] == once[perm[i]]);
  }
}

TEST_CASE("single-mode gap summary on the four-arm instance") {
  const auto inst = BanditInstance::single_bernoulli({0.1, 0.5, 0.6, 0.9});
  const auto g = gap_summary(inst);
  CHECK(g.best_arm == 3);
  CHECK(g.gaps[0] == doctest::Approx(0.8));
  CHECK(g.gaps[1] == doctest::Approx(0.4));
  CHECK(g.gaps[2] == doctest::Approx(0.3));
  CHECK(g.gaps[3] == 0.0);
  CHECK(g.delta_min == doctest::Approx(0.3));
  CHECK(g.delta_max == doctest::Approx(0.8));
  CHECK(g.has_strict_gap);
  CHECK(g.suboptimal_gaps().size() == 3);
}

TEST_CASE("multi-mode gap summary on the three-by-three instance") {
  const auto inst = BanditInstance::multi_bernoulli({{0.2, 0.25, 0.3}, {0.4, 0.6, 0.5}, {0.7, 0.9, 0.8}});
  const auto g = gap_summary(inst);
  CHECK(g.optimal_surplus == doctest::Approx(1.6));
  CHECK(g.delta_min == doctest::Approx(0.15));
  CHECK(g.delta_max == doctest::Approx(0.15));
  CHECK(g.optimal_matchings.size() == 4);
  CHECK(g.optimal_matchings.front() == std::vector<int>{0, 1, 2});
  CHECK(std::is_sorted(g.optimal_matchings.begin(), g.optimal_matchings.end()));
}

TEST_CASE("gap summary without a strict gap") {
  const auto inst = BanditInstance::multi_bernoulli({{0.5, 0.5}, {0.5, 0.5}});
  const auto g = gap_summary(inst);
  CHECK_FALSE(g.has_strict_gap);
  CHECK(g.delta_min == 0.0);
  CHECK(g.delta_max == 0.0);
  CHECK_THROWS_AS(gap_summary(inst, true), std::invalid_argument);
}

TEST_CASE("instance validation") {
  CHECK_THROWS(BanditInstance::single_bernoulli({0.5}));
  CHECK_THROWS(BanditInstance::multi_bernoulli({{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}}));
  CHECK_THROWS(BanditInstance::multi_bernoulli({{0.1, 0.2}, {0.3}}));
  CHECK_THROWS(BanditInstance::single_bernoulli({0.5, 1.5}));
  std::vector<std::vector<double>> wide(2, std::vector<double>(9, 0.5));
  CHECK_THROWS(gap_summary(BanditInstance::multi_bernoulli(wide)));
}

TEST_CASE("multi gap summary with one player equals the single summary") {
  auto s = test_stream(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(s.uniform() * 6);
    std::vector<double> row(n);
    for (auto& x : row) x = s.uniform();
    const auto single = gap_summary(BanditInstance::single_bernoulli(row));
    const auto multi = gap_summary(BanditInstance::multi_bernoulli({row}));
    CHECK(multi.optimal_surplus == doctest::Approx(single.optimal_surplus));
    CHECK(multi.delta_min == doctest::Approx(single.delta_min));
    CHECK(multi.delta_max == doctest::Approx(single.delta_max));
    CHECK(multi.optimal_matchings.front().front() == single.best_arm);
  }
}

TEST_CASE("injective assignments are enumerated in lexicographic order") {
  std::vector<std::vector<int>> seen;
  for_each_injective_assignment(2, 3, [&](std::span<const int> a) { seen.emplace_back(a.begin(), a.end()); });
  const std::vector<std::vector<int>> expected{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  CHECK(seen == expected);
}

TEST_CASE("assignment value ignores idle players") {
  const auto inst = BanditInstance::multi_bernoulli({{0.2, 0.25, 0.3}, {0.4, 0.6, 0.5}, {0.7, 0.9, 0.8}});
  const std::vector<int> a{0, 1, 2};
  CHECK(assignment_value(inst, a) == doctest::Approx(1.6));
  const std::vector<int> b{kNoAction, 1, 2};
  CHECK(assignment_value(inst, b) == doctest::Approx(1.4));
}
