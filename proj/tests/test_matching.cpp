#include <doctest.h>

#include <cmath>
#include <vector>

#include "e3lab/env.hpp"
#include "e3lab/matching.hpp"
#include "e3lab/rng.hpp"

using namespace e3lab;

namespace {

const std::vector<std::vector<double>> kExampleMatrix{{0.2, 0.25, 0.3}, {0.4, 0.6, 0.5}, {0.7, 0.9, 0.8}};

ValueMatrix random_matrix(RngStream& s, int m, int n) {
  ValueMatrix v(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) v.set(i, j, s.uniform());
  }
  return v;
}

}  // namespace

TEST_CASE("value matrix validation") {
  CHECK_THROWS(ValueMatrix(0, 3));
  CHECK_THROWS(ValueMatrix(std::vector<std::vector<double>>{{0.1, 1.2}}));
  CHECK_THROWS(ValueMatrix(std::vector<std::vector<double>>{{0.1, 0.2}, {0.3}}));
  ValueMatrix v(kExampleMatrix);
  CHECK(v.players() == 3);
  CHECK(v.arms() == 3);
  CHECK(v(2, 1) == 0.9);
  CHECK(v.max_value() == 0.9);
  CHECK_THROWS(v.set(0, 0, -0.5));
}

TEST_CASE("preferred arm and bid") {
  const std::vector<double> p0{0, 0};
  {
    const std::vector<double> row{1, 0};
    const auto b = preferred_and_bid(0, row, p0, 0.1, 2);
    CHECK(b.arm == 0);
    CHECK(b.amount == doctest::Approx(1.05));
  }
  {
    const std::vector<double> row{0.5, 0.5};
    const auto b = preferred_and_bid(0, row, p0, 0.2, 2);
    CHECK(b.arm == 0);
    CHECK(b.amount == doctest::Approx(0.1));
  }
  {
    const std::vector<double> row{0.9, 0.8};
    const std::vector<double> prices{0.5, 0};
    const auto b = preferred_and_bid(0, row, prices, 0.1, 2);
    CHECK(b.arm == 1);
    CHECK(b.amount == doctest::Approx(0.45));
  }
  {
    const std::vector<double> row{0.4};
    const std::vector<double> prices{0.1};
    const auto b = preferred_and_bid(0, row, prices, 0.1, 1);
    CHECK(b.arm == 0);
    CHECK(b.amount == doctest::Approx(0.3 + 0.1));
  }
  const std::vector<double> row{0.5, 0.5};
  CHECK_THROWS(preferred_and_bid(0, row, p0, 0.0, 2));
}

TEST_CASE("bids are never below epsilon over M") {
  RngStream s(5, {Purpose::Test, 0, 0});
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(s.uniform() * 6);
    std::vector<double> row(n), prices(n);
    for (int j = 0; j < n; ++j) {
      row[j] = s.uniform();
      prices[j] = s.uniform();
    }
    const auto b = preferred_and_bid(0, row, prices, 0.05, 4);
    CHECK(b.amount >= 0.05 / 4 - 1e-15);
  }
}

TEST_CASE("auction examples") {
  {
    const ValueMatrix v(std::vector<std::vector<double>>{{1, 0}, {0, 1}});
    const auto r = auction_run(v, 0.2);
    CHECK(r.matching.arm_of_player == std::vector<int>{0, 1});
    CHECK(r.matching.surplus(v) == doctest::Approx(2.0));
  }
  {
    const ValueMatrix v(std::vector<std::vector<double>>{{0.3, 0.7, 0.5}});
    for (double eps : {1.0, 0.1, 0.001}) {
      const auto r = auction_run(v, eps);
      CHECK(r.matching.arm_of_player == std::vector<int>{1});
      CHECK(r.trace.comm.slots == 0);
    }
  }
  {
    const ValueMatrix v(kExampleMatrix);
    const auto r = auction_run(v, 0.001);
    CHECK(r.matching.complete());
    CHECK(r.matching.injective());
    CHECK(r.matching.surplus(v) >= 1.6 - 0.001 - 1e-12);
    CHECK(r.trace.iterations <= r.trace.iteration_bound);
    CHECK(r.trace.iteration_bound == 8100);
  }
}

TEST_CASE("auction is deterministic") {
  const ValueMatrix v(kExampleMatrix);
  const auto a = auction_run(v, 0.01);
  const auto b = auction_run(v, 0.01);
  CHECK(a.matching == b.matching);
  CHECK(a.trace == b.trace);
}

TEST_CASE("auction on an all-zero matrix terminates within the guard") {
  const ValueMatrix v(4, 5, 0.0);
  const auto r = auction_run(v, 0.1);
  CHECK(r.matching.complete());
  CHECK(r.matching.injective());
  CHECK(r.trace.iterations <= r.trace.iteration_bound);
}

TEST_CASE("auction epsilon optimality, iteration bound and price monotonicity") {
  RngStream s(17, {Purpose::Test, 1, 0});
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + static_cast<int>(s.uniform() * 4);
    const int n = m + static_cast<int>(s.uniform() * (7 - m));
    const auto v = random_matrix(s, m, n);
    const auto best = brute_force(v);
    for (double eps : {0.1, 0.01}) {
      const auto r = auction_run(v, eps);
      REQUIRE(r.matching.complete());
      REQUIRE(r.matching.injective());
      CHECK(r.matching.surplus(v) >= best.surplus - eps - 1e-12);
      CHECK(r.trace.iterations <= static_cast<int>(std::ceil(m * m * v.max_value() / eps)));
      std::vector<double> prev(n, 0.0);
      for (const auto& round : r.trace.rounds) {
        for (int j = 0; j < n; ++j) CHECK(round.prices[j] >= prev[j]);
        prev = round.prices;
      }
      CHECK(r.trace.comm.slots == static_cast<std::int64_t>(r.trace.iterations) * m);
    }
  }
}

TEST_CASE("brute force oracle") {
  {
    const ValueMatrix v(std::vector<std::vector<double>>{{1, 0}, {0, 1}});
    const auto b = brute_force(v);
    CHECK(b.matching.arm_of_player == std::vector<int>{0, 1});
    CHECK(b.surplus == doctest::Approx(2.0));
  }
  {
    const ValueMatrix v(3, 5, 0.4);
    const auto b = brute_force(v);
    CHECK(b.matching.arm_of_player == std::vector<int>{0, 1, 2});
    CHECK(b.surplus == doctest::Approx(1.2));
  }
  {
    const auto b = brute_force(ValueMatrix(kExampleMatrix));
    CHECK(b.matching.arm_of_player == std::vector<int>{0, 1, 2});
    CHECK(b.surplus == doctest::Approx(1.6));
  }
  CHECK_THROWS(brute_force(ValueMatrix(2, 9, 0.1)));
}

TEST_CASE("brute force agrees with the gap summary") {
  RngStream s(23, {Purpose::Test, 2, 0});
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(s.uniform() * 4);
    const int n = m + 1 + static_cast<int>(s.uniform() * 3);
    std::vector<std::vector<double>> rows(m, std::vector<double>(n));
    for (auto& r : rows) {
      for (auto& x : r) x = s.uniform();
    }
    const auto b = brute_force(ValueMatrix(rows));
    const auto g = gap_summary(BanditInstance::multi_bernoulli(rows));
    CHECK(b.surplus == doctest::Approx(g.optimal_surplus));
    CHECK(b.matching.arm_of_player == g.optimal_matchings.front());
  }
}

TEST_CASE("quantize") {
  CHECK(quantize(0.777, 0.01) == doctest::Approx(0.77));
  CHECK(quantize(0.5, 0.5) == 0.5);
  for (int k = 0; k <= 1000; ++k) {
    const double x = k * 0.001;
    CHECK(quantize(x, 0.001) == doctest::Approx(x).epsilon(1e-12));
  }
  RngStream s(3, {Purpose::Test, 3, 0});
  for (int i = 0; i < 1000; ++i) {
    const double x = s.uniform();
    const double q = quantize(x, 0.03);
    CHECK(q <= x + 1e-12);
    CHECK(x - q < 0.03);
  }
  CHECK_THROWS(quantize(0.5, 0.0));
}

TEST_CASE("matching on quantized values loses at most eps1 + M eps2") {
  RngStream s(29, {Purpose::Test, 4, 0});
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(s.uniform() * 3);
    const int n = m + static_cast<int>(s.uniform() * 3);
    const auto v = random_matrix(s, m, n);
    const double eps1 = 0.02;
    const double eps2 = 0.05;
    const auto r = auction_run(quantize(v, eps2), eps1);
    CHECK(r.matching.surplus(v) >= brute_force(v).surplus - eps1 - m * eps2 - 1e-12);
  }
}

TEST_CASE("communication accounting") {
  const auto c = comm_slots(3, 3, 0.001, 10);
  CHECK(c.slots == 30);
  CHECK(c.bid_bits == 10);
  CHECK(c.preference_bits == 2);
  CHECK(c.bits_per_message == 12);
  CHECK(comm_slots(1, 4, 0.001, 5).slots == 0);
  CHECK(comm_slots(2, 2, 0.5, 1).bid_bits == 1);
  CHECK(comm_slots(2, 2, 2.0, 1).bid_bits == 0);
  CHECK_THROWS(comm_slots(2, 2, 0.0, 1));
  CHECK_THROWS(comm_slots(2, 2, 0.1, 0));
}
