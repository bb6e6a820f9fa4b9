#include "e3lab/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "e3lab/assignments.hpp"
#include "e3lab/env.hpp"
#include "e3lab/numeric.hpp"

namespace e3lab {

ValueMatrix::ValueMatrix(int players, int arms, double fill)
    : players_(players), arms_(arms), data_(static_cast<std::size_t>(players) * arms, fill) {
  if (players < 1 || arms < 1) throw std::invalid_argument("value matrix must be non-empty");
  if (!(fill >= 0.0 && fill <= 1.0)) throw std::invalid_argument("values must lie in [0,1]");
}

ValueMatrix::ValueMatrix(const std::vector<std::vector<double>>& rows)
    : ValueMatrix(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size())) {
  for (int i = 0; i < players_; ++i) {
    if (static_cast<int>(rows[i].size()) != arms_) {
      throw std::invalid_argument("value matrix rows differ in length");
    }
    for (int j = 0; j < arms_; ++j) set(i, j, rows[i][j]);
  }
}

void ValueMatrix::set(int player, int arm, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("values must lie in [0,1], got " + std::to_string(value));
  }
  data_[player * arms_ + arm] = value;
}

double ValueMatrix::max_value() const { return *std::max_element(data_.begin(), data_.end()); }

bool Matching::complete() const {
  return std::none_of(arm_of_player.begin(), arm_of_player.end(),
                      [](int a) { return a == kNoAction; });
}

bool Matching::injective() const {
  for (std::size_t i = 0; i < arm_of_player.size(); ++i) {
    if (arm_of_player[i] == kNoAction) continue;
    for (std::size_t k = i + 1; k < arm_of_player.size(); ++k) {
      if (arm_of_player[k] == arm_of_player[i]) return false;
    }
  }
  return true;
}

double Matching::surplus(const ValueMatrix& values) const {
  double s = 0.0;
  for (std::size_t i = 0; i < arm_of_player.size(); ++i) {
    if (arm_of_player[i] != kNoAction) s += values(static_cast<int>(i), arm_of_player[i]);
  }
  return s;
}

Bid preferred_and_bid(int player, std::span<const double> values_row,
                      std::span<const double> prices, double epsilon, int players) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("auction epsilon must be positive");
  if (values_row.empty() || values_row.size() != prices.size()) {
    throw std::invalid_argument("preferred_and_bid: row and prices must have equal non-zero size");
  }
  int best_arm = 0;
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < values_row.size(); ++j) {
    const double net = values_row[j] - prices[j];
    if (net > best) {
      second = best;
      best = net;
      best_arm = static_cast<int>(j);
    } else if (net > second) {
      second = net;
    }
  }
  if (values_row.size() == 1) second = std::min(best, 0.0);
  return Bid{player, best_arm, best - second + epsilon / players};
}

int auction_iteration_bound(const ValueMatrix& values, double epsilon) {
  const int m = values.players();
  const auto bound = ceil_int(static_cast<double>(m) * m * values.max_value() / epsilon);
  return static_cast<int>(std::max<std::int64_t>(bound, m));
}

AuctionResult auction_run(const ValueMatrix& values, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("auction epsilon must be positive");
  const int m = values.players();
  const int n = values.arms();
  if (m > n) throw std::invalid_argument("auction requires players <= arms");

  AuctionResult result;
  auto& trace = result.trace;
  trace.iteration_bound = auction_iteration_bound(values, epsilon);

  std::vector<double> prices(n, 0.0);
  std::vector<int> owner(n, kNoAction);
  std::vector<int> held(m, kNoAction);

  auto unassigned = [&] { return std::count(held.begin(), held.end(), kNoAction); };

  while (unassigned() > 0) {
    if (trace.iterations >= trace.iteration_bound) {
      throw std::logic_error("auction exceeded its convergence bound of " +
                             std::to_string(trace.iteration_bound) + " rounds");
    }
    ++trace.iterations;

    // All bids of a round are collected against the same price snapshot.
    AuctionRound round;
    for (int i = 0; i < m; ++i) {
      if (held[i] != kNoAction) continue;
      round.bids.push_back(preferred_and_bid(i, values.row(i), prices, epsilon, m));
    }

    std::vector<const Bid*> winner(n, nullptr);
    for (const auto& bid : round.bids) {
      auto& w = winner[bid.arm];
      if (w == nullptr || bid.amount > w->amount) w = &bid;
    }
    for (int j = 0; j < n; ++j) {
      if (winner[j] == nullptr) continue;
      prices[j] += winner[j]->amount;
      if (owner[j] != kNoAction) held[owner[j]] = kNoAction;
      owner[j] = winner[j]->player;
      held[winner[j]->player] = j;
    }
    round.prices = prices;
    trace.rounds.push_back(std::move(round));
  }

  trace.final_prices = prices;
  trace.comm = comm_slots(m, n, epsilon, std::max(trace.iterations, 1));
  result.matching.arm_of_player = held;
  return result;
}

OptimalMatching brute_force(const ValueMatrix& values) {
  if (values.arms() > kMaxEnumerationArms) {
    throw std::invalid_argument("brute_force: exhaustive enumeration limited to N <= 8");
  }
  if (values.players() > values.arms()) {
    throw std::invalid_argument("brute_force requires players <= arms");
  }
  OptimalMatching best;
  best.surplus = -1.0;
  for_each_injective_assignment(values.players(), values.arms(), [&](std::span<const int> a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += values(static_cast<int>(i), a[i]);
    if (s > best.surplus + kTieTolerance) {
      best.surplus = s;
      best.matching.arm_of_player.assign(a.begin(), a.end());
    }
  });
  return best;
}

double quantize(double x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("quantization step must be positive");
  return std::floor(x / step + 1e-9) * step;
}

ValueMatrix quantize(const ValueMatrix& values, double step) {
  ValueMatrix out(values.players(), values.arms());
  for (int i = 0; i < values.players(); ++i) {
    for (int j = 0; j < values.arms(); ++j) {
      out.set(i, j, std::clamp(quantize(values(i, j), step), 0.0, 1.0));
    }
  }
  return out;
}

CommCost comm_slots(int players, int arms, double eps1, int iterations) {
  if (!(eps1 > 0.0)) throw std::invalid_argument("eps1 must be positive");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  CommCost c;
  c.preference_bits = ceil_log2(arms);
  // A coarse decaying schedule can hand in eps1 >= 1; no bid bits are needed then.
  c.bid_bits = static_cast<int>(std::max<std::int64_t>(0, ceil_int(std::log2(1.0 / eps1))));
  c.bits_per_message = c.preference_bits + c.bid_bits;
  c.slots = players <= 1 ? 0 : static_cast<std::int64_t>(iterations) * players;
  return c;
}

}  // namespace e3lab
