#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace e3lab {

// Player-by-arm table of values in [0,1] (indices or true means).
class ValueMatrix {
 public:
  ValueMatrix(int players, int arms, double fill = 0.0);
  explicit ValueMatrix(const std::vector<std::vector<double>>& rows);

  int players() const { return players_; }
  int arms() const { return arms_; }

  double operator()(int player, int arm) const { return data_[player * arms_ + arm]; }
  void set(int player, int arm, double value);
  std::span<const double> row(int player) const {
    return {data_.data() + player * arms_, static_cast<std::size_t>(arms_)};
  }
  double max_value() const;

  bool operator==(const ValueMatrix&) const = default;

 private:
  int players_;
  int arms_;
  std::vector<double> data_;
};

struct Bid {
  int player = 0;
  int arm = 0;
  double amount = 0.0;

  bool operator==(const Bid&) const = default;
};

// arm_of_player[i] is the arm held by player i, or kNoAction.
struct Matching {
  std::vector<int> arm_of_player;

  bool complete() const;
  bool injective() const;
  double surplus(const ValueMatrix& values) const;

  bool operator==(const Matching&) const = default;
};

struct AuctionRound {
  std::vector<Bid> bids;
  std::vector<double> prices;  // after the round's updates

  bool operator==(const AuctionRound&) const = default;
};

struct CommCost {
  std::int64_t slots = 0;
  int preference_bits = 0;
  int bid_bits = 0;
  int bits_per_message = 0;

  bool operator==(const CommCost&) const = default;
};

struct AuctionTrace {
  int iterations = 0;
  int iteration_bound = 0;
  std::vector<AuctionRound> rounds;
  std::vector<double> final_prices;
  CommCost comm;

  bool operator==(const AuctionTrace&) const = default;
};

struct AuctionResult {
  Matching matching;
  AuctionTrace trace;
};

struct OptimalMatching {
  Matching matching;
  double surplus = 0.0;
};

// Preferred arm (largest net value, lowest index on ties) and bid: the gap
// between the best and second best net values plus epsilon / players. With a
// single arm the second best net value is floored at 0.
Bid preferred_and_bid(int player, std::span<const double> values_row,
                      std::span<const double> prices, double epsilon, int players);

// Bertsekas' forward auction with simultaneous bidding rounds. Every
// unassigned player bids each round; each arm goes to its highest bidder
// (lowest player index on ties) and its price rises by the winning bid.
// Result surplus is within epsilon of the optimum. Throws std::logic_error if
// the round count exceeds the convergence bound.
AuctionResult auction_run(const ValueMatrix& values, double epsilon);

// ceil(M^2 * max value / epsilon), and never below M (each round settles at
// most one more player in the worst case of an all-zero matrix).
int auction_iteration_bound(const ValueMatrix& values, double epsilon);

// Exact optimum by enumerating all injective assignments; the
// lexicographically smallest among optimal assignments is returned. N <= 8.
OptimalMatching brute_force(const ValueMatrix& values);

// floor(x / step) * step, with x already on the grid mapped to itself.
double quantize(double x, double step);
ValueMatrix quantize(const ValueMatrix& values, double step);

// One slot per player per round; message = arm id (ceil(log2 N) bits) plus
// bid (ceil(log2 1/eps1) bits). A lone player needs no coordination.
CommCost comm_slots(int players, int arms, double eps1, int iterations);

}  // namespace e3lab
