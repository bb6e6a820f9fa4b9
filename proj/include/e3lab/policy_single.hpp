#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "e3lab/numeric.hpp"
#include "e3lab/rng.hpp"

namespace e3lab {

enum class Phase { Explore, Exploit };

// Per-arm exploration count used in each exploration phase. Known: a fixed
// gamma. Unknown: ceil(log(t)^delta), evaluated at the first slot t of each
// exploration phase.
class GammaSchedule {
 public:
  static GammaSchedule known(int gamma);
  static GammaSchedule unknown(double delta, LogBase base = LogBase::Two);

  bool is_known() const { return known_; }
  int fixed_gamma() const { return gamma_; }
  double delta() const { return delta_; }
  LogBase base() const { return base_; }

  // t is the 1-based index of the first slot of the exploration phase.
  int at(std::int64_t t) const;

  bool operator==(const GammaSchedule&) const = default;

 private:
  bool known_ = true;
  int gamma_ = 1;
  double delta_ = 0.5;
  LogBase base_ = LogBase::Two;
};

// ceil(2 / delta_lb^2): exploration count for the sample-mean policy when a
// lower bound on the minimum gap is known.
int gamma_known(double delta_lb);
// ceil(8 / delta_lb^2): the same for the posterior-sampling variant.
int gamma_beta_known(double delta_lb);
// ceil(log(t)^delta). Slots before t = 2 are clamped to t = 2, giving 1.
int gamma_unknown(std::int64_t t, double delta, LogBase base = LogBase::Two);

struct StepEvent {
  bool exploration_completed = false;
  bool epoch_completed = false;
};

// Phase machine shared by the phased policies. Epoch l is an exploration
// phase of turns * N * gamma_l slots followed by an exploitation phase of 2^l
// slots. Single-player policies use one turn; the multiplayer schedule uses
// M turns when charge_exploration is 'paper'.
class EpochClock {
 public:
  EpochClock(int arms, GammaSchedule schedule, int turns = 1);

  int epoch() const { return epoch_; }
  Phase phase() const { return phase_; }
  std::int64_t offset() const { return offset_; }
  int gamma() const { return gamma_; }
  int arms() const { return arms_; }
  int turns() const { return turns_; }
  std::int64_t exploration_length() const;
  std::int64_t exploitation_length() const { return std::int64_t{1} << epoch_; }
  std::int64_t slots_consumed() const { return consumed_; }
  // 1-based index of the first slot of the current epoch's exploration phase.
  std::int64_t exploration_start() const { return explore_start_; }

  // Consumes one slot.
  StepEvent advance();

 private:
  int arms_;
  GammaSchedule schedule_;
  int turns_;
  int epoch_ = 1;
  Phase phase_ = Phase::Explore;
  std::int64_t offset_ = 0;
  std::int64_t consumed_ = 0;
  std::int64_t explore_start_ = 1;
  int gamma_ = 1;
};

// Index of the largest value; lowest index on ties.
int argmax_lowest(std::span<const double> values);

struct E3State {
  explicit E3State(int arms) : sums(arms, 0.0), counts(arms, 0) {}

  std::vector<double> sums;
  std::vector<std::int64_t> counts;
  int chosen = 0;

  double sample_mean(int arm) const;
  std::vector<double> sample_means() const;

  bool operator==(const E3State&) const = default;
};

int e3_act(const E3State& state, const EpochClock& clock);
// Exploration rewards only; exploitation observations leave state untouched.
void e3_observe(E3State& state, const EpochClock& clock, int arm, double reward);
int e3_select(const E3State& state);

struct E3TSState {
  explicit E3TSState(int arms) : successes(arms, 0), failures(arms, 0), theta(arms, 0.0) {}

  std::vector<std::int64_t> successes;
  std::vector<std::int64_t> failures;
  std::vector<double> theta;
  int chosen = 0;

  bool operator==(const E3TSState&) const = default;
};

// Bernoulli trial with success probability `reward` (which must lie in [0,1]).
bool e3ts_trial(double reward, RngStream& trial_stream);
void e3ts_observe(E3TSState& state, const EpochClock& clock, int arm, double reward,
                  RngStream& trial_stream);
// Draws theta_j ~ Beta(S_j + 1, F_j + 1) for every arm and picks the largest.
int e3ts_select(E3TSState& state, RngStream& posterior_stream);

// Statistics over all plays, for the UCB1 and Thompson Sampling baselines.
struct BaselineState {
  explicit BaselineState(int arms)
      : sums(arms, 0.0), counts(arms, 0), successes(arms, 0), failures(arms, 0) {}

  std::vector<double> sums;
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> successes;
  std::vector<std::int64_t> failures;
  std::int64_t plays = 0;
};

// Plays every arm once, then argmax of mean + sqrt(2 ln t / n_j).
int ucb1_act(const BaselineState& state, std::int64_t t);
int ts_act(const BaselineState& state, RngStream& posterior_stream);
// Updates sums and counts; with a trial stream also the Beta counters.
void baseline_observe(BaselineState& state, int arm, double reward, RngStream* trial_stream);

// Uniform driver interface used by the experiment harness.
class SinglePolicy {
 public:
  virtual ~SinglePolicy() = default;

  virtual std::string name() const = 0;
  virtual int act() = 0;
  virtual StepEvent observe(int arm, double reward) = 0;
  // Phase of the slot about to be played.
  virtual Phase phase() const = 0;
  virtual int epoch() const = 0;
  // Number of index computations so far, m(t).
  virtual std::int64_t index_computations() const = 0;
};

class E3Policy final : public SinglePolicy {
 public:
  E3Policy(int arms, GammaSchedule schedule);

  std::string name() const override { return "e3"; }
  int act() override;
  StepEvent observe(int arm, double reward) override;
  Phase phase() const override { return clock_.phase(); }
  int epoch() const override { return clock_.epoch(); }
  std::int64_t index_computations() const override { return computations_; }

  const E3State& state() const { return state_; }
  const EpochClock& clock() const { return clock_; }

 private:
  E3State state_;
  EpochClock clock_;
  std::int64_t computations_ = 0;
};

class E3TSPolicy final : public SinglePolicy {
 public:
  E3TSPolicy(int arms, GammaSchedule schedule, RngStream trial_stream, RngStream posterior_stream);

  std::string name() const override { return "e3ts"; }
  int act() override;
  StepEvent observe(int arm, double reward) override;
  Phase phase() const override { return clock_.phase(); }
  int epoch() const override { return clock_.epoch(); }
  std::int64_t index_computations() const override { return computations_; }

  const E3TSState& state() const { return state_; }
  const EpochClock& clock() const { return clock_; }

 private:
  E3TSState state_;
  EpochClock clock_;
  RngStream trial_;
  RngStream posterior_;
  std::int64_t computations_ = 0;
};

class Ucb1Policy final : public SinglePolicy {
 public:
  explicit Ucb1Policy(int arms) : state_(arms) {}

  std::string name() const override { return "ucb1"; }
  int act() override;
  StepEvent observe(int arm, double reward) override;
  Phase phase() const override { return Phase::Exploit; }
  int epoch() const override { return 0; }
  std::int64_t index_computations() const override { return computations_; }

  const BaselineState& state() const { return state_; }

 private:
  BaselineState state_;
  std::int64_t computations_ = 0;
};

class ThompsonPolicy final : public SinglePolicy {
 public:
  ThompsonPolicy(int arms, RngStream trial_stream, RngStream posterior_stream);

  std::string name() const override { return "ts"; }
  int act() override;
  StepEvent observe(int arm, double reward) override;
  Phase phase() const override { return Phase::Exploit; }
  int epoch() const override { return 0; }
  std::int64_t index_computations() const override { return computations_; }

  const BaselineState& state() const { return state_; }

 private:
  BaselineState state_;
  RngStream trial_;
  RngStream posterior_;
  std::int64_t computations_ = 0;
};

}  // namespace e3lab
