#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "e3lab/env.hpp"
#include "e3lab/matching.hpp"
#include "e3lab/numeric.hpp"
#include "e3lab/policy_single.hpp"
#include "e3lab/rng.hpp"

namespace e3lab {

// How many slots an exploration phase occupies in the multiplayer schedule.
// Actual: N * gamma (every player explores at once on staggered arms).
// Paper: M * N * gamma (players take turns; see de3_records).
enum class ExplorationCharge { Actual, Paper };

std::string to_string(ExplorationCharge charge);
ExplorationCharge exploration_charge_from_string(const std::string& name);

// Matching precision. Fixed(eps) must satisfy eps < delta_lb / (M + 1) when a
// gap lower bound is given; Decaying uses eps_t = log(t)^(-delta), sampled at
// the first slot of each exploration phase.
class EpsilonSchedule {
 public:
  static EpsilonSchedule fixed(double epsilon);
  static EpsilonSchedule fixed_checked(double epsilon, double delta_lb, int players);
  static EpsilonSchedule decaying(double delta, LogBase base = LogBase::Two);

  bool is_fixed() const { return fixed_; }
  double fixed_epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  LogBase base() const { return base_; }

  double at(std::int64_t t) const;

  bool operator==(const EpsilonSchedule&) const = default;

 private:
  bool fixed_ = true;
  double epsilon_ = 0.001;
  double delta_ = 0.5;
  LogBase base_ = LogBase::Two;
};

// log(t)^(-delta); t is clamped to >= 2.
double epsilon_decay(std::int64_t t, double delta, LogBase base = LogBase::Two);

// Coordination cost per unit: Constant(C), or InverseEpsilon with C(eps) = 1/eps.
class CostModel {
 public:
  static CostModel constant(double c);
  static CostModel inverse_epsilon();

  bool is_constant() const { return constant_; }
  double constant_value() const { return c_; }

  double unit_cost(double epsilon) const;
  // Charge per matching invocation: players * arms * C(eps).
  double epoch_charge(int players, int arms, double epsilon) const;

  bool operator==(const CostModel&) const = default;

 private:
  bool constant_ = true;
  double c_ = 0.0;
};

// ceil(2 M^2 / (delta_lb - (M+1) eps)^2); requires 0 < eps < delta_lb / (M+1).
int gamma_multi(int players, double delta_lb, double epsilon);
// ceil(8 M^2 / (delta_lb - (M+1) eps)^2), same precondition.
int gamma_beta_multi(int players, double delta_lb, double epsilon);

enum class IndexKind { SampleMean, Posterior };

struct PlayerState {
  PlayerState(int id, int arms)
      : id(id), sums(arms, 0.0), counts(arms, 0), successes(arms, 0), failures(arms, 0),
        theta(arms, 0.0) {}

  int id;
  std::vector<double> sums;
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> successes;
  std::vector<std::int64_t> failures;
  std::vector<double> theta;
  int assigned = kNoAction;

  double sample_mean(int arm) const;

  bool operator==(const PlayerState&) const = default;
};

// Exploration: staggered round robin, arm = (player + offset) mod N, so players
// never collide while M <= N. Exploitation: the assigned arm.
int de3_act(const PlayerState& player, const EpochClock& clock);
// Whether the current exploration slot counts toward the player's statistics.
// With one turn every slot counts; with M turns only the player's own block of
// N * gamma slots does, so each player records gamma plays per arm per epoch.
bool de3_records(const PlayerState& player, const EpochClock& clock);
// Exploration-phase update; trial_stream is required for IndexKind::Posterior.
void de3_observe(PlayerState& player, const EpochClock& clock, IndexKind kind, int arm,
                 double reward, RngStream* trial_stream);

struct EpochMatching {
  ValueMatrix indices;  // quantized values handed to the auction
  double epsilon = 0.0;
  Matching matching;
  AuctionTrace trace;
  double cost = 0.0;
  std::int64_t comm_slots = 0;
};

// Quantizes the index snapshot at eps, runs the auction at eps and charges the
// cost model once per player-arm pair. eps comes from the schedule at the
// first slot of the exploration phase that just ended.
EpochMatching run_epoch_matching(const ValueMatrix& indices, const EpsilonSchedule& schedule,
                                 const CostModel& cost, const EpochClock& clock);

struct TeamConfig {
  IndexKind kind = IndexKind::SampleMean;
  int players = 1;
  int arms = 2;
  GammaSchedule gamma = GammaSchedule::known(1);
  EpsilonSchedule epsilon = EpsilonSchedule::fixed(0.001);
  CostModel cost = CostModel::constant(0.0);
  ExplorationCharge charge = ExplorationCharge::Paper;
};

struct TeamStepEvent {
  bool exploration_completed = false;
  bool epoch_completed = false;
  double cost = 0.0;
};

// The M players of dE3 / dE3-TS, driven on one shared epoch clock. Player
// statistics stay private; only the matching step reads an index snapshot.
class DecentralizedTeam {
 public:
  DecentralizedTeam(TeamConfig config, std::uint64_t seed, std::uint32_t replication);

  std::vector<int> act() const;
  TeamStepEvent observe(std::span<const int> actions, std::span<const double> realized);

  Phase phase() const { return clock_.phase(); }
  int epoch() const { return clock_.epoch(); }
  std::int64_t matchings() const { return matchings_; }
  const EpochClock& clock() const { return clock_; }
  const std::vector<PlayerState>& players() const { return players_; }
  const std::optional<EpochMatching>& last_matching() const { return last_; }
  const TeamConfig& config() const { return config_; }

  // Index snapshot the next matching would use (draws posteriors for dE3-TS).
  ValueMatrix index_snapshot();

 private:
  TeamConfig config_;
  EpochClock clock_;
  std::vector<PlayerState> players_;
  std::vector<RngStream> trial_;
  std::vector<RngStream> posterior_;
  std::optional<EpochMatching> last_;
  std::int64_t matchings_ = 0;
};

}  // namespace e3lab
