#include "e3lab/policy_multi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "e3lab/env.hpp"

namespace e3lab {

std::string to_string(ExplorationCharge charge) {
  return charge == ExplorationCharge::Paper ? "paper" : "actual";
}

ExplorationCharge exploration_charge_from_string(const std::string& name) {
  if (name == "paper") return ExplorationCharge::Paper;
  if (name == "actual") return ExplorationCharge::Actual;
  throw std::invalid_argument("charge_exploration must be 'paper' or 'actual', got '" + name + "'");
}

EpsilonSchedule EpsilonSchedule::fixed(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  EpsilonSchedule s;
  s.fixed_ = true;
  s.epsilon_ = epsilon;
  return s;
}

EpsilonSchedule EpsilonSchedule::fixed_checked(double epsilon, double delta_lb, int players) {
  if (!(epsilon > 0.0 && epsilon < delta_lb / (players + 1))) {
    throw std::invalid_argument("epsilon must satisfy 0 < eps < delta_min/(M+1) = " +
                                std::to_string(delta_lb / (players + 1)));
  }
  return fixed(epsilon);
}

EpsilonSchedule EpsilonSchedule::decaying(double delta, LogBase base) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("epsilon decay delta must lie in (0,1)");
  EpsilonSchedule s;
  s.fixed_ = false;
  s.delta_ = delta;
  s.base_ = base;
  return s;
}

double EpsilonSchedule::at(std::int64_t t) const {
  return fixed_ ? epsilon_ : epsilon_decay(t, delta_, base_);
}

double epsilon_decay(std::int64_t t, double delta, LogBase base) {
  const double lg = log_in(base, static_cast<double>(std::max<std::int64_t>(t, 2)));
  return std::pow(lg, -delta);
}

CostModel CostModel::constant(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("cost must be nonnegative");
  CostModel m;
  m.constant_ = true;
  m.c_ = c;
  return m;
}

CostModel CostModel::inverse_epsilon() {
  CostModel m;
  m.constant_ = false;
  return m;
}

double CostModel::unit_cost(double epsilon) const { return constant_ ? c_ : 1.0 / epsilon; }

double CostModel::epoch_charge(int players, int arms, double epsilon) const {
  return static_cast<double>(players) * arms * unit_cost(epsilon);
}

namespace {

double multi_margin(int players, double delta_lb, double epsilon) {
  if (!(delta_lb > 0.0 && delta_lb <= 1.0)) throw std::invalid_argument("gap lower bound must lie in (0,1]");
  if (!(epsilon > 0.0 && epsilon < delta_lb / (players + 1))) {
    throw std::invalid_argument("precondition 0 < eps < delta_min/(M+1) violated (eps=" +
                                std::to_string(epsilon) + ", delta_min/(M+1)=" +
                                std::to_string(delta_lb / (players + 1)) + ")");
  }
  return delta_lb - (players + 1) * epsilon;
}

}  // namespace

int gamma_multi(int players, double delta_lb, double epsilon) {
  const double d = multi_margin(players, delta_lb, epsilon);
  return static_cast<int>(ceil_int(2.0 * players * players / (d * d)));
}

int gamma_beta_multi(int players, double delta_lb, double epsilon) {
  const double d = multi_margin(players, delta_lb, epsilon);
  return static_cast<int>(ceil_int(8.0 * players * players / (d * d)));
}

double PlayerState::sample_mean(int arm) const {
  return counts[arm] == 0 ? 0.0 : sums[arm] / static_cast<double>(counts[arm]);
}

int de3_act(const PlayerState& player, const EpochClock& clock) {
  if (clock.phase() == Phase::Explore) {
    return static_cast<int>((player.id + clock.offset()) % clock.arms());
  }
  return player.assigned;
}

bool de3_records(const PlayerState& player, const EpochClock& clock) {
  if (clock.phase() != Phase::Explore) return false;
  if (clock.turns() == 1) return true;
  const std::int64_t block = static_cast<std::int64_t>(clock.arms()) * clock.gamma();
  return clock.offset() / block == player.id;
}

void de3_observe(PlayerState& player, const EpochClock& clock, IndexKind kind, int arm,
                 double reward, RngStream* trial_stream) {
  if (!de3_records(player, clock)) return;
  player.sums[arm] += reward;
  ++player.counts[arm];
  if (kind == IndexKind::Posterior) {
    if (trial_stream == nullptr) throw std::invalid_argument("posterior indices need a trial stream");
    if (e3ts_trial(reward, *trial_stream)) {
      ++player.successes[arm];
    } else {
      ++player.failures[arm];
    }
  }
}

EpochMatching run_epoch_matching(const ValueMatrix& indices, const EpsilonSchedule& schedule,
                                 const CostModel& cost, const EpochClock& clock) {
  const double eps = schedule.at(clock.exploration_start());
  EpochMatching out{quantize(indices, eps), eps, {}, {}, 0.0, 0};
  auto result = auction_run(out.indices, eps);
  if (!result.matching.complete() || !result.matching.injective()) {
    throw std::logic_error("auction returned a non-injective or incomplete matching");
  }
  out.matching = std::move(result.matching);
  out.trace = std::move(result.trace);
  out.cost = cost.epoch_charge(indices.players(), indices.arms(), eps);
  out.comm_slots = out.trace.comm.slots;
  return out;
}

DecentralizedTeam::DecentralizedTeam(TeamConfig config, std::uint64_t seed,
                                     std::uint32_t replication)
    : config_(config),
      clock_(config.arms, config.gamma,
             config.charge == ExplorationCharge::Paper ? config.players : 1) {
  if (config.players < 1 || config.players > config.arms) {
    throw std::invalid_argument("team requires 1 <= M <= N");
  }
  for (int i = 0; i < config.players; ++i) {
    players_.emplace_back(i, config.arms);
    const auto p = static_cast<std::uint32_t>(i);
    trial_.emplace_back(seed, StreamKey{Purpose::Trial, p, replication});
    posterior_.emplace_back(seed, StreamKey{Purpose::Posterior, p, replication});
  }
}

std::vector<int> DecentralizedTeam::act() const {
  std::vector<int> actions;
  actions.reserve(players_.size());
  for (const auto& p : players_) actions.push_back(de3_act(p, clock_));
  return actions;
}

ValueMatrix DecentralizedTeam::index_snapshot() {
  ValueMatrix values(config_.players, config_.arms);
  for (int i = 0; i < config_.players; ++i) {
    auto& p = players_[i];
    for (int j = 0; j < config_.arms; ++j) {
      if (config_.kind == IndexKind::SampleMean) {
        values.set(i, j, p.sample_mean(j));
      } else {
        p.theta[j] = posterior_[i].beta(static_cast<double>(p.successes[j]) + 1.0,
                                        static_cast<double>(p.failures[j]) + 1.0);
        values.set(i, j, p.theta[j]);
      }
    }
  }
  return values;
}

TeamStepEvent DecentralizedTeam::observe(std::span<const int> actions,
                                         std::span<const double> realized) {
  for (std::size_t i = 0; i < players_.size(); ++i) {
    de3_observe(players_[i], clock_, config_.kind, actions[i], realized[i], &trial_[i]);
  }
  const auto ev = clock_.advance();
  TeamStepEvent out{ev.exploration_completed, ev.epoch_completed, 0.0};
  if (ev.exploration_completed) {
    const auto indices = index_snapshot();
    last_ = run_epoch_matching(indices, config_.epsilon, config_.cost, clock_);
    for (std::size_t i = 0; i < players_.size(); ++i) {
      players_[i].assigned = last_->matching.arm_of_player[i];
    }
    ++matchings_;
    out.cost = last_->cost;
  }
  return out;
}

}  // namespace e3lab
