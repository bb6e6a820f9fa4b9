#include "e3lab/policy_single.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace e3lab {

GammaSchedule GammaSchedule::known(int gamma) {
  if (gamma < 1) throw std::invalid_argument("gamma must be >= 1, got " + std::to_string(gamma));
  GammaSchedule s;
  s.known_ = true;
  s.gamma_ = gamma;
  return s;
}

GammaSchedule GammaSchedule::unknown(double delta, LogBase base) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("gamma schedule delta must lie in (0,1)");
  }
  GammaSchedule s;
  s.known_ = false;
  s.delta_ = delta;
  s.base_ = base;
  return s;
}

int GammaSchedule::at(std::int64_t t) const {
  return known_ ? gamma_ : gamma_unknown(t, delta_, base_);
}

namespace {

void check_gap_bound(double delta_lb) {
  if (!(delta_lb > 0.0 && delta_lb <= 1.0)) {
    throw std::invalid_argument("gap lower bound must lie in (0,1], got " + std::to_string(delta_lb));
  }
}

}  // namespace

int gamma_known(double delta_lb) {
  check_gap_bound(delta_lb);
  return static_cast<int>(ceil_int(2.0 / (delta_lb * delta_lb)));
}

int gamma_beta_known(double delta_lb) {
  check_gap_bound(delta_lb);
  return static_cast<int>(ceil_int(8.0 / (delta_lb * delta_lb)));
}

int gamma_unknown(std::int64_t t, double delta, LogBase base) {
  const double lg = log_in(base, static_cast<double>(std::max<std::int64_t>(t, 2)));
  return static_cast<int>(std::max<std::int64_t>(1, ceil_int(std::pow(lg, delta))));
}

EpochClock::EpochClock(int arms, GammaSchedule schedule, int turns)
    : arms_(arms), schedule_(schedule), turns_(turns) {
  if (arms < 1) throw std::invalid_argument("clock needs at least one arm");
  if (turns < 1) throw std::invalid_argument("clock needs at least one exploration turn");
  gamma_ = schedule_.at(1);
}

std::int64_t EpochClock::exploration_length() const {
  return static_cast<std::int64_t>(turns_) * arms_ * gamma_;
}

StepEvent EpochClock::advance() {
  StepEvent ev;
  ++consumed_;
  ++offset_;
  if (phase_ == Phase::Explore) {
    if (offset_ == exploration_length()) {
      phase_ = Phase::Exploit;
      offset_ = 0;
      ev.exploration_completed = true;
    }
  } else if (offset_ == exploitation_length()) {
    ++epoch_;
    phase_ = Phase::Explore;
    offset_ = 0;
    explore_start_ = consumed_ + 1;
    gamma_ = schedule_.at(explore_start_);
    ev.epoch_completed = true;
  }
  return ev;
}

int argmax_lowest(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

double E3State::sample_mean(int arm) const {
  return counts[arm] == 0 ? 0.0 : sums[arm] / static_cast<double>(counts[arm]);
}

std::vector<double> E3State::sample_means() const {
  std::vector<double> out(sums.size());
  for (std::size_t j = 0; j < sums.size(); ++j) out[j] = sample_mean(static_cast<int>(j));
  return out;
}

int e3_act(const E3State& state, const EpochClock& clock) {
  if (clock.phase() == Phase::Explore) return static_cast<int>(clock.offset() % clock.arms());
  return state.chosen;
}

void e3_observe(E3State& state, const EpochClock& clock, int arm, double reward) {
  if (clock.phase() != Phase::Explore) return;
  state.sums[arm] += reward;
  ++state.counts[arm];
}

int e3_select(const E3State& state) {
  const auto means = state.sample_means();
  return argmax_lowest(means);
}

bool e3ts_trial(double reward, RngStream& trial_stream) {
  if (!(reward >= 0.0 && reward <= 1.0)) throw std::invalid_argument("reward must lie in [0,1]");
  return trial_stream.uniform() < reward;
}

void e3ts_observe(E3TSState& state, const EpochClock& clock, int arm, double reward,
                  RngStream& trial_stream) {
  if (clock.phase() != Phase::Explore) return;
  if (e3ts_trial(reward, trial_stream)) {
    ++state.successes[arm];
  } else {
    ++state.failures[arm];
  }
}

int e3ts_select(E3TSState& state, RngStream& posterior_stream) {
  for (std::size_t j = 0; j < state.theta.size(); ++j) {
    state.theta[j] = posterior_stream.beta(static_cast<double>(state.successes[j]) + 1.0,
                                           static_cast<double>(state.failures[j]) + 1.0);
  }
  state.chosen = argmax_lowest(state.theta);
  return state.chosen;
}

int ucb1_act(const BaselineState& state, std::int64_t t) {
  const int n = static_cast<int>(state.counts.size());
  for (int j = 0; j < n; ++j) {
    if (state.counts[j] == 0) return j;
  }
  const double log_t = std::log(static_cast<double>(std::max<std::int64_t>(t, 1)));
  int best = 0;
  double best_index = -1.0;
  for (int j = 0; j < n; ++j) {
    const double count = static_cast<double>(state.counts[j]);
    const double index = state.sums[j] / count + std::sqrt(2.0 * log_t / count);
    if (index > best_index) {
      best_index = index;
      best = j;
    }
  }
  return best;
}

int ts_act(const BaselineState& state, RngStream& posterior_stream) {
  int best = 0;
  double best_theta = -1.0;
  for (std::size_t j = 0; j < state.successes.size(); ++j) {
    const double theta = posterior_stream.beta(static_cast<double>(state.successes[j]) + 1.0,
                                               static_cast<double>(state.failures[j]) + 1.0);
    if (theta > best_theta) {
      best_theta = theta;
      best = static_cast<int>(j);
    }
  }
  return best;
}

void baseline_observe(BaselineState& state, int arm, double reward, RngStream* trial_stream) {
  state.sums[arm] += reward;
  ++state.counts[arm];
  ++state.plays;
  if (trial_stream != nullptr) {
    if (e3ts_trial(reward, *trial_stream)) {
      ++state.successes[arm];
    } else {
      ++state.failures[arm];
    }
  }
}

E3Policy::E3Policy(int arms, GammaSchedule schedule) : state_(arms), clock_(arms, schedule) {}

int E3Policy::act() { return e3_act(state_, clock_); }

StepEvent E3Policy::observe(int arm, double reward) {
  e3_observe(state_, clock_, arm, reward);
  const auto ev = clock_.advance();
  if (ev.exploration_completed) {
    state_.chosen = e3_select(state_);
    computations_ += clock_.arms();
  }
  return ev;
}

E3TSPolicy::E3TSPolicy(int arms, GammaSchedule schedule, RngStream trial_stream,
                       RngStream posterior_stream)
    : state_(arms), clock_(arms, schedule), trial_(trial_stream), posterior_(posterior_stream) {}

int E3TSPolicy::act() {
  if (clock_.phase() == Phase::Explore) return static_cast<int>(clock_.offset() % clock_.arms());
  return state_.chosen;
}

StepEvent E3TSPolicy::observe(int arm, double reward) {
  e3ts_observe(state_, clock_, arm, reward, trial_);
  const auto ev = clock_.advance();
  if (ev.exploration_completed) {
    e3ts_select(state_, posterior_);
    computations_ += clock_.arms();
  }
  return ev;
}

int Ucb1Policy::act() {
  const bool initialized = std::all_of(state_.counts.begin(), state_.counts.end(),
                                       [](std::int64_t c) { return c > 0; });
  if (initialized) computations_ += static_cast<std::int64_t>(state_.counts.size());
  return ucb1_act(state_, state_.plays + 1);
}

StepEvent Ucb1Policy::observe(int arm, double reward) {
  baseline_observe(state_, arm, reward, nullptr);
  return {};
}

ThompsonPolicy::ThompsonPolicy(int arms, RngStream trial_stream, RngStream posterior_stream)
    : state_(arms), trial_(trial_stream), posterior_(posterior_stream) {}

int ThompsonPolicy::act() {
  computations_ += static_cast<std::int64_t>(state_.successes.size());
  return ts_act(state_, posterior_);
}

StepEvent ThompsonPolicy::observe(int arm, double reward) {
  baseline_observe(state_, arm, reward, &trial_);
  return {};
}

}  // namespace e3lab
