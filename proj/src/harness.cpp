#include "e3lab/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace e3lab {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::E3: return "e3";
    case PolicyKind::E3TS: return "e3ts";
    case PolicyKind::UCB1: return "ucb1";
    case PolicyKind::TS: return "ts";
    case PolicyKind::DE3: return "de3";
    case PolicyKind::DE3TS: return "de3ts";
  }
  return "e3";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  for (auto k : {PolicyKind::E3, PolicyKind::E3TS, PolicyKind::UCB1, PolicyKind::TS,
                 PolicyKind::DE3, PolicyKind::DE3TS}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown policy '" + name + "' (expected e3, e3ts, ucb1, ts, de3, de3ts)");
}

bool is_multiplayer(PolicyKind kind) { return kind == PolicyKind::DE3 || kind == PolicyKind::DE3TS; }

BanditInstance InstanceSpec::build() const {
  if (means.empty()) throw std::invalid_argument("instance has no means");
  std::vector<std::vector<ArmModel>> rows;
  for (const auto& r : means) {
    std::vector<ArmModel> row;
    for (double m : r) row.emplace_back(m, family);
    rows.push_back(std::move(row));
  }
  if (mode == InstanceMode::Single) {
    if (rows.size() != 1) throw std::invalid_argument("single-mode instance needs exactly one row of means");
    return BanditInstance::single(std::move(rows.front()));
  }
  return BanditInstance::multi(std::move(rows));
}

CostModel CostSpec::model() const {
  return inverse_epsilon ? CostModel::inverse_epsilon() : CostModel::constant(c);
}

namespace {

constexpr std::int64_t kMaxEpochHorizon = 30;

int instance_players(const ExperimentConfig& c) { return static_cast<int>(c.instance.means.size()); }

}  // namespace

GammaSchedule resolve_gamma(const ExperimentConfig& c) {
  const auto& g = c.policy.gamma;
  switch (g.mode) {
    case GammaMode::Fixed:
      if (g.value < 1) throw std::invalid_argument("policy.gamma.value must be >= 1");
      return GammaSchedule::known(g.value);
    case GammaMode::Unknown:
      return GammaSchedule::unknown(g.delta, c.log_base);
    case GammaMode::Known:
      break;
  }
  const double lb = c.policy.delta_lb;
  if (!(lb > 0.0)) throw std::invalid_argument("gamma mode 'known' needs policy.delta_lb > 0");
  switch (c.policy.kind) {
    case PolicyKind::E3: return GammaSchedule::known(gamma_known(lb));
    case PolicyKind::E3TS: return GammaSchedule::known(gamma_beta_known(lb));
    case PolicyKind::DE3:
    case PolicyKind::DE3TS: {
      if (c.policy.epsilon.decaying) {
        throw std::invalid_argument("gamma mode 'known' for a multiplayer policy needs a fixed epsilon");
      }
      const int m = instance_players(c);
      const double eps = c.policy.epsilon.value;
      return GammaSchedule::known(c.policy.kind == PolicyKind::DE3 ? gamma_multi(m, lb, eps)
                                                                   : gamma_beta_multi(m, lb, eps));
    }
    default:
      throw std::invalid_argument("gamma mode 'known' does not apply to " + to_string(c.policy.kind));
  }
}

EpsilonSchedule resolve_epsilon(const ExperimentConfig& c) {
  const auto& e = c.policy.epsilon;
  if (e.decaying) return EpsilonSchedule::decaying(e.delta, c.log_base);
  if (c.policy.delta_lb > 0.0) {
    return EpsilonSchedule::fixed_checked(e.value, c.policy.delta_lb, instance_players(c));
  }
  return EpsilonSchedule::fixed(e.value);
}

void validate(const ExperimentConfig& c) {
  if (c.runs < 1) throw std::invalid_argument("run.runs must be >= 1");
  if (c.horizon < 1) throw std::invalid_argument("run.horizon must be >= 1");
  if (!(c.grid_ratio > 1.0)) throw std::invalid_argument("run.grid_ratio must exceed 1");
  if (c.output.empty()) throw std::invalid_argument("output path is empty");
  const auto instance = c.instance.build();
  const bool multi = is_multiplayer(c.policy.kind);
  if (multi != (c.instance.mode == InstanceMode::Multi)) {
    throw std::invalid_argument("policy " + to_string(c.policy.kind) + " needs a " +
                                (multi ? "multi" : "single") + "-mode instance");
  }
  if (c.unit == HorizonUnit::Epochs) {
    if (c.policy.kind == PolicyKind::UCB1 || c.policy.kind == PolicyKind::TS) {
      throw std::invalid_argument(to_string(c.policy.kind) + " has no epochs; use run.unit: slots");
    }
    if (c.horizon > kMaxEpochHorizon) {
      throw std::invalid_argument("run.horizon in epochs must be <= " + std::to_string(kMaxEpochHorizon));
    }
  }
  if (c.policy.delta_lb < 0.0 || c.policy.delta_lb > 1.0) {
    throw std::invalid_argument("policy.delta_lb must lie in [0,1]");
  }
  if (!(c.cost.c >= 0.0)) throw std::invalid_argument("cost.c must be nonnegative");
  if (c.cost.inverse_epsilon && !multi) {
    throw std::invalid_argument("cost.model inverse_epsilon applies to multiplayer policies only");
  }
  (void)gap_summary(instance);
  if (c.policy.kind != PolicyKind::UCB1 && c.policy.kind != PolicyKind::TS) (void)resolve_gamma(c);
  if (multi) (void)resolve_epsilon(c);
}

namespace {

BoundSpec make_bound_spec(const ExperimentConfig& c, const GapSummary& gaps) {
  BoundSpec s;
  s.arms = static_cast<int>(c.instance.means.front().size());
  s.players = instance_players(c);
  s.delta_min = gaps.delta_min;
  s.delta_max = gaps.delta_max;
  s.delta = c.policy.gamma.delta;
  s.base = c.log_base;
  if (c.policy.kind != PolicyKind::UCB1 && c.policy.kind != PolicyKind::TS) {
    const auto g = resolve_gamma(c);
    if (g.is_known()) s.gamma = s.gamma_beta = g.fixed_gamma();
  }
  if (is_multiplayer(c.policy.kind)) {
    s.cost = c.policy.epsilon.decaying ? 0.0 : c.cost.model().unit_cost(c.policy.epsilon.value);
  } else {
    s.cost = c.cost.c;
  }
  return s;
}

std::optional<double> finite(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

BoundSpec bound_spec(const ExperimentConfig& config) {
  return make_bound_spec(config, gap_summary(config.instance.build()));
}

std::optional<double> policy_bound(const ExperimentConfig& c, const GapSummary& gaps, std::int64_t t) {
  if (t < 2) return std::nullopt;
  const double tt = static_cast<double>(t);
  const auto kind = c.policy.kind;
  if (kind == PolicyKind::TS) return std::nullopt;
  if (kind == PolicyKind::UCB1) return bound_ucb1(tt, gaps.gaps, c.ucb1_log_base);
  const auto spec = make_bound_spec(c, gaps);
  if (c.policy.gamma.mode == GammaMode::Unknown) {
    if (!gaps.has_strict_gap) return std::nullopt;
    const auto b = is_multiplayer(kind) ? bound_unknown_multi(tt, spec) : bound_unknown(tt, spec);
    return finite(b.value());
  }
  switch (kind) {
    case PolicyKind::E3: return bound_e3(tt, spec);
    case PolicyKind::E3TS: return bound_e3ts(tt, spec);
    case PolicyKind::DE3:
    case PolicyKind::DE3TS:
      if (c.policy.epsilon.decaying) return std::nullopt;
      return kind == PolicyKind::DE3 ? bound_de3(tt, spec) : bound_de3ts(tt, spec);
    default: return std::nullopt;
  }
}

namespace {

// Successive distinct values of ceil(ratio^k).
class GridCursor {
 public:
  explicit GridCursor(double ratio) : ratio_(ratio) {}

  std::int64_t current() const { return value_; }

  void next() {
    const std::int64_t prev = value_;
    while (value_ <= prev) {
      power_ *= ratio_;
      value_ = static_cast<std::int64_t>(std::min(ceil_int(power_), std::numeric_limits<std::int64_t>::max() / 2));
    }
  }

 private:
  double ratio_;
  double power_ = 1.0;
  std::int64_t value_ = 1;
};

std::unique_ptr<SinglePolicy> make_single(const ExperimentConfig& c, int arms, std::uint32_t rep) {
  const auto trial = [&] { return RngStream(c.seed, StreamKey{Purpose::Trial, 0, rep}); };
  const auto posterior = [&] { return RngStream(c.seed, StreamKey{Purpose::Posterior, 0, rep}); };
  switch (c.policy.kind) {
    case PolicyKind::E3: return std::make_unique<E3Policy>(arms, resolve_gamma(c));
    case PolicyKind::E3TS:
      return std::make_unique<E3TSPolicy>(arms, resolve_gamma(c), trial(), posterior());
    case PolicyKind::UCB1: return std::make_unique<Ucb1Policy>(arms);
    case PolicyKind::TS: return std::make_unique<ThompsonPolicy>(arms, trial(), posterior());
    default: throw std::invalid_argument("not a single-player policy");
  }
}

// Shared stopping and logging rule for both runners.
struct Recorder {
  const ExperimentConfig& config;
  const GapSummary& gaps;
  GridCursor grid;
  std::int64_t completed_epochs = 0;

  Recorder(const ExperimentConfig& c, const GapSummary& g) : config(c), gaps(g), grid(c.grid_ratio) {}

  // Returns true when slot t was the last one.
  bool after_slot(std::int64_t t, int epoch, bool epoch_completed, RegretLedger& ledger,
                  RunSummary& summary) {
    if (epoch_completed) {
      ++completed_epochs;
      summary.epoch_ends.push_back(t);
    }
    const bool last = config.unit == HorizonUnit::Slots ? t >= config.horizon
                                                         : completed_epochs >= config.horizon;
    bool log = epoch_completed || last;
    if (t == grid.current()) {
      log = true;
      grid.next();
    }
    if (log) ledger.log(t, epoch);
    return last;
  }

  Trajectory finish(const RegretLedger& ledger) const {
    Trajectory out;
    out.reserve(ledger.points().size());
    for (const auto& p : ledger.points()) {
      out.push_back(TrajectoryRecord{p.t, p.total, p.explore, p.exploit, p.comm, p.epoch,
                                     policy_bound(config, gaps, p.t)});
    }
    return out;
  }
};

RunResult run_single(const ExperimentConfig& c, std::uint32_t rep) {
  const auto instance = c.instance.build();
  const auto gaps = gap_summary(instance);
  const int arms = instance.arms();
  auto policy = make_single(c, arms, rep);
  RngStream rewards(c.seed, StreamKey{Purpose::Reward, 0, rep});
  RegretLedger ledger;
  RunResult result;
  auto& s = result.summary;
  s.plays.assign(arms, 0);
  Recorder rec(c, gaps);
  std::int64_t computations = 0;
  for (std::int64_t t = 1;; ++t) {
    const Phase phase = policy->phase();
    const int epoch = policy->epoch();
    const int arm = policy->act();
    const double r = sample_reward(instance.arm(0, arm), rewards);
    const auto ev = policy->observe(arm, r);
    ++s.plays[arm];
    ledger.add_slot(phase, gaps.gaps[arm]);
    const auto m = policy->index_computations();
    if (m != computations) {
      ledger.add_comm(c.cost.c * static_cast<double>(m - computations));
      computations = m;
    }
    s.slots = t;
    if (rec.after_slot(t, epoch, ev.epoch_completed, ledger, s)) break;
  }
  s.computations = computations;
  s.final_regret = ledger.current();
  result.trajectory = rec.finish(ledger);
  return result;
}

RunResult run_multi(const ExperimentConfig& c, std::uint32_t rep) {
  const auto instance = c.instance.build();
  const auto gaps = gap_summary(instance);
  const int players = instance.players();
  TeamConfig tc;
  tc.kind = c.policy.kind == PolicyKind::DE3 ? IndexKind::SampleMean : IndexKind::Posterior;
  tc.players = players;
  tc.arms = instance.arms();
  tc.gamma = resolve_gamma(c);
  tc.epsilon = resolve_epsilon(c);
  tc.cost = c.cost.model();
  tc.charge = c.policy.charge;
  DecentralizedTeam team(tc, c.seed, rep);
  std::vector<RngStream> rewards;
  for (int i = 0; i < players; ++i) {
    rewards.emplace_back(c.seed, StreamKey{Purpose::Reward, static_cast<std::uint32_t>(i), rep});
  }
  RegretLedger ledger;
  RunResult result;
  auto& s = result.summary;
  Recorder rec(c, gaps);
  std::vector<double> drawn(players);
  for (std::int64_t t = 1;; ++t) {
    const Phase phase = team.phase();
    const int epoch = team.epoch();
    const auto actions = team.act();
    for (int i = 0; i < players; ++i) drawn[i] = sample_reward(instance.arm(i, actions[i]), rewards[i]);
    const auto realized = resolve_collisions(actions, drawn);
    const int collisions = count_collisions(actions);
    (phase == Phase::Explore ? s.exploration_collisions : s.exploitation_collisions) += collisions;
    ledger.add_slot(phase, slot_deficit(instance, gaps.optimal_surplus, actions));
    const auto ev = team.observe(actions, realized);
    if (ev.exploration_completed) {
      ledger.add_comm(ev.cost);
      s.comm_slots += team.last_matching()->comm_slots;
    }
    s.slots = t;
    if (rec.after_slot(t, epoch, ev.epoch_completed, ledger, s)) break;
  }
  s.matchings = team.matchings();
  s.computations = team.matchings();
  s.final_regret = ledger.current();
  result.trajectory = rec.finish(ledger);
  return result;
}

}  // namespace

RunResult run_replication(const ExperimentConfig& config, std::uint32_t replication) {
  return is_multiplayer(config.policy.kind) ? run_multi(config, replication)
                                            : run_single(config, replication);
}

std::pair<Trajectory, Trajectory> aggregate(const std::vector<Trajectory>& runs) {
  if (runs.empty()) return {};
  const auto& first = runs.front();
  for (const auto& r : runs) {
    if (r.size() != first.size()) throw std::invalid_argument("trajectories have different lengths");
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k].t != first[k].t) throw std::invalid_argument("trajectories do not share a t grid");
    }
  }
  const double n = static_cast<double>(runs.size());
  Trajectory mean;
  Trajectory sd;
  mean.reserve(first.size());
  sd.reserve(first.size());
  for (std::size_t k = 0; k < first.size(); ++k) {
    TrajectoryRecord m{first[k].t, 0, 0, 0, 0, first[k].epoch, first[k].bound};
    for (const auto& r : runs) {
      m.explore += r[k].explore;
      m.exploit += r[k].exploit;
      m.comm += r[k].comm;
    }
    m.explore /= n;
    m.exploit /= n;
    m.comm /= n;
    m.total = m.explore + m.exploit + m.comm;

    TrajectoryRecord v{first[k].t, 0, 0, 0, 0, first[k].epoch, std::nullopt};
    if (runs.size() > 1) {
      for (const auto& r : runs) {
        v.total += (r[k].total - m.total) * (r[k].total - m.total);
        v.explore += (r[k].explore - m.explore) * (r[k].explore - m.explore);
        v.exploit += (r[k].exploit - m.exploit) * (r[k].exploit - m.exploit);
        v.comm += (r[k].comm - m.comm) * (r[k].comm - m.comm);
      }
      v.total = std::sqrt(v.total / (n - 1));
      v.explore = std::sqrt(v.explore / (n - 1));
      v.exploit = std::sqrt(v.exploit / (n - 1));
      v.comm = std::sqrt(v.comm / (n - 1));
    }
    mean.push_back(m);
    sd.push_back(v);
  }
  return {std::move(mean), std::move(sd)};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult out;
  out.runs.resize(config.runs);
  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(config.runs)));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int rep = next++; rep < config.runs; rep = next++) {
      try {
        out.runs[rep] = run_replication(config, static_cast<std::uint32_t>(rep));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Trajectory> trajectories;
  trajectories.reserve(out.runs.size());
  for (const auto& r : out.runs) trajectories.push_back(r.trajectory);
  std::tie(out.mean, out.stddev) = aggregate(trajectories);
  return out;
}

std::string format_csv(const Trajectory& records) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : records) {
    out += fmt::format("{},{:.12g},{:.12g},{:.12g},{:.12g},{},", r.t, r.total, r.explore, r.exploit,
                       r.comm, r.epoch);
    if (r.bound) out += fmt::format("{:.12g}", *r.bound);
    out += '\n';
  }
  return out;
}

void emit_csv(const Trajectory& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto text = format_csv(records);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::vector<std::int64_t> geometric_grid(std::int64_t horizon, double ratio) {
  if (!(ratio > 1.0)) throw std::invalid_argument("grid ratio must exceed 1");
  std::vector<std::int64_t> out;
  for (GridCursor g(ratio); g.current() <= horizon; g.next()) out.push_back(g.current());
  return out;
}

namespace {

ExperimentConfig fig1_base() {
  ExperimentConfig c;
  c.instance.mode = InstanceMode::Single;
  c.instance.means = {{0.1, 0.5, 0.6, 0.9}};
  c.horizon = 2'000'000;
  c.unit = HorizonUnit::Slots;
  c.runs = 10;
  c.seed = 7;
  c.output = "fig1.csv";
  return c;
}

ExperimentConfig fig2_base() {
  ExperimentConfig c;
  c.instance.mode = InstanceMode::Multi;
  c.instance.means = {{0.2, 0.25, 0.3}, {0.4, 0.6, 0.5}, {0.7, 0.9, 0.8}};
  c.policy.epsilon = EpsilonSpec{false, 0.001, 0.5};
  c.policy.charge = ExplorationCharge::Paper;
  c.cost = CostSpec{false, 1.0};
  c.horizon = 20;
  c.unit = HorizonUnit::Epochs;
  c.runs = 10;
  c.seed = 7;
  c.output = "fig2.csv";
  return c;
}

}  // namespace

std::vector<ExperimentConfig> recipe_fig1() {
  auto e3 = fig1_base();
  e3.name = "fig1-e3";
  e3.policy.kind = PolicyKind::E3;
  e3.policy.gamma = GammaSpec{GammaMode::Fixed, 200, 0.5};
  auto e3ts = fig1_base();
  e3ts.name = "fig1-e3ts";
  e3ts.policy.kind = PolicyKind::E3TS;
  e3ts.policy.gamma = GammaSpec{GammaMode::Fixed, 800, 0.5};
  auto ucb1 = fig1_base();
  ucb1.name = "fig1-ucb1";
  ucb1.policy.kind = PolicyKind::UCB1;
  return {e3, e3ts, ucb1};
}

std::vector<ExperimentConfig> recipe_fig2() {
  auto de3 = fig2_base();
  de3.name = "fig2-de3";
  de3.policy.kind = PolicyKind::DE3;
  de3.policy.gamma = GammaSpec{GammaMode::Fixed, 100, 0.5};
  auto de3ts = fig2_base();
  de3ts.name = "fig2-de3ts";
  de3ts.policy.kind = PolicyKind::DE3TS;
  de3ts.policy.gamma = GammaSpec{GammaMode::Fixed, 400, 0.5};
  return {de3, de3ts};
}

std::filesystem::path policy_output_path(const std::filesystem::path& base, const std::string& tag) {
  auto name = base.stem().string() + "_" + tag + base.extension().string();
  return base.parent_path() / name;
}

std::filesystem::path resolve_output_path(const std::filesystem::path& path) {
  const char* dir = std::getenv("E3LAB_OUT_DIR");
  if (path.is_relative() && dir != nullptr && *dir != '\0') return std::filesystem::path(dir) / path;
  return path;
}

}  // namespace e3lab
