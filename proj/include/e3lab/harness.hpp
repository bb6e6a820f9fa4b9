#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "e3lab/env.hpp"
#include "e3lab/numeric.hpp"
#include "e3lab/policy_multi.hpp"
#include "e3lab/regret.hpp"

namespace e3lab {

enum class PolicyKind { E3, E3TS, UCB1, TS, DE3, DE3TS };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);
bool is_multiplayer(PolicyKind kind);

struct InstanceSpec {
  InstanceMode mode = InstanceMode::Single;
  RewardFamily family = RewardFamily::Bernoulli;
  std::vector<std::vector<double>> means;

  BanditInstance build() const;
  bool operator==(const InstanceSpec&) const = default;
};

// fixed: explicit gamma. known: derived from delta_lb by the policy's formula.
// unknown: log^delta schedule.
enum class GammaMode { Fixed, Known, Unknown };

struct GammaSpec {
  GammaMode mode = GammaMode::Fixed;
  int value = 1;
  double delta = 0.5;

  bool operator==(const GammaSpec&) const = default;
};

struct EpsilonSpec {
  bool decaying = false;
  double value = 0.001;
  double delta = 0.5;

  bool operator==(const EpsilonSpec&) const = default;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::E3;
  GammaSpec gamma;
  EpsilonSpec epsilon;
  // Lower bound on the minimum gap; 0 when not supplied.
  double delta_lb = 0.0;
  ExplorationCharge charge = ExplorationCharge::Paper;

  bool operator==(const PolicySpec&) const = default;
};

struct CostSpec {
  bool inverse_epsilon = false;
  double c = 0.0;

  CostModel model() const;
  bool operator==(const CostSpec&) const = default;
};

enum class HorizonUnit { Slots, Epochs };

struct ExperimentConfig {
  std::string name = "experiment";
  InstanceSpec instance;
  PolicySpec policy;
  CostSpec cost;
  std::int64_t horizon = 1;
  HorizonUnit unit = HorizonUnit::Slots;
  int runs = 1;
  std::uint64_t seed = 0;
  // Base for the phased bound curves and for the gamma_t / eps_t schedules.
  LogBase log_base = LogBase::Two;
  LogBase ucb1_log_base = LogBase::E;
  double grid_ratio = 1.2;
  std::string output = "out.csv";

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws std::invalid_argument describing the first problem found.
void validate(const ExperimentConfig& config);

ExperimentConfig load_config_string(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);
// Every field written out, defaults included.
std::string dump_config(const ExperimentConfig& config);

GammaSchedule resolve_gamma(const ExperimentConfig& config);
EpsilonSchedule resolve_epsilon(const ExperimentConfig& config);
// Bound parameters for the configured policy, from true gaps and resolved gamma.
BoundSpec bound_spec(const ExperimentConfig& config);
// Bound curve of the configured policy at t; nullopt when the policy has no
// finite stated bound (TS, or a constant term that overflows).
std::optional<double> policy_bound(const ExperimentConfig& config, const GapSummary& gaps,
                                   std::int64_t t);

struct TrajectoryRecord {
  std::int64_t t = 0;
  double total = 0.0;
  double explore = 0.0;
  double exploit = 0.0;
  double comm = 0.0;
  int epoch = 0;
  std::optional<double> bound;

  bool operator==(const TrajectoryRecord&) const = default;
};

using Trajectory = std::vector<TrajectoryRecord>;

struct RunSummary {
  std::int64_t slots = 0;
  // Per-arm play counts (single player).
  std::vector<std::int64_t> plays;
  std::int64_t computations = 0;
  std::int64_t matchings = 0;
  std::int64_t exploration_collisions = 0;
  std::int64_t exploitation_collisions = 0;
  std::int64_t comm_slots = 0;
  // Slot index at the end of every completed epoch.
  std::vector<std::int64_t> epoch_ends;
  RegretComponents final_regret;
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  Trajectory mean;
  Trajectory stddev;
};

// One seeded replication.
RunResult run_replication(const ExperimentConfig& config, std::uint32_t replication);
// All replications (concurrently when cores allow) plus cross-run aggregates.
ExperimentResult run_experiment(const ExperimentConfig& config);
// Per-t mean and sample standard deviation; trajectories must share their t grid.
std::pair<Trajectory, Trajectory> aggregate(const std::vector<Trajectory>& runs);

inline constexpr const char* kCsvHeader =
    "t,regret_total,regret_explore,regret_exploit,regret_comm,epoch,bound";

std::string format_csv(const Trajectory& records);
void emit_csv(const Trajectory& records, const std::filesystem::path& path);

// t = ceil(ratio^k) for k = 0, 1, ... up to and including horizon.
std::vector<std::int64_t> geometric_grid(std::int64_t horizon, double ratio);

// Reproduction recipes; each figure compares several policies.
std::vector<ExperimentConfig> recipe_fig1();
std::vector<ExperimentConfig> recipe_fig2();

// "dir/fig1.csv" + "e3" -> "dir/fig1_e3.csv"
std::filesystem::path policy_output_path(const std::filesystem::path& base, const std::string& tag);
// Relative paths resolve under $E3LAB_OUT_DIR when it is set.
std::filesystem::path resolve_output_path(const std::filesystem::path& path);

}  // namespace e3lab
