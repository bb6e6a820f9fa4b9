#pragma once

#include <span>
#include <string>
#include <vector>

#include "e3lab/rng.hpp"

namespace e3lab {

// Arms are 0-based everywhere in the library; the CLI and CSV output never
// expose arm ids, and reports print them 1-based.
inline constexpr int kNoAction = -1;

// Tolerance used to decide that two surpluses (or means) are equal.
inline constexpr double kTieTolerance = 1e-12;

enum class RewardFamily {
  Bernoulli,
  // Uniform on [mean - w, mean + w] with w = min(mean, 1 - mean).
  Uniform,
};

std::string to_string(RewardFamily family);
RewardFamily reward_family_from_string(const std::string& name);

class ArmModel {
 public:
  explicit ArmModel(double mean, RewardFamily family = RewardFamily::Bernoulli);

  double mean() const { return mean_; }
  RewardFamily family() const { return family_; }

  bool operator==(const ArmModel&) const = default;

 private:
  RewardFamily family_;
  double mean_;
};

enum class InstanceMode { Single, Multi };

// Ground truth for one bandit problem: a players x arms table of arm models.
// Single mode always has exactly one row.
class BanditInstance {
 public:
  static BanditInstance single(std::vector<ArmModel> arms);
  static BanditInstance multi(std::vector<std::vector<ArmModel>> rows);
  static BanditInstance single_bernoulli(const std::vector<double>& means);
  static BanditInstance multi_bernoulli(const std::vector<std::vector<double>>& means);

  InstanceMode mode() const { return mode_; }
  int players() const { return static_cast<int>(rows_.size()); }
  int arms() const { return static_cast<int>(rows_.front().size()); }

  const ArmModel& arm(int player, int arm) const { return rows_[player][arm]; }
  double mean(int player, int arm) const { return rows_[player][arm].mean(); }
  std::vector<std::vector<double>> mean_matrix() const;
  const std::vector<std::vector<ArmModel>>& rows() const { return rows_; }

  bool operator==(const BanditInstance&) const = default;

 private:
  BanditInstance(InstanceMode mode, std::vector<std::vector<ArmModel>> rows);

  InstanceMode mode_;
  std::vector<std::vector<ArmModel>> rows_;
};

struct GapSummary {
  // Single mode: best arm and the gap of every arm against it (0 for the best).
  int best_arm = 0;
  std::vector<double> gaps;

  // Multi mode (also filled for single mode, with one-element assignments):
  // optimal surplus and every assignment attaining it, in lexicographic order.
  double optimal_surplus = 0.0;
  std::vector<std::vector<int>> optimal_matchings;

  // Over strictly suboptimal arms / assignments only. When nothing is strictly
  // suboptimal, has_strict_gap is false and both are 0.
  double delta_min = 0.0;
  double delta_max = 0.0;
  bool has_strict_gap = false;

  // Gaps of the strictly suboptimal arms, in arm order (single mode).
  std::vector<double> suboptimal_gaps() const;
};

double sample_reward(const ArmModel& model, RngStream& stream);

// Players sharing an arm get 0; unique choosers keep their draw; kNoAction
// players get 0.
std::vector<double> resolve_collisions(std::span<const int> actions,
                                       std::span<const double> drawn);

// Number of players whose action collides with another player's.
int count_collisions(std::span<const int> actions);

// Exhaustive for multi mode, so it requires N <= 8. Throws if
// require_strict_gap is set and no assignment is strictly suboptimal.
GapSummary gap_summary(const BanditInstance& instance, bool require_strict_gap = false);

// Sum of mean rewards of an injective assignment (kNoAction entries add 0).
double assignment_value(const BanditInstance& instance, std::span<const int> assignment);

}  // namespace e3lab
