#include "e3lab/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "e3lab/assignments.hpp"

namespace e3lab {

std::string to_string(RewardFamily family) {
  switch (family) {
    case RewardFamily::Bernoulli: return "bernoulli";
    case RewardFamily::Uniform: return "uniform";
  }
  return "unknown";
}

RewardFamily reward_family_from_string(const std::string& name) {
  if (name == "bernoulli") return RewardFamily::Bernoulli;
  if (name == "uniform") return RewardFamily::Uniform;
  throw std::invalid_argument("unknown reward family '" + name + "'");
}

ArmModel::ArmModel(double mean, RewardFamily family) : family_(family), mean_(mean) {
  if (!(mean >= 0.0 && mean <= 1.0)) {
    throw std::invalid_argument("arm mean must lie in [0,1], got " + std::to_string(mean));
  }
}

BanditInstance::BanditInstance(InstanceMode mode, std::vector<std::vector<ArmModel>> rows)
    : mode_(mode), rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("instance needs at least one player");
  const std::size_t n = rows_.front().size();
  if (n < 2) throw std::invalid_argument("instance needs at least 2 arms");
  for (const auto& row : rows_) {
    if (row.size() != n) throw std::invalid_argument("mean matrix rows differ in length");
  }
  if (rows_.size() > n) {
    throw std::invalid_argument("multiplayer instance requires M <= N (got M=" +
                                std::to_string(rows_.size()) + ", N=" + std::to_string(n) + ")");
  }
}

BanditInstance BanditInstance::single(std::vector<ArmModel> arms) {
  std::vector<std::vector<ArmModel>> rows;
  rows.push_back(std::move(arms));
  return BanditInstance(InstanceMode::Single, std::move(rows));
}

BanditInstance BanditInstance::multi(std::vector<std::vector<ArmModel>> rows) {
  return BanditInstance(InstanceMode::Multi, std::move(rows));
}

BanditInstance BanditInstance::single_bernoulli(const std::vector<double>& means) {
  std::vector<ArmModel> arms;
  for (double m : means) arms.emplace_back(m);
  return single(std::move(arms));
}

BanditInstance BanditInstance::multi_bernoulli(const std::vector<std::vector<double>>& means) {
  std::vector<std::vector<ArmModel>> rows;
  for (const auto& r : means) {
    std::vector<ArmModel> row;
    for (double m : r) row.emplace_back(m);
    rows.push_back(std::move(row));
  }
  return multi(std::move(rows));
}

std::vector<std::vector<double>> BanditInstance::mean_matrix() const {
  std::vector<std::vector<double>> out;
  for (const auto& row : rows_) {
    std::vector<double> r;
    for (const auto& a : row) r.push_back(a.mean());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> GapSummary::suboptimal_gaps() const {
  std::vector<double> out;
  for (double g : gaps) {
    if (g > kTieTolerance) out.push_back(g);
  }
  return out;
}

double sample_reward(const ArmModel& model, RngStream& stream) {
  switch (model.family()) {
    case RewardFamily::Bernoulli:
      return stream.bernoulli(model.mean()) ? 1.0 : 0.0;
    case RewardFamily::Uniform: {
      const double w = std::min(model.mean(), 1.0 - model.mean());
      return std::clamp(model.mean() + w * (2.0 * stream.uniform() - 1.0), 0.0, 1.0);
    }
  }
  return 0.0;
}

std::vector<double> resolve_collisions(std::span<const int> actions,
                                       std::span<const double> drawn) {
  if (actions.size() != drawn.size()) {
    throw std::invalid_argument("resolve_collisions: actions and rewards differ in length");
  }
  std::vector<double> realized(actions.size(), 0.0);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] == kNoAction) continue;
    const auto shared = std::count(actions.begin(), actions.end(), actions[i]);
    if (shared == 1) realized[i] = drawn[i];
  }
  return realized;
}

int count_collisions(std::span<const int> actions) {
  int n = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] == kNoAction) continue;
    if (std::count(actions.begin(), actions.end(), actions[i]) > 1) ++n;
  }
  return n;
}

double assignment_value(const BanditInstance& instance, std::span<const int> assignment) {
  double v = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != kNoAction) v += instance.mean(static_cast<int>(i), assignment[i]);
  }
  return v;
}

namespace {

GapSummary single_summary(const std::vector<double>& means) {
  GapSummary s;
  s.best_arm = static_cast<int>(std::max_element(means.begin(), means.end()) - means.begin());
  s.optimal_surplus = means[s.best_arm];
  bool first = true;
  for (std::size_t j = 0; j < means.size(); ++j) {
    const double g = s.optimal_surplus - means[j];
    s.gaps.push_back(g);
    if (g <= kTieTolerance) {
      s.optimal_matchings.push_back({static_cast<int>(j)});
      continue;
    }
    s.delta_min = first ? g : std::min(s.delta_min, g);
    s.delta_max = first ? g : std::max(s.delta_max, g);
    first = false;
  }
  s.has_strict_gap = !first;
  return s;
}

}  // namespace

GapSummary gap_summary(const BanditInstance& instance, bool require_strict_gap) {
  GapSummary s;
  if (instance.mode() == InstanceMode::Single) {
    s = single_summary(instance.mean_matrix().front());
  } else {
    const int m = instance.players();
    const int n = instance.arms();
    if (n > kMaxEnumerationArms) {
      throw std::invalid_argument("gap_summary: exhaustive enumeration limited to N <= 8");
    }
    std::vector<double> values;
    std::vector<std::vector<int>> assignments;
    double best = -1.0;
    for_each_injective_assignment(m, n, [&](std::span<const int> a) {
      const double v = assignment_value(instance, a);
      values.push_back(v);
      assignments.emplace_back(a.begin(), a.end());
      best = std::max(best, v);
    });
    s.optimal_surplus = best;
    bool first = true;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double g = best - values[k];
      if (g <= kTieTolerance) {
        s.optimal_matchings.push_back(assignments[k]);
        continue;
      }
      s.delta_min = first ? g : std::min(s.delta_min, g);
      s.delta_max = first ? g : std::max(s.delta_max, g);
      first = false;
    }
    s.has_strict_gap = !first;
    if (m == 1) {
      const auto single = single_summary(instance.mean_matrix().front());
      s.best_arm = single.best_arm;
      s.gaps = single.gaps;
    }
  }
  if (require_strict_gap && !s.has_strict_gap) {
    throw std::invalid_argument("gap_summary: instance has no strictly suboptimal choice (delta_min = 0)");
  }
  return s;
}

}  // namespace e3lab
