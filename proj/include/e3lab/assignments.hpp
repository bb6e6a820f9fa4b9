#pragma once

#include <span>
#include <vector>

namespace e3lab {

inline constexpr int kMaxEnumerationArms = 8;

// Visits every injective map of `players` players into `arms` arms in
// lexicographic order of the arm sequence.
template <class Visitor>
void for_each_injective_assignment(int players, int arms, Visitor&& visit) {
  std::vector<int> current(players, 0);
  std::vector<char> used(arms, 0);
  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == players) {
      visit(std::span<const int>(current));
      return;
    }
    for (int arm = 0; arm < arms; ++arm) {
      if (used[arm]) continue;
      used[arm] = 1;
      current[depth] = arm;
      self(self, depth + 1);
      used[arm] = 0;
    }
  };
  recurse(recurse, 0);
}

}  // namespace e3lab
