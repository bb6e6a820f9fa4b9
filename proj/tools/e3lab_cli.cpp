// Command-line front end: run experiments, print bound curves, demo the auction.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "e3lab/harness.hpp"
#include "e3lab/matching.hpp"

namespace fs = std::filesystem;
using namespace e3lab;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::optional<int> runs;
  std::optional<std::string> out;
  std::optional<std::string> log_base;

  void apply(ExperimentConfig& c) const {
    if (seed) c.seed = *seed;
    if (horizon) c.horizon = *horizon;
    if (runs) c.runs = *runs;
    if (out) c.output = *out;
    if (log_base) c.log_base = log_base_from_string(*log_base);
  }
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--horizon", o.horizon, "horizon (slots, or epochs when the config says so)");
  cmd->add_option("--runs", o.runs, "number of replications");
  cmd->add_option("--out", o.out, "output CSV path");
  cmd->add_option("--log-base", o.log_base, "log base for bounds and schedules")
      ->check(CLI::IsMember({"2", "e"}));
}

void write_text(const std::string& text, const std::optional<std::string>& out) {
  if (!out) {
    std::cout << text;
    return;
  }
  const auto path = resolve_output_path(*out);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write to " + path.string() + " failed");
}

void report(const ExperimentConfig& c, const ExperimentResult& r, const fs::path& path) {
  const auto& last = r.mean.back();
  std::int64_t explore_coll = 0;
  std::int64_t exploit_coll = 0;
  for (const auto& run : r.runs) {
    explore_coll += run.summary.exploration_collisions;
    exploit_coll += run.summary.exploitation_collisions;
  }
  std::cout << fmt::format("{}: {} runs, t={}, mean regret {:.6g} (explore {:.6g}, exploit {:.6g}, comm {:.6g})",
                           c.name, c.runs, last.t, last.total, last.explore, last.exploit, last.comm);
  if (is_multiplayer(c.policy.kind)) {
    std::cout << fmt::format(", collisions explore {} exploit {}", explore_coll, exploit_coll);
  }
  std::cout << " -> " << path.string() << "\n";
}

void run_and_write(const ExperimentConfig& c, const fs::path& path) {
  const auto result = run_experiment(c);
  emit_csv(result.mean, path);
  report(c, result, path);
}

int cmd_experiment(const std::string& config_path, const Overrides& o, bool multi) {
  auto c = load_config_file(config_path);
  o.apply(c);
  validate(c);
  if (is_multiplayer(c.policy.kind) != multi) {
    throw std::invalid_argument(fmt::format("policy {} belongs to the '{}' subcommand", to_string(c.policy.kind),
                                            multi ? "single" : "multi"));
  }
  run_and_write(c, resolve_output_path(c.output));
  return 0;
}

int cmd_bounds(const std::string& config_path, const Overrides& o) {
  auto c = load_config_file(config_path);
  o.apply(c);
  validate(c);
  const auto gaps = gap_summary(c.instance.build());
  std::string text = "t,bound_value\n";
  auto grid = geometric_grid(c.horizon, c.grid_ratio);
  if (grid.empty() || grid.back() != c.horizon) grid.push_back(c.horizon);
  for (auto t : grid) {
    if (t < 2) continue;
    const auto b = policy_bound(c, gaps, t);
    text += fmt::format("{},{}\n", t, b ? fmt::format("{:.12g}", *b) : std::string());
  }
  write_text(text, o.out);
  return 0;
}

int cmd_auction(const std::optional<std::string>& config_path, std::optional<double> eps_flag) {
  std::vector<std::vector<double>> rows = {{0.2, 0.25, 0.3}, {0.4, 0.6, 0.5}, {0.7, 0.9, 0.8}};
  double eps = 0.001;
  if (config_path) {
    YAML::Node root;
    try {
      root = YAML::LoadFile(*config_path);
    } catch (const YAML::Exception& e) {
      throw std::invalid_argument(*config_path + ": " + e.what());
    }
    if (!root.IsMap()) throw std::invalid_argument(*config_path + ": expected a mapping");
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (key != "values" && key != "epsilon") {
        throw std::invalid_argument(*config_path + ": unknown key '" + key + "'");
      }
    }
    try {
      if (root["values"]) rows = root["values"].as<std::vector<std::vector<double>>>();
      if (root["epsilon"]) eps = root["epsilon"].as<double>();
    } catch (const YAML::Exception&) {
      throw std::invalid_argument(*config_path + ": values must be a list of rows, epsilon a number");
    }
  }
  if (eps_flag) eps = *eps_flag;
  const ValueMatrix values(rows);
  const auto result = auction_run(values, eps);
  const auto best = brute_force(values);
  std::cout << fmt::format("values: {} players x {} arms, epsilon {}\n", values.players(), values.arms(), eps);
  std::string assign;
  for (std::size_t i = 0; i < result.matching.arm_of_player.size(); ++i) {
    assign += fmt::format("{}player {} -> arm {}", i == 0 ? "" : ", ", i + 1,
                          result.matching.arm_of_player[i] + 1);
  }
  std::cout << "assignment: " << assign << "\n";
  std::cout << fmt::format("surplus: {:.6f} (optimum {:.6f}, gap {:.3g})\n", result.matching.surplus(values),
                           best.surplus, best.surplus - result.matching.surplus(values));
  std::cout << fmt::format("iterations: {} (bound {})\n", result.trace.iterations, result.trace.iteration_bound);
  std::cout << fmt::format("communication: {} slots, {} bits per message\n", result.trace.comm.slots,
                           result.trace.comm.bits_per_message);
  return 0;
}

int cmd_repro(const std::string& figure, const Overrides& o) {
  std::vector<ExperimentConfig> recipe = figure == "fig1" ? recipe_fig1() : recipe_fig2();
  for (auto& c : recipe) {
    const fs::path base = o.out ? fs::path(*o.out) : fs::path(c.output);
    o.apply(c);
    validate(c);
    run_and_write(c, resolve_output_path(policy_output_path(base, to_string(c.policy.kind))));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phased exploration/exploitation bandit experiments"};
  app.require_subcommand(1);

  Overrides single_o, multi_o, bounds_o, repro_o;
  std::string single_cfg, multi_cfg, bounds_cfg, figure;
  std::optional<std::string> auction_cfg;
  std::optional<double> auction_eps;

  auto* single = app.add_subcommand("single", "run a single-player experiment");
  single->add_option("--config", single_cfg, "YAML config")->required()->check(CLI::ExistingFile);
  add_common(single, single_o);

  auto* multi = app.add_subcommand("multi", "run a multiplayer experiment");
  multi->add_option("--config", multi_cfg, "YAML config")->required()->check(CLI::ExistingFile);
  add_common(multi, multi_o);

  auto* bounds = app.add_subcommand("bounds", "print the configured policy's regret bound curve");
  bounds->add_option("--config", bounds_cfg, "YAML config")->required()->check(CLI::ExistingFile);
  add_common(bounds, bounds_o);

  auto* auction = app.add_subcommand("auction-demo", "run the auction on a value matrix");
  auction->add_option("--config", auction_cfg, "YAML with 'values' and 'epsilon'")->check(CLI::ExistingFile);
  auction->add_option("--epsilon", auction_eps, "bid increment")->check(CLI::PositiveNumber);

  auto* repro = app.add_subcommand("repro", "reproduce a figure recipe");
  repro->add_option("figure", figure, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
  add_common(repro, repro_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    std::cerr << (sub != nullptr ? sub->help() : app.help());
    return 2;
  }

  try {
    if (single->parsed()) return cmd_experiment(single_cfg, single_o, false);
    if (multi->parsed()) return cmd_experiment(multi_cfg, multi_o, true);
    if (bounds->parsed()) return cmd_bounds(bounds_cfg, bounds_o);
    if (auction->parsed()) return cmd_auction(auction_cfg, auction_eps);
    if (repro->parsed()) return cmd_repro(figure, repro_o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
