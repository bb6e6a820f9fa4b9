// YAML configuration loading, validation and serialization.

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include "e3lab/harness.hpp"

namespace e3lab {

namespace {

void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed,
                const std::string& section) {
  if (!node.IsMap()) throw std::invalid_argument("config: '" + section + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw std::invalid_argument("config: unknown key '" + key + "' in " + section);
  }
}

template <class T>
T get(const YAML::Node& node, const char* key, const std::string& section, T fallback) {
  const auto child = node[key];
  if (!child) return fallback;
  try {
    return child.as<T>();
  } catch (const YAML::Exception&) {
    throw std::invalid_argument("config: bad value for '" + section + "." + key + "'");
  }
}

template <class T>
T require(const YAML::Node& node, const char* key, const std::string& section) {
  if (!node[key]) throw std::invalid_argument("config: missing '" + section + "." + key + "'");
  return get<T>(node, key, section, T{});
}

InstanceSpec parse_instance(const YAML::Node& node) {
  check_keys(node, {"mode", "family", "means"}, "instance");
  InstanceSpec spec;
  const auto mode = require<std::string>(node, "mode", "instance");
  if (mode == "single") {
    spec.mode = InstanceMode::Single;
  } else if (mode == "multi") {
    spec.mode = InstanceMode::Multi;
  } else {
    throw std::invalid_argument("config: instance.mode must be 'single' or 'multi'");
  }
  spec.family = reward_family_from_string(get<std::string>(node, "family", "instance", "bernoulli"));
  const auto means = node["means"];
  if (!means || !means.IsSequence() || means.size() == 0) {
    throw std::invalid_argument("config: instance.means must be a non-empty list");
  }
  try {
    if (spec.mode == InstanceMode::Single) {
      spec.means.push_back(means.as<std::vector<double>>());
    } else {
      spec.means = means.as<std::vector<std::vector<double>>>();
    }
  } catch (const YAML::Exception&) {
    throw std::invalid_argument(spec.mode == InstanceMode::Single
                                    ? "config: single-mode instance.means must be a list of numbers"
                                    : "config: multi-mode instance.means must be a list of rows");
  }
  return spec;
}

PolicySpec parse_policy(const YAML::Node& node) {
  check_keys(node, {"kind", "gamma", "epsilon", "delta_lb", "charge_exploration"}, "policy");
  PolicySpec spec;
  spec.kind = policy_kind_from_string(require<std::string>(node, "kind", "policy"));
  if (const auto g = node["gamma"]) {
    check_keys(g, {"mode", "value", "delta"}, "policy.gamma");
    const auto mode = get<std::string>(g, "mode", "policy.gamma", "fixed");
    if (mode == "fixed") {
      spec.gamma.mode = GammaMode::Fixed;
    } else if (mode == "known") {
      spec.gamma.mode = GammaMode::Known;
    } else if (mode == "unknown") {
      spec.gamma.mode = GammaMode::Unknown;
    } else {
      throw std::invalid_argument("config: policy.gamma.mode must be fixed, known or unknown");
    }
    spec.gamma.value = get<int>(g, "value", "policy.gamma", spec.gamma.value);
    spec.gamma.delta = get<double>(g, "delta", "policy.gamma", spec.gamma.delta);
  }
  if (const auto e = node["epsilon"]) {
    check_keys(e, {"mode", "value", "delta"}, "policy.epsilon");
    const auto mode = get<std::string>(e, "mode", "policy.epsilon", "fixed");
    if (mode != "fixed" && mode != "decaying") {
      throw std::invalid_argument("config: policy.epsilon.mode must be fixed or decaying");
    }
    spec.epsilon.decaying = mode == "decaying";
    spec.epsilon.value = get<double>(e, "value", "policy.epsilon", spec.epsilon.value);
    spec.epsilon.delta = get<double>(e, "delta", "policy.epsilon", spec.epsilon.delta);
  }
  spec.delta_lb = get<double>(node, "delta_lb", "policy", 0.0);
  spec.charge = exploration_charge_from_string(
      get<std::string>(node, "charge_exploration", "policy", "paper"));
  return spec;
}

CostSpec parse_cost(const YAML::Node& node) {
  check_keys(node, {"model", "c"}, "cost");
  CostSpec spec;
  const auto model = get<std::string>(node, "model", "cost", "constant");
  if (model == "constant") {
    spec.inverse_epsilon = false;
  } else if (model == "inverse_epsilon") {
    spec.inverse_epsilon = true;
  } else {
    throw std::invalid_argument("config: cost.model must be constant or inverse_epsilon");
  }
  spec.c = get<double>(node, "c", "cost", 0.0);
  return spec;
}

std::string num(double v) { return fmt::format("{}", v); }

const char* gamma_mode_name(GammaMode m) {
  switch (m) {
    case GammaMode::Fixed: return "fixed";
    case GammaMode::Known: return "known";
    case GammaMode::Unknown: return "unknown";
  }
  return "fixed";
}

}  // namespace

ExperimentConfig load_config_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("config: YAML parse error: ") + e.what());
  }
  check_keys(root, {"name", "instance", "policy", "cost", "run", "output"}, "top level");
  ExperimentConfig cfg;
  cfg.name = get<std::string>(root, "name", "top level", cfg.name);
  if (!root["instance"]) throw std::invalid_argument("config: missing 'instance' section");
  if (!root["policy"]) throw std::invalid_argument("config: missing 'policy' section");
  cfg.instance = parse_instance(root["instance"]);
  cfg.policy = parse_policy(root["policy"]);
  if (const auto c = root["cost"]) cfg.cost = parse_cost(c);
  if (const auto r = root["run"]) {
    check_keys(r, {"horizon", "unit", "runs", "seed", "log_base", "ucb1_log_base", "grid_ratio"}, "run");
    cfg.horizon = get<std::int64_t>(r, "horizon", "run", cfg.horizon);
    const auto unit = get<std::string>(r, "unit", "run", "slots");
    if (unit == "slots") {
      cfg.unit = HorizonUnit::Slots;
    } else if (unit == "epochs") {
      cfg.unit = HorizonUnit::Epochs;
    } else {
      throw std::invalid_argument("config: run.unit must be slots or epochs");
    }
    cfg.runs = get<int>(r, "runs", "run", cfg.runs);
    cfg.seed = get<std::uint64_t>(r, "seed", "run", cfg.seed);
    cfg.log_base = log_base_from_string(get<std::string>(r, "log_base", "run", "2"));
    cfg.ucb1_log_base = log_base_from_string(get<std::string>(r, "ucb1_log_base", "run", "e"));
    cfg.grid_ratio = get<double>(r, "grid_ratio", "run", cfg.grid_ratio);
  }
  cfg.output = get<std::string>(root, "output", "top level", cfg.output);
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return load_config_string(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::string dump_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;

  out << YAML::Key << "instance" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value
      << (c.instance.mode == InstanceMode::Single ? "single" : "multi");
  out << YAML::Key << "family" << YAML::Value << to_string(c.instance.family);
  out << YAML::Key << "means" << YAML::Value;
  auto emit_row = [&](const std::vector<double>& row) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double v : row) out << num(v);
    out << YAML::EndSeq;
  };
  if (c.instance.mode == InstanceMode::Single) {
    emit_row(c.instance.means.front());
  } else {
    out << YAML::BeginSeq;
    for (const auto& row : c.instance.means) emit_row(row);
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "policy" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(c.policy.kind);
  out << YAML::Key << "gamma" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << gamma_mode_name(c.policy.gamma.mode);
  out << YAML::Key << "value" << YAML::Value << c.policy.gamma.value;
  out << YAML::Key << "delta" << YAML::Value << num(c.policy.gamma.delta);
  out << YAML::EndMap;
  out << YAML::Key << "epsilon" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << (c.policy.epsilon.decaying ? "decaying" : "fixed");
  out << YAML::Key << "value" << YAML::Value << num(c.policy.epsilon.value);
  out << YAML::Key << "delta" << YAML::Value << num(c.policy.epsilon.delta);
  out << YAML::EndMap;
  out << YAML::Key << "delta_lb" << YAML::Value << num(c.policy.delta_lb);
  out << YAML::Key << "charge_exploration" << YAML::Value << to_string(c.policy.charge);
  out << YAML::EndMap;

  out << YAML::Key << "cost" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << (c.cost.inverse_epsilon ? "inverse_epsilon" : "constant");
  out << YAML::Key << "c" << YAML::Value << num(c.cost.c);
  out << YAML::EndMap;

  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "horizon" << YAML::Value << c.horizon;
  out << YAML::Key << "unit" << YAML::Value << (c.unit == HorizonUnit::Slots ? "slots" : "epochs");
  out << YAML::Key << "runs" << YAML::Value << c.runs;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "log_base" << YAML::Value << YAML::DoubleQuoted << to_string(c.log_base);
  out << YAML::Key << "ucb1_log_base" << YAML::Value << to_string(c.ucb1_log_base);
  out << YAML::Key << "grid_ratio" << YAML::Value << num(c.grid_ratio);
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << c.output;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace e3lab
