#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <wgt/wgt.hpp>

namespace cli {

using nlohmann::json;

/// Raised for any configuration problem; maps to exit status 2.
[[noreturn]] inline void config_error(const std::string& what) { wgt::fail(wgt::ErrorCode::Parse, "config: " + what); }

/// Built-in configuration. config/paper.json ships the same tree.
inline json default_config() {
  return json::parse(R"({
  "presets": {
    "weights": {
      "lambda_A": [0.3, 0.8, 1.0, 0.9, 0.7, 1.0, 2.0, 2.2, 1.2, 1.4, 0.8, 0.5, 1.5, 0.6, 0.6, 0.5],
      "lambda_B": [0.4, 2.3, 1.2, 0.5, 1.0, 0.6, 1.5, 0.8, 1.1, 0.7, 1.8, 0.9, 1.4, 0.6, 1.2, 1.0]
    },
    "epsilon": 0.3,
    "experiment": {
      "n": 16, "d": 10, "T": 240, "record_every": 3,
      "seeds": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
      "sigma": 1.0, "reg": 0.01, "mu0": 3.0, "zeta_range": [5.5, 12.5],
      "shared_init": true,
      "alpha": {"ring": 0.09, "default": 0.12}
    }
  },
  "weights": "lambda_A",
  "gap_weights": ["lambda_A", "lambda_B"],
  "strategy": "both",
  "topologies": [
    {"name": "ring", "family": "ring", "n": 16},
    {"name": "grid", "family": "grid", "rows": 4, "cols": 4, "periodic": false},
    {"name": "exp", "family": "exp", "n": 16},
    {"name": "G_lambda_A", "family": "custom", "n": 16, "weights": "lambda_A", "avg_degree": 6, "trials": 50, "seed": 0},
    {"name": "G_lambda_B", "family": "custom", "n": 16, "weights": "lambda_B", "avg_degree": 6, "trials": 50, "seed": 0}
  ],
  "simulate": {"topologies": ["ring", "grid", "exp", "G_lambda_A"]},
  "compare": {"topology": "G_lambda_A", "run": true},
  "bounds": {"topology": "G_lambda_A"}
})");
}

struct NamedWeights {
  std::string id;
  wgt::WeightVector weights = wgt::uniform_weights(2);
};

struct Topology {
  std::string name;
  wgt::TopologySpec spec;
  std::optional<NamedWeights> build_weights;  ///< custom family only
  json params;                                ///< as written in the config
};

struct Experiment {
  int d = 10;
  long T = 240;
  long record_every = 3;
  std::vector<std::uint64_t> seeds;
  double sigma = 1.0;
  double reg = 0.01;
  double mu0 = 3.0;
  double zeta_min = 5.5;
  double zeta_max = 12.5;
  bool shared_init = true;
  json alpha;  ///< number or {name|family: value, "default": value}

  wgt::ProblemConfig problem(int n) const {
    wgt::ProblemConfig p;
    p.n = n;
    p.d = d;
    p.zeta_min = zeta_min;
    p.zeta_max = zeta_max;
    p.mu0 = mu0;
    p.reg = reg;
    p.sigma = sigma;
    p.shared_init = shared_init;
    return p;
  }

  /// Smoothness bound valid for every generated instance.
  double beta_bound() const { return zeta_max + reg; }
};

struct RunConfig {
  json tree;  ///< fully merged tree, echoed into manifests
  std::map<std::string, std::vector<double>> presets;
  double epsilon = wgt::kDefaultLaziness;
  NamedWeights weights;
  std::vector<NamedWeights> gap_weights;
  std::vector<Topology> topologies;
  std::vector<wgt::Strategy> strategies;
  Experiment experiment;
  int jobs = 1;
  std::filesystem::path out = "out";

  const Topology& topology(const std::string& name) const {
    for (const auto& t : topologies) {
      if (t.name == name) return t;
    }
    config_error("unknown topology '" + name + "'");
    return topologies.front();
  }

  std::vector<const Topology*> select(const json& section, const char* key) const {
    std::vector<const Topology*> out;
    if (!section.is_object() || !section.contains(key)) {
      for (const auto& t : topologies) out.push_back(&t);
      return out;
    }
    for (const auto& n : section.at(key)) out.push_back(&topology(n.get<std::string>()));
    return out;
  }

  double alpha_for(const Topology& t) const {
    const auto& a = experiment.alpha;
    double v = 0.0;
    if (a.is_number()) {
      v = a.get<double>();
    } else if (a.contains(t.name)) {
      v = a.at(t.name).get<double>();
    } else if (a.contains(std::string(wgt::to_string(t.spec.family)))) {
      v = a.at(std::string(wgt::to_string(t.spec.family))).get<double>();
    } else if (a.contains("default")) {
      v = a.at("default").get<double>();
    } else {
      config_error("no step size for topology '" + t.name + "'");
    }
    if (!(v > 0.0)) config_error("step size for '" + t.name + "' must be positive");
    return v;
  }
};

namespace detail {

inline void merge(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      merge(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

}  // namespace detail

inline NamedWeights resolve_weights(const json& src, const RunConfig& cfg, int n_hint,
                                    const std::filesystem::path& base_dir) {
  if (src.is_string()) {
    const auto id = src.get<std::string>();
    if (id == "uniform") return {id, wgt::uniform_weights(static_cast<std::size_t>(n_hint))};
    const auto it = cfg.presets.find(id);
    if (it == cfg.presets.end()) config_error("unknown weight preset '" + id + "'");
    return {id, wgt::make_weights(it->second)};
  }
  if (src.is_array()) return {"literal", wgt::make_weights(src.get<std::vector<double>>())};
  if (src.is_object() && src.contains("file")) {
    auto path = std::filesystem::path(src.at("file").get<std::string>());
    if (path.is_relative()) path = base_dir / path;
    std::ifstream in(path);
    if (!in) config_error("cannot open weights file " + path.string());
    return {path.stem().string(), wgt::read_weights(in)};
  }
  config_error("weights must be a preset name, a list, or {\"file\": path}");
}

/// Parses and validates everything up front; nothing is computed on failure.
inline RunConfig load_config(const std::optional<std::filesystem::path>& path) {
  RunConfig cfg;
  json tree = default_config();
  std::filesystem::path base_dir = ".";
  if (path) {
    std::ifstream in(*path);
    if (!in) config_error("cannot open " + path->string());
    json user;
    try {
      user = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      config_error(std::string("malformed JSON: ") + e.what());
    }
    if (!user.is_object()) config_error("top level must be an object");
    // Lists replace rather than merge, so a user topology list is taken as is.
    detail::merge(tree, user);
    base_dir = path->parent_path().empty() ? std::filesystem::path(".") : path->parent_path();
  }
  cfg.tree = tree;

  try {
    const auto& presets = tree.at("presets");
    for (auto it = presets.at("weights").begin(); it != presets.at("weights").end(); ++it) {
      cfg.presets[it.key()] = it->get<std::vector<double>>();
    }
    cfg.epsilon = detail::get_or(tree, "epsilon", presets.at("epsilon").get<double>());
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) config_error("epsilon must lie in (0, 1)");

    json exp = presets.at("experiment");
    if (tree.contains("experiment")) detail::merge(exp, tree.at("experiment"));
    cfg.tree["experiment"] = exp;
    const int n = exp.at("n").get<int>();
    auto& e = cfg.experiment;
    e.d = exp.at("d").get<int>();
    e.T = exp.at("T").get<long>();
    e.record_every = exp.at("record_every").get<long>();
    e.seeds = exp.at("seeds").get<std::vector<std::uint64_t>>();
    e.sigma = exp.at("sigma").get<double>();
    e.reg = exp.at("reg").get<double>();
    e.mu0 = exp.at("mu0").get<double>();
    const auto zr = exp.at("zeta_range").get<std::vector<double>>();
    if (zr.size() != 2) config_error("zeta_range must have two entries");
    e.zeta_min = zr[0];
    e.zeta_max = zr[1];
    e.shared_init = detail::get_or(exp, "shared_init", true);
    e.alpha = exp.at("alpha");
    if (e.T < 0) config_error("T must be non-negative");
    if (e.record_every < 1) config_error("record_every must be >= 1");
    if (e.seeds.empty()) config_error("seed list is empty");
    if (!(e.alpha.is_number() || e.alpha.is_object())) config_error("alpha must be a number or a table");

    cfg.weights = resolve_weights(tree.at("weights"), cfg, n, base_dir);
    for (const auto& g : tree.at("gap_weights")) cfg.gap_weights.push_back(resolve_weights(g, cfg, n, base_dir));

    const auto strategy = tree.at("strategy").get<std::string>();
    if (strategy == "both") {
      cfg.strategies = {wgt::Strategy::I, wgt::Strategy::II};
    } else {
      cfg.strategies = {wgt::parse_strategy(strategy)};
    }

    for (const auto& t : tree.at("topologies")) {
      Topology top;
      top.params = t;
      top.spec.family = wgt::parse_family(t.at("family").get<std::string>());
      top.name = detail::get_or<std::string>(t, "name", std::string(wgt::to_string(top.spec.family)));
      auto& s = top.spec;
      s.n = detail::get_or(t, "n", n);
      s.rows = detail::get_or(t, "rows", 4);
      s.cols = detail::get_or(t, "cols", 4);
      if (s.family == wgt::TopologyFamily::Grid && !t.contains("n")) s.n = s.rows * s.cols;
      s.periodic = detail::get_or(t, "periodic", true);
      s.p = detail::get_or(t, "p", 0.4);
      s.radius = detail::get_or(t, "radius", 0.3);
      s.avg_degree = detail::get_or(t, "avg_degree", 6.0);
      s.trials = detail::get_or(t, "trials", 50);
      s.seed = detail::get_or<std::uint64_t>(t, "seed", 0);
      s.validate();
      if (s.family == wgt::TopologyFamily::FromWeights) {
        top.build_weights = resolve_weights(t.contains("weights") ? t.at("weights") : tree.at("weights"), cfg,
                                            s.n, base_dir);
        if (top.build_weights->weights.size() != static_cast<std::size_t>(s.n)) {
          config_error("topology '" + top.name + "': weight count differs from n");
        }
        // Fails fast on an infeasible average degree.
        (void)wgt::scale_to_degrees(top.build_weights->weights, s.avg_degree);
      }
      for (const auto& other : cfg.topologies) {
        if (other.name == top.name) config_error("duplicate topology name '" + top.name + "'");
      }
      cfg.topologies.push_back(std::move(top));
    }
    if (cfg.topologies.empty()) config_error("no topologies configured");

    // Every named selection and every step size must resolve.
    for (const char* section : {"simulate", "build_graph"}) {
      if (tree.contains(section)) (void)cfg.select(tree.at(section), "topologies");
    }
    for (const char* section : {"compare", "bounds"}) {
      if (tree.contains(section) && tree.at(section).contains("topology")) {
        (void)cfg.topology(tree.at(section).at("topology").get<std::string>());
      }
    }
    for (const auto& t : cfg.topologies) (void)cfg.alpha_for(t);
    // Simulated and compared topologies must match the run weights in size.
    auto check_size = [&](const Topology& t) {
      if (t.spec.n != static_cast<int>(cfg.weights.weights.size())) {
        config_error("topology '" + t.name + "' has n = " + std::to_string(t.spec.n) + " but " +
                     std::to_string(cfg.weights.weights.size()) + " weights are configured");
      }
    };
    for (const auto* t : cfg.select(tree.contains("simulate") ? tree.at("simulate") : json(), "topologies")) {
      check_size(*t);
    }
    for (const char* section : {"compare", "bounds"}) {
      if (tree.contains(section) && tree.at(section).contains("topology")) {
        check_size(cfg.topology(tree.at(section).at("topology").get<std::string>()));
      }
    }
    wgt::ProblemConfig probe = e.problem(n);
    (void)wgt::generate_problem(probe);
  } catch (const json::exception& ex) {
    config_error(ex.what());
  }
  return cfg;
}

}  // namespace cli
