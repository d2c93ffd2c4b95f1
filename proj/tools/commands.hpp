#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "config.hpp"

namespace cli {

namespace fs = std::filesystem;

inline std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) wgt::fail(wgt::ErrorCode::Parse, "cannot write " + path.string());
  return out;
}

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline wgt::TopologyResult realize(const Topology& t, const RunConfig& cfg) {
  const auto& w = t.build_weights ? t.build_weights->weights : cfg.weights.weights;
  return wgt::make_topology(t.spec, w);
}

inline wgt::Graph connected_graph(const Topology& t, const RunConfig& cfg) {
  auto r = realize(t, cfg);
  if (!r.connected) wgt::fail(wgt::ErrorCode::Disconnected, "topology '" + t.name + "' is disconnected");
  return std::move(r.graph);
}

// ---------------------------------------------------------------------------

inline int cmd_gaps(const RunConfig& cfg) {
  for (const auto& t : cfg.topologies) {
    for (const auto& gw : cfg.gap_weights) {
      if (gw.weights.size() != static_cast<std::size_t>(t.spec.n)) {
        config_error("gap weights '" + gw.id + "' do not match topology '" + t.name + "'");
      }
    }
  }
  std::string csv = "topology,weights_id,kind,rho,gap,kappa,R,theorem2_holds,corollary_holds\n";
  for (const auto& t : cfg.topologies) {
    const auto g = connected_graph(t, cfg);
    const auto ds = wgt::spectrum(wgt::doubly_stochastic(g, cfg.epsilon));
    auto row = [&](const std::string& id, const wgt::WeightVector& w, bool uniform_kind) {
      const auto sp = uniform_kind ? ds : wgt::spectrum(wgt::metropolis(g, w, cfg.epsilon));
      const bool thm = wgt::theorem2_condition(sp.gap, ds.gap, w);
      const bool cor = wgt::corollary_check(g, w, cfg.epsilon).pairwise;
      csv += t.name + "," + id + "," + std::string(uniform_kind ? "W_ds" : "W_lambda") + "," + num(sp.rho) + "," +
             num(sp.gap) + "," + num(w.kappa()) + "," + num(wgt::penalty_factor_R(w)) + "," +
             (thm ? "true" : "false") + "," + (cor ? "true" : "false") + "\n";
    };
    for (std::size_t k = 0; k < cfg.gap_weights.size(); ++k) {
      row(cfg.gap_weights[k].id, cfg.gap_weights[k].weights, false);
      if (k == 0) row("uniform", wgt::uniform_weights(static_cast<std::size_t>(t.spec.n)), true);
    }
    if (cfg.gap_weights.empty()) row("uniform", wgt::uniform_weights(static_cast<std::size_t>(t.spec.n)), true);
  }
  open_out(cfg.out / "gaps.csv") << csv;
  std::cout << csv;
  return 0;
}

// ---------------------------------------------------------------------------

inline int cmd_build_graph(const RunConfig& cfg) {
  const json section = cfg.tree.contains("build_graph") ? cfg.tree.at("build_graph") : json();
  bool all_connected = true;
  for (const auto* t : cfg.select(section, "topologies")) {
    const auto r = realize(*t, cfg);
    const fs::path base = cfg.out / "graphs" / t->name;
    {
      auto out = open_out(base.string() + ".edges");
      wgt::write_edge_list(out, r.graph);
    }
    json side;
    side["name"] = t->name;
    side["family"] = std::string(wgt::to_string(t->spec.family));
    side["params"] = t->params;
    side["seed"] = t->spec.seed;
    side["n"] = r.graph.size();
    side["edges"] = r.graph.edge_count();
    side["degrees"] = r.graph.degrees();
    side["connected"] = r.connected;
    if (r.build) {
      side["weights"] = t->build_weights->id;
      side["target_degrees"] = r.build->target.values();
      side["exact_degrees"] = r.build->exact_degrees;
      side["used_fallback"] = r.build->used_fallback;
      side["trials"] = r.build->trials;
    }
    open_out(base.string() + ".json") << side.dump(2) << "\n";
    std::cout << t->name << ": " << r.graph.edge_count() << " edges, connected=" << (r.connected ? "true" : "false");
    if (r.build) std::cout << ", exact_degrees=" << (r.build->exact_degrees ? "true" : "false");
    std::cout << "\n";
    all_connected = all_connected && r.connected;
  }
  if (!all_connected) {
    std::cerr << "error: at least one graph is disconnected\n";
    return 3;
  }
  return 0;
}

// ---------------------------------------------------------------------------

inline std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct DesignPair {
  wgt::Graph graph;
  wgt::MixingMatrix row;
  wgt::MixingMatrix ds;
  double rho_lambda;
  double rho_j;

  DesignPair(wgt::Graph g, const wgt::WeightVector& w, double eps)
      : graph(std::move(g)), row(wgt::metropolis(graph, w, eps)), ds(wgt::doubly_stochastic(graph, eps)),
        rho_lambda(wgt::spectrum(row).rho), rho_j(wgt::spectrum(ds).rho) {}

  double rho(wgt::Strategy s) const { return s == wgt::Strategy::I ? rho_j : rho_lambda; }
};

inline wgt::BoundInputs bound_inputs(const RunConfig& cfg, wgt::Strategy s, double rho, double beta, double alpha) {
  const auto& w = cfg.weights.weights;
  wgt::BoundInputs in;
  in.beta = beta;
  in.upsilon2 = cfg.experiment.sigma * cfg.experiment.sigma * cfg.experiment.d;
  in.alpha = alpha;
  in.T = cfg.experiment.T;
  in.n = static_cast<int>(w.size());
  in.rho = rho;
  in.c_lambda = w.c_lambda();
  in.kappa = w.kappa();
  in.lambda_max = w.max();
  (void)s;
  return in;
}

inline int cmd_simulate(const RunConfig& cfg) {
  const json section = cfg.tree.contains("simulate") ? cfg.tree.at("simulate") : json();
  const auto& w = cfg.weights.weights;
  const int n = static_cast<int>(w.size());
  const auto problem = cfg.experiment.problem(n);
  const fs::path root = cfg.out / "simulate";

  json manifest;
  manifest["created"] = timestamp();
  manifest["config"] = cfg.tree;
  manifest["weights"] = cfg.weights.id;
  manifest["jobs"] = cfg.jobs;
  json runs = json::array();

  for (const auto* t : cfg.select(section, "topologies")) {
    const DesignPair design(connected_graph(*t, cfg), w, cfg.epsilon);
    const double alpha = cfg.alpha_for(*t);
    for (auto s : cfg.strategies) {
      const double rho = design.rho(s);
      const double beta_bound = cfg.experiment.beta_bound();
      const double alpha_max = wgt::step_size_max(s, beta_bound, rho, w.max());
      wgt::MultiSeedResult result;
      try {
        result = wgt::multi_seed(problem, w, s, design.row, design.ds, alpha, cfg.experiment.T,
                                 cfg.experiment.record_every, cfg.experiment.seeds, cfg.jobs);
      } catch (const wgt::Error& e) {
        if (e.code() != wgt::ErrorCode::NonFinite) throw;
        const std::string what = e.what();
        wgt::fail(wgt::ErrorCode::NonFinite, what.substr(what.find(": ") + 2) + " on topology '" + t->name + "', strategy " +
                                                 std::string(wgt::to_string(s)) + "; rate-theorem ceiling alpha_max = " +
                                                 num(alpha_max));
      }
      const fs::path dir = root / t->name / ("strategy_" + std::string(wgt::to_string(s)));
      json seeds = json::array();
      for (std::size_t k = 0; k < result.seeds.size(); ++k) {
        const auto& tr = result.per_seed[k];
        {
          auto out = open_out(dir / ("seed_" + std::to_string(result.seeds[k]) + ".csv"));
          wgt::write_trajectory_csv(out, tr);
        }
        auto pc = problem;
        pc.seed = result.seeds[k];
        const auto inst = wgt::generate_problem(pc);
        auto in = bound_inputs(cfg, s, rho, inst.smoothness(), alpha);
        in.F0_gap = tr.F0_gap;
        in.E0_norm2 = tr.E0_norm2;
        const auto c = wgt::C_constants_unchecked(s, in);
        json js;
        js["seed"] = result.seeds[k];
        js["beta"] = inst.smoothness();
        js["upsilon2"] = inst.noise_variance();
        js["F0_gap"] = tr.F0_gap;
        js["E0_norm2"] = tr.E0_norm2;
        js["alpha_max"] = wgt::step_size_max(s, inst.smoothness(), rho, w.max());
        js["C1"] = c.C1;
        js["C2"] = c.C2;
        const bool within = c.C1 > 0.0 && c.C2 > 0.0 && in.T > 0;
        js["rate_bound"] = within ? json(wgt::rate_bound(s, in)) : json(nullptr);
        js["final_weighted_grad_norm"] = tr.rows.back().weighted_grad_norm;
        js["max_tracking_residual"] = tr.max_tracking_residual;
        seeds.push_back(js);
      }
      {
        auto out = open_out(dir / "averaged.csv");
        wgt::write_trajectory_csv(out, result.averaged);
      }
      const auto& last = result.averaged.rows.back();
      json run;
      run["topology"] = t->name;
      run["strategy"] = std::string(wgt::to_string(s));
      run["alpha"] = alpha;
      run["rho"] = rho;
      run["gap"] = 1.0 - rho;
      run["kappa"] = w.kappa();
      run["lambda_max"] = w.max();
      run["c_lambda"] = w.c_lambda();
      run["beta_bound"] = beta_bound;
      run["upsilon2"] = cfg.experiment.sigma * cfg.experiment.sigma * cfg.experiment.d;
      run["alpha_max"] = alpha_max;
      run["consensus_alpha_max"] = wgt::consensus_step_size_max(s, beta_bound, rho, w.max());
      run["final"] = {{"weighted_grad_norm", last.weighted_grad_norm},
                      {"grad_norm_at_mean", last.grad_norm_at_mean},
                      {"dist_to_opt", last.dist_to_opt},
                      {"consensus_param", last.consensus_param}};
      run["seeds"] = seeds;
      runs.push_back(run);
      std::cout << t->name << " strategy " << wgt::to_string(s) << ": alpha=" << num(alpha)
                << " final weighted_grad_norm=" << num(last.weighted_grad_norm) << "\n";
    }
  }
  manifest["runs"] = runs;
  open_out(root / "manifest.json") << manifest.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

inline int cmd_compare(const RunConfig& cfg) {
  const json section = cfg.tree.contains("compare") ? cfg.tree.at("compare") : json::object();
  const auto& t = section.contains("topology") ? cfg.topology(section.at("topology").get<std::string>())
                                               : cfg.topologies.front();
  const auto& w = cfg.weights.weights;
  const auto g = connected_graph(t, cfg);
  const auto r = wgt::compare_designs(g, w, cfg.epsilon);
  const double beta = cfg.experiment.beta_bound();

  json out;
  out["topology"] = t.name;
  out["weights"] = cfg.weights.id;
  out["rho_Lambda"] = r.weighted.rho;
  out["rho_J"] = r.uniform.rho;
  out["gap_Lambda"] = r.weighted.gap;
  out["gap_J"] = r.uniform.gap;
  out["kappa"] = r.kappa;
  out["lambda_max"] = r.lambda_max;
  out["R"] = r.R;
  out["theorem2_holds"] = r.theorem2_holds;
  out["corollary_holds"] = r.corollary_holds;
  out["loewner_min_eig"] = r.loewner_min_eig;
  out["fiedler_lambda"] = r.fiedler_lambda;
  out["fiedler_one"] = r.fiedler_one;
  out["beta_bound"] = beta;
  out["alpha_max"] = {{"I", wgt::step_size_max(wgt::Strategy::I, beta, r.uniform.rho, r.lambda_max)},
                      {"II", wgt::step_size_max(wgt::Strategy::II, beta, r.weighted.rho, r.lambda_max)}};
  out["consensus_alpha_max"] = {
      {"I", wgt::consensus_step_size_max(wgt::Strategy::I, beta, r.uniform.rho, r.lambda_max)},
      {"II", wgt::consensus_step_size_max(wgt::Strategy::II, beta, r.weighted.rho, r.lambda_max)}};

  if (section.value("run", false)) {
    const DesignPair design(g, w, cfg.epsilon);
    const double alpha = cfg.alpha_for(t);
    const auto problem = cfg.experiment.problem(static_cast<int>(w.size()));
    json run;
    run["alpha"] = alpha;
    run["T"] = cfg.experiment.T;
    run["seeds"] = cfg.experiment.seeds;
    double finals[2] = {0.0, 0.0};
    json unstable;
    for (auto s : {wgt::Strategy::I, wgt::Strategy::II}) {
      const auto res = wgt::multi_seed(problem, w, s, design.row, design.ds, alpha, cfg.experiment.T,
                                       cfg.experiment.record_every, cfg.experiment.seeds, cfg.jobs);
      finals[s == wgt::Strategy::I ? 0 : 1] = res.averaged.rows.back().weighted_grad_norm;
      // Seeds whose gradient norm grew by three orders of magnitude.
      json grew = json::array();
      for (std::size_t k = 0; k < res.seeds.size(); ++k) {
        const auto& rows = res.per_seed[k].rows;
        if (rows.back().weighted_grad_norm > 1e3 * rows.front().weighted_grad_norm) grew.push_back(res.seeds[k]);
      }
      unstable[std::string(wgt::to_string(s))] = grew;
    }
    run["final_weighted_grad_norm"] = {{"I", finals[0]}, {"II", finals[1]}};
    run["unstable_seeds"] = unstable;
    run["ratio_II_over_I"] = finals[1] / finals[0];
    out["run"] = run;
  }
  const std::string text = out.dump(2) + "\n";
  open_out(cfg.out / "compare.json") << text;
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------------------

inline int cmd_bounds(const RunConfig& cfg) {
  const json section = cfg.tree.contains("bounds") ? cfg.tree.at("bounds") : json::object();
  const auto& t = section.contains("topology") ? cfg.topology(section.at("topology").get<std::string>())
                                               : cfg.topologies.front();
  const auto& w = cfg.weights.weights;
  const DesignPair design(connected_graph(t, cfg), w, cfg.epsilon);
  std::vector<wgt::Strategy> strategies = cfg.strategies;
  if (section.contains("strategy") && section.at("strategy").get<std::string>() != "both") {
    strategies = {wgt::parse_strategy(section.at("strategy").get<std::string>())};
  }
  const double fraction = section.value("alpha_fraction", 0.5);
  const json overrides = section.value("inputs", json::object());

  json results = json::array();
  for (auto s : strategies) {
    const double rho = design.rho(s);
    const double beta = overrides.value("beta", cfg.experiment.beta_bound());
    const double alpha_max = wgt::step_size_max(s, beta, rho, overrides.value("lambda_max", w.max()));
    auto in = bound_inputs(cfg, s, rho, beta, overrides.value("alpha", fraction * alpha_max));
    if (!overrides.contains("F0_gap") || !overrides.contains("E0_norm2")) {
      // Initial gaps of the first configured instance.
      auto pc = cfg.experiment.problem(static_cast<int>(w.size()));
      pc.seed = cfg.experiment.seeds.front();
      const auto tr = wgt::run(wgt::generate_problem(pc), w, s, design.row, design.ds, in.alpha, 0,
                               cfg.experiment.seeds.front(), 1);
      in.F0_gap = tr.F0_gap;
      in.E0_norm2 = tr.E0_norm2;
    }
    in.upsilon2 = overrides.value("upsilon2", in.upsilon2);
    in.T = overrides.value("T", in.T);
    in.n = overrides.value("n", in.n);
    in.rho = overrides.value("rho", in.rho);
    in.c_lambda = overrides.value("c_lambda", in.c_lambda);
    in.kappa = overrides.value("kappa", in.kappa);
    in.lambda_max = overrides.value("lambda_max", in.lambda_max);
    in.F0_gap = overrides.value("F0_gap", in.F0_gap);
    in.E0_norm2 = overrides.value("E0_norm2", in.E0_norm2);
    in.validate();

    const auto c = wgt::C_constants(s, in);
    json r;
    r["strategy"] = std::string(wgt::to_string(s));
    r["topology"] = t.name;
    r["inputs"] = {{"beta", in.beta},     {"upsilon2", in.upsilon2}, {"alpha", in.alpha},
                   {"T", in.T},           {"n", in.n},               {"rho", in.rho},
                   {"c_lambda", in.c_lambda}, {"kappa", in.kappa},   {"lambda_max", in.lambda_max},
                   {"F0_gap", in.F0_gap}, {"E0_norm2", in.E0_norm2}};
    r["C1"] = c.C1;
    r["C2"] = c.C2;
    r["alpha_max"] = wgt::step_size_max(s, in.beta, in.rho, in.lambda_max);
    r["rate_bound"] = wgt::rate_bound(s, in);
    r["euclidean_bound"] = s == wgt::Strategy::I ? json(wgt::euclidean_rate_bound(in)) : json(nullptr);
    results.push_back(r);
  }
  const json out = results.size() == 1 ? results.front() : results;
  const std::string text = out.dump(2) + "\n";
  open_out(cfg.out / "bounds.json") << text;
  std::cout << text;
  return 0;
}

}  // namespace cli
