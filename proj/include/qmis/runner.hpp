#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qmis/experiment.hpp"
#include "qmis/reproduce.hpp"

namespace qmis {

namespace runner_detail {

inline Graph resolve_graph(const ExperimentConfig& cfg, Json& task_seeds) {
  if (cfg.params.contains("graph_file"))
    return load_edge_list(cfg.params["graph_file"].get<std::string>());
  if (!cfg.params.contains("n") || !cfg.params.contains("d"))
    throw validation_error({"need either graph_file or both n and d"});
  GraphModel model = GraphModel::FixedEdgeCount;
  if (cfg.params.contains("model")) {
    std::string m = cfg.params["model"].get<std::string>();
    if (m == "bernoulli")
      model = GraphModel::BernoulliEdges;
    else if (m != "fixed")
      throw validation_error({"model must be 'fixed' or 'bernoulli'"});
  }
  std::uint64_t graph_seed = derive_seed(cfg.seed, "graph");
  task_seeds["graph"] = graph_seed;
  return sample_graph({cfg.params["n"].get<VertexId>(), cfg.params["d"].get<double>(), model,
                       graph_seed});
}

inline QaoaParams resolve_params(const ExperimentConfig& cfg) {
  QaoaParams params;
  for (const auto& v : cfg.params["gammas"]) params.gammas.push_back(v.get<double>());
  for (const auto& v : cfg.params["betas"]) params.betas.push_back(v.get<double>());
  if (cfg.params.contains("theta")) params.theta = cfg.params["theta"].get<double>();
  params.validate();
  return params;
}

inline InitialState resolve_initial(const ExperimentConfig& cfg) {
  std::string s = cfg.params["initial"].get<std::string>();
  if (s == "zeros") return InitialState::AllZeros;
  if (s == "plus") return InitialState::PlusState;
  if (s == "rotated") return InitialState::RotatedZeros;
  throw validation_error({"initial must be 'zeros', 'plus' or 'rotated'"});
}

}  // namespace runner_detail

// Dispatch a validated config to its module operation. Results and the run
// record are written atomically under cfg.out_dir.
inline RunRecord run(const ExperimentConfig& cfg, bool write_files = true,
                     const SimLimits& limits = {}) {
  namespace rdet = runner_detail;
  validate_config(cfg);
  std::optional<DirLock> lock;
  if (write_files) lock.emplace(cfg.out_dir);
  RunRecord record;
  record.config = cfg;
  auto t0 = std::chrono::steady_clock::now();
  Json& payload = record.payload;

  if (cfg.kind == "sample-graph") {
    Graph g = rdet::resolve_graph(cfg, record.task_seeds);
    payload["n"] = g.n();
    payload["m"] = g.m();
    std::uint64_t degree_sum = 0;
    for (VertexId v = 0; v < g.n(); ++v) degree_sum += g.degree(v);
    payload["mean_degree"] = static_cast<double>(degree_sum) / g.n();
    if (write_files && cfg.params.contains("out_file")) {
      std::filesystem::create_directories(cfg.out_dir);
      save_edge_list(g, cfg.out_dir + "/" + cfg.params["out_file"].get<std::string>());
      payload["edge_list_file"] = cfg.params["out_file"].get<std::string>();
    }
  } else if (cfg.kind == "qaoa-expect") {
    Graph g = rdet::resolve_graph(cfg, record.task_seeds);
    QaoaParams params = rdet::resolve_params(cfg);
    InitialState initial = rdet::resolve_initial(cfg);
    std::string engine = cfg.params.contains("engine")
                             ? cfg.params["engine"].get<std::string>()
                             : std::string("full");
    std::string cost = cfg.params.contains("cost") ? cfg.params["cost"].get<std::string>()
                                                   : std::string("objective");
    double value = 0.0;
    if (engine == "cone") {
      if (cost != "objective")
        throw validation_error({"engine 'cone' supports only cost 'objective'"});
      value = objective_expectation(g, params, initial, limits);
    } else if (engine == "full") {
      PureState state = run_qaoa(g, params, initial, limits);
      CostModel model = cost == "objective"  ? CostModel::objective(g)
                        : cost == "penalty"  ? CostModel::penalty(g)
                        : cost == "weight"   ? CostModel::hamming_weight()
                                             : throw validation_error(
                                                   {"cost must be objective|penalty|weight"});
      value = expectation(state, model);
    } else {
      throw validation_error({"engine must be 'full' or 'cone'"});
    }
    payload["n"] = g.n();
    payload["value"] = value;
    payload["value_per_n"] = value / g.n();
    payload["engine"] = engine;
    payload["cost"] = cost;
  } else if (cfg.kind == "qaoa-plus-sample") {
    Graph g = rdet::resolve_graph(cfg, record.task_seeds);
    QaoaParams params = rdet::resolve_params(cfg);
    InitialState initial = rdet::resolve_initial(cfg);
    auto shots = cfg.params["shots"].get<std::size_t>();
    std::uint64_t shot_seed = derive_seed(cfg.seed, "shots");
    record.task_seeds["shots"] = shot_seed;
    auto outs = qaoa_plus_sample(g, params, initial, shots, shot_seed, limits);
    std::uint32_t min_size = g.n(), max_size = 0;
    bool all_independent = true;
    KahanSum mean;
    for (const IndependentSet& s : outs) {
      mean.add(s.size);
      min_size = std::min(min_size, s.size);
      max_size = std::max(max_size, s.size);
      all_independent = all_independent && check_independent(g, s.vertices);
    }
    payload["shots"] = shots;
    payload["mean_size"] = mean.value() / static_cast<double>(shots);
    payload["min_size"] = min_size;
    payload["max_size"] = max_size;
    payload["all_independent"] = all_independent;
  } else if (cfg.kind == "p15-optimize") {
    P15Config p15;
    p15.d = cfg.params["d"].get<double>();
    if (cfg.params.contains("degree_cut"))
      p15.degree_cut = cfg.params["degree_cut"].get<std::uint32_t>();
    if (cfg.params.contains("starts")) p15.starts = cfg.params["starts"].get<std::size_t>();
    if (cfg.params.contains("gamma_zero") && cfg.params["gamma_zero"].get<bool>())
      p15.gamma_fixed = 0.0;
    P15Result r = p15_optimize(p15);
    payload = {{"value_per_n", r.value_per_n},
               {"d_value", p15.d * r.value_per_n},
               {"theta", r.theta},
               {"gamma", r.gamma},
               {"beta", r.beta},
               {"degree_cut", r.degree_cut},
               {"tail_mass", r.tail_mass},
               {"boundary_argmax", r.boundary_argmax}};
  } else if (cfg.kind == "p15-scan") {
    std::vector<double> ds;
    for (const auto& v : cfg.params["ds"]) ds.push_back(v.get<double>());
    auto scan = p15_large_d_scan(ds);
    for (const P15ScanRow& s : scan)
      payload["rows"].push_back({{"d", s.d},
                                 {"value_per_n", s.value_per_n},
                                 {"d_value", s.d_value},
                                 {"theta", s.theta},
                                 {"gamma", s.gamma},
                                 {"beta", s.beta},
                                 {"K", s.degree_cut},
                                 {"tail_mass", s.tail_mass}});
    if (write_files) {
      std::filesystem::create_directories(cfg.out_dir);
      write_p15_scan_csv(scan, cfg.out_dir + "/p15-scan.csv");
      payload["csv"] = "p15-scan.csv";
    }
  } else if (cfg.kind == "ogp-scan") {
    auto n = cfg.params["n"].get<VertexId>();
    double d = cfg.params["d"].get<double>();
    std::uint64_t s0 = derive_seed(cfg.seed, "g0");
    std::uint64_t s1 = derive_seed(cfg.seed, "gm");
    record.task_seeds["g0"] = s0;
    record.task_seeds["gm"] = s1;
    InterpolationPath path(sample_graph({n, d, GraphModel::FixedEdgeCount, s0}),
                           sample_graph({n, d, GraphModel::FixedEdgeCount, s1}));
    OgpConfig ogp;
    ogp.eta = cfg.params["eta"].get<double>();
    if (cfg.params.contains("cap")) ogp.enumeration_cap = cfg.params["cap"].get<std::uint64_t>();
    if (cfg.params.contains("alpha") &&
        cfg.params["alpha"].get<std::string>() == "asymptotic") {
      ogp.alpha_mode = OgpConfig::AlphaRef::Asymptotic;
      ogp.d = d;
    }
    auto t_count = cfg.params.contains("t_count")
                       ? cfg.params["t_count"].get<std::uint32_t>()
                       : 5u;
    auto m = static_cast<std::uint32_t>(path.steps());
    std::vector<std::uint32_t> ts;
    for (std::uint32_t i = 0; i < t_count; ++i)
      ts.push_back(t_count == 1 ? 0 : static_cast<std::uint32_t>(
                                          (static_cast<std::uint64_t>(m) * i) / (t_count - 1)));
    OgpScanReport report = ogp_scan(path, ogp, ts);
    payload = repro_detail::ogp_report_to_json(report);
    if (write_files) {
      std::filesystem::create_directories(cfg.out_dir);
      write_overlap_csv(report.pairs, cfg.out_dir + "/ogp-scan.csv");
      atomic_write_file(cfg.out_dir + "/ogp-scan.json", payload.dump(2) + "\n");
    }
  } else if (cfg.kind == "far-lemma") {
    auto n = cfg.params["n"].get<VertexId>();
    double d = cfg.params["d"].get<double>();
    QaoaParams params = rdet::resolve_params(cfg);
    InitialState initial = rdet::resolve_initial(cfg);
    auto triples = cfg.params.contains("triples")
                       ? cfg.params["triples"].get<std::uint32_t>()
                       : 1u;
    double worst_q = 0.0, worst_p = 0.0;
    std::uint32_t done = 0;
    for (std::uint32_t c = 0; c < triples; ++c) {
      for (int attempt = 0; attempt < 200; ++attempt) {
        Rng rng(derive_seed(cfg.seed, "triple/" + std::to_string(c) + "/" +
                                          std::to_string(attempt)));
        Graph g = sample_graph({n, d, GraphModel::FixedEdgeCount, rng.next()});
        VertexId i = static_cast<VertexId>(rng.below(n));
        VertexId j = static_cast<VertexId>(rng.below(n - 1));
        if (j >= i) ++j;
        if (g.has_edge(i, j) || far_set(g, i, j, static_cast<std::uint32_t>(params.depth()))
                                    .empty())
          continue;
        FarLemmaReport rep = verify_far_lemma(g, i, j, params, initial, limits);
        if (rep.far_empty_pruned) continue;
        worst_q = std::max(worst_q, rep.max_residual_quantum);
        worst_p = std::max(worst_p, rep.max_residual_pruned);
        ++done;
        break;
      }
    }
    payload = {{"triples", done},
               {"max_residual_quantum", worst_q},
               {"max_residual_pruned", worst_p}};
  } else if (cfg.kind == "lightcone-check") {
    auto n = cfg.params["n"].get<VertexId>();
    double d = cfg.params["d"].get<double>();
    auto p = cfg.params["p"].get<std::size_t>();
    auto cases = cfg.params.contains("cases") ? cfg.params["cases"].get<std::uint32_t>() : 10u;
    double worst = 0.0;
    for (std::uint32_t c = 0; c < cases; ++c) {
      Rng rng(derive_seed(cfg.seed, "case/" + std::to_string(c)));
      Graph g = sample_graph({n, d, GraphModel::FixedEdgeCount, rng.next()});
      QaoaParams params = repro_detail::random_params(rng, p, true);
      PureState full = run_qaoa(g, params, InitialState::RotatedZeros, limits);
      double cone = objective_expectation(g, params, InitialState::RotatedZeros, limits);
      worst = std::max(worst, std::abs(cone - expectation(full, CostModel::objective(g))));
    }
    payload = {{"cases", cases}, {"max_abs_diff", worst}};
  } else if (cfg.kind == "branching") {
    double d = cfg.params["d"].get<double>();
    auto k = cfg.params["k"].get<std::uint32_t>();
    auto reps = cfg.params["replicates"].get<std::uint64_t>();
    std::uint64_t bseed = derive_seed(cfg.seed, "branching");
    record.task_seeds["branching"] = bseed;
    BranchingStats stats = branching_simulate(d, k, reps, bseed);
    payload["mean_by_generation"] = Json::array();
    for (std::uint32_t gen = 0; gen <= k; ++gen)
      payload["mean_by_generation"].push_back(stats.mean(gen));
    payload["expected_mean_final"] = std::pow(d, k);
    Json tails = Json::array();
    std::vector<double> us = {5.0, 10.0};
    if (cfg.params.contains("u_grid")) {
      us.clear();
      for (const auto& v : cfg.params["u_grid"]) us.push_back(v.get<double>());
    }
    for (double u : us) {
      double threshold = u * std::pow(d / std::numbers::ln2, k);
      tails.push_back({{"u", u},
                       {"threshold", threshold},
                       {"fraction", static_cast<double>(stats.exceed_count(k, threshold)) /
                                        static_cast<double>(reps)},
                       {"bound", std::exp(1.0 - u)}});
    }
    payload["tails"] = std::move(tails);
  } else if (cfg.kind == "neighborhood-tail") {
    auto n = cfg.params["n"].get<std::uint64_t>();
    double d = cfg.params["d"].get<double>();
    double w = cfg.params["w"].get<double>();
    auto trials = cfg.params["trials"].get<std::uint32_t>();
    double s = cfg.params.contains("s") ? cfg.params["s"].get<double>() : 0.1;
    std::uint64_t tseed = derive_seed(cfg.seed, "tail");
    record.task_seeds["tail"] = tseed;
    NeighborhoodTailReport rep = neighborhood_tail_experiment(
        n, d, w, trials, tseed, {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}, s);
    payload = {{"n", rep.n},
               {"d", rep.d},
               {"w", rep.w},
               {"two_p", rep.two_p},
               {"s", rep.s},
               {"max_ball_2p", rep.max_ball_2p},
               {"max_ball_p", rep.max_ball_p},
               {"mean_max_ball_2p", rep.mean_max_ball_2p},
               {"branching_bound_bk", rep.branching_bound_bk},
               {"mean_branching_bk", rep.mean_branching_bk}};
    Json curve = Json::array();
    for (std::size_t i = 0; i < rep.a_grid.size(); ++i)
      curve.push_back({{"A", rep.a_grid[i]},
                       {"exceed_fraction_2p", rep.exceed_fraction_2p[i]},
                       {"exceed_fraction_p", rep.exceed_fraction_p[i]}});
    payload["exceedance"] = curve;
    if (write_files) {
      std::filesystem::create_directories(cfg.out_dir);
      std::ostringstream csv;
      csv << "A,n_pow_A,exceed_fraction_2p,n_pow_A_half,exceed_fraction_p\n";
      csv.precision(17);
      for (std::size_t i = 0; i < rep.a_grid.size(); ++i)
        csv << rep.a_grid[i] << ',' << std::pow(static_cast<double>(n), rep.a_grid[i]) << ','
            << rep.exceed_fraction_2p[i] << ','
            << std::pow(static_cast<double>(n), rep.a_grid[i] / 2.0) << ','
            << rep.exceed_fraction_p[i] << '\n';
      atomic_write_file(cfg.out_dir + "/neighborhood-tail.csv", csv.str());
    }
  } else if (cfg.kind == "concentration") {
    std::string mode = cfg.params["mode"].get<std::string>();
    Graph g = rdet::resolve_graph(cfg, record.task_seeds);
    QaoaParams params = rdet::resolve_params(cfg);
    InitialState initial = rdet::resolve_initial(cfg);
    if (mode == "sampling") {
      auto shots = cfg.params.contains("shots") ? cfg.params["shots"].get<std::size_t>()
                                                : std::size_t{10000};
      std::uint64_t sseed = derive_seed(cfg.seed, "shots");
      record.task_seeds["shots"] = sseed;
      ConcentrationReport rep =
          weight_concentration_sampling(g, params, initial, shots, sseed, {}, limits);
      payload = {{"mode", "sampling"},
                 {"n", rep.n},
                 {"shots", rep.shots},
                 {"mean_size", rep.mean_size},
                 {"sample_variance", rep.sample_variance}};
      Json bands = Json::array();
      for (std::size_t i = 0; i < rep.delta_grid.size(); ++i)
        bands.push_back({{"delta", rep.delta_grid[i]},
                         {"exceed_fraction", rep.exceed_fraction[i]}});
      payload["bands"] = bands;
    } else if (mode == "variance") {
      ConcentrationReport rep = weight_concentration_variance(g, params, initial, limits);
      payload = {{"mode", "variance"},
                 {"n", rep.n},
                 {"variance_w", rep.variance_w},
                 {"max_ball_2p", rep.max_ball_2p},
                 {"bound_n_times_ball", rep.bound_n_times_ball},
                 {"within_bound", rep.variance_within_bound}};
    } else {
      throw validation_error({"mode must be 'sampling' or 'variance'"});
    }
  } else if (cfg.kind == "count-mvg") {
    auto t = cfg.params["t"].get<std::uint32_t>();
    Json values = Json::array();
    for (std::uint32_t tt = 2; tt <= t; ++tt)
      values.push_back({{"t", tt}, {"V_t", count_minimal_valid_graphs(tt)}});
    payload = {{"t", t}, {"V_t", count_minimal_valid_graphs(t)}, {"all", values}};
  } else if (cfg.kind == "reproduce-paper") {
    ReproduceOptions ropts;
    ropts.master_seed = cfg.seed;
    ropts.out_dir = cfg.out_dir;
    ropts.limits = limits;
    ropts.write_artifacts = write_files;
    std::vector<CriterionResult> results = reproduce_paper(ropts);
    bool all_pass = true;
    Json table = Json::array();
    for (const CriterionResult& r : results) {
      if (r.status == "FAIL") all_pass = false;
      table.push_back({{"id", r.id},
                       {"name", r.name},
                       {"status", r.status},
                       {"measured", r.measured},
                       {"expected", r.expected},
                       {"payload", r.payload}});
    }
    payload = {{"all_pass", all_pass}, {"criteria", std::move(table)}};
  } else {
    throw validation_error({"unknown experiment kind '" + cfg.kind + "'"});
  }

  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (write_files) write_record(record);
  return record;
}

}  // namespace qmis
