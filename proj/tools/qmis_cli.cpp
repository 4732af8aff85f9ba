// Command-line experiment runner. Every subcommand builds a config document,
// validates it, and dispatches through qmis::run so that CLI runs and config
// files produce identical records.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qmis/qmis.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "runs";
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int execute(const qmis::ExperimentConfig& cfg) {
  qmis::RunRecord record = qmis::run(cfg);
  std::cout << "kind: " << cfg.kind << "\nseed: " << cfg.seed
            << "\nwall_seconds: " << record.wall_seconds << "\n";
  if (cfg.kind == "reproduce-paper") {
    bool all_pass = record.payload["all_pass"].get<bool>();
    const auto& criteria = record.payload["criteria"];
    for (const auto& row : criteria) {
      std::printf("[%2d/%2d] %-4s %-32s %s (expected: %s)\n", row["id"].get<int>(),
                  static_cast<int>(criteria.size()), row["status"].get<std::string>().c_str(),
                  row["name"].get<std::string>().c_str(),
                  row["measured"].get<std::string>().c_str(),
                  row["expected"].get<std::string>().c_str());
    }
    std::cout << (all_pass ? "ALL CRITERIA PASS\n" : "SUITE FAILED\n");
    return all_pass ? 0 : 1;
  }
  std::cout << "payload: " << record.payload.dump(2) << "\n";
  return 0;
}

void add_graph_source(CLI::App* cmd, qmis::Json& params) {
  cmd->add_option_function<std::uint64_t>(
      "--n", [&params](std::uint64_t v) { params["n"] = v; }, "Vertex count");
  cmd->add_option_function<double>(
      "--d", [&params](double v) { params["d"] = v; }, "Target average degree");
  cmd->add_option_function<std::string>(
      "--model", [&params](const std::string& v) { params["model"] = v; },
      "Edge model: fixed | bernoulli");
  cmd->add_option_function<std::string>(
      "--graph", [&params](const std::string& v) { params["graph_file"] = v; },
      "Edge-list file instead of sampling");
}

void add_circuit(CLI::App* cmd, qmis::Json& params) {
  cmd->add_option_function<std::vector<double>>(
      "--gamma", [&params](const std::vector<double>& v) { params["gammas"] = v; },
      "Phase angles, one per layer");
  cmd->add_option_function<std::vector<double>>(
      "--beta", [&params](const std::vector<double>& v) { params["betas"] = v; },
      "Mixer angles, one per layer");
  cmd->add_option_function<double>(
      "--theta", [&params](double v) { params["theta"] = v; }, "Initial rotation angle");
  cmd->add_option_function<std::string>(
      "--initial", [&params](const std::string& v) { params["initial"] = v; },
      "Initial state: zeros | plus | rotated");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QAOA/QAOA+ simulation and analysis for maximum independent set on sparse "
               "random graphs"};
  app.require_subcommand(0, 1);

  GlobalArgs global;
  app.add_option("--config", global.config_path, "Experiment config file (JSON)");
  app.add_option("--seed", global.seed, "Master seed");
  app.add_option("--out", global.out_dir, "Output directory for records and artifacts");
  app.add_option("--threads", global.threads,
                 "Worker thread cap (kernels in this release are single-threaded)")
      ->check(CLI::PositiveNumber);

  qmis::Json params = qmis::Json::object();
  std::string pending_kind;

  auto register_kind = [&](const std::string& kind, const std::string& help) {
    CLI::App* cmd = app.add_subcommand(kind, help);
    cmd->fallthrough();  // global flags may follow the subcommand
    cmd->callback([&pending_kind, kind] { pending_kind = kind; });
    return cmd;
  };

  {
    CLI::App* cmd = register_kind("sample-graph", "Sample a random graph, write an edge list");
    add_graph_source(cmd, params);
    cmd->add_option_function<std::string>(
        "--graph-out", [&params](const std::string& v) { params["out_file"] = v; },
        "Edge-list output filename (inside --out)");
  }
  {
    CLI::App* cmd = register_kind("qaoa-expect", "Expectation of a cost under the QAOA state");
    add_graph_source(cmd, params);
    add_circuit(cmd, params);
    cmd->add_option_function<std::string>(
        "--cost", [&params](const std::string& v) { params["cost"] = v; },
        "objective | penalty | weight");
    cmd->add_option_function<std::string>(
        "--engine", [&params](const std::string& v) { params["engine"] = v; },
        "full | cone");
  }
  {
    CLI::App* cmd = register_kind("qaoa-plus-sample", "Sample pruned independent sets");
    add_graph_source(cmd, params);
    add_circuit(cmd, params);
    cmd->add_option_function<std::uint64_t>(
        "--shots", [&params](std::uint64_t v) { params["shots"] = v; }, "Sample count");
  }
  {
    CLI::App* cmd = register_kind("p15-optimize", "Optimize the p=1.5 ensemble objective");
    cmd->add_option_function<double>(
        "--d", [&params](double v) { params["d"] = v; }, "Average degree");
    cmd->add_flag_function(
        "--gamma-zero", [&params](std::int64_t) { params["gamma_zero"] = true; },
        "Restrict to gamma = 0");
    cmd->add_option_function<std::uint64_t>(
        "--degree-cut", [&params](std::uint64_t v) { params["degree_cut"] = v; },
        "Poisson truncation K (default: automatic)");
    cmd->add_option_function<std::uint64_t>(
        "--starts", [&params](std::uint64_t v) { params["starts"] = v; },
        "Multi-start count");
  }
  {
    CLI::App* cmd = register_kind("p15-scan", "d-scan of the p=1.5 optimum, CSV output");
    cmd->add_option_function<std::vector<double>>(
        "--ds", [&params](const std::vector<double>& v) { params["ds"] = v; },
        "Increasing d values");
  }
  {
    CLI::App* cmd = register_kind("ogp-scan", "Overlap histograms across an interpolation");
    cmd->add_option_function<std::uint64_t>(
        "--n", [&params](std::uint64_t v) { params["n"] = v; }, "Vertex count");
    cmd->add_option_function<double>(
        "--d", [&params](double v) { params["d"] = v; }, "Average degree");
    cmd->add_option_function<double>(
        "--eta", [&params](double v) { params["eta"] = v; }, "Near-optimality factor");
    cmd->add_option_function<std::uint64_t>(
        "--t-count", [&params](std::uint64_t v) { params["t_count"] = v; },
        "Number of interpolation samples");
    cmd->add_option_function<std::string>(
        "--alpha", [&params](const std::string& v) { params["alpha"] = v; },
        "instance | asymptotic");
    cmd->add_option_function<std::uint64_t>(
        "--cap", [&params](std::uint64_t v) { params["cap"] = v; }, "Enumeration cap");
  }
  {
    CLI::App* cmd = register_kind("far-lemma", "Far-from-an-edge marginal check");
    cmd->add_option_function<std::uint64_t>(
        "--n", [&params](std::uint64_t v) { params["n"] = v; }, "Vertex count");
    cmd->add_option_function<double>(
        "--d", [&params](double v) { params["d"] = v; }, "Average degree");
    add_circuit(cmd, params);
    cmd->add_option_function<std::uint64_t>(
        "--triples", [&params](std::uint64_t v) { params["triples"] = v; },
        "Number of (graph, edge, angles) triples");
  }
  {
    CLI::App* cmd = register_kind("lightcone-check", "Cone vs full statevector comparison");
    cmd->add_option_function<std::uint64_t>(
        "--n", [&params](std::uint64_t v) { params["n"] = v; }, "Vertex count");
    cmd->add_option_function<double>(
        "--d", [&params](double v) { params["d"] = v; }, "Average degree");
    cmd->add_option_function<std::uint64_t>(
        "--p", [&params](std::uint64_t v) { params["p"] = v; }, "Circuit depth");
    cmd->add_option_function<std::uint64_t>(
        "--cases", [&params](std::uint64_t v) { params["cases"] = v; }, "Case count");
  }
  {
    CLI::App* cmd = register_kind("branching", "Poisson branching process simulation");
    cmd->add_option_function<double>(
        "--d", [&params](double v) { params["d"] = v; }, "Offspring mean");
    cmd->add_option_function<std::uint64_t>(
        "--k", [&params](std::uint64_t v) { params["k"] = v; }, "Generations");
    cmd->add_option_function<std::uint64_t>(
        "--replicates", [&params](std::uint64_t v) { params["replicates"] = v; },
        "Replicate count");
    cmd->add_option_function<std::vector<double>>(
        "--u", [&params](const std::vector<double>& v) { params["u_grid"] = v; },
        "Tail thresholds u");
  }
  {
    CLI::App* cmd = register_kind("neighborhood-tail", "Ball growth vs branching bound");
    cmd->add_option_function<std::uint64_t>(
        "--n", [&params](std::uint64_t v) { params["n"] = v; }, "Vertex count");
    cmd->add_option_function<double>(
        "--d", [&params](double v) { params["d"] = v; }, "Average degree");
    cmd->add_option_function<double>(
        "--w", [&params](double v) { params["w"] = v; }, "Depth budget fraction w < 1");
    cmd->add_option_function<std::uint64_t>(
        "--trials", [&params](std::uint64_t v) { params["trials"] = v; }, "Graph trials");
    cmd->add_option_function<double>(
        "--s", [&params](double v) { params["s"] = v; }, "Bound exponent knob");
  }
  {
    CLI::App* cmd = register_kind("concentration", "Hamming-weight concentration experiment");
    cmd->add_option_function<std::string>(
        "--mode", [&params](const std::string& v) { params["mode"] = v; },
        "sampling | variance");
    add_graph_source(cmd, params);
    add_circuit(cmd, params);
    cmd->add_option_function<std::uint64_t>(
        "--shots", [&params](std::uint64_t v) { params["shots"] = v; }, "Sampling shots");
  }
  {
    CLI::App* cmd = register_kind("count-mvg", "Count minimal valid graphs V_t");
    cmd->add_option_function<std::uint64_t>(
        "--t", [&params](std::uint64_t v) { params["t"] = v; }, "Vertex count t <= 9");
  }
  register_kind("reproduce-paper", "Run the full acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    qmis::ExperimentConfig cfg;
    if (!global.config_path.empty()) {
      cfg = qmis::load_config(global.config_path);
      if (app.count("--seed") > 0) cfg.seed = global.seed;
      if (app.count("--out") > 0) cfg.out_dir = global.out_dir;
      if (!pending_kind.empty() && pending_kind != cfg.kind) {
        std::cerr << "error: subcommand '" << pending_kind << "' conflicts with config kind '"
                  << cfg.kind << "'\n";
        return 2;
      }
    } else {
      if (pending_kind.empty()) {
        std::cerr << "error: give a subcommand or --config <file>\n";
        return 2;
      }
      cfg.kind = pending_kind;
      cfg.seed = global.seed;
      cfg.out_dir = global.out_dir;
      cfg.params = params;
    }
    return execute(cfg);
  } catch (const qmis::validation_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
