#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "cliquewalk/bench.hpp"

using namespace cliquewalk;

int main(int argc, char** argv) {
  CLI::App app{
      "cliquewalk: spanning-tree and random-walk sampling experiments on a "
      "simulated all-to-all cluster"};

  bench::ExperimentConfig cfg;
  if (const char* env_seed = std::getenv("CLIQUEWALK_SEED")) {
    cfg.seed = std::strtoull(env_seed, nullptr, 10);
  }
  std::string placement = "exact-matching";
  std::string out_path;
  int rho = 0;
  uint64_t ell = 0;

  app.add_option("--graph", cfg.graph_name,
                 "corpus name (K3, K4, C4, C5, C8, P3, P4, S3, K4me, petersen), "
                 "name:<corpus>, or an edge-list file path");
  app.add_option("--algo", cfg.algo,
                 "tree-sublinear | tree-via-doubling | aldous-broder-ref | doubling-walk");
  app.add_option("--runs", cfg.runs, "number of seeded trials");
  app.add_option("--seed", cfg.seed, "base seed (default from CLIQUEWALK_SEED)");
  app.add_option("--rho", rho, "distinct-vertex budget per phase (default ceil(sqrt(n)))");
  app.add_option("--alpha", cfg.cost.alpha, "matrix-multiplication round exponent");
  app.add_option("--beta", cfg.walk.precision.beta, "subtractive error budget");
  app.add_option("--c1", cfg.walk.c1, "total-variation exponent");
  app.add_option("--ell", ell, "walk target length override (rounded up to a power of 2)");
  app.add_option("--placement-mode", placement, "exact-matching | direct");
  app.add_option("--tau", cfg.tau, "walk length for doubling-walk");
  app.add_option("--cover-budget", cfg.cover_budget,
                 "initial cover budget for tree-via-doubling");
  app.add_option("--doubling-c", cfg.doubling_c, "load-bound constant c");
  app.add_option("--out", out_path, "report file path (per-run table goes to <out>.runs.tsv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rho > 0) cfg.walk.distinct_budget = rho;
    if (ell > 0) cfg.walk.ell = ell;
    if (placement == "exact-matching") {
      cfg.walk.placement = phase::PhaseConfig::Placement::kExactMatching;
    } else if (placement == "direct") {
      cfg.walk.placement = phase::PhaseConfig::Placement::kDirect;
    } else {
      throw bench::ConfigError("unknown placement mode: " + placement);
    }

    Graph g = bench::resolve_graph(cfg.graph_name);
    bench::Report rep = bench::run_experiment(g, cfg);

    std::cout << rep.text;
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) throw bench::ConfigError("cannot write report to " + out_path);
      out << rep.text;
      std::ofstream runs(out_path + ".runs.tsv");
      if (!runs) throw bench::ConfigError("cannot write runs table");
      runs << rep.runs_table;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
