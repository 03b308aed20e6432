#pragma once

#include <map>
#include <string>
#include <vector>

#include "cliquewalk/graph.hpp"
#include "cliquewalk/phase.hpp"
#include "cliquewalk/sim.hpp"
#include "cliquewalk/tree.hpp"

// Experiment runner: seeded trials of a chosen sampler over a graph,
// aggregated into a plain-text report (outcome frequencies, total-variation
// distance against the exact census when it is available, a chi-square
// statistic, flag rate and a ledger summary) plus a flat per-run table.
// Identical config and seed reproduce byte-identical outputs.

namespace cliquewalk::bench {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ExperimentConfig {
  std::string graph_name = "K3";  // corpus name, "name:<corpus>", or a file path
  std::string algo = "tree-sublinear";
  uint64_t runs = 1;
  uint64_t seed = 0;
  phase::PhaseConfig walk;
  sim::CostModel cost;
  uint64_t tau = 0;           // doubling-walk length target
  uint64_t cover_budget = 0;  // tree-via-doubling; 0 picks 8 n ceil(log2 n)
  int doubling_c = 2;
};

struct Report {
  std::string text;        // the structured report document
  std::string runs_table;  // tab-separated per-run records
  std::map<std::string, uint64_t> outcomes;
  bool tv_available = false;
  double tv = 0.0;
  double chi_square = 0.0;
  double flag_rate = 0.0;
  int64_t rounds_total = 0;
  uint64_t load_audit_max = 0;
};

/// Accepts a corpus name ("K3"), a prefixed corpus name ("name:K3"),
/// or a path to an edge-list file.
Graph resolve_graph(const std::string& source);

Report run_experiment(const Graph& g, const ExperimentConfig& cfg);

/// Covers the graph with a doubled walk from vertex 0 and reads off the
/// first-visit edges; the budget doubles geometrically until the walk covers.
std::vector<std::pair<int, int>> tree_via_doubling(sim::Cluster& cs, const Graph& g,
                                                   uint64_t cover_budget, int c);

uint64_t default_cover_budget(const Graph& g);

}  // namespace cliquewalk::bench
