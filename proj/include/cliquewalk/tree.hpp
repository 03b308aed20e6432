#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cliquewalk/derivative.hpp"
#include "cliquewalk/engine.hpp"
#include "cliquewalk/graph.hpp"
#include "cliquewalk/phase.hpp"
#include "cliquewalk/sim.hpp"

// Orchestrates the full sampler: phase one walks the input graph directly and
// reads first-visit edges off the walk; every later phase rebuilds the Schur
// and shortcut matrices for the not-yet-visited set (plus the previous
// phase's final vertex), walks the Schur graph, and resamples first-visit
// edges through the shortcut law. A phase that fails to reach its distinct
// budget flags the run and yields the deterministic fallback tree.

namespace cliquewalk::tree {

struct TreeResult {
  std::vector<std::pair<int, int>> edges;  // sorted, u < v, 0-based
  bool flagged = false;
  int phases = 0;
  std::vector<phase::PhaseTrace> traces;
};

/// Derivative-graph builds are deterministic functions of (graph, subset,
/// config), so repeated trials share them; the recorded ledger delta is
/// replayed into each trial so per-run accounting matches uncached execution
/// bit for bit.
class DerivativeCache {
 public:
  struct SubsetEntry {
    bool built = false;
    deriv::ShortcutMatrix shortcut;
    deriv::SchurMatrix schur;
    engine::PowerLadder ladder;
    sim::LedgerDelta delta;
  };
  struct Phase1Entry {
    bool built = false;
    engine::PowerLadder ladder;
    sim::LedgerDelta delta;
  };

  SubsetEntry& subset(const std::vector<int>& s) { return by_subset_[s]; }
  Phase1Entry phase1;

 private:
  std::map<std::vector<int>, SubsetEntry> by_subset_;
};

TreeResult sample_tree(sim::Cluster& cs, const Graph& g, const phase::PhaseConfig& cfg,
                       DerivativeCache* cache = nullptr);

/// Samples the first-visit edge of every newly visited vertex on a Schur
/// walk (global vertex ids) from the shortcut law; one request and one
/// response deliver each way.
std::vector<std::pair<int, int>> first_visit_edges(sim::Cluster& cs,
                                                   const std::vector<int>& walk,
                                                   const deriv::ShortcutMatrix& q,
                                                   const Graph& g,
                                                   const std::vector<int>& S);

/// Sequential exact sampler used as the distributional baseline.
std::vector<std::pair<int, int>> aldous_broder_reference(const Graph& g, Rng& rng);

/// Deterministic fallback tree for flagged runs.
std::vector<std::pair<int, int>> bfs_tree(const Graph& g, int root);

bool is_spanning_tree(const Graph& g, const std::vector<std::pair<int, int>>& edges);

}  // namespace cliquewalk::tree
