#pragma once

#include <string>
#include <vector>

#include "cliquewalk/bigmat.hpp"
#include "cliquewalk/engine.hpp"
#include "cliquewalk/graph.hpp"
#include "cliquewalk/sim.hpp"

// Distributed construction of the two derivative graphs used to skip over
// already-visited vertices: the shortcut matrix Q (predecessor law of the
// first entry into S) via an absorbing auxiliary chain raised to a large
// power, and the Schur complement transition matrix via one additional
// product and per-row rescaling. Both carry subtractive error at most beta.

namespace cliquewalk::deriv {

class DegenerateRow : public Error {
 public:
  using Error::Error;
};

struct ShortcutMatrix {
  Mat q;  // n x n, entrywise under-approximation of the exact Q
  std::vector<int> vertices;  // S, sorted
  double error_budget = 0.0;
};

struct SchurMatrix {
  std::vector<int> vertices;       // S, sorted; local index i <-> vertices[i]
  Mat raw;                         // pre-normalization rows (subtractive)
  Mat transition;                  // renormalized rows, zero diagonal
  std::vector<double> row_scalers; // 1 / (1 - return probability) per row
  double error_budget = 0.0;       // bound on |transition - exact|
  int degenerate_rows = 0;         // rows that tripped the scaler guard

  // High-precision form of the same transition matrix; ladders build from
  // this so the configured budget is not limited by double precision.
  fx::FixedMatrix transition_fixed;
  double fixed_budget = 0.0;
};

ShortcutMatrix build_shortcut(sim::Cluster& cs, const Graph& g, std::vector<int> S,
                              const engine::PrecisionConfig& pc,
                              const std::string& label = "shortcut");

SchurMatrix build_schur(sim::Cluster& cs, const Graph& g, std::vector<int> S,
                        const engine::PrecisionConfig& pc,
                        const std::string& label = "schur");

/// Power ladder over a built Schur transition matrix.
engine::PowerLadder schur_power_ladder(sim::Cluster& cs, const SchurMatrix& sch,
                                       uint64_t target, const engine::PrecisionConfig& pc,
                                       const std::string& label = "ladder");

}  // namespace cliquewalk::deriv
