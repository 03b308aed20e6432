#pragma once

#include <cstdint>
#include <vector>

#include "cliquewalk/graph.hpp"
#include "cliquewalk/sim.hpp"

// Load-balanced walk doubling: every machine starts with k length-1 walks
// from its vertex; each iteration pairs walk i (ending at v) with v's walk
// k-i at a rendezvous machine chosen by a t-wise independent hash, halving k
// and doubling the length, until every machine holds one walk of length at
// least tau. Each walk's marginal law is the true walk law; walks at
// different machines are not independent.

namespace cliquewalk::doubling {

/// Polynomial hash over a prime field (2^61 - 1, which dominates n*k at any
/// scale this simulator runs), reduced mod n. Coefficients are derived
/// deterministically from a broadcast seed string.
class HashFamily {
 public:
  static HashFamily from_seed(const sim::Words& seed, int independence, int range_n,
                              uint64_t domain_k);

  int operator()(uint64_t x, uint64_t i) const;
  int independence() const { return static_cast<int>(coeffs_.size()); }

  /// Seed bits charged for the broadcast: t * ceil(log2(n * k)).
  static uint64_t seed_bits(int independence, int range_n, uint64_t domain_k);

 private:
  std::vector<uint64_t> coeffs_;
  int range_n_ = 1;
  uint64_t domain_k_ = 1;
};

struct DoublingState {
  uint64_t walks_per_machine = 0;  // k, a power of two; halves per iteration
  uint64_t walk_len = 1;           // eta; doubles per iteration
  // walks[v][i] lists the vertices of the i-th walk held by machine v
  // (walk_len + 1 entries, the first equal to v).
  std::vector<std::vector<std::vector<int>>> walks;
};

struct IterationStats {
  uint64_t k = 0;
  uint64_t eta = 0;
  uint64_t max_recv_tuples = 0;  // over machines, in the shipping step
};

struct DoublingTrace {
  std::vector<IterationStats> iterations;
};

/// tau length-1 walks per machine (k rounded up to a power of two).
DoublingState init_walks(sim::Cluster& cs, const Graph& g, uint64_t tau);

/// One merge iteration. When family is null a fresh seed is broadcast and a
/// family derived from it (charged); run_doubling establishes one family up
/// front and reuses it.
void doubling_iteration(sim::Cluster& cs, DoublingState& st, const Graph& g,
                        const HashFamily* family, int c, DoublingTrace* trace,
                        const std::string& label);

struct RunResult {
  std::vector<std::vector<int>> walk;  // per machine, the final walk
  DoublingTrace trace;
};

RunResult run_doubling(sim::Cluster& cs, const Graph& g, uint64_t tau, int c = 2);

/// Maximum tuples any machine received in a shipping step, over iterations.
uint64_t load_audit(const DoublingTrace& trace);

}  // namespace cliquewalk::doubling
