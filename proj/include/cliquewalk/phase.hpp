#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cliquewalk/engine.hpp"
#include "cliquewalk/sim.hpp"

// One phase of the sampler: top-down filling of a truncated random walk on a
// prepared power ladder. Each level doubles the walk's resolution by
// inserting midpoints between consecutive entries, truncates at the first
// index where the walk holds its rho-th distinct vertex (found by
// distributed binary search over Check), and places the collected midpoint
// multiset back into the walk, the final midpoint pinned and the rest
// assigned by weighted perfect-matching sampling.

namespace cliquewalk::phase {

struct PhaseConfig {
  int distinct_budget = 0;    // rho; 0 resolves to ceil(sqrt(n))
  double c1 = 1.0;            // TV exponent
  double c2 = 0.0;            // failure weight; 0 resolves to n^(1/2 + c1)
  uint64_t ell = 0;           // target length; 0 resolves from ell_constant
  double ell_constant = 4.0;  // multiplier on n^3 * ceil(log2 c2)
  enum class Placement { kExactMatching, kDirect };
  Placement placement = Placement::kExactMatching;
  int exact_cap = 12;
  engine::PrecisionConfig precision;

  int resolve_rho(int n) const;
  double resolve_c2(int n) const;
  /// Power of two; the cover-time factor uses the original graph size.
  uint64_t resolve_ell(int n) const;
};

/// Level-i walk subsequence: entries at strictly increasing indices, first
/// index zero, adjacent indices one delta apart.
struct PartialWalk {
  std::vector<std::pair<uint64_t, int>> entries;  // (index, vertex)
  uint64_t target_len = 0;
  int level = 1;

  int distinct_count() const;
};

struct LevelTrace {
  int level = 0;
  uint64_t t = 0;          // truncation index chosen for this level
  int distinct = 0;        // distinct vertices after the level
  int checks = 0;          // binary-search probes
  int delivers = 0;        // non-check deliver invocations
  int placed_r = 0;        // matching size (multiset minus the pinned one)
  bool direct_mode = false;
};

struct PhaseTrace {
  std::vector<LevelTrace> levels;
  uint64_t tau = 0;
  bool reached_rho = false;
};

struct PhaseResult {
  std::vector<int> walk;  // vertex at each step 0..tau (ladder-local ids)
  bool reached_rho = false;
  PhaseTrace trace;
};

/// Drives one phase level by level. Exposed so tests can exercise a single
/// level's midpoint generation, Check predicate and placement.
class PhaseDriver {
 public:
  PhaseDriver(sim::Cluster& cs, const engine::PowerLadder& ladder, int start, int rho,
              const PhaseConfig& cfg);

  /// Samples the end vertex and forms the two-entry initial walk.
  void init();

  bool done() const { return level_ > levels_; }

  /// begin_level + truncate_and_place.
  void run_level();

  /// Assigns pair machines, requests midpoint counts and generates the
  /// midpoint sequences for the current level.
  void begin_level();

  /// Algorithm-3 predicate: true iff prefix_len <= t for the current level's
  /// conceptual fully-filled walk. prefix_len must be a positive multiple of
  /// the level's half-gap, at most the current target length.
  bool check(uint64_t prefix_len);

  /// Binary search for t, truncation, and midpoint placement.
  void truncate_and_place();

  const PartialWalk& walk() const { return walk_; }
  PhaseResult finish();

 private:
  struct PairInfo {
    int p = 0;
    int q = 0;
    int machine = 0;
    std::vector<uint64_t> slots;    // ascending slot indices
    std::vector<int> sequence;      // generated midpoints, chronological
  };

  uint64_t half() const { return delta_ / 2; }
  int power_index() const;  // ladder index for the half-gap power
  /// Midpoints of pair rank whose slot index is at most prefix_len.
  uint64_t prefix_count(const PairInfo& pi, uint64_t prefix_len) const;
  int magic_vertex(uint64_t index, const char* label, int* deliver_counter);
  void place_direct();
  void place_matching();
  void install(const std::vector<std::pair<uint64_t, int>>& midpoints);

  sim::Cluster& cs_;
  const engine::PowerLadder& ladder_;
  PhaseConfig cfg_;
  int start_ = 0;
  int rho_ = 2;
  int levels_ = 0;
  uint64_t ell_ = 1;

  PartialWalk walk_;
  int level_ = 0;       // current level; 0 before init
  uint64_t delta_ = 0;  // gap between entries at the current level
  // entries as of begin_level; slot->pair lookups stay valid after the
  // walk itself is truncated
  std::vector<std::pair<uint64_t, int>> level_entries_;

  std::vector<PairInfo> pairs_;           // by rank
  std::map<std::pair<int, int>, int> pair_rank_;
  uint64_t t_ = 0;
  LevelTrace level_trace_;
  PhaseTrace trace_;
};

PhaseResult run_phase(sim::Cluster& cs, const engine::PowerLadder& ladder, int start,
                      int rho, const PhaseConfig& cfg);

/// Sequential reference: a plain step-by-step walk on a row-stochastic
/// matrix, stopped at the first occurrence of the rho-th distinct vertex or
/// after ell steps. Independent of the simulator and the ladder machinery.
std::vector<int> sequential_truncated_walk(const Mat& p, int start, int rho, uint64_t ell,
                                           Rng& rng);

}  // namespace cliquewalk::phase
