#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cliquewalk/graph.hpp"
#include "cliquewalk/sim.hpp"

namespace cliquewalk::fx {
class FixedMatrix;
}

// Distributed computation of rounded transition-matrix powers P, P^2, P^4,
// ..., P^target with explicit subtractive error budgets. Squarings are
// executed semantically and charged through the cluster's matmul accounting;
// one deliver distributes column pieces so every machine conceptually holds
// its row and column of each power.

namespace cliquewalk::engine {

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

struct PrecisionConfig {
  double beta = 1e-9;  // target subtractive error for the top of a ladder
  int round_bits = 96; // fractional bits kept per entry after each multiply
  double c3 = 8.0;     // guard exponent: squaring count stays O(n^c3)
  double c4 = 12.0;    // guard exponent: beta stays Omega(1/n^c4)
};

/// Analytic subtractive-error bound after `levels` squarings of a dim-sized
/// stochastic matrix with per-step truncation deficit `delta`:
/// E(1) = delta, E(2k) <= (dim+1) E(k) + delta.
double ladder_error_bound(int dim, int levels, double delta);

/// Smallest bit width whose truncation deficit keeps the bound under beta.
int required_bits(int dim, int levels, double beta);

struct PowerLadder {
  std::vector<TransitionMatrix> mats;  // index j holds the 2^j-th power
  uint64_t target = 1;
  int logical_bits = 53;  // per-entry width used for word accounting

  int levels() const { return static_cast<int>(mats.size()) - 1; }
  const TransitionMatrix& power_of_two(int j) const { return mats[j]; }
  const TransitionMatrix& top() const { return mats.back(); }
};

/// Entries truncated toward zero to `bits` fractional bits; the error budget
/// grows by 2^-bits.
TransitionMatrix round_matrix(const TransitionMatrix& m, int bits);

/// Ladder over the graph's own transition matrix. `target` must be a power
/// of two (callers round up). Throws BudgetExceeded when the analytic bound
/// for the configured bits exceeds beta.
PowerLadder build_ladder(sim::Cluster& cs, const Graph& g, uint64_t target,
                         const PrecisionConfig& pc, const std::string& label);

/// Ladder over an already-built stochastic matrix (e.g. a Schur complement)
/// whose entries under-approximate an exact matrix by at most base_budget.
PowerLadder build_ladder(sim::Cluster& cs, const Mat& base, double base_budget,
                         uint64_t target, const PrecisionConfig& pc,
                         const std::string& label);

/// Same, from a fixed-point base; the high-precision pipeline never drops to
/// doubles between builds, so tight base budgets survive the squarings.
PowerLadder build_ladder(sim::Cluster& cs, const fx::FixedMatrix& base,
                         double base_budget, uint64_t target,
                         const PrecisionConfig& pc, const std::string& label);

/// Draws a vertex proportional to the (under-approximated) row; the missing
/// mass is folded into the row's largest entry so the distribution is proper.
int sample_row(const TransitionMatrix& m, int row, double u);

}  // namespace cliquewalk::engine
