#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <vector>

#include "cliquewalk/graph.hpp"

// Ground-truth computations used by the test suites: spanning tree counts and
// censuses, exhaustive walk distributions, exact Schur and shortcut matrices,
// first-hit laws, and permanents. Everything here is pure local computation;
// the cluster simulator is never involved. Exact rational arithmetic is used
// up to kExactVertexCap vertices, with a floating-point fallback above it,
// and every result reports which mode produced it so acceptance tests never
// inherit the tolerance they are checking.

namespace cliquewalk::oracle {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

class OverflowError : public Error {
 public:
  using Error::Error;
};
class CapExceeded : public Error {
 public:
  using Error::Error;
};
class TooLarge : public Error {
 public:
  using Error::Error;
};

enum class Mode { kExact, kFloat };

constexpr int kExactVertexCap = 10;
constexpr uint64_t kDefaultCensusCap = 10000;
constexpr int kPermanentSideCap = 20;

/// Weighted spanning tree count (product-of-weights semantics) via a
/// fraction-free determinant of a Laplacian minor.
BigInt count_spanning_trees_big(const Graph& g);

/// Same, narrowed to uint64_t. Throws OverflowError when the count does not fit.
uint64_t count_spanning_trees(const Graph& g);

/// Exhaustive, duplicate-free census of spanning trees in canonical order
/// (each tree's edge set sorted; trees sorted lexicographically).
struct TreeCensus {
  std::vector<std::vector<std::pair<int, int>>> trees;
  std::vector<BigInt> weights;  // product of edge weights per tree
  BigInt total_weight;

  size_t size() const { return trees.size(); }
  /// Index of a tree given by its (unordered) edge set, or -1 if absent.
  long index_of(std::vector<std::pair<int, int>> edges) const;
};

TreeCensus enumerate_spanning_trees(const Graph& g, uint64_t census_cap = kDefaultCensusCap);

/// All walks of exactly `length` steps from `start`, with their exact
/// probabilities. Guarded by length * log2(n) <= 24.
struct WalkDistribution {
  std::vector<std::pair<std::vector<int>, BigRat>> walks;  // sorted lexicographically
  const BigRat& prob(const std::vector<int>& walk) const;
};

WalkDistribution exact_walk_distribution(const Graph& g, int start, int length);

struct RationalMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<BigRat> a;

  RationalMatrix() = default;
  RationalMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  BigRat& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const BigRat& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  Mat to_f64() const;
};

/// Schur complement graph of g onto S: the weighted graph H on S with
/// L(H) = Schur(L(g), S), plus its random-walk transition matrix
/// (zero diagonal, rows sum to one).
struct SchurResult {
  std::vector<int> vertices;  // S, sorted ascending, global ids
  Mode mode = Mode::kExact;
  RationalMatrix laplacian;   // valid in exact mode
  RationalMatrix transition;  // valid in exact mode
  Mat transition_f64;         // always valid
};

SchurResult exact_schur(const Graph& g, std::vector<int> S);

/// Shortcut transition matrix Q (n x n): Q[u][v] is the probability that v is
/// the vertex visited immediately before the walk's first entry into S at a
/// positive time, starting from u. Solved from the absorbing-chain linear
/// system, not by iteration.
struct ShortcutResult {
  Mode mode = Mode::kExact;
  RationalMatrix q;  // valid in exact mode
  Mat q_f64;         // always valid
};

ShortcutResult exact_shortcut(const Graph& g, std::vector<int> S);

/// First-hit law on S: entry (i, j) is the probability that a walk started at
/// S[i] first visits S \ {S[i]} at S[j]. Exact mode only (n <= cap).
RationalMatrix exact_first_hit(const Graph& g, std::vector<int> S);

/// Permanent of a nonnegative square matrix via Ryser inclusion-exclusion
/// with Gray-code column updates. Side capped at kPermanentSideCap.
double exact_permanent(const Mat& m);

/// Exact k-th power of the transition matrix by rational squaring.
/// Intended for small k (denominators grow with k).
RationalMatrix exact_transition_power(const Graph& g, uint64_t k);

}  // namespace cliquewalk::oracle
