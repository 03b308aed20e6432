#pragma once

#include <functional>
#include <map>
#include <vector>

#include "cliquewalk/graph.hpp"

// Sampling a perfect matching of a weighted complete bipartite graph with
// probability proportional to the product of its edge weights. The exact
// path uses self-reducible sampling over permanents, so its distribution is
// exactly proportional to matching weight (achieved sampler error zero).

namespace cliquewalk::matching {

class ZeroPermanent : public Error {
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

constexpr int kExactCap = 12;

struct PlacementInstance {
  Mat b;  // r x r: rows index items, columns index positions
  int r() const { return b.rows(); }
};

/// Unit-uniform source; lets callers route draws through a machine stream or
/// a plain Rng.
using UnitSource = std::function<double()>;

/// assignment[row] = column. The tv_target is recorded for interface parity;
/// the exact path achieves zero.
std::vector<int> sample_matching(const PlacementInstance& inst, const UnitSource& unit,
                                 double tv_target = 0.0);

inline std::vector<int> sample_matching(const PlacementInstance& inst, Rng& rng,
                                        double tv_target = 0.0) {
  return sample_matching(inst, [&rng] { return rng.uniform(); }, tv_target);
}

/// Exhaustive matching distribution (r <= 8): permutation vector -> probability.
std::map<std::vector<int>, double> matching_distribution(const PlacementInstance& inst);

}  // namespace cliquewalk::matching
