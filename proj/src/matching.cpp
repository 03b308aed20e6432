#include "cliquewalk/matching.hpp"

#include <algorithm>
#include <numeric>

#include "cliquewalk/oracles.hpp"

namespace cliquewalk::matching {

namespace {

Mat submatrix(const Mat& b, const std::vector<int>& rows, const std::vector<int>& cols) {
  Mat m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) m.at(i, j) = b.at(rows[i], cols[j]);
  return m;
}

void check_columns(const PlacementInstance& inst) {
  for (int j = 0; j < inst.r(); ++j) {
    bool any = false;
    for (int i = 0; i < inst.r(); ++i) any = any || inst.b.at(i, j) > 0.0;
    if (!any) {
      throw ZeroPermanent("position column " + std::to_string(j) +
                          " has all-zero weights");
    }
  }
}

}  // namespace

std::vector<int> sample_matching(const PlacementInstance& inst, const UnitSource& unit,
                                 double tv_target) {
  (void)tv_target;  // the exact path achieves zero
  const int r = inst.r();
  if (r > kExactCap) throw CapExceeded("instance exceeds the exact sampling cap");
  if (r == 0) return {};
  check_columns(inst);

  std::vector<int> rows(r), cols(r);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  std::vector<int> assignment(r, -1);

  double perm = oracle::exact_permanent(submatrix(inst.b, rows, cols));
  if (!(perm > 0.0)) throw ZeroPermanent("instance permanent is zero");

  while (!rows.empty()) {
    int row = rows.front();
    std::vector<int> rest_rows(rows.begin() + 1, rows.end());
    // Column taken with probability weight * permanent(minor) / permanent.
    std::vector<double> weights(cols.size(), 0.0);
    std::vector<double> minors(cols.size(), 0.0);
    for (size_t c = 0; c < cols.size(); ++c) {
      double w = inst.b.at(row, cols[c]);
      if (w <= 0.0) continue;
      std::vector<int> rest_cols;
      for (size_t c2 = 0; c2 < cols.size(); ++c2) {
        if (c2 != c) rest_cols.push_back(cols[c2]);
      }
      minors[c] = rest_rows.empty() ? 1.0
                                    : oracle::exact_permanent(submatrix(inst.b, rest_rows, rest_cols));
      weights[c] = w * minors[c];
    }
    size_t pick = pick_weighted(weights, unit());
    assignment[row] = cols[pick];
    cols.erase(cols.begin() + pick);
    rows.erase(rows.begin());
  }
  return assignment;
}

std::map<std::vector<int>, double> matching_distribution(const PlacementInstance& inst) {
  const int r = inst.r();
  if (r > 8) throw TooLarge("matching enumeration capped at 8");
  std::vector<int> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  std::map<std::vector<int>, double> dist;
  double total = 0.0;
  do {
    double w = 1.0;
    for (int i = 0; i < r; ++i) w *= inst.b.at(i, perm[i]);
    if (w > 0.0) {
      dist[perm] = w;
      total += w;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (total <= 0.0) throw ZeroPermanent("all matchings have zero weight");
  for (auto& [k, v] : dist) v /= total;
  return dist;
}

}  // namespace cliquewalk::matching
