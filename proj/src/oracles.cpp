#include "cliquewalk/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "cliquewalk/kernels.hpp"

namespace cliquewalk::oracle {

namespace {

/// Bareiss fraction-free determinant of an integer matrix (destructive).
BigInt bareiss_det(std::vector<BigInt>& a, int k) {
  if (k == 0) return BigInt(1);
  auto at = [&](int i, int j) -> BigInt& { return a[static_cast<size_t>(i) * k + j]; };
  BigInt prev = 1;
  int sign = 1;
  for (int p = 0; p < k; ++p) {
    if (at(p, p) == 0) {
      int swap_row = -1;
      for (int i = p + 1; i < k; ++i) {
        if (at(i, p) != 0) {
          swap_row = i;
          break;
        }
      }
      if (swap_row < 0) return BigInt(0);
      for (int j = 0; j < k; ++j) std::swap(at(p, j), at(swap_row, j));
      sign = -sign;
    }
    for (int i = p + 1; i < k; ++i) {
      for (int j = p + 1; j < k; ++j) {
        at(i, j) = (at(i, j) * at(p, p) - at(i, p) * at(p, j)) / prev;
      }
      at(i, p) = 0;
    }
    prev = at(p, p);
  }
  return sign > 0 ? at(k - 1, k - 1) : -at(k - 1, k - 1);
}

/// Gaussian-eliminates `m` (rows x rows) against identity, returning the
/// inverse. Pivots must be nonzero for valid inputs.
RationalMatrix invert(RationalMatrix m) {
  int k = m.rows;
  RationalMatrix inv(k, k);
  for (int i = 0; i < k; ++i) inv.at(i, i) = 1;
  for (int p = 0; p < k; ++p) {
    int pivot = -1;
    for (int i = p; i < k; ++i) {
      if (m.at(i, p) != 0) {
        pivot = i;
        break;
      }
    }
    CW_ASSERT(pivot >= 0, "singular block in oracle elimination");
    if (pivot != p) {
      for (int j = 0; j < k; ++j) {
        std::swap(m.at(p, j), m.at(pivot, j));
        std::swap(inv.at(p, j), inv.at(pivot, j));
      }
    }
    BigRat d = m.at(p, p);
    for (int j = 0; j < k; ++j) {
      m.at(p, j) /= d;
      inv.at(p, j) /= d;
    }
    for (int i = 0; i < k; ++i) {
      if (i == p || m.at(i, p) == 0) continue;
      BigRat f = m.at(i, p);
      for (int j = 0; j < k; ++j) {
        m.at(i, j) -= f * m.at(p, j);
        inv.at(i, j) -= f * inv.at(p, j);
      }
    }
  }
  return inv;
}

RationalMatrix rational_transition(const Graph& g) {
  RationalMatrix p(g.n(), g.n());
  for (int u = 0; u < g.n(); ++u) {
    BigRat deg = g.weighted_degree(u);
    for (auto [v, w] : g.neighbors(u)) p.at(u, v) = BigRat(w) / deg;
  }
  return p;
}

std::vector<char> make_mask(int n, const std::vector<int>& s) {
  std::vector<char> mask(n, 0);
  for (int v : s) {
    CW_ASSERT(v >= 0 && v < n, "vertex out of range in subset");
    CW_ASSERT(!mask[v], "duplicate vertex in subset");
    mask[v] = 1;
  }
  return mask;
}

void sort_unique(std::vector<int>& s) { std::sort(s.begin(), s.end()); }

// Dense float Gaussian elimination used in the fallback mode (n > cap).
void invert_f64(std::vector<long double>& m, int k) {
  std::vector<long double> inv(static_cast<size_t>(k) * k, 0.0L);
  for (int i = 0; i < k; ++i) inv[static_cast<size_t>(i) * k + i] = 1.0L;
  auto at = [&](std::vector<long double>& mm, int i, int j) -> long double& {
    return mm[static_cast<size_t>(i) * k + j];
  };
  for (int p = 0; p < k; ++p) {
    int pivot = p;
    for (int i = p + 1; i < k; ++i) {
      if (std::fabs(static_cast<double>(at(m, i, p))) >
          std::fabs(static_cast<double>(at(m, pivot, p))))
        pivot = i;
    }
    CW_ASSERT(at(m, pivot, p) != 0.0L, "singular block in float elimination");
    if (pivot != p) {
      for (int j = 0; j < k; ++j) {
        std::swap(at(m, p, j), at(m, pivot, j));
        std::swap(at(inv, p, j), at(inv, pivot, j));
      }
    }
    long double d = at(m, p, p);
    for (int j = 0; j < k; ++j) {
      at(m, p, j) /= d;
      at(inv, p, j) /= d;
    }
    for (int i = 0; i < k; ++i) {
      if (i == p) continue;
      long double f = at(m, i, p);
      if (f == 0.0L) continue;
      for (int j = 0; j < k; ++j) {
        at(m, i, j) -= f * at(m, p, j);
        at(inv, i, j) -= f * at(inv, p, j);
      }
    }
  }
  m = std::move(inv);
}

}  // namespace

Mat RationalMatrix::to_f64() const {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.at(i, j) = at(i, j).convert_to<double>();
  return m;
}

BigInt count_spanning_trees_big(const Graph& g) {
  Laplacian l = laplacian(g);
  int k = l.n - 1;
  std::vector<BigInt> minor(static_cast<size_t>(k) * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) minor[static_cast<size_t>(i) * k + j] = l.at(i + 1, j + 1);
  BigInt det = bareiss_det(minor, k);
  CW_ASSERT(det > 0, "tree count must be positive for a connected graph");
  return det;
}

uint64_t count_spanning_trees(const Graph& g) {
  BigInt c = count_spanning_trees_big(g);
  if (c > BigInt(~uint64_t{0})) {
    throw OverflowError("spanning tree count exceeds 64-bit integer capacity");
  }
  return c.convert_to<uint64_t>();
}

long TreeCensus::index_of(std::vector<std::pair<int, int>> edges) const {
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  auto it = std::lower_bound(trees.begin(), trees.end(), edges);
  if (it == trees.end() || *it != edges) return -1;
  return static_cast<long>(it - trees.begin());
}

TreeCensus enumerate_spanning_trees(const Graph& g, uint64_t census_cap) {
  BigInt count = count_spanning_trees_big(g);
  bool weighted = !g.unweighted();
  // The weighted count can exceed the census size; only the unweighted census
  // size equals the determinant, so the cap check uses the tree count bound.
  if (!weighted && count > BigInt(census_cap)) {
    throw CapExceeded("tree count exceeds census cap");
  }

  const auto& edges = g.edges();
  const int n = g.n();
  const int m = static_cast<int>(edges.size());
  TreeCensus census;
  census.total_weight = 0;

  // Backtracking over edge subsets with union-find and undo. Prunes branches
  // that cannot reach n-1 edges or that would close a cycle.
  std::vector<int> parent(n);
  std::vector<int> rank_(n, 0);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  struct Undo {
    int child;
    int root;
    bool rank_bump;
  };
  std::vector<Undo> undo_stack;
  std::vector<int> chosen;

  auto unite = [&](int a, int b) -> bool {
    int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
    parent[rb] = ra;
    bool bump = rank_[ra] == rank_[rb];
    if (bump) ++rank_[ra];
    undo_stack.push_back({rb, ra, bump});
    return true;
  };
  auto undo = [&]() {
    Undo u = undo_stack.back();
    undo_stack.pop_back();
    parent[u.child] = u.child;
    if (u.rank_bump) --rank_[u.root];
  };

  auto emit = [&]() {
    std::vector<std::pair<int, int>> t;
    BigInt w = 1;
    for (int idx : chosen) {
      t.emplace_back(edges[idx].u, edges[idx].v);
      w *= edges[idx].w;
    }
    census.trees.push_back(std::move(t));
    census.weights.push_back(w);
    census.total_weight += census.weights.back();
    if (census.trees.size() > census_cap) throw CapExceeded("census grew past cap");
  };

  auto rec = [&](auto&& self, int idx) -> void {
    if (static_cast<int>(chosen.size()) == n - 1) {
      emit();
      return;
    }
    if (idx == m) return;
    if (m - idx < (n - 1) - static_cast<int>(chosen.size())) return;
    // take edges[idx] if it does not close a cycle
    if (unite(edges[idx].u, edges[idx].v)) {
      chosen.push_back(idx);
      self(self, idx + 1);
      chosen.pop_back();
      undo();
    }
    self(self, idx + 1);
  };
  rec(rec, 0);

  // Canonical order: edge pairs are already (u < v); sort each tree then the census.
  std::vector<size_t> order(census.trees.size());
  for (auto& t : census.trees) std::sort(t.begin(), t.end());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return census.trees[x] < census.trees[y];
  });
  TreeCensus sorted;
  sorted.total_weight = census.total_weight;
  for (size_t i : order) {
    sorted.trees.push_back(std::move(census.trees[i]));
    sorted.weights.push_back(std::move(census.weights[i]));
  }
  if (!weighted) {
    CW_ASSERT(BigInt(sorted.trees.size()) == count,
              "census size disagrees with the determinant count");
  }
  return sorted;
}

const BigRat& WalkDistribution::prob(const std::vector<int>& walk) const {
  auto it = std::lower_bound(walks.begin(), walks.end(), walk,
                             [](const auto& a, const std::vector<int>& b) { return a.first < b; });
  static const BigRat kZero(0);
  if (it == walks.end() || it->first != walk) return kZero;
  return it->second;
}

WalkDistribution exact_walk_distribution(const Graph& g, int start, int length) {
  double bits = length * std::log2(static_cast<double>(g.n()));
  if (bits > 24.0) throw TooLarge("walk enumeration would exceed the guard");
  WalkDistribution dist;
  std::vector<int> walk{start};
  BigRat prob = 1;
  auto rec = [&](auto&& self, int u, int remaining) -> void {
    if (remaining == 0) {
      dist.walks.emplace_back(walk, prob);
      return;
    }
    BigRat deg = g.weighted_degree(u);
    for (auto [v, w] : g.neighbors(u)) {
      BigRat step = BigRat(w) / deg;
      walk.push_back(v);
      prob *= step;
      self(self, v, remaining - 1);
      prob /= step;
      walk.pop_back();
    }
  };
  rec(rec, start, length);
  std::sort(dist.walks.begin(), dist.walks.end());
  return dist;
}

SchurResult exact_schur(const Graph& g, std::vector<int> S) {
  CW_ASSERT(!S.empty(), "Schur: empty subset");
  sort_unique(S);
  const int n = g.n();
  auto mask = make_mask(n, S);
  std::vector<int> comp;
  for (int v = 0; v < n; ++v) {
    if (!mask[v]) comp.push_back(v);
  }
  SchurResult res;
  res.vertices = S;
  const int s = static_cast<int>(S.size());
  const int c = static_cast<int>(comp.size());
  Laplacian l = laplacian(g);

  if (n <= kExactVertexCap) {
    res.mode = Mode::kExact;
    RationalMatrix lcc(c, c), lcs(c, s), lsc(s, c), lss(s, s);
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j) lcc.at(i, j) = l.at(comp[i], comp[j]);
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < s; ++j) lcs.at(i, j) = l.at(comp[i], S[j]);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < c; ++j) lsc.at(i, j) = l.at(S[i], comp[j]);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) lss.at(i, j) = l.at(S[i], S[j]);

    res.laplacian = RationalMatrix(s, s);
    if (c == 0) {
      res.laplacian = lss;
    } else {
      RationalMatrix inv = invert(std::move(lcc));
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          BigRat acc = lss.at(i, j);
          for (int x = 0; x < c; ++x) {
            BigRat t = 0;
            for (int y = 0; y < c; ++y) t += inv.at(x, y) * lcs.at(y, j);
            acc -= lsc.at(i, x) * t;
          }
          res.laplacian.at(i, j) = acc;
        }
      }
    }
    res.transition = RationalMatrix(s, s);
    for (int i = 0; i < s; ++i) {
      const BigRat& diag = res.laplacian.at(i, i);
      CW_ASSERT(diag > 0, "Schur diagonal must be positive");
      for (int j = 0; j < s; ++j) {
        if (i == j) continue;
        res.transition.at(i, j) = -res.laplacian.at(i, j) / diag;
      }
    }
    res.transition_f64 = res.transition.to_f64();
    return res;
  }

  // Float fallback for larger graphs.
  res.mode = Mode::kFloat;
  std::vector<long double> lcc(static_cast<size_t>(c) * c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      lcc[static_cast<size_t>(i) * c + j] = static_cast<long double>(l.at(comp[i], comp[j]));
  if (c > 0) invert_f64(lcc, c);
  Mat sch(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      long double acc = static_cast<long double>(l.at(S[i], S[j]));
      for (int x = 0; x < c; ++x) {
        long double t = 0.0L;
        for (int y = 0; y < c; ++y)
          t += lcc[static_cast<size_t>(x) * c + y] * static_cast<long double>(l.at(comp[y], S[j]));
        acc -= static_cast<long double>(l.at(S[i], comp[x])) * t;
      }
      sch.at(i, j) = static_cast<double>(acc);
    }
  }
  res.transition_f64 = Mat(s, s);
  for (int i = 0; i < s; ++i) {
    double diag = sch.at(i, i);
    CW_ASSERT(diag > 0, "Schur diagonal must be positive");
    for (int j = 0; j < s; ++j) {
      if (i != j) res.transition_f64.at(i, j) = -sch.at(i, j) / diag;
    }
  }
  return res;
}

ShortcutResult exact_shortcut(const Graph& g, std::vector<int> S) {
  CW_ASSERT(!S.empty(), "shortcut: empty subset");
  sort_unique(S);
  const int n = g.n();
  auto mask = make_mask(n, S);
  std::vector<int> comp;
  std::vector<int> comp_index(n, -1);
  for (int v = 0; v < n; ++v) {
    if (!mask[v]) {
      comp_index[v] = static_cast<int>(comp.size());
      comp.push_back(v);
    }
  }
  const int c = static_cast<int>(comp.size());
  ShortcutResult res;

  if (n <= kExactVertexCap) {
    res.mode = Mode::kExact;
    RationalMatrix p = rational_transition(g);
    // into_s[v] = probability of stepping from v into S.
    std::vector<BigRat> into_s(n, BigRat(0));
    for (int v = 0; v < n; ++v) {
      for (int x : S) into_s[v] += p.at(v, x);
    }
    // Fundamental matrix over the complement: counts expected visits to each
    // complement vertex before the first entry into S.
    RationalMatrix fund;
    if (c > 0) {
      RationalMatrix sys(c, c);
      for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) {
          sys.at(i, j) = (i == j ? BigRat(1) : BigRat(0)) - p.at(comp[i], comp[j]);
        }
      }
      fund = invert(std::move(sys));
    }
    res.q = RationalMatrix(n, n);
    for (int u = 0; u < n; ++u) {
      // visits[v]: expected time spent at v in the pre-absorption segment,
      // including time zero at u itself.
      for (int v = 0; v < n; ++v) {
        BigRat visits = (u == v) ? BigRat(1) : BigRat(0);
        if (comp_index[v] >= 0) {
          for (int x = 0; x < c; ++x) {
            if (p.at(u, comp[x]) != 0) visits += p.at(u, comp[x]) * fund.at(x, comp_index[v]);
          }
        }
        if (visits != 0 && into_s[v] != 0) res.q.at(u, v) = visits * into_s[v];
      }
    }
    res.q_f64 = res.q.to_f64();
    return res;
  }

  res.mode = Mode::kFloat;
  Mat p(g.n(), g.n());
  {
    TransitionMatrix t = transition_matrix(g);
    p = t.p;
  }
  std::vector<long double> into_s(n, 0.0L);
  for (int v = 0; v < n; ++v)
    for (int x : S) into_s[v] += static_cast<long double>(p.at(v, x));
  std::vector<long double> fund;
  if (c > 0) {
    fund.assign(static_cast<size_t>(c) * c, 0.0L);
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j)
        fund[static_cast<size_t>(i) * c + j] =
            (i == j ? 1.0L : 0.0L) - static_cast<long double>(p.at(comp[i], comp[j]));
    invert_f64(fund, c);
  }
  res.q_f64 = Mat(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      long double visits = (u == v) ? 1.0L : 0.0L;
      if (comp_index[v] >= 0) {
        for (int x = 0; x < c; ++x) {
          visits += static_cast<long double>(p.at(u, comp[x])) *
                    fund[static_cast<size_t>(x) * c + comp_index[v]];
        }
      }
      res.q_f64.at(u, v) = static_cast<double>(visits * into_s[v]);
    }
  }
  return res;
}

RationalMatrix exact_first_hit(const Graph& g, std::vector<int> S) {
  sort_unique(S);
  const int n = g.n();
  CW_ASSERT(n <= kExactVertexCap, "first-hit oracle is exact-mode only");
  CW_ASSERT(S.size() >= 2, "first-hit needs at least two targets");
  auto mask = make_mask(n, S);
  RationalMatrix p = rational_transition(g);
  const int s = static_cast<int>(S.size());
  RationalMatrix h(s, s);
  for (int si = 0; si < s; ++si) {
    int u = S[si];
    // Transient set: complement plus u itself; absorbing: S minus u.
    std::vector<int> transient;
    std::vector<int> tindex(n, -1);
    for (int v = 0; v < n; ++v) {
      if (!mask[v] || v == u) {
        tindex[v] = static_cast<int>(transient.size());
        transient.push_back(v);
      }
    }
    const int tcount = static_cast<int>(transient.size());
    RationalMatrix sys(tcount, tcount);
    for (int i = 0; i < tcount; ++i)
      for (int j = 0; j < tcount; ++j)
        sys.at(i, j) = (i == j ? BigRat(1) : BigRat(0)) - p.at(transient[i], transient[j]);
    RationalMatrix fund = invert(std::move(sys));
    for (int sj = 0; sj < s; ++sj) {
      if (sj == si) continue;
      int v = S[sj];
      BigRat acc = 0;
      for (int x = 0; x < tcount; ++x) {
        if (p.at(transient[x], v) != 0) acc += fund.at(tindex[u], x) * p.at(transient[x], v);
      }
      h.at(si, sj) = acc;
    }
  }
  return h;
}

double exact_permanent(const Mat& m) {
  CW_ASSERT(m.rows() == m.cols(), "permanent needs a square matrix");
  const int n = m.rows();
  if (n > kPermanentSideCap) throw TooLarge("permanent side exceeds cap");
  if (n == 0) return 1.0;

  const auto& backend = kern::active_backend();
  const size_t padded = (static_cast<size_t>(n) + 3) & ~size_t{3};
  // Column-major copy, zero padded; the running row-sum vector is padded
  // with ones so the product reduction ignores the tail.
  std::vector<double> cols(padded * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) cols[padded * j + i] = m.at(i, j);
  std::vector<double> rowsum(padded, 1.0);
  for (int i = 0; i < n; ++i) rowsum[i] = 0.0;

  double sum = 0.0;
  uint64_t gray = 0;
  const uint64_t total = 1ull << n;
  for (uint64_t k = 1; k < total; ++k) {
    uint64_t next = k ^ (k >> 1);
    uint64_t diff = gray ^ next;
    int col = std::countr_zero(diff);
    if (next & diff) {
      backend.vec_add(rowsum.data(), cols.data() + padded * col, padded);
    } else {
      backend.vec_sub(rowsum.data(), cols.data() + padded * col, padded);
    }
    double prod = backend.prod(rowsum.data(), padded);
    int ones = std::popcount(next);
    sum += ((n - ones) % 2 == 0) ? prod : -prod;
    gray = next;
  }
  return sum;
}

RationalMatrix exact_transition_power(const Graph& g, uint64_t k) {
  RationalMatrix p = rational_transition(g);
  const int n = p.rows;
  RationalMatrix result(n, n);
  for (int i = 0; i < n; ++i) result.at(i, i) = 1;
  auto mul = [n](const RationalMatrix& a, const RationalMatrix& b) {
    RationalMatrix c(n, n);
    for (int i = 0; i < n; ++i)
      for (int x = 0; x < n; ++x) {
        if (a.at(i, x) == 0) continue;
        for (int j = 0; j < n; ++j) {
          if (b.at(x, j) != 0) c.at(i, j) += a.at(i, x) * b.at(x, j);
        }
      }
    return c;
  };
  RationalMatrix base = p;
  uint64_t e = k;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    e >>= 1;
    if (e > 0) base = mul(base, base);
  }
  return result;
}

}  // namespace cliquewalk::oracle
