#include "cliquewalk/tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

namespace cliquewalk::tree {

namespace {

constexpr int kLeader = 0;

enum : uint32_t {
  kTagPrev = 32,
  kTagWeightReq,
  kTagWeightResp,
  kTagEdge,
};

void add_edge(std::vector<std::pair<int, int>>& edges, int u, int v) {
  if (u > v) std::swap(u, v);
  edges.emplace_back(u, v);
}

/// Ladder precision for a given dimension: the configured budget with enough
/// bits for the squaring recurrence.
engine::PrecisionConfig ladder_precision(const engine::PrecisionConfig& base, int dim,
                                         uint64_t ell) {
  engine::PrecisionConfig pc = base;
  pc.round_bits = std::max(base.round_bits,
                           engine::required_bits(dim, ceil_log2(ell), base.beta));
  return pc;
}

/// Schur budget tightened so that ladder squarings amplify it back to no
/// more than half the configured beta.
engine::PrecisionConfig schur_precision(const engine::PrecisionConfig& base, int n,
                                        uint64_t ell) {
  engine::PrecisionConfig pc = base;
  long double amp = 1.0L;
  int levels = ceil_log2(ell);
  for (int i = 0; i < levels; ++i) amp *= (n + 1);
  long double beta = static_cast<long double>(base.beta) / (2.0L * amp);
  pc.beta = static_cast<double>(std::max(beta, 1e-200L));
  return pc;
}

}  // namespace

std::vector<std::pair<int, int>> first_visit_edges(sim::Cluster& cs,
                                                   const std::vector<int>& walk,
                                                   const deriv::ShortcutMatrix& q,
                                                   const Graph& g,
                                                   const std::vector<int>& S) {
  CW_ASSERT(!walk.empty(), "empty Schur walk");
  std::vector<char> in_s(g.n(), 0);
  for (int v : S) in_s[v] = 1;

  // First occurrence index of every vertex other than the start.
  std::vector<std::pair<int, int>> firsts;  // (vertex, predecessor in the walk)
  std::set<int> seen{walk.front()};
  for (size_t i = 1; i < walk.size(); ++i) {
    if (seen.insert(walk[i]).second) {
      firsts.emplace_back(walk[i], walk[i - 1]);
    }
  }
  if (firsts.empty()) return {};

  // The leader tells each newly visited vertex who preceded its first visit.
  {
    sim::MessageBatch batch;
    for (auto [v, prev] : firsts) {
      batch.add(kLeader, v, kTagPrev,
                {static_cast<uint64_t>(v), static_cast<uint64_t>(prev)},
                cs.words_for_ids(2));
    }
    cs.deliver(std::move(batch), "fve");
  }
  // Each vertex asks its neighbors for the unnormalized first-visit weight.
  {
    sim::MessageBatch batch;
    for (int m = 0; m < cs.n(); ++m) {
      for (const sim::Message& msg : cs.inbox(m)) {
        if (msg.tag != kTagPrev) continue;
        int v = static_cast<int>(msg.payload[0]);
        for (auto [u, w] : g.neighbors(v)) {
          (void)w;
          batch.add(v, u, kTagWeightReq, {msg.payload[0], msg.payload[1]},
                    cs.words_for_ids(2));
        }
      }
    }
    cs.deliver(std::move(batch), "fve");
  }
  // Neighbor u holds column u of the shortcut matrix and its own adjacency,
  // so it can answer Q[prev, u] * w(u,v) / wdeg_S(u).
  {
    sim::MessageBatch batch;
    for (int u = 0; u < cs.n(); ++u) {
      for (const sim::Message& msg : cs.inbox(u)) {
        if (msg.tag != kTagWeightReq) continue;
        int v = static_cast<int>(msg.payload[0]);
        int prev = static_cast<int>(msg.payload[1]);
        int64_t deg_s = g.weighted_degree_into(u, in_s);
        double weight = 0.0;
        if (deg_s > 0) {
          weight = q.q.at(prev, u) * static_cast<double>(g.edge_weight(u, v)) /
                   static_cast<double>(deg_s);
        }
        batch.add(u, v, kTagWeightResp,
                  {static_cast<uint64_t>(u), std::bit_cast<uint64_t>(weight)},
                  cs.words_for_ids(1) + cs.words_for_prob(64));
      }
    }
    cs.deliver(std::move(batch), "fve");
  }
  // Each vertex samples its first-visit edge and reports it to the leader.
  {
    sim::MessageBatch batch;
    for (int v = 0; v < cs.n(); ++v) {
      std::vector<int> candidates;
      std::vector<double> weights;
      for (const sim::Message& msg : cs.inbox(v)) {
        if (msg.tag != kTagWeightResp) continue;
        candidates.push_back(static_cast<int>(msg.payload[0]));
        weights.push_back(std::bit_cast<double>(msg.payload[1]));
      }
      if (candidates.empty()) continue;
      double total = 0.0;
      for (double w : weights) total += w;
      CW_ASSERT(total > 0.0, "first-visit weights all zero at vertex " +
                                 std::to_string(v + 1));
      int u = candidates[pick_weighted(weights, cs.draw_unit(v))];
      batch.add(v, kLeader, kTagEdge,
                {static_cast<uint64_t>(u), static_cast<uint64_t>(v)},
                cs.words_for_ids(2));
    }
    cs.deliver(std::move(batch), "fve");
  }
  std::vector<std::pair<int, int>> edges;
  for (const sim::Message& msg : cs.inbox(kLeader)) {
    if (msg.tag != kTagEdge) continue;
    add_edge(edges, static_cast<int>(msg.payload[0]), static_cast<int>(msg.payload[1]));
  }
  CW_ASSERT(edges.size() == firsts.size(), "missing first-visit edges");
  return edges;
}

TreeResult sample_tree(sim::Cluster& cs, const Graph& g, const phase::PhaseConfig& cfg,
                       DerivativeCache* cache) {
  const int n = g.n();
  const int rho = cfg.resolve_rho(n);
  const uint64_t ell = cfg.resolve_ell(n);

  TreeResult result;
  std::vector<char> old_mask(n, 0);
  int visited = 0;
  std::vector<std::pair<int, int>> edges;

  auto flag_out = [&]() {
    result.edges = bfs_tree(g, 0);
    result.flagged = true;
    return result;
  };

  // Phase one runs on the input graph itself; first-visit edges come
  // straight off the walk.
  DerivativeCache local_cache;
  DerivativeCache& mem = cache ? *cache : local_cache;
  const engine::PowerLadder* ladder = nullptr;
  if (mem.phase1.built) {
    cs.replay(mem.phase1.delta);
    ladder = &mem.phase1.ladder;
  } else {
    cs.begin_capture();
    mem.phase1.ladder = engine::build_ladder(
        cs, g, ell, ladder_precision(cfg.precision, n, ell), "ladder");
    mem.phase1.delta = cs.end_capture();
    mem.phase1.built = true;
    ladder = &mem.phase1.ladder;
  }

  int rho1 = std::min(rho, n);
  phase::PhaseResult pres = phase::run_phase(cs, *ladder, 0, rho1, cfg);
  result.traces.push_back(pres.trace);
  ++result.phases;
  if (!pres.reached_rho) return flag_out();

  std::set<int> seen{pres.walk.front()};
  old_mask[pres.walk.front()] = 1;
  ++visited;
  for (size_t i = 1; i < pres.walk.size(); ++i) {
    if (seen.insert(pres.walk[i]).second) {
      add_edge(edges, pres.walk[i - 1], pres.walk[i]);
      old_mask[pres.walk[i]] = 1;
      ++visited;
    }
  }
  int v_f = pres.walk.back();

  while (visited < n) {
    std::vector<int> S{v_f};
    for (int v = 0; v < n; ++v) {
      if (!old_mask[v]) S.push_back(v);
    }
    std::sort(S.begin(), S.end());
    const int s = static_cast<int>(S.size());
    int rho_phase = std::min(rho, s);

    DerivativeCache::SubsetEntry& entry = mem.subset(S);
    if (entry.built) {
      cs.replay(entry.delta);
    } else {
      cs.begin_capture();
      entry.shortcut = deriv::build_shortcut(cs, g, S, cfg.precision, "shortcut");
      entry.schur = deriv::build_schur(cs, g, S, schur_precision(cfg.precision, n, ell),
                                       "schur");
      entry.ladder = deriv::schur_power_ladder(
          cs, entry.schur, ell, ladder_precision(cfg.precision, s, ell), "ladder");
      entry.delta = cs.end_capture();
      entry.built = true;
    }

    int start_local =
        static_cast<int>(std::lower_bound(S.begin(), S.end(), v_f) - S.begin());
    CW_ASSERT(S[start_local] == v_f, "phase start missing from S");
    pres = phase::run_phase(cs, entry.ladder, start_local, rho_phase, cfg);
    result.traces.push_back(pres.trace);
    ++result.phases;
    if (!pres.reached_rho) return flag_out();

    std::vector<int> walk_global;
    walk_global.reserve(pres.walk.size());
    for (int local : pres.walk) walk_global.push_back(S[local]);

    auto new_edges = first_visit_edges(cs, walk_global, entry.shortcut, g, S);
    for (auto& e : new_edges) edges.push_back(e);
    for (int v : walk_global) {
      if (!old_mask[v]) {
        old_mask[v] = 1;
        ++visited;
      }
    }
    v_f = walk_global.back();
  }

  std::sort(edges.begin(), edges.end());
  result.edges = std::move(edges);
  CW_ASSERT(is_spanning_tree(g, result.edges), "assembled edges are not a spanning tree");
  return result;
}

std::vector<std::pair<int, int>> aldous_broder_reference(const Graph& g, Rng& rng) {
  const int n = g.n();
  std::vector<char> seen(n, 0);
  std::vector<std::pair<int, int>> edges;
  int u = 0;
  seen[0] = 1;
  int visited = 1;
  std::vector<double> weights;
  uint64_t guard = 0;
  while (visited < n) {
    CW_ASSERT(++guard < (1ull << 40), "cover walk ran far past every cover-time bound");
    const auto& nb = g.neighbors(u);
    weights.clear();
    for (auto [v, w] : nb) weights.push_back(static_cast<double>(w));
    int v = nb[pick_weighted(weights, rng.uniform())].first;
    if (!seen[v]) {
      seen[v] = 1;
      ++visited;
      int a = u, b = v;
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
    u = v;
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<std::pair<int, int>> bfs_tree(const Graph& g, int root) {
  std::vector<char> seen(g.n(), 0);
  std::vector<int> queue{root};
  seen[root] = 1;
  std::vector<std::pair<int, int>> edges;
  for (size_t head = 0; head < queue.size(); ++head) {
    int u = queue[head];
    for (auto [v, w] : g.neighbors(u)) {
      (void)w;
      if (!seen[v]) {
        seen[v] = 1;
        int a = u, b = v;
        if (a > b) std::swap(a, b);
        edges.emplace_back(a, b);
        queue.push_back(v);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

bool is_spanning_tree(const Graph& g, const std::vector<std::pair<int, int>>& edges) {
  if (static_cast<int>(edges.size()) != g.n() - 1) return false;
  std::vector<int> parent(g.n());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [u, v] : edges) {
    if (!g.has_edge(u, v)) return false;
    int ru = find(u), rv = find(v);
    if (ru == rv) return false;
    parent[ru] = rv;
  }
  return true;
}

}  // namespace cliquewalk::tree
