#include "cliquewalk/phase.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "cliquewalk/matching.hpp"

namespace cliquewalk::phase {

namespace {

constexpr int kLeader = 0;

enum : uint32_t {
  kTagInitReq = 1,
  kTagInitResp,
  kTagCount,
  kTagProbReq,
  kTagProbResp,
  kTagACount,
  kTagASum,
  kTagMQuery,
  kTagMResp,
  kTagShip,
  kTagSubReq,
  kTagSubResp,
};

}  // namespace

int PhaseConfig::resolve_rho(int n) const {
  int rho = distinct_budget > 0
                ? distinct_budget
                : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  return std::max(rho, 2);
}

double PhaseConfig::resolve_c2(int n) const {
  return c2 > 0.0 ? c2 : std::pow(static_cast<double>(n), 0.5 + c1);
}

uint64_t PhaseConfig::resolve_ell(int n) const {
  if (ell > 0) return pow2_ceil(ell);
  double n3 = std::pow(static_cast<double>(n), 3.0);
  double logc2 = std::ceil(std::log2(std::max(2.0, resolve_c2(n))));
  return pow2_ceil(static_cast<uint64_t>(ell_constant * n3 * logc2));
}

int PartialWalk::distinct_count() const {
  std::set<int> seen;
  for (const auto& [idx, v] : entries) seen.insert(v);
  return static_cast<int>(seen.size());
}

PhaseDriver::PhaseDriver(sim::Cluster& cs, const engine::PowerLadder& ladder, int start,
                         int rho, const PhaseConfig& cfg)
    : cs_(cs), ladder_(ladder), cfg_(cfg), start_(start), rho_(rho) {
  CW_ASSERT(rho_ >= 2, "distinct budget must be at least two");
  levels_ = ladder_.levels();
  ell_ = ladder_.target;
}

int PhaseDriver::power_index() const { return levels_ - level_; }

void PhaseDriver::init() {
  CW_ASSERT(level_ == 0, "phase already initialized");
  // The start machine holds its own ladder rows; the leader requests the
  // walk's end vertex from it.
  sim::MessageBatch req;
  req.add(kLeader, start_ % cs_.n(), kTagInitReq, {static_cast<uint64_t>(start_)},
          cs_.words_for_ids(1));
  cs_.deliver(std::move(req), "walk/init");
  int w_end = -1;
  {
    int machine = start_ % cs_.n();
    for (const sim::Message& m : cs_.inbox(machine)) {
      if (m.tag != kTagInitReq) continue;
      int row = static_cast<int>(m.payload[0]);
      w_end = engine::sample_row(ladder_.top(), row, cs_.draw_unit(machine));
    }
  }
  CW_ASSERT(w_end >= 0, "end-vertex request lost");
  sim::MessageBatch resp;
  resp.add(start_ % cs_.n(), kLeader, kTagInitResp, {static_cast<uint64_t>(w_end)},
           cs_.words_for_ids(1));
  cs_.deliver(std::move(resp), "walk/init");
  int got = -1;
  for (const sim::Message& m : cs_.inbox(kLeader)) {
    if (m.tag == kTagInitResp) got = static_cast<int>(m.payload[0]);
  }
  CW_ASSERT(got >= 0, "end-vertex response lost");

  walk_.entries = {{0, start_}, {ell_, got}};
  walk_.target_len = ell_;
  walk_.level = 1;
  level_ = 1;
  trace_ = PhaseTrace{};
}

void PhaseDriver::begin_level() {
  CW_ASSERT(level_ >= 1 && !done(), "no level to begin");
  delta_ = ell_ >> (level_ - 1);
  CW_ASSERT(delta_ >= 2, "level gap too small");
  level_trace_ = LevelTrace{};
  level_trace_.level = level_;
  pairs_.clear();
  pair_rank_.clear();
  level_entries_ = walk_.entries;

  // Slots between consecutive entries; all gaps equal delta at this level.
  for (size_t j = 0; j + 1 < walk_.entries.size(); ++j) {
    CW_ASSERT(walk_.entries[j + 1].first - walk_.entries[j].first == delta_,
              "partial walk gap out of step with the level");
    int p = walk_.entries[j].second;
    int q = walk_.entries[j + 1].second;
    auto key = std::make_pair(p, q);
    auto it = pair_rank_.find(key);
    int rank;
    if (it == pair_rank_.end()) {
      rank = static_cast<int>(pairs_.size());
      pair_rank_[key] = rank;
      PairInfo pi;
      pi.p = p;
      pi.q = q;
      pi.machine = rank % cs_.n();
      pairs_.push_back(std::move(pi));
    } else {
      rank = it->second;
    }
    pairs_[rank].slots.push_back(walk_.entries[j].first + half());
  }

  // Midpoint counts to the pair machines.
  {
    sim::MessageBatch batch;
    for (const PairInfo& pi : pairs_) {
      batch.add(kLeader, pi.machine, kTagCount,
                {static_cast<uint64_t>(pi.p), static_cast<uint64_t>(pi.q),
                 pi.slots.size()},
                cs_.words_for_ids(2) + cs_.words_for_count());
    }
    cs_.deliver(std::move(batch), "walk/level");
    ++level_trace_.delivers;
  }

  // Each pair machine asks every machine j for the scaled probability that j
  // is the midpoint, then samples its sequence from the returned weights.
  const int dim = ladder_.mats[0].n();
  {
    sim::MessageBatch batch;
    for (int m = 0; m < cs_.n(); ++m) {
      for (const sim::Message& msg : cs_.inbox(m)) {
        if (msg.tag != kTagCount) continue;
        for (int j = 0; j < dim; ++j) {
          batch.add(m, j % cs_.n(), kTagProbReq, {msg.payload[0], msg.payload[1]},
                    cs_.words_for_ids(2));
        }
      }
    }
    cs_.deliver(std::move(batch), "walk/level");
    ++level_trace_.delivers;
  }
  const TransitionMatrix& phalf = ladder_.power_of_two(power_index());
  {
    sim::MessageBatch batch;
    for (int m = 0; m < cs_.n(); ++m) {
      for (const sim::Message& msg : cs_.inbox(m)) {
        if (msg.tag != kTagProbReq) continue;
        int p = static_cast<int>(msg.payload[0]);
        int q = static_cast<int>(msg.payload[1]);
        // Machine m holds column m and row m of every power; respond for
        // every vertex it hosts.
        for (int j = m; j < dim; j += cs_.n()) {
          double w = phalf.p.at(p, j) * phalf.p.at(j, q);
          batch.add(m, msg.src, kTagProbResp,
                    {msg.payload[0], msg.payload[1], static_cast<uint64_t>(j),
                     std::bit_cast<uint64_t>(w)},
                    cs_.words_for_prob(ladder_.logical_bits));
        }
      }
    }
    cs_.deliver(std::move(batch), "walk/level");
    ++level_trace_.delivers;
  }

  // Sample the midpoint sequences in pair-rank order (deterministic).
  std::vector<std::vector<double>> weights(pairs_.size(), std::vector<double>(dim, 0.0));
  for (int m = 0; m < cs_.n(); ++m) {
    for (const sim::Message& msg : cs_.inbox(m)) {
      if (msg.tag != kTagProbResp) continue;
      auto key = std::make_pair(static_cast<int>(msg.payload[0]),
                                static_cast<int>(msg.payload[1]));
      auto it = pair_rank_.find(key);
      CW_ASSERT(it != pair_rank_.end(), "probability response for unknown pair");
      weights[it->second][msg.payload[2]] = std::bit_cast<double>(msg.payload[3]);
    }
  }
  for (size_t r = 0; r < pairs_.size(); ++r) {
    PairInfo& pi = pairs_[r];
    pi.sequence.clear();
    pi.sequence.reserve(pi.slots.size());
    for (size_t k = 0; k < pi.slots.size(); ++k) {
      pi.sequence.push_back(static_cast<int>(
          pick_weighted(weights[r], cs_.draw_unit(pi.machine))));
    }
  }
}

uint64_t PhaseDriver::prefix_count(const PairInfo& pi, uint64_t prefix_len) const {
  return static_cast<uint64_t>(
      std::upper_bound(pi.slots.begin(), pi.slots.end(), prefix_len) - pi.slots.begin());
}

int PhaseDriver::magic_vertex(uint64_t index, const char* label, int* deliver_counter) {
  if (index % delta_ == 0) {
    for (const auto& [idx, v] : walk_.entries) {
      if (idx == index) return v;
    }
    CW_ASSERT(false, "aligned index missing from the partial walk");
  }
  CW_ASSERT(index % delta_ == half(), "query off the level grid");
  size_t gap = index / delta_;
  CW_ASSERT(gap + 1 < level_entries_.size(), "slot beyond the level's entries");
  int p = level_entries_[gap].second;
  int q = level_entries_[gap + 1].second;
  int rank = pair_rank_.at({p, q});
  const PairInfo& pi = pairs_[rank];
  uint64_t k = prefix_count(pi, index);
  CW_ASSERT(k >= 1, "slot not covered by its pair sequence");

  sim::MessageBatch query;
  query.add(kLeader, pi.machine, kTagMQuery,
            {static_cast<uint64_t>(p), static_cast<uint64_t>(q), k - 1},
            cs_.words_for_ids(2) + cs_.words_for_count());
  cs_.deliver(std::move(query), label);
  int vertex = -1;
  {
    sim::MessageBatch resp;
    for (const sim::Message& msg : cs_.inbox(pi.machine)) {
      if (msg.tag != kTagMQuery) continue;
      auto it = pair_rank_.find({static_cast<int>(msg.payload[0]),
                                 static_cast<int>(msg.payload[1])});
      CW_ASSERT(it != pair_rank_.end(), "midpoint query for unknown pair");
      resp.add(pi.machine, kLeader, kTagMResp,
               {static_cast<uint64_t>(pairs_[it->second].sequence[msg.payload[2]])},
               cs_.words_for_ids(1));
    }
    cs_.deliver(std::move(resp), label);
  }
  for (const sim::Message& msg : cs_.inbox(kLeader)) {
    if (msg.tag == kTagMResp) vertex = static_cast<int>(msg.payload[0]);
  }
  CW_ASSERT(vertex >= 0, "midpoint query lost");
  if (deliver_counter) *deliver_counter += 2;
  return vertex;
}

bool PhaseDriver::check(uint64_t prefix_len) {
  CW_ASSERT(prefix_len >= half() && prefix_len <= walk_.target_len &&
                prefix_len % half() == 0,
            "check index off the grid");
  ++level_trace_.checks;

  // Leader sends each pair machine its truncated count.
  {
    sim::MessageBatch batch;
    for (const PairInfo& pi : pairs_) {
      batch.add(kLeader, pi.machine, kTagCount,
                {static_cast<uint64_t>(pi.p), static_cast<uint64_t>(pi.q),
                 prefix_count(pi, prefix_len)},
                cs_.words_for_ids(2) + cs_.words_for_count());
    }
    cs_.deliver(std::move(batch), "walk/check");
  }
  // Pair machines report per-vertex occurrence counts to the vertex machines.
  {
    sim::MessageBatch batch;
    for (int m = 0; m < cs_.n(); ++m) {
      for (const sim::Message& msg : cs_.inbox(m)) {
        if (msg.tag != kTagCount) continue;
        auto it = pair_rank_.find({static_cast<int>(msg.payload[0]),
                                   static_cast<int>(msg.payload[1])});
        CW_ASSERT(it != pair_rank_.end(), "count for unknown pair");
        const PairInfo& pi = pairs_[it->second];
        uint64_t c = msg.payload[2];
        std::map<int, uint64_t> occ;
        for (uint64_t k = 0; k < c; ++k) ++occ[pi.sequence[k]];
        for (const auto& [v, cnt] : occ) {
          batch.add(m, v % cs_.n(), kTagACount, {static_cast<uint64_t>(v), cnt},
                    cs_.words_for_ids(1) + cs_.words_for_count());
        }
      }
    }
    cs_.deliver(std::move(batch), "walk/check");
  }
  // Vertex machines aggregate and report to the leader.
  std::map<int, uint64_t> a;
  {
    sim::MessageBatch batch;
    std::map<int, uint64_t> local;
    for (int m = 0; m < cs_.n(); ++m) {
      local.clear();
      for (const sim::Message& msg : cs_.inbox(m)) {
        if (msg.tag != kTagACount) continue;
        local[static_cast<int>(msg.payload[0])] += msg.payload[1];
      }
      for (const auto& [v, sum] : local) {
        batch.add(m, kLeader, kTagASum, {static_cast<uint64_t>(v), sum},
                  cs_.words_for_ids(1) + cs_.words_for_count());
      }
    }
    cs_.deliver(std::move(batch), "walk/check");
    for (const sim::Message& msg : cs_.inbox(kLeader)) {
      if (msg.tag == kTagASum) a[static_cast<int>(msg.payload[0])] += msg.payload[1];
    }
  }

  std::set<int> distinct;
  for (const auto& [idx, v] : walk_.entries) {
    if (idx <= prefix_len) distinct.insert(v);
  }
  for (const auto& [v, cnt] : a) {
    if (cnt > 0) distinct.insert(v);
  }
  int d = static_cast<int>(distinct.size());
  if (d > rho_) return false;
  if (d < rho_) return true;

  int m_last = magic_vertex(prefix_len, "walk/check", nullptr);
  uint64_t o = 0;
  for (const auto& [idx, v] : walk_.entries) {
    if (idx <= prefix_len && v == m_last) ++o;
  }
  auto it = a.find(m_last);
  if (it != a.end()) o += it->second;
  return o == 1;
}

void PhaseDriver::install(const std::vector<std::pair<uint64_t, int>>& midpoints) {
  for (const auto& e : midpoints) walk_.entries.push_back(e);
  std::sort(walk_.entries.begin(), walk_.entries.end());
  walk_.level = level_ + 1;
  level_trace_.t = t_;
  level_trace_.distinct = walk_.distinct_count();
  CW_ASSERT(level_trace_.distinct <= rho_, "distinct budget exceeded after placement");
  trace_.levels.push_back(level_trace_);
  ++level_;
}

void PhaseDriver::place_direct() {
  level_trace_.direct_mode = true;
  // Pair machines ship their full prefix sequences with explicit ranks; the
  // leader reconstructs the chronological placement exactly. Round cost is
  // charged truthfully but flagged as the idealized mode.
  sim::MessageBatch batch;
  for (int m = 0; m < cs_.n(); ++m) {
    for (const sim::Message& msg : cs_.inbox(m)) {
      if (msg.tag != kTagCount) continue;
      auto it = pair_rank_.find({static_cast<int>(msg.payload[0]),
                                 static_cast<int>(msg.payload[1])});
      CW_ASSERT(it != pair_rank_.end(), "collect for unknown pair");
      const PairInfo& pi = pairs_[it->second];
      uint64_t c = msg.payload[2];
      sim::Words payload = {msg.payload[0], msg.payload[1], c};
      for (uint64_t k = 0; k < c; ++k) payload.push_back(pi.sequence[k]);
      batch.add(m, kLeader, kTagShip, std::move(payload),
                cs_.words_for_ids(2 + c) + cs_.words_for_count());
    }
  }
  cs_.deliver(std::move(batch), "walk/place/idealized");
  ++level_trace_.delivers;

  std::vector<std::pair<uint64_t, int>> midpoints;
  for (const sim::Message& msg : cs_.inbox(kLeader)) {
    if (msg.tag != kTagShip) continue;
    auto it = pair_rank_.find({static_cast<int>(msg.payload[0]),
                               static_cast<int>(msg.payload[1])});
    const PairInfo& pi = pairs_[it->second];
    uint64_t c = msg.payload[2];
    for (uint64_t k = 0; k < c; ++k) {
      midpoints.emplace_back(pi.slots[k], static_cast<int>(msg.payload[3 + k]));
    }
  }
  install(midpoints);
}

void PhaseDriver::place_matching() {
  // Multiset collection: pair machines send per-vertex counts through the
  // vertex machines, which forward sums to the leader.
  {
    sim::MessageBatch batch;
    for (int m = 0; m < cs_.n(); ++m) {
      for (const sim::Message& msg : cs_.inbox(m)) {
        if (msg.tag != kTagCount) continue;
        auto it = pair_rank_.find({static_cast<int>(msg.payload[0]),
                                   static_cast<int>(msg.payload[1])});
        CW_ASSERT(it != pair_rank_.end(), "collect for unknown pair");
        const PairInfo& pi = pairs_[it->second];
        uint64_t c = msg.payload[2];
        std::map<int, uint64_t> occ;
        for (uint64_t k = 0; k < c; ++k) ++occ[pi.sequence[k]];
        for (const auto& [v, cnt] : occ) {
          batch.add(m, v % cs_.n(), kTagACount, {static_cast<uint64_t>(v), cnt},
                    cs_.words_for_ids(1) + cs_.words_for_count());
        }
      }
    }
    cs_.deliver(std::move(batch), "walk/place");
    ++level_trace_.delivers;
  }
  std::map<int, uint64_t> multiset;
  {
    sim::MessageBatch batch;
    std::map<int, uint64_t> local;
    for (int m = 0; m < cs_.n(); ++m) {
      local.clear();
      for (const sim::Message& msg : cs_.inbox(m)) {
        if (msg.tag != kTagACount) continue;
        local[static_cast<int>(msg.payload[0])] += msg.payload[1];
      }
      for (const auto& [v, sum] : local) {
        batch.add(m, kLeader, kTagASum, {static_cast<uint64_t>(v), sum},
                  cs_.words_for_ids(1) + cs_.words_for_count());
      }
    }
    cs_.deliver(std::move(batch), "walk/place");
    ++level_trace_.delivers;
    for (const sim::Message& msg : cs_.inbox(kLeader)) {
      if (msg.tag == kTagASum) multiset[static_cast<int>(msg.payload[0])] += msg.payload[1];
    }
  }

  uint64_t total = 0;
  for (const auto& [v, cnt] : multiset) total += cnt;
  uint64_t final_slot = (t_ % delta_ == half()) ? t_ : t_ - half();
  CW_ASSERT(total >= 1, "no midpoints below the truncation point");

  int m_f = magic_vertex(final_slot, "walk/place", &level_trace_.delivers);

  long r = static_cast<long>(total) - 1;
  if (r > cfg_.exact_cap) {
    // Exact permanents cap out; fall back to explicit shipping. The leader
    // re-requests the collect counts so the pair machines' inboxes are fresh.
    sim::MessageBatch batch;
    for (const PairInfo& pi : pairs_) {
      batch.add(kLeader, pi.machine, kTagCount,
                {static_cast<uint64_t>(pi.p), static_cast<uint64_t>(pi.q),
                 prefix_count(pi, t_)},
                cs_.words_for_ids(2) + cs_.words_for_count());
    }
    cs_.deliver(std::move(batch), "walk/place");
    ++level_trace_.delivers;
    place_direct();
    return;
  }
  level_trace_.placed_r = static_cast<int>(r);

  // Open slots (chronological) except the final one, with their pairs.
  struct Slot {
    uint64_t index;
    int p;
    int q;
  };
  std::vector<Slot> open;
  for (size_t gap = 0; gap + 1 < walk_.entries.size(); ++gap) {
    uint64_t idx = walk_.entries[gap].first + half();
    if (idx > t_ || idx == final_slot) continue;
    open.push_back({idx, walk_.entries[gap].second, walk_.entries[gap + 1].second});
  }
  CW_ASSERT(static_cast<long>(open.size()) == r, "slot count disagrees with multiset");

  std::vector<std::pair<uint64_t, int>> midpoints;
  midpoints.emplace_back(final_slot, m_f);

  if (r > 0) {
    // The leader fetches the half-power entries it needs for the weight
    // matrix: machine v holds column v and row v, so it supplies (P[u,v],
    // P[v,u]) for every u in the working set.
    std::set<int> local_set;
    for (const auto& [idx, v] : walk_.entries) {
      if (idx <= t_) local_set.insert(v);
    }
    for (const auto& [v, cnt] : multiset) local_set.insert(v);
    sim::Words set_words(local_set.begin(), local_set.end());
    {
      sim::MessageBatch batch;
      for (uint64_t v : set_words) {
        batch.add(kLeader, static_cast<int>(v) % cs_.n(), kTagSubReq, set_words,
                  cs_.words_for_ids(set_words.size()));
      }
      cs_.deliver(std::move(batch), "walk/place");
      ++level_trace_.delivers;
    }
    const TransitionMatrix& phalf = ladder_.power_of_two(power_index());
    {
      sim::MessageBatch batch;
      for (int m = 0; m < cs_.n(); ++m) {
        for (const sim::Message& msg : cs_.inbox(m)) {
          if (msg.tag != kTagSubReq) continue;
          for (uint64_t vv = static_cast<uint64_t>(m);; vv += cs_.n()) {
            bool hosted = std::find(msg.payload.begin(), msg.payload.end(), vv) !=
                          msg.payload.end();
            if (hosted) {
              sim::Words payload{vv};
              for (uint64_t u : msg.payload) {
                payload.push_back(std::bit_cast<uint64_t>(phalf.p.at(u, vv)));
                payload.push_back(std::bit_cast<uint64_t>(phalf.p.at(vv, u)));
              }
              batch.add(m, kLeader, kTagSubResp, std::move(payload),
                        2 * msg.payload.size() * cs_.words_for_prob(ladder_.logical_bits));
            }
            if (vv + cs_.n() >= static_cast<uint64_t>(ladder_.mats[0].n())) break;
          }
        }
      }
      cs_.deliver(std::move(batch), "walk/place");
      ++level_trace_.delivers;
    }
    // into[v][u] = P[u,v], outof[v][u] = P[v,u], from the responses.
    std::map<int, std::map<int, double>> into, outof;
    for (const sim::Message& msg : cs_.inbox(kLeader)) {
      if (msg.tag != kTagSubResp) continue;
      int v = static_cast<int>(msg.payload[0]);
      for (size_t k = 0; k < set_words.size(); ++k) {
        int u = static_cast<int>(set_words[k]);
        into[v][u] = std::bit_cast<double>(msg.payload[1 + 2 * k]);
        outof[v][u] = std::bit_cast<double>(msg.payload[2 + 2 * k]);
      }
    }

    // Rows of the bipartite weight matrix: the multiset minus one copy of
    // the pinned final midpoint, in vertex order.
    std::vector<int> row_vertices;
    for (const auto& [v, cnt] : multiset) {
      uint64_t c = cnt - (v == m_f ? 1 : 0);
      for (uint64_t k = 0; k < c; ++k) row_vertices.push_back(v);
    }
    CW_ASSERT(static_cast<long>(row_vertices.size()) == r, "row expansion mismatch");

    matching::PlacementInstance inst;
    inst.b = Mat(static_cast<int>(r), static_cast<int>(r));
    for (long i = 0; i < r; ++i) {
      int rv = row_vertices[i];
      for (long j = 0; j < r; ++j) {
        inst.b.at(i, j) = into.at(rv).at(open[j].p) * outof.at(rv).at(open[j].q);
      }
    }
    std::vector<int> assignment;
    try {
      assignment = matching::sample_matching(
          inst, [this] { return cs_.draw_unit(kLeader); });
    } catch (const matching::ZeroPermanent& e) {
      CW_ASSERT(false, std::string("placement instance degenerate: ") + e.what());
    }
    for (long i = 0; i < r; ++i) {
      midpoints.emplace_back(open[assignment[i]].index, row_vertices[i]);
    }
  }
  install(midpoints);
}

void PhaseDriver::truncate_and_place() {
  CW_ASSERT(level_ >= 1 && !done(), "no level in progress");
  // Largest prefix length on the half-gap grid that Check accepts; the first
  // grid point is always acceptable, so the search runs over the rest.
  uint64_t n_candidates = walk_.target_len / half();
  uint64_t lo = 1, hi = n_candidates + 1;
  while (hi - lo > 1) {
    uint64_t mid = (lo + hi) / 2;
    if (check(mid * half())) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  t_ = lo * half();

  // Truncate the partial walk and its target.
  std::vector<std::pair<uint64_t, int>> kept;
  for (const auto& e : walk_.entries) {
    if (e.first <= t_) kept.push_back(e);
  }
  walk_.entries = std::move(kept);
  walk_.target_len = t_;

  // Collect counts at t for the placement step.
  {
    sim::MessageBatch batch;
    for (const PairInfo& pi : pairs_) {
      batch.add(kLeader, pi.machine, kTagCount,
                {static_cast<uint64_t>(pi.p), static_cast<uint64_t>(pi.q),
                 prefix_count(pi, t_)},
                cs_.words_for_ids(2) + cs_.words_for_count());
    }
    cs_.deliver(std::move(batch), "walk/place");
    ++level_trace_.delivers;
  }
  if (cfg_.placement == PhaseConfig::Placement::kDirect) {
    place_direct();
  } else {
    place_matching();
  }
}

void PhaseDriver::run_level() {
  begin_level();
  truncate_and_place();
}

PhaseResult PhaseDriver::finish() {
  CW_ASSERT(done(), "phase still has unfilled levels");
  PhaseResult res;
  res.walk.reserve(walk_.entries.size());
  for (size_t i = 0; i < walk_.entries.size(); ++i) {
    CW_ASSERT(walk_.entries[i].first == i, "final walk is not contiguous");
    res.walk.push_back(walk_.entries[i].second);
  }
  res.reached_rho = walk_.distinct_count() == rho_;
  trace_.tau = walk_.target_len;
  trace_.reached_rho = res.reached_rho;
  res.trace = trace_;
  return res;
}

PhaseResult run_phase(sim::Cluster& cs, const engine::PowerLadder& ladder, int start,
                      int rho, const PhaseConfig& cfg) {
  PhaseDriver driver(cs, ladder, start, rho, cfg);
  driver.init();
  while (!driver.done()) driver.run_level();
  return driver.finish();
}

std::vector<int> sequential_truncated_walk(const Mat& p, int start, int rho, uint64_t ell,
                                           Rng& rng) {
  std::vector<int> walk{start};
  std::vector<char> seen(p.rows(), 0);
  seen[start] = 1;
  int distinct = 1;
  std::vector<double> row(p.rows());
  while (distinct < rho && walk.size() - 1 < ell) {
    int u = walk.back();
    for (int j = 0; j < p.rows(); ++j) row[j] = p.at(u, j);
    int v = static_cast<int>(pick_weighted(row, rng.uniform()));
    walk.push_back(v);
    if (!seen[v]) {
      seen[v] = 1;
      ++distinct;
    }
  }
  return walk;
}

}  // namespace cliquewalk::phase
