#include "cliquewalk/doubling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cliquewalk::doubling {

namespace {

constexpr uint64_t kPrime = (uint64_t{1} << 61) - 1;

uint64_t mulmod_mersenne(uint64_t a, uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  uint64_t lo = static_cast<uint64_t>(p & kPrime);
  uint64_t hi = static_cast<uint64_t>(p >> 61);
  uint64_t r = lo + hi;
  if (r >= kPrime) r -= kPrime;
  return r;
}

enum : uint32_t {
  kTagTuple = 64,
  kTagMerged,
};

int hash_independence(int n, int c) {
  return std::max(2, static_cast<int>(std::ceil(
                         8.0 * c * std::log2(static_cast<double>(std::max(2, n))))));
}

}  // namespace

uint64_t HashFamily::seed_bits(int independence, int range_n, uint64_t domain_k) {
  double dom = static_cast<double>(range_n) * static_cast<double>(domain_k);
  uint64_t per_coeff = static_cast<uint64_t>(std::ceil(std::log2(std::max(2.0, dom))));
  return static_cast<uint64_t>(independence) * per_coeff;
}

HashFamily HashFamily::from_seed(const sim::Words& seed, int independence, int range_n,
                                 uint64_t domain_k) {
  CW_ASSERT(!seed.empty(), "hash family needs a seed");
  HashFamily h;
  h.range_n_ = range_n;
  h.domain_k_ = domain_k;
  h.coeffs_.resize(independence);
  uint64_t s0 = seed[0];
  uint64_t s1 = seed.size() > 1 ? seed[1] : mix64(seed[0]);
  for (int d = 0; d < independence; ++d) {
    h.coeffs_[d] = derive64(s0, s1, static_cast<uint64_t>(d), 0xC0EFull) % kPrime;
  }
  return h;
}

int HashFamily::operator()(uint64_t x, uint64_t i) const {
  CW_ASSERT(i >= 1 && i <= domain_k_, "hash index outside the walk domain");
  uint64_t key = (x * (domain_k_ + 1) + i) % kPrime;
  uint64_t acc = 0;
  for (size_t d = coeffs_.size(); d-- > 0;) {
    acc = mulmod_mersenne(acc, key);
    acc += coeffs_[d];
    if (acc >= kPrime) acc -= kPrime;
  }
  return static_cast<int>(acc % static_cast<uint64_t>(range_n_));
}

DoublingState init_walks(sim::Cluster& cs, const Graph& g, uint64_t tau) {
  CW_ASSERT(tau >= 1, "walk target must be positive");
  DoublingState st;
  st.walks_per_machine = pow2_ceil(tau);
  st.walk_len = 1;
  st.walks.assign(g.n(), {});
  for (int v = 0; v < g.n(); ++v) {
    const auto& nb = g.neighbors(v);
    std::vector<double> weights;
    weights.reserve(nb.size());
    for (auto [u, w] : nb) weights.push_back(static_cast<double>(w));
    st.walks[v].reserve(st.walks_per_machine);
    for (uint64_t i = 0; i < st.walks_per_machine; ++i) {
      int u = nb[pick_weighted(weights, cs.draw_unit(v))].first;
      st.walks[v].push_back({v, u});
    }
  }
  return st;
}

void doubling_iteration(sim::Cluster& cs, DoublingState& st, const Graph& g,
                        const HashFamily* family, int c, DoublingTrace* trace,
                        const std::string& label) {
  const uint64_t k = st.walks_per_machine;
  CW_ASSERT(k >= 2, "doubling needs at least two walks per machine");
  const int n = g.n();

  HashFamily local;
  if (!family) {
    int t = hash_independence(n, c);
    sim::Words seed = cs.shared_seed(0, HashFamily::seed_bits(t, n, k), label);
    local = HashFamily::from_seed(seed, t, n, k);
    family = &local;
  }
  const HashFamily& h = *family;

  // Steps 2-3: ship each walk to its rendezvous machine. A first-half walk
  // with index i chases the matching index k+1-i of its endpoint's sequence;
  // second-half walks wait at the hash of their own owner. The pairing
  // i + (k+1-i) = k+1 is a bijection between the halves, so no walk is both
  // a seeker and a partner.
  const uint64_t tuple_words = cs.words_for_ids(st.walk_len + 1 + 2);
  {
    sim::MessageBatch batch;
    for (int v = 0; v < n; ++v) {
      for (uint64_t i = 1; i <= k; ++i) {
        const std::vector<int>& w = st.walks[v][i - 1];
        int dst = i <= k / 2 ? h(static_cast<uint64_t>(w.back()), k + 1 - i)
                             : h(static_cast<uint64_t>(v), i);
        sim::Words payload{static_cast<uint64_t>(v), i};
        for (int x : w) payload.push_back(static_cast<uint64_t>(x));
        batch.add(v, dst, kTagTuple, std::move(payload), tuple_words);
      }
    }
    cs.deliver(std::move(batch), label);
  }

  // Step 4: concatenate matched pairs and send them home. A second-half walk
  // may serve several first-half walks that end at its owner.
  uint64_t max_recv = 0;
  {
    sim::MessageBatch batch;
    for (int m = 0; m < n; ++m) {
      const auto& box = cs.inbox(m);
      max_recv = std::max(max_recv, static_cast<uint64_t>(box.size()));
      std::map<std::pair<int, uint64_t>, const sim::Message*> second_half;
      for (const sim::Message& msg : box) {
        if (msg.tag != kTagTuple) continue;
        uint64_t i = msg.payload[1];
        if (i > k / 2) {
          second_half[{static_cast<int>(msg.payload[0]), i}] = &msg;
        }
      }
      for (const sim::Message& msg : box) {
        if (msg.tag != kTagTuple) continue;
        uint64_t i = msg.payload[1];
        if (i > k / 2) continue;
        int owner = static_cast<int>(msg.payload[0]);
        int end = static_cast<int>(msg.payload.back());
        auto it = second_half.find({end, k + 1 - i});
        CW_ASSERT(it != second_half.end(),
                  "missing partner walk at the rendezvous machine");
        const sim::Message& partner = *it->second;
        sim::Words merged{i};
        for (size_t x = 2; x < msg.payload.size(); ++x) merged.push_back(msg.payload[x]);
        // Partner starts at `end`; drop the duplicated junction vertex.
        for (size_t x = 3; x < partner.payload.size(); ++x) {
          merged.push_back(partner.payload[x]);
        }
        batch.add(m, owner, kTagMerged, std::move(merged),
                  cs.words_for_ids(2 * st.walk_len + 1 + 1));
      }
    }
    cs.deliver(std::move(batch), label);
  }

  // Step 5: install.
  const uint64_t new_k = k / 2;
  const uint64_t new_len = st.walk_len * 2;
  for (int v = 0; v < n; ++v) {
    st.walks[v].assign(new_k, {});
  }
  for (int m = 0; m < n; ++m) {
    for (const sim::Message& msg : cs.inbox(m)) {
      if (msg.tag != kTagMerged) continue;
      uint64_t i = msg.payload[0];
      CW_ASSERT(i >= 1 && i <= new_k, "merged walk index out of range");
      std::vector<int> w;
      w.reserve(msg.payload.size() - 1);
      for (size_t x = 1; x < msg.payload.size(); ++x) {
        w.push_back(static_cast<int>(msg.payload[x]));
      }
      CW_ASSERT(w.size() == new_len + 1, "merged walk has the wrong length");
      st.walks[m][i - 1] = std::move(w);
    }
  }
  for (int v = 0; v < n; ++v) {
    for (uint64_t i = 0; i < new_k; ++i) {
      CW_ASSERT(!st.walks[v][i].empty(), "machine missing a merged walk");
    }
  }
  st.walks_per_machine = new_k;
  st.walk_len = new_len;
  if (trace) trace->iterations.push_back({k, st.walk_len / 2, max_recv});
}

RunResult run_doubling(sim::Cluster& cs, const Graph& g, uint64_t tau, int c) {
  DoublingState st = init_walks(cs, g, tau);
  DoublingTrace trace;
  int iteration = 1;
  HashFamily family;
  bool have_family = false;
  if (st.walks_per_machine >= 2) {
    int t = hash_independence(g.n(), c);
    sim::Words seed = cs.shared_seed(
        0, HashFamily::seed_bits(t, g.n(), st.walks_per_machine), "doubling-seed");
    family = HashFamily::from_seed(seed, t, g.n(), st.walks_per_machine);
    have_family = true;
  }
  while (st.walks_per_machine >= 2) {
    doubling_iteration(cs, st, g, have_family ? &family : nullptr, c, &trace,
                       "doubling-iter-" + std::to_string(iteration));
    ++iteration;
  }
  RunResult res;
  res.trace = std::move(trace);
  res.walk.reserve(g.n());
  for (int v = 0; v < g.n(); ++v) {
    CW_ASSERT(st.walks[v].size() == 1, "doubling should end with one walk per machine");
    res.walk.push_back(st.walks[v][0]);
  }
  return res;
}

uint64_t load_audit(const DoublingTrace& trace) {
  uint64_t max_tuples = 0;
  for (const auto& it : trace.iterations) {
    max_tuples = std::max(max_tuples, it.max_recv_tuples);
  }
  return max_tuples;
}

}  // namespace cliquewalk::doubling
