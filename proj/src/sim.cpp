#include "cliquewalk/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cliquewalk::sim {

Cluster::Cluster(int n, uint64_t seed, CostModel cm) : n_(n), seed_(seed), cm_(cm) {
  CW_ASSERT(n >= 1, "cluster needs at least one machine");
  CW_ASSERT(cm_.alpha >= 0.0 && cm_.alpha < 1.0, "alpha must be in [0,1)");
  CW_ASSERT(cm_.lenzen_constant >= 1, "lenzen constant must be positive");
  if (cm_.word_bits <= 0) {
    cm_.word_bits = std::max(1, static_cast<int>(std::ceil(2.0 * std::log2(std::max(2, n)))));
  }
  word_bits_ = cm_.word_bits;
  int count_bits = std::max(1, static_cast<int>(std::ceil(3.0 * std::log2(std::max(2, n)))));
  count_words_ = (count_bits + word_bits_ - 1) / word_bits_;
  stores_.resize(n);
  inboxes_.resize(n);
  draw_counters_.assign(n, 0);
  ledger_.max_send.assign(n, 0);
  ledger_.max_recv.assign(n, 0);
}

Cluster Cluster::for_graph(const Graph& g, uint64_t seed, CostModel cm) {
  Cluster cs(g.n(), seed, cm);
  for (int v = 0; v < g.n(); ++v) {
    Words row;
    for (auto [u, w] : g.neighbors(v)) {
      row.push_back(static_cast<uint64_t>(u));
      row.push_back(static_cast<uint64_t>(w));
    }
    cs.stores_[v]["adj"] = std::move(row);
  }
  return cs;
}

void Cluster::charge(const std::string& label, int64_t rounds) {
  CW_ASSERT(rounds >= 0, "negative round charge");
  ledger_.rounds_charged += rounds;
  ledger_.per_label[label] += rounds;
  if (capturing_) {
    capture_.rounds += rounds;
    capture_.label_rounds.emplace_back(label, rounds);
  }
}

void Cluster::deliver(MessageBatch batch, const std::string& label) {
  std::vector<uint64_t> sent(n_, 0), recv(n_, 0);
  for (const Message& m : batch.messages()) {
    CW_ASSERT(m.src >= 0 && m.src < n_ && m.dst >= 0 && m.dst < n_,
              "message endpoint out of range");
    sent[m.src] += m.words;
    recv[m.dst] += m.words;
  }
  uint64_t peak = 0;
  for (int i = 0; i < n_; ++i) {
    peak = std::max({peak, sent[i], recv[i]});
    ledger_.max_send[i] = std::max(ledger_.max_send[i], sent[i]);
    ledger_.max_recv[i] = std::max(ledger_.max_recv[i], recv[i]);
    if (capturing_) {
      if (capture_.max_send.empty()) {
        capture_.max_send.assign(n_, 0);
        capture_.max_recv.assign(n_, 0);
      }
      capture_.max_send[i] = std::max(capture_.max_send[i], sent[i]);
      capture_.max_recv[i] = std::max(capture_.max_recv[i], recv[i]);
    }
  }
  int64_t rounds = cm_.lenzen_constant *
                   static_cast<int64_t>((peak + static_cast<uint64_t>(n_) - 1) / n_);
  charge(label, rounds);
  ++ledger_.deliver_count;
  ++epoch_;
  if (capturing_) {
    ++capture_.delivers;
    ++capture_.epochs;
  }
  if (trace_on_) {
    DeliverRecord rec;
    rec.label = label;
    rec.rounds = rounds;
    rec.sent = sent;
    rec.recv = recv;
    for (const Message& m : batch.messages()) rec.messages.emplace_back(m.src, m.dst, m.words);
    trace_.push_back(std::move(rec));
  }

  for (auto& box : inboxes_) box.clear();
  std::stable_sort(batch.messages().begin(), batch.messages().end(),
                   [](const Message& a, const Message& b) {
                     return std::tie(a.dst, a.src, a.seq) < std::tie(b.dst, b.src, b.seq);
                   });
  for (Message& m : batch.messages()) {
    inboxes_[m.dst].push_back(std::move(m));
  }
}

void Cluster::broadcast(int src, const Words& payload, uint64_t words, const std::string& label) {
  MessageBatch batch;
  for (int dst = 0; dst < n_; ++dst) {
    batch.add(src, dst, 0, payload, words);
  }
  deliver(std::move(batch), label);
}

void Cluster::charge_matmul(uint64_t count) {
  int64_t unit = static_cast<int64_t>(std::ceil(std::pow(static_cast<double>(n_), cm_.alpha)));
  charge("matmul", static_cast<int64_t>(count) * unit);
  ledger_.matmul_units += count;
  if (capturing_) capture_.matmul_units += count;
}

Words Cluster::shared_seed(int broadcaster, uint64_t bits, const std::string& label) {
  CW_ASSERT(bits >= 1, "shared seed needs at least one bit");
  uint64_t invocation = shared_counter_++;
  uint64_t nwords64 = (bits + 63) / 64;
  Words s(nwords64);
  for (uint64_t i = 0; i < nwords64; ++i) {
    s[i] = derive64(seed_, 0x5eedu, invocation, i);
  }
  if (bits % 64 != 0) s.back() &= (~uint64_t{0}) >> (64 - bits % 64);
  // Charged like a broadcast of the packed string; payloads larger than n
  // words are sent in chunks, which the ceiling formula already covers.
  broadcast(broadcaster, s, words_for_bits(bits), label);
  return s;
}

uint64_t Cluster::draw_u64(int machine) {
  CW_ASSERT(machine >= 0 && machine < n_, "draw from unknown machine");
  return derive64(seed_, static_cast<uint64_t>(machine) + 1, epoch_,
                  draw_counters_[machine]++);
}

void Cluster::begin_capture() {
  CW_ASSERT(!capturing_, "capture already active");
  capturing_ = true;
  capture_ = LedgerDelta{};
}

LedgerDelta Cluster::end_capture() {
  CW_ASSERT(capturing_, "no active capture");
  capturing_ = false;
  return std::move(capture_);
}

void Cluster::replay(const LedgerDelta& d) {
  for (const auto& [label, rounds] : d.label_rounds) {
    ledger_.rounds_charged += rounds;
    ledger_.per_label[label] += rounds;
  }
  ledger_.deliver_count += d.delivers;
  ledger_.matmul_units += d.matmul_units;
  epoch_ += d.epochs;
  for (size_t i = 0; i < d.max_send.size(); ++i) {
    ledger_.max_send[i] = std::max(ledger_.max_send[i], d.max_send[i]);
    ledger_.max_recv[i] = std::max(ledger_.max_recv[i], d.max_recv[i]);
  }
}

std::string Cluster::ledger_report() const {
  std::ostringstream os;
  os << "rounds_charged " << ledger_.rounds_charged << "\n";
  os << "delivers " << ledger_.deliver_count << "\n";
  os << "matmul_units " << ledger_.matmul_units << "\n";
  for (const auto& [label, rounds] : ledger_.per_label) {
    os << "label " << label << " " << rounds << "\n";
  }
  uint64_t hw_send = 0, hw_recv = 0;
  for (int i = 0; i < n_; ++i) {
    hw_send = std::max(hw_send, ledger_.max_send[i]);
    hw_recv = std::max(hw_recv, ledger_.max_recv[i]);
  }
  os << "max_send_words " << hw_send << "\n";
  os << "max_recv_words " << hw_recv << "\n";
  return os.str();
}

}  // namespace cliquewalk::sim
