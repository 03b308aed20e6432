#include "cliquewalk/derivative.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cliquewalk/bigmat.hpp"

namespace cliquewalk::deriv {

namespace {

constexpr double kAbsorbCoverConstant = 8.0;  // multiples of the cover-time bound

std::vector<char> subset_mask(int n, std::vector<int>& S) {
  CW_ASSERT(!S.empty(), "derivative graphs need a nonempty subset");
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  std::vector<char> mask(n, 0);
  for (int v : S) {
    CW_ASSERT(v >= 0 && v < n, "subset vertex out of range");
    mask[v] = 1;
  }
  return mask;
}

/// Number of squarings that drives the absorbing chain's escape mass below
/// `tail`: the chain loses at least half its free mass per cover-time unit.
int absorb_levels(const Graph& g, double tail) {
  double cover_bound = static_cast<double>(g.weight_bound()) *
                       std::pow(static_cast<double>(g.n()), 3.0);
  double steps = kAbsorbCoverConstant * cover_bound * std::ceil(std::log2(2.0 / tail));
  uint64_t k = pow2_ceil(static_cast<uint64_t>(steps) + 1);
  return log2_exact(k);
}

struct QFixed {
  fx::FixedMatrix q;
  double achieved;  // analytic subtractive bound: absorption tail + rounding
};

/// Q with subtractive error at most budget, in fixed point. Charged through
/// the cluster (matmul units per squaring plus one distribution deliver).
QFixed q_fixed(sim::Cluster& cs, const Graph& g, const std::vector<char>& mask,
               double budget, const engine::PrecisionConfig& pc,
               const std::string& label) {
  const int n = g.n();
  const int dim = 2 * n;
  const int levels = absorb_levels(g, budget / 2.0);
  const int bits = std::max(pc.round_bits, engine::required_bits(dim, levels, budget / 2.0));

  // Auxiliary chain on two copies of V: index v is the free copy, n + v the
  // absorbed copy. A step from a free vertex lands in the absorbed copy
  // exactly when the underlying walk steps into S.
  fx::FixedMatrix r(dim, dim, bits);
  for (int u = 0; u < n; ++u) {
    fx::BigInt deg = g.weighted_degree(u);
    fx::BigInt into_s = 0;
    for (auto [v, w] : g.neighbors(u)) {
      if (mask[v]) {
        into_s += w;
      } else {
        r.at(u, v) = (fx::BigInt(w) << bits) / deg;
      }
    }
    if (into_s != 0) r.at(u, n + u) = (into_s << bits) / deg;
    r.at(n + u, n + u) = fx::BigInt(1) << bits;
  }

  const uint64_t units = sim::matmul_units_for_dim(dim, cs.n());
  for (int j = 0; j < levels; ++j) {
    r.square_trunc_inplace();
    cs.charge_matmul(units);
  }

  // Machine u ships its row of the free->absorbed block to the column owners.
  sim::MessageBatch batch;
  const uint64_t words = cs.words_for_prob(bits);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      batch.add(u, v, 0, {}, words);
    }
  }
  cs.deliver(std::move(batch), label);

  QFixed out;
  out.q = fx::FixedMatrix(n, n, bits);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) out.q.at(u, v) = r.at(u, n + v);
  // Escape mass halves per cover-time unit, so the tail after 2^levels steps
  // is far below budget/2 by construction; rounding is bounded by the
  // recurrence for the chosen bits.
  double tail = budget / 2.0;
  out.achieved = tail + engine::ladder_error_bound(dim, levels, std::ldexp(1.0, -bits));
  return out;
}

}  // namespace

ShortcutMatrix build_shortcut(sim::Cluster& cs, const Graph& g, std::vector<int> S,
                              const engine::PrecisionConfig& pc, const std::string& label) {
  auto mask = subset_mask(g.n(), S);
  QFixed q = q_fixed(cs, g, mask, pc.beta, pc, label);
  if (q.achieved + 0x1.0p-52 > pc.beta) {
    throw engine::BudgetExceeded("shortcut budget exceeded");
  }
  ShortcutMatrix out;
  out.vertices = std::move(S);
  out.q = q.q.to_f64_floor();
  out.error_budget = q.achieved + 0x1.0p-52;
  return out;
}

SchurMatrix build_schur(sim::Cluster& cs, const Graph& g, std::vector<int> S,
                        const engine::PrecisionConfig& pc, const std::string& label) {
  auto mask = subset_mask(g.n(), S);
  CW_ASSERT(S.size() >= 2, "Schur transition needs at least two vertices");
  const int n = g.n();
  const int s = static_cast<int>(S.size());
  const double n_d = static_cast<double>(n);

  // Q is built to a much tighter budget than beta because the row scalers
  // amplify its deficit; the achieved bound is recomputed below with the
  // actual scaler values and checked against beta.
  double eps_q = pc.beta * 0x1.0p-20 / (n_d * n_d);
  for (int attempt = 0; attempt < 3; ++attempt) {
    fx::FixedMatrix q = q_fixed(cs, g, mask, eps_q, pc, label).q;
    const int bits = q.bits();

    // R[w][v] = w({w,v}) / wdeg_S(w) for edges into S; identity row when w
    // has no neighbor in S.
    fx::FixedMatrix r(n, n, bits);
    for (int w = 0; w < n; ++w) {
      fx::BigInt deg_s = g.weighted_degree_into(w, mask);
      if (deg_s == 0) {
        r.at(w, w) = fx::BigInt(1) << bits;
        continue;
      }
      for (auto [v, wt] : g.neighbors(w)) {
        if (mask[v]) r.at(w, v) = (fx::BigInt(wt) << bits) / deg_s;
      }
    }

    fx::FixedMatrix qr = fx::FixedMatrix::multiply_trunc(q, r);
    cs.charge_matmul(sim::matmul_units_for_dim(n, cs.n()));
    sim::MessageBatch batch;  // rows of the product for the S machines
    const uint64_t words = cs.words_for_prob(bits);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) batch.add(S[i] % cs.n(), S[j] % cs.n(), 0, {}, words);
    cs.deliver(std::move(batch), label);

    // (QR) deficit: its Q factor is short by at most eps_q (column sums of R
    // are at most n), plus truncation of R and of the product itself.
    double eps_qr = n_d * eps_q + (n_d + 1.0) * std::ldexp(1.0, -bits);

    SchurMatrix out;
    out.vertices = S;
    out.raw = Mat(s, s);
    out.transition = Mat(s, s);
    out.transition_fixed = fx::FixedMatrix(s, s, bits);
    out.row_scalers.assign(s, 0.0);
    out.degenerate_rows = 0;
    double guard = std::pow(n_d, 6.0);
    double max_scaler_bound = 0.0;

    for (int i = 0; i < s; ++i) {
      int u = S[i];
      double diag = fx::fixed_to_double_floor(qr.at(u, u), bits);
      CW_ASSERT(diag < 1.0, "return probability cannot reach one");
      double scaler = 1.0 / (1.0 - diag);
      if (scaler > guard) {
        ++out.degenerate_rows;
        throw DegenerateRow("row scaler for vertex " + std::to_string(u + 1) +
                            " exceeds the polynomial guard");
      }
      out.row_scalers[i] = scaler;
      // Upper bound on the exact scaler given the subtractive deficit of diag.
      double denom = 1.0 - scaler * eps_qr;
      double exact_scaler_bound = denom > 0.0 ? scaler / denom : guard;
      max_scaler_bound = std::max(max_scaler_bound, exact_scaler_bound);

      // The exact row scaler equals one over the off-diagonal row sum of the
      // exact product, so normalizing by the computed row sum applies it
      // without trusting the division; the fixed-point form keeps the full
      // width for downstream squarings.
      fx::BigInt rowsum_num = 0;
      for (int j = 0; j < s; ++j) {
        if (j != i) rowsum_num += qr.at(u, S[j]);
      }
      CW_ASSERT(rowsum_num > 0, "Schur row lost all mass");
      double rowsum = 0.0;
      for (int j = 0; j < s; ++j) {
        if (j == i) continue;
        out.transition_fixed.at(i, j) = (qr.at(u, S[j]) << bits) / rowsum_num;
        double e = fx::fixed_to_double_floor(qr.at(u, S[j]), bits) * scaler;
        e = std::nextafter(e, 0.0);  // keep the product below the exact value
        out.raw.at(i, j) = e;
        rowsum += e;
      }
      for (int j = 0; j < s; ++j) {
        if (j != i) out.transition.at(i, j) = out.raw.at(i, j) / rowsum;
      }
    }

    // Fixed-point bound: entry deficit eps_qr amplified through the
    // normalization, plus its own truncation.
    double mb = max_scaler_bound;
    out.fixed_budget = eps_qr * mb * (1.0 + s * mb) + std::ldexp(1.0, -bits);
    // Double-surface bound adds the conversion and rescaling slack.
    out.error_budget = out.fixed_budget * (1.0 + 2.0 * s) + 0x1.0p-46;
    if (out.fixed_budget <= pc.beta) {
      return out;
    }
    eps_q *= 0x1.0p-16;  // retry with a tighter Q
  }
  throw engine::BudgetExceeded("Schur budget not reachable within retry bounds");
}

engine::PowerLadder schur_power_ladder(sim::Cluster& cs, const SchurMatrix& sch,
                                       uint64_t target, const engine::PrecisionConfig& pc,
                                       const std::string& label) {
  engine::PrecisionConfig pc2 = pc;
  pc2.round_bits = std::max(
      pc.round_bits,
      engine::required_bits(sch.transition.rows(), ceil_log2(target), pc.beta));
  return engine::build_ladder(cs, sch.transition_fixed, sch.fixed_budget, target, pc2,
                              label);
}

}  // namespace cliquewalk::deriv
