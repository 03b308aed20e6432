#include "cliquewalk/engine.hpp"

#include <bit>
#include <cmath>

#include "cliquewalk/bigmat.hpp"
#include "cliquewalk/kernels.hpp"

namespace cliquewalk::engine {

namespace {

// The double-precision lane keeps at most 48 truncation bits and subtracts a
// dim-scaled margin per multiply so results stay below the exact values even
// under accumulation rounding.
constexpr int kDoubleLaneMaxBits = 48;

double double_lane_delta(int dim, int bits) {
  double margin = static_cast<double>(dim) * 0x1.0p-52;
  return std::ldexp(1.0, -bits) + 2.0 * margin;
}

bool double_lane_ok(int dim, int levels, int bits, double base_budget, double beta) {
  if (bits > kDoubleLaneMaxBits) return false;
  double delta = double_lane_delta(dim, bits);
  double e = base_budget + delta;
  for (int j = 0; j < levels; ++j) e = (dim + 1) * e + delta;
  return e <= beta;
}

struct LaneChoice {
  bool use_double = false;
  int bits = 0;
  double bound = 0.0;  // analytic top-of-ladder budget
};

LaneChoice fixed_lane(int dim, int levels, double base_budget, const PrecisionConfig& pc) {
  LaneChoice lane;
  lane.use_double = false;
  lane.bits = pc.round_bits;
  double delta = std::ldexp(1.0, -lane.bits);
  double e = base_budget + delta;
  for (int j = 0; j < levels; ++j) e = (dim + 1) * e + delta;
  lane.bound = e;
  return lane;
}

LaneChoice choose_lane(int dim, int levels, double base_budget, const PrecisionConfig& pc) {
  if (double_lane_ok(dim, levels, std::min(pc.round_bits, kDoubleLaneMaxBits),
                     base_budget, pc.beta)) {
    LaneChoice lane;
    lane.use_double = true;
    lane.bits = std::min(pc.round_bits, kDoubleLaneMaxBits);
    double delta = double_lane_delta(dim, lane.bits);
    double e = base_budget + delta;
    for (int j = 0; j < levels; ++j) e = (dim + 1) * e + delta;
    lane.bound = e;
    return lane;
  }
  return fixed_lane(dim, levels, base_budget, pc);
}

void check_guards(const sim::Cluster& cs, uint64_t target, const PrecisionConfig& pc) {
  double n = static_cast<double>(std::max(2, cs.n()));
  CW_ASSERT(static_cast<double>(target) <= std::pow(n, pc.c3) * 0x1p32,
            "squaring count breaks the polynomial guard");
  CW_ASSERT(pc.beta >= std::pow(n, -pc.c4) * 0x1p-32,
            "beta breaks the polynomial guard");
}

/// One deliver that hands machine j its column piece of every power.
void distribute_columns(sim::Cluster& cs, const PowerLadder& ladder, int logical_bits,
                        const std::string& label) {
  const int dim = ladder.mats[0].n();
  const uint64_t words_per_prob = cs.words_for_prob(logical_bits);
  sim::MessageBatch batch;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      sim::Words payload;
      payload.reserve(ladder.mats.size());
      for (const TransitionMatrix& m : ladder.mats) {
        payload.push_back(std::bit_cast<uint64_t>(m.p.at(i, j)));
      }
      batch.add(i % cs.n(), j % cs.n(), 0, std::move(payload),
                words_per_prob * ladder.mats.size());
    }
  }
  cs.deliver(std::move(batch), label);
}

PowerLadder build_ladder_impl(sim::Cluster& cs, const Graph* g, const Mat* base,
                              const fx::FixedMatrix* fixed_base, double base_budget,
                              uint64_t target, const PrecisionConfig& pc,
                              const std::string& label) {
  CW_ASSERT(std::has_single_bit(target), "ladder target must be a power of two");
  check_guards(cs, target, pc);
  const int dim = g ? g->n() : (base ? base->rows() : fixed_base->rows());
  const int levels = log2_exact(target);
  LaneChoice lane = choose_lane(dim, levels, base_budget, pc);
  if (fixed_base) lane = fixed_lane(dim, levels, base_budget, pc);
  if (lane.bound > pc.beta) {
    throw BudgetExceeded("ladder error bound " + std::to_string(lane.bound) +
                         " exceeds beta; raise round_bits");
  }

  PowerLadder ladder;
  ladder.target = target;
  ladder.logical_bits = lane.bits;
  const uint64_t units = sim::matmul_units_for_dim(dim, cs.n());

  if (lane.use_double) {
    double delta = double_lane_delta(dim, lane.bits);
    double margin = static_cast<double>(dim) * 0x1.0p-52;
    double scale = std::ldexp(1.0, lane.bits);
    double inv_scale = std::ldexp(1.0, -lane.bits);

    TransitionMatrix cur;
    if (g) {
      cur.p = transition_matrix(*g).p;
      // Divisions may round up; pull entries down one ulp before truncating.
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          double x = cur.p.at(i, j) - 0x1.0p-53;
          cur.p.at(i, j) = x <= 0.0 ? 0.0 : std::floor(x * scale) * inv_scale;
        }
    } else {
      cur.p = *base;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          double x = cur.p.at(i, j);
          cur.p.at(i, j) = x <= 0.0 ? 0.0 : std::floor(x * scale) * inv_scale;
        }
    }
    cur.error_budget = base_budget + delta;
    cur.power = 1;
    ladder.mats.push_back(cur);
    const auto& backend = kern::active_backend();
    for (int j = 1; j <= levels; ++j) {
      const TransitionMatrix& prev = ladder.mats.back();
      TransitionMatrix next;
      next.p = Mat(dim, dim);
      backend.matmul_trunc(prev.p.data(), prev.p.stride(), prev.p.data(), prev.p.stride(),
                           next.p.data(), next.p.stride(), dim, dim, dim, scale,
                           inv_scale, margin);
      next.error_budget = (dim + 1) * prev.error_budget + delta;
      next.power = uint64_t{1} << j;
      cs.charge_matmul(units);
      ladder.mats.push_back(std::move(next));
    }
    distribute_columns(cs, ladder, lane.bits, label);
    return ladder;
  }

  // Fixed-point lane.
  const int bits = lane.bits;
  double delta = std::ldexp(1.0, -bits);
  fx::FixedMatrix cur = g ? fx::FixedMatrix::from_graph_transition(*g, bits)
                          : (fixed_base ? fixed_base->rescaled(bits)
                                        : fx::FixedMatrix::from_f64(*base, bits));
  double budget = base_budget + delta;
  auto emit = [&](const fx::FixedMatrix& fm, double b, uint64_t power) {
    TransitionMatrix t;
    t.p = fm.to_f64_floor();
    t.error_budget = b + 0x1.0p-52;  // floor conversion to double
    t.power = power;
    ladder.mats.push_back(std::move(t));
  };
  emit(cur, budget, 1);
  for (int j = 1; j <= levels; ++j) {
    cur.square_trunc_inplace();
    budget = (dim + 1) * budget + delta;
    cs.charge_matmul(units);
    emit(cur, budget, uint64_t{1} << j);
  }
  distribute_columns(cs, ladder, bits, label);
  return ladder;
}

}  // namespace

double ladder_error_bound(int dim, int levels, double delta) {
  double e = delta;
  for (int j = 0; j < levels; ++j) e = (dim + 1) * e + delta;
  return e;
}

int required_bits(int dim, int levels, double beta) {
  for (int bits = 8; bits <= 4096; bits += 8) {
    if (ladder_error_bound(dim, levels, std::ldexp(1.0, -bits)) <= beta * 0.5) return bits;
  }
  throw BudgetExceeded("no feasible bit width for the requested budget");
}

TransitionMatrix round_matrix(const TransitionMatrix& m, int bits) {
  CW_ASSERT(bits >= 1, "round_matrix needs at least one bit");
  TransitionMatrix out;
  out.p = Mat(m.p.rows(), m.p.cols());
  double scale = std::ldexp(1.0, bits);
  double inv_scale = std::ldexp(1.0, -bits);
  for (int i = 0; i < m.p.rows(); ++i) {
    for (int j = 0; j < m.p.cols(); ++j) {
      out.p.at(i, j) = std::floor(m.p.at(i, j) * scale) * inv_scale;
    }
  }
  out.error_budget = m.error_budget + inv_scale;
  out.power = m.power;
  return out;
}

PowerLadder build_ladder(sim::Cluster& cs, const Graph& g, uint64_t target,
                         const PrecisionConfig& pc, const std::string& label) {
  return build_ladder_impl(cs, &g, nullptr, nullptr, 0.0, target, pc, label);
}

PowerLadder build_ladder(sim::Cluster& cs, const Mat& base, double base_budget,
                         uint64_t target, const PrecisionConfig& pc,
                         const std::string& label) {
  return build_ladder_impl(cs, nullptr, &base, nullptr, base_budget, target, pc, label);
}

PowerLadder build_ladder(sim::Cluster& cs, const fx::FixedMatrix& base,
                         double base_budget, uint64_t target,
                         const PrecisionConfig& pc, const std::string& label) {
  return build_ladder_impl(cs, nullptr, nullptr, &base, base_budget, target, pc, label);
}

int sample_row(const TransitionMatrix& m, int row, double u) {
  const int n = m.p.cols();
  const double* w = m.p.row(row);
  double total = 0.0;
  int argmax = 0;
  for (int j = 0; j < n; ++j) {
    total += w[j];
    if (w[j] > w[argmax]) argmax = j;
  }
  CW_ASSERT(total >= 1.0 - n * m.error_budget - 1e-12, "row lost too much mass");
  double missing = total < 1.0 ? 1.0 - total : 0.0;
  double target = u;  // total mass after folding is exactly 1
  double acc = 0.0;
  int last = -1;
  for (int j = 0; j < n; ++j) {
    double wj = w[j] + (j == argmax ? missing : 0.0);
    if (wj <= 0.0) continue;
    last = j;
    acc += wj;
    if (target < acc) return j;
  }
  CW_ASSERT(last >= 0, "empty row");
  return last;
}

}  // namespace cliquewalk::engine
