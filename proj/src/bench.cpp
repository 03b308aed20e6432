#include "cliquewalk/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "cliquewalk/doubling.hpp"
#include "cliquewalk/oracles.hpp"

namespace cliquewalk::bench {

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

std::string tree_key(const std::vector<std::pair<int, int>>& edges) {
  std::ostringstream os;
  for (size_t i = 0; i < edges.size(); ++i) {
    if (i) os << ",";
    os << edges[i].first + 1 << "-" << edges[i].second + 1;
  }
  return os.str();
}

bool is_tree_algo(const std::string& algo) {
  return algo == "tree-sublinear" || algo == "tree-via-doubling" ||
         algo == "aldous-broder-ref";
}

}  // namespace

Graph resolve_graph(const std::string& source) {
  std::string name = source;
  if (name.rfind("name:", 0) == 0) name = name.substr(5);
  const auto& known = corpus::names();
  if (std::find(known.begin(), known.end(), name) != known.end()) {
    return corpus::get(name);
  }
  return load_graph_file(source);
}

uint64_t default_cover_budget(const Graph& g) {
  uint64_t n = static_cast<uint64_t>(g.n());
  return 8 * n * static_cast<uint64_t>(std::max(1, ceil_log2(n)));
}

std::vector<std::pair<int, int>> tree_via_doubling(sim::Cluster& cs, const Graph& g,
                                                   uint64_t cover_budget, int c) {
  uint64_t budget = cover_budget > 0 ? cover_budget : default_cover_budget(g);
  for (;;) {
    doubling::RunResult rr = doubling::run_doubling(cs, g, budget, c);
    const std::vector<int>& walk = rr.walk[0];
    // Extraction is leader-side; shipping the walk is charged explicitly.
    sim::MessageBatch batch;
    batch.add(0, 0, 0, {}, cs.words_for_ids(walk.size()));
    cs.deliver(std::move(batch), "cover-extract");

    std::set<int> seen{walk.front()};
    std::vector<std::pair<int, int>> edges;
    for (size_t i = 1; i < walk.size(); ++i) {
      if (seen.insert(walk[i]).second) {
        int a = walk[i - 1], b = walk[i];
        if (a > b) std::swap(a, b);
        edges.emplace_back(a, b);
      }
    }
    if (static_cast<int>(seen.size()) == g.n()) {
      std::sort(edges.begin(), edges.end());
      return edges;
    }
    budget *= 2;  // walk failed to cover; geometric retry
  }
}

Report run_experiment(const Graph& g, const ExperimentConfig& cfg) {
  if (cfg.runs < 1) throw ConfigError("runs must be at least 1");
  if (!is_tree_algo(cfg.algo) && cfg.algo != "doubling-walk") {
    throw ConfigError("unknown algorithm: " + cfg.algo);
  }
  if (cfg.algo == "doubling-walk" && cfg.tau < 1) {
    throw ConfigError("doubling-walk needs a positive tau");
  }

  Report rep;
  std::ostringstream runs_table;
  runs_table << "run\toutcome\tflagged\trounds\n";

  // Exact census for tree TV, when the graph is small enough.
  oracle::TreeCensus census;
  bool census_ok = false;
  if (is_tree_algo(cfg.algo)) {
    try {
      census = oracle::enumerate_spanning_trees(g);
      census_ok = true;
    } catch (const oracle::CapExceeded&) {
      census_ok = false;
    }
  }

  std::map<std::string, int64_t> label_rounds;
  uint64_t flagged_runs = 0;
  tree::DerivativeCache cache;
  std::vector<uint64_t> tree_counts(census_ok ? census.size() : 0, 0);

  // Exact endpoint law for the doubling walk when enumerable.
  std::vector<double> endpoint_exact;
  if (cfg.algo == "doubling-walk" && g.n() <= oracle::kExactVertexCap &&
      cfg.tau <= 4096) {
    uint64_t len = pow2_ceil(cfg.tau);
    oracle::RationalMatrix pk = oracle::exact_transition_power(g, len);
    endpoint_exact.resize(g.n());
    for (int v = 0; v < g.n(); ++v) {
      endpoint_exact[v] = pk.at(0, v).convert_to<double>();
    }
  }
  std::vector<uint64_t> endpoint_counts(g.n(), 0);

  for (uint64_t trial = 0; trial < cfg.runs; ++trial) {
    sim::Cluster cs = sim::Cluster::for_graph(g, cfg.seed + trial, cfg.cost);
    std::string outcome;
    bool flagged = false;

    if (cfg.algo == "tree-sublinear") {
      tree::TreeResult tr = tree::sample_tree(cs, g, cfg.walk, &cache);
      flagged = tr.flagged;
      outcome = "tree:" + tree_key(tr.edges);
      if (census_ok) {
        long idx = census.index_of(tr.edges);
        CW_ASSERT(idx >= 0, "sampled edges missing from the census");
        ++tree_counts[idx];
      }
    } else if (cfg.algo == "aldous-broder-ref") {
      Rng rng(derive64(cfg.seed, trial, 0xAB, 0));
      auto edges = tree::aldous_broder_reference(g, rng);
      outcome = "tree:" + tree_key(edges);
      if (census_ok) {
        long idx = census.index_of(edges);
        CW_ASSERT(idx >= 0, "sampled edges missing from the census");
        ++tree_counts[idx];
      }
    } else if (cfg.algo == "tree-via-doubling") {
      auto edges = tree_via_doubling(cs, g, cfg.cover_budget, cfg.doubling_c);
      outcome = "tree:" + tree_key(edges);
      if (census_ok) {
        long idx = census.index_of(edges);
        CW_ASSERT(idx >= 0, "sampled edges missing from the census");
        ++tree_counts[idx];
      }
    } else {  // doubling-walk
      doubling::RunResult rr = doubling::run_doubling(cs, g, cfg.tau, cfg.doubling_c);
      int end = rr.walk[0].back();
      ++endpoint_counts[end];
      outcome = "end:" + std::to_string(end + 1);
      rep.load_audit_max = std::max(rep.load_audit_max, doubling::load_audit(rr.trace));
    }

    if (flagged) ++flagged_runs;
    ++rep.outcomes[outcome];
    rep.rounds_total += cs.ledger().rounds_charged;
    for (const auto& [label, rounds] : cs.ledger().per_label) {
      label_rounds[label] += rounds;
    }
    runs_table << trial << "\t" << outcome << "\t" << (flagged ? 1 : 0) << "\t"
               << cs.ledger().rounds_charged << "\n";
  }

  rep.flag_rate = static_cast<double>(flagged_runs) / static_cast<double>(cfg.runs);

  // Distribution statistics.
  if (census_ok && is_tree_algo(cfg.algo)) {
    rep.tv_available = true;
    double total_w = census.total_weight.convert_to<double>();
    double tv = 0.0, chi = 0.0;
    for (size_t i = 0; i < census.size(); ++i) {
      double p = census.weights[i].convert_to<double>() / total_w;
      double freq = static_cast<double>(tree_counts[i]) / static_cast<double>(cfg.runs);
      tv += std::fabs(freq - p);
      double expected = p * static_cast<double>(cfg.runs);
      double diff = static_cast<double>(tree_counts[i]) - expected;
      chi += diff * diff / expected;
    }
    rep.tv = 0.5 * tv;
    rep.chi_square = chi;
  } else if (!endpoint_exact.empty()) {
    rep.tv_available = true;
    double tv = 0.0, chi = 0.0;
    for (int v = 0; v < g.n(); ++v) {
      double p = endpoint_exact[v];
      double freq = static_cast<double>(endpoint_counts[v]) / static_cast<double>(cfg.runs);
      tv += std::fabs(freq - p);
      if (p > 0.0) {
        double expected = p * static_cast<double>(cfg.runs);
        double diff = static_cast<double>(endpoint_counts[v]) - expected;
        chi += diff * diff / expected;
      }
    }
    rep.tv = 0.5 * tv;
    rep.chi_square = chi;
  }

  // Structured report with the full resolved configuration.
  std::ostringstream os;
  os << "cliquewalk report\n";
  os << "algo " << cfg.algo << "\n";
  os << "graph " << cfg.graph_name << "\n";
  os << "n " << g.n() << "\n";
  os << "runs " << cfg.runs << "\n";
  os << "seed " << cfg.seed << "\n";
  os << "rho " << cfg.walk.resolve_rho(g.n()) << "\n";
  os << "c1 " << fmt_double(cfg.walk.c1) << "\n";
  os << "c2 " << fmt_double(cfg.walk.resolve_c2(g.n())) << "\n";
  os << "ell " << cfg.walk.resolve_ell(g.n()) << "\n";
  os << "placement "
     << (cfg.walk.placement == phase::PhaseConfig::Placement::kExactMatching
             ? "exact-matching"
             : "direct")
     << "\n";
  os << "exact_cap " << cfg.walk.exact_cap << "\n";
  os << "beta " << fmt_double(cfg.walk.precision.beta) << "\n";
  os << "round_bits " << cfg.walk.precision.round_bits << "\n";
  os << "alpha " << fmt_double(cfg.cost.alpha) << "\n";
  os << "lenzen_constant " << cfg.cost.lenzen_constant << "\n";
  {
    sim::Cluster probe(g.n(), 0, cfg.cost);
    os << "word_bits " << probe.word_bits() << "\n";
  }
  if (cfg.algo == "doubling-walk") {
    os << "tau " << cfg.tau << "\n";
    os << "doubling_c " << cfg.doubling_c << "\n";
    os << "load_audit_max " << rep.load_audit_max << "\n";
  }
  if (cfg.algo == "tree-via-doubling") {
    os << "cover_budget "
       << (cfg.cover_budget > 0 ? cfg.cover_budget : default_cover_budget(g)) << "\n";
    os << "doubling_c " << cfg.doubling_c << "\n";
  }
  for (const auto& [outcome, count] : rep.outcomes) {
    os << "outcome " << outcome << " " << count << " "
       << fmt_double(static_cast<double>(count) / static_cast<double>(cfg.runs)) << "\n";
  }
  if (rep.tv_available) {
    os << "tv " << fmt_double(rep.tv) << "\n";
    os << "chi_square " << fmt_double(rep.chi_square) << "\n";
  } else {
    os << "tv unavailable\n";
  }
  os << "flag_rate " << fmt_double(rep.flag_rate) << "\n";
  os << "rounds_total " << rep.rounds_total << "\n";
  for (const auto& [label, rounds] : label_rounds) {
    os << "label " << label << " " << rounds << "\n";
  }
  rep.text = os.str();
  rep.runs_table = runs_table.str();
  return rep;
}

}  // namespace cliquewalk::bench
