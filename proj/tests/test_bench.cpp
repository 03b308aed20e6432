#include <cstdio>
#include <doctest.h>
#include <fstream>

#include "cliquewalk/bench.hpp"

using namespace cliquewalk;

TEST_SUITE("bench") {

TEST_CASE("graph resolution") {
  CHECK(bench::resolve_graph("K3").n() == 3);
  CHECK(bench::resolve_graph("name:C5").n() == 5);

  std::string path = "bench_test_graph.edges";
  {
    std::ofstream out(path);
    out << "1 2\n2 3\n3 1\n";
  }
  CHECK(bench::resolve_graph(path).n() == 3);
  std::remove(path.c_str());

  CHECK_THROWS_AS(bench::resolve_graph("no/such/file.edges"), ParseError);
}

TEST_CASE("config validation") {
  Graph g = corpus::get("K3");
  bench::ExperimentConfig cfg;
  cfg.runs = 0;
  CHECK_THROWS_AS(bench::run_experiment(g, cfg), bench::ConfigError);
  cfg.runs = 1;
  cfg.algo = "nonsense";
  CHECK_THROWS_AS(bench::run_experiment(g, cfg), bench::ConfigError);
  cfg.algo = "doubling-walk";
  cfg.tau = 0;
  CHECK_THROWS_AS(bench::run_experiment(g, cfg), bench::ConfigError);
}

TEST_CASE("reports are byte-identical across reruns") {
  Graph g = corpus::get("K3");
  bench::ExperimentConfig cfg;
  cfg.graph_name = "K3";
  cfg.algo = "tree-sublinear";
  cfg.runs = 200;
  cfg.seed = 12345;
  bench::Report a = bench::run_experiment(g, cfg);
  bench::Report b = bench::run_experiment(g, cfg);
  CHECK(a.text == b.text);
  CHECK(a.runs_table == b.runs_table);
  CHECK(a.text.find("rho 2") != std::string::npos);
  CHECK(a.text.find("ell ") != std::string::npos);
  CHECK(a.text.find("beta ") != std::string::npos);
  CHECK(a.text.find("placement exact-matching") != std::string::npos);

  bench::ExperimentConfig dcfg;
  dcfg.graph_name = "C8";
  dcfg.algo = "doubling-walk";
  dcfg.tau = 16;
  dcfg.runs = 20;
  dcfg.seed = 7;
  Graph c8 = corpus::get("C8");
  bench::Report d1 = bench::run_experiment(c8, dcfg);
  bench::Report d2 = bench::run_experiment(c8, dcfg);
  CHECK(d1.text == d2.text);
  CHECK(d1.text.find("load_audit_max") != std::string::npos);
  CHECK(d1.rounds_total > 0);
  CHECK(d1.tv_available);
}

TEST_CASE("reference sampler through the runner") {
  Graph g = corpus::get("K3");
  bench::ExperimentConfig cfg;
  cfg.graph_name = "K3";
  cfg.algo = "aldous-broder-ref";
  cfg.runs = 30000;
  cfg.seed = 99;
  bench::Report rep = bench::run_experiment(g, cfg);
  CHECK(rep.tv_available);
  CHECK(rep.tv <= 0.02);
  CHECK(rep.flag_rate == 0.0);
  uint64_t total = 0;
  for (const auto& [k, c] : rep.outcomes) total += c;
  CHECK(total == cfg.runs);
}

TEST_CASE("star spec example: ten runs all produce the star") {
  Graph g = corpus::get("S3");
  bench::ExperimentConfig cfg;
  cfg.graph_name = "S3";
  cfg.algo = "tree-sublinear";
  cfg.runs = 10;
  cfg.seed = 4;
  bench::Report rep = bench::run_experiment(g, cfg);
  REQUIRE(rep.outcomes.size() == 1);
  CHECK(rep.outcomes.begin()->first == "tree:1-4,2-4,3-4");
  CHECK(rep.flag_rate == 0.0);
}

TEST_CASE("trees via doubling") {
  Graph p4 = corpus::get("P4");
  sim::Cluster cs = sim::Cluster::for_graph(p4, 3);
  auto edges = bench::tree_via_doubling(cs, p4, 0, 2);
  CHECK(edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(cs.ledger().per_label.count("cover-extract") == 1);

  Graph c5 = corpus::get("C5");
  bench::ExperimentConfig cfg;
  cfg.graph_name = "C5";
  cfg.algo = "tree-via-doubling";
  cfg.runs = 30000;
  cfg.seed = 17;
  bench::Report rep = bench::run_experiment(c5, cfg);
  CHECK(rep.tv_available);
  CHECK(rep.tv <= 0.02);
}

}  // TEST_SUITE
