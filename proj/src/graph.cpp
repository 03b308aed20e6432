#include "cliquewalk/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cliquewalk {

Graph Graph::from_edges(int n, std::vector<Edge> edges) {
  if (n <= 0) throw ParseError("graph has no vertices");
  Graph g;
  g.n_ = n;
  g.wmat_.assign(static_cast<size_t>(n) * n, 0);
  for (Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw ParseError("vertex id out of range");
    }
    if (e.u == e.v) {
      throw SelfLoopError("self-loop at vertex " + std::to_string(e.u + 1));
    }
    if (e.w < 1) throw ParseError("edge weight must be a positive integer");
    if (e.u > e.v) std::swap(e.u, e.v);
    int64_t& slot = g.wmat_[static_cast<size_t>(e.u) * n + e.v];
    if (slot != 0) {
      throw DuplicateEdgeError("duplicate edge {" + std::to_string(e.u + 1) + "," +
                               std::to_string(e.v + 1) + "}");
    }
    slot = e.w;
    g.wmat_[static_cast<size_t>(e.v) * n + e.u] = e.w;
    g.weight_bound_ = std::max(g.weight_bound_, e.w);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  g.edges_ = std::move(edges);

  g.adj_.assign(n, {});
  g.wdeg_.assign(n, 0);
  for (const Edge& e : g.edges_) {
    g.adj_[e.u].emplace_back(e.v, e.w);
    g.adj_[e.v].emplace_back(e.u, e.w);
    g.wdeg_[e.u] += e.w;
    g.wdeg_[e.v] += e.w;
  }
  for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());

  // Connectivity check (BFS from 0).
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (auto [v, w] : g.adj_[u]) {
      (void)w;
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  if (reached != n) throw DisconnectedError("graph is not connected");
  return g;
}

std::pair<int64_t, int64_t> Graph::transition_entry_rational(int u, int v) const {
  int64_t num = edge_weight(u, v);
  int64_t den = weighted_degree(u);
  if (num == 0) return {0, 1};
  int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

int64_t Graph::weighted_degree_into(int u, const std::vector<char>& inside) const {
  int64_t s = 0;
  for (auto [v, w] : adj_[u]) {
    if (inside[v]) s += w;
  }
  return s;
}

Graph load_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Edge> edges;
  int max_id = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long long u, v, w = 1;
    if (!(ls >> u)) continue;  // blank line
    if (!(ls >> v)) throw ParseError("line " + std::to_string(lineno) + ": expected \"u v [w]\"");
    if (!(ls >> w)) w = 1;
    std::string rest;
    if (ls >> rest) throw ParseError("line " + std::to_string(lineno) + ": trailing tokens");
    if (u < 1 || v < 1) throw ParseError("line " + std::to_string(lineno) + ": ids are 1-based");
    if (w < 1) throw ParseError("line " + std::to_string(lineno) + ": weight must be >= 1");
    edges.push_back({static_cast<int>(u - 1), static_cast<int>(v - 1), w});
    max_id = std::max(max_id, static_cast<int>(std::max(u, v)));
  }
  if (edges.empty()) throw ParseError("no edges in document");
  return Graph::from_edges(max_id, std::move(edges));
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_graph(ss.str());
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream os;
  for (const Edge& e : g.edges()) {
    os << e.u + 1 << " " << e.v + 1;
    if (e.w != 1) os << " " << e.w;
    os << "\n";
  }
  return os.str();
}

double TransitionMatrix::row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < n(); ++j) s += p.at(i, j);
  return s;
}

TransitionMatrix transition_matrix(const Graph& g) {
  TransitionMatrix t;
  t.p = Mat(g.n(), g.n());
  for (int u = 0; u < g.n(); ++u) {
    double deg = static_cast<double>(g.weighted_degree(u));
    for (auto [v, w] : g.neighbors(u)) {
      t.p.at(u, v) = static_cast<double>(w) / deg;
    }
  }
  t.error_budget = 0.0;
  t.power = 1;
  return t;
}

Laplacian laplacian(const Graph& g) {
  Laplacian l;
  l.n = g.n();
  l.m.assign(static_cast<size_t>(l.n) * l.n, 0);
  for (int u = 0; u < g.n(); ++u) {
    l.m[static_cast<size_t>(u) * l.n + u] = g.weighted_degree(u);
  }
  for (const Edge& e : g.edges()) {
    l.m[static_cast<size_t>(e.u) * l.n + e.v] = -e.w;
    l.m[static_cast<size_t>(e.v) * l.n + e.u] = -e.w;
  }
  return l;
}

// ---------------------------------------------------------------------------

namespace corpus {
namespace {

Graph cycle(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, 1});
  return Graph::from_edges(n, std::move(e));
}

Graph path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1});
  return Graph::from_edges(n, std::move(e));
}

Graph complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j, 1});
  return Graph::from_edges(n, std::move(e));
}

// Leaves come first so that the leaf subset is {0,1,2}; the hub is vertex 3.
Graph star3() {
  return Graph::from_edges(4, {{0, 3, 1}, {1, 3, 1}, {2, 3, 1}});
}

Graph k4_minus_edge() {
  return Graph::from_edges(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1}});
}

Graph petersen() {
  std::vector<Edge> e;
  for (int i = 0; i < 5; ++i) e.push_back({i, (i + 1) % 5, 1});       // outer cycle
  for (int i = 0; i < 5; ++i) e.push_back({i, i + 5, 1});             // spokes
  for (int i = 0; i < 5; ++i) e.push_back({5 + i, 5 + (i + 2) % 5, 1});  // pentagram
  return Graph::from_edges(10, std::move(e));
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> kNames = {
      "K3", "K4", "C4", "C5", "C8", "P3", "P4", "S3", "K4me", "petersen"};
  return kNames;
}

Graph get(const std::string& name) {
  if (name == "K3") return complete(3);
  if (name == "K4") return complete(4);
  if (name == "C4") return cycle(4);
  if (name == "C5") return cycle(5);
  if (name == "C8") return cycle(8);
  if (name == "P3") return path(3);
  if (name == "P4") return path(4);
  if (name == "S3") return star3();
  if (name == "K4me") return k4_minus_edge();
  if (name == "petersen") return petersen();
  throw Error("unknown corpus graph: " + name);
}

std::string edge_list_text(const std::string& name) { return to_edge_list(get(name)); }

}  // namespace corpus

}  // namespace cliquewalk
