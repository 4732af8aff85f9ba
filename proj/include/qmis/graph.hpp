#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qmis/bitset.hpp"
#include "qmis/common.hpp"
#include "qmis/rng.hpp"

namespace qmis {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(VertexId a, VertexId b) {
  return a < b ? Edge{a, b} : Edge{b, a};
}

// Immutable sparse undirected graph. The raw edge list keeps insertion order
// (interpolation splices rely on it and may contain repeated edges); the
// adjacency index and canonical edge list are deduplicated.
class Graph {
 public:
  Graph() = default;

  Graph(VertexId n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (const Edge& e : edges_) {
      if (e.u == e.v)
        throw parameter_error("Graph: self-loop at vertex " + std::to_string(e.u));
      if (e.u >= n_ || e.v >= n_)
        throw parameter_error("Graph: edge (" + std::to_string(e.u) + "," +
                              std::to_string(e.v) + ") out of range for n=" +
                              std::to_string(n_));
    }
    canonical_ = edges_;
    for (Edge& e : canonical_) e = make_edge(e.u, e.v);
    std::sort(canonical_.begin(), canonical_.end());
    canonical_.erase(std::unique(canonical_.begin(), canonical_.end()), canonical_.end());
    build_adjacency();
  }

  VertexId n() const { return n_; }
  // Raw edge-list length (counts splice repetitions).
  std::size_t m() const { return edges_.size(); }
  // Distinct undirected edges.
  std::size_t edge_count() const { return canonical_.size(); }

  const std::vector<Edge>& edge_list() const { return edges_; }
  const std::vector<Edge>& canonical_edges() const { return canonical_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {adj_flat_.data() + adj_off_[v], adj_flat_.data() + adj_off_[v + 1]};
  }

  std::size_t degree(VertexId v) const { return adj_off_[v + 1] - adj_off_[v]; }

  bool has_edge(VertexId a, VertexId b) const {
    auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  // Rebuild-and-compare consistency check between edge list and adjacency.
  bool validate() const {
    Graph rebuilt(n_, edges_);
    return rebuilt.adj_flat_ == adj_flat_ && rebuilt.adj_off_ == adj_off_ &&
           rebuilt.canonical_ == canonical_;
  }

  // Subgraph induced by `members` (must be sorted, distinct). Vertices are
  // relabeled 0..k-1 in members order; only edges with both endpoints inside
  // survive.
  Graph induced_subgraph(std::span<const VertexId> members) const {
    std::vector<Edge> sub_edges;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (VertexId w : neighbors(members[a])) {
        auto it = std::lower_bound(members.begin(), members.end(), w);
        if (it != members.end() && *it == w) {
          auto b = static_cast<std::size_t>(it - members.begin());
          if (a < b) sub_edges.push_back(Edge{static_cast<VertexId>(a), static_cast<VertexId>(b)});
        }
      }
    }
    return Graph(static_cast<VertexId>(members.size()), std::move(sub_edges));
  }

 private:
  void build_adjacency() {
    adj_off_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const Edge& e : canonical_) {
      ++adj_off_[e.u + 1];
      ++adj_off_[e.v + 1];
    }
    for (std::size_t i = 1; i < adj_off_.size(); ++i) adj_off_[i] += adj_off_[i - 1];
    adj_flat_.resize(canonical_.size() * 2);
    std::vector<std::size_t> cursor(adj_off_.begin(), adj_off_.end() - 1);
    for (const Edge& e : canonical_) {
      adj_flat_[cursor[e.u]++] = e.v;
      adj_flat_[cursor[e.v]++] = e.u;
    }
    for (VertexId v = 0; v < n_; ++v)
      std::sort(adj_flat_.begin() + static_cast<std::ptrdiff_t>(adj_off_[v]),
                adj_flat_.begin() + static_cast<std::ptrdiff_t>(adj_off_[v + 1]));
  }

  VertexId n_ = 0;
  std::vector<Edge> edges_;
  std::vector<Edge> canonical_;
  std::vector<VertexId> adj_flat_;
  std::vector<std::size_t> adj_off_;
};

enum class GraphModel {
  FixedEdgeCount,  // m = round(d*n/2) distinct edges, uniform over pairs
  BernoulliEdges,  // each pair present independently with probability d/n
};

struct EnsembleSpec {
  VertexId n = 0;
  double d = 0.0;
  GraphModel model = GraphModel::FixedEdgeCount;
  std::uint64_t seed = 0;
};

inline Graph sample_graph(const EnsembleSpec& spec) {
  if (spec.n == 0) throw parameter_error("sample_graph: n must be positive");
  if (!(spec.d >= 0.0)) throw parameter_error("sample_graph: d must be nonnegative");
  const std::uint64_t n = spec.n;
  const std::uint64_t pair_count = n * (n - 1) / 2;
  Rng rng(spec.seed);

  if (spec.model == GraphModel::FixedEdgeCount) {
    auto m = static_cast<std::uint64_t>(std::llround(spec.d * static_cast<double>(n) / 2.0));
    if (m > pair_count)
      throw parameter_error("sample_graph: m=" + std::to_string(m) +
                            " exceeds pair count " + std::to_string(pair_count));
    std::vector<Edge> edges;
    edges.reserve(m);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(m * 2);
    while (edges.size() < m) {
      VertexId a = static_cast<VertexId>(rng.below(n));
      VertexId b = static_cast<VertexId>(rng.below(n - 1));
      if (b >= a) ++b;
      Edge e = make_edge(a, b);
      std::uint64_t key = (static_cast<std::uint64_t>(e.u) << 32) | e.v;
      if (seen.insert(key).second) edges.push_back(e);
    }
    return Graph(spec.n, std::move(edges));
  }

  // Bernoulli(d/n): walk the upper triangle with geometric gaps.
  double p = spec.d / static_cast<double>(n);
  if (p > 1.0) throw parameter_error("sample_graph: Bernoulli model needs d <= n");
  std::vector<Edge> edges;
  if (p > 0.0) {
    const double log1mp = std::log1p(-p);
    VertexId row = 0;
    std::uint64_t col = 1;  // next candidate position is (row, col)
    auto advance = [&](std::uint64_t gap) {
      col += gap;
      while (row < n - 1 && col >= n) {
        std::uint64_t overflow = col - n;
        ++row;
        col = row + 1 + overflow;
      }
    };
    if (p >= 1.0) {
      for (VertexId i = 0; i + 1 < spec.n; ++i)
        for (VertexId j = i + 1; j < spec.n; ++j) edges.push_back(Edge{i, j});
    } else {
      // First gap.
      advance(static_cast<std::uint64_t>(std::floor(std::log1p(-rng.uniform01()) / log1mp)));
      while (row < n - 1 && col < n) {
        edges.push_back(Edge{row, static_cast<VertexId>(col)});
        advance(1 + static_cast<std::uint64_t>(
                        std::floor(std::log1p(-rng.uniform01()) / log1mp)));
      }
    }
  }
  return Graph(spec.n, std::move(edges));
}

// Radius-r BFS ball around a center vertex.
struct NeighborhoodQuery {
  VertexId center = 0;
  std::uint32_t radius = 0;
  std::vector<VertexId> members;            // sorted ascending
  std::vector<std::uint32_t> member_distance;  // parallel to members

  bool contains(VertexId v) const {
    return std::binary_search(members.begin(), members.end(), v);
  }
  std::uint32_t distance_of(VertexId v) const {
    auto it = std::lower_bound(members.begin(), members.end(), v);
    if (it == members.end() || *it != v)
      throw parameter_error("NeighborhoodQuery: vertex not in ball");
    return member_distance[static_cast<std::size_t>(it - members.begin())];
  }
};

// Reusable BFS workspace; avoids O(n) clearing per query on large graphs.
class BallScratch {
 public:
  void bfs(const Graph& g, VertexId center, std::uint32_t radius,
           std::vector<VertexId>& out_vertices, std::vector<std::uint32_t>& out_dist) {
    if (center >= g.n()) throw parameter_error("ball: center out of range");
    if (stamp_.size() < g.n()) stamp_.assign(g.n(), 0);
    ++epoch_;
    if (epoch_ == 0) {  // wrapped
      stamp_.assign(stamp_.size(), 0);
      epoch_ = 1;
    }
    out_vertices.clear();
    out_dist.clear();
    out_vertices.push_back(center);
    out_dist.push_back(0);
    stamp_[center] = epoch_;
    std::size_t head = 0;
    while (head < out_vertices.size()) {
      VertexId v = out_vertices[head];
      std::uint32_t dv = out_dist[head];
      ++head;
      if (dv == radius) continue;  // never expand the last shell
      for (VertexId w : g.neighbors(v)) {
        if (stamp_[w] != epoch_) {
          stamp_[w] = epoch_;
          out_vertices.push_back(w);
          out_dist.push_back(dv + 1);
        }
      }
    }
  }

 private:
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
};

inline NeighborhoodQuery ball(const Graph& g, VertexId center, std::uint32_t radius) {
  BallScratch scratch;
  std::vector<VertexId> verts;
  std::vector<std::uint32_t> dist;
  scratch.bfs(g, center, radius, verts, dist);
  // Sort members, keep distances aligned.
  std::vector<std::size_t> order(verts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return verts[a] < verts[b]; });
  NeighborhoodQuery q;
  q.center = center;
  q.radius = radius;
  q.members.reserve(verts.size());
  q.member_distance.reserve(verts.size());
  for (std::size_t i : order) {
    q.members.push_back(verts[i]);
    q.member_distance.push_back(dist[i]);
  }
  return q;
}

// Complement of B(i,p) union B(j,p), sorted.
inline std::vector<VertexId> far_set(const Graph& g, VertexId i, VertexId j, std::uint32_t p) {
  NeighborhoodQuery bi = ball(g, i, p);
  NeighborhoodQuery bj = ball(g, j, p);
  std::vector<VertexId> in_union;
  std::set_union(bi.members.begin(), bi.members.end(), bj.members.begin(), bj.members.end(),
                 std::back_inserter(in_union));
  std::vector<VertexId> out;
  out.reserve(g.n() - in_union.size());
  std::size_t k = 0;
  for (VertexId v = 0; v < g.n(); ++v) {
    while (k < in_union.size() && in_union[k] < v) ++k;
    if (k == in_union.size() || in_union[k] != v) out.push_back(v);
  }
  return out;
}

// Union of the two radius-p balls, sorted (the "near" side of far_set).
inline std::vector<VertexId> ball_union(const Graph& g, VertexId i, VertexId j,
                                        std::uint32_t p) {
  NeighborhoodQuery bi = ball(g, i, p);
  NeighborhoodQuery bj = ball(g, j, p);
  std::vector<VertexId> out;
  std::set_union(bi.members.begin(), bi.members.end(), bj.members.begin(), bj.members.end(),
                 std::back_inserter(out));
  return out;
}

// Two endpoint graphs with a common edge-slot count; graph_at(t) takes the
// first m-t slots from g0 and the last t from gm.
class InterpolationPath {
 public:
  InterpolationPath(Graph g0, Graph gm) : g0_(std::move(g0)), gm_(std::move(gm)) {
    if (g0_.n() != gm_.n())
      throw parameter_error("InterpolationPath: endpoint graphs must share n");
    if (g0_.m() != gm_.m())
      throw parameter_error("InterpolationPath: endpoint graphs must share edge count");
  }

  const Graph& g0() const { return g0_; }
  const Graph& gm() const { return gm_; }
  std::size_t steps() const { return g0_.m(); }

  Graph graph_at(std::size_t t) const {
    if (t > steps())
      throw parameter_error("graph_at: t=" + std::to_string(t) + " out of range [0," +
                            std::to_string(steps()) + "]");
    std::vector<Edge> edges;
    edges.reserve(steps());
    const auto& e0 = g0_.edge_list();
    const auto& em = gm_.edge_list();
    edges.insert(edges.end(), e0.begin(), e0.end() - static_cast<std::ptrdiff_t>(t));
    edges.insert(edges.end(), em.end() - static_cast<std::ptrdiff_t>(t), em.end());
    return Graph(g0_.n(), std::move(edges));
  }

 private:
  Graph g0_;
  Graph gm_;
};

inline bool check_independent(const Graph& g, const DynamicBitset& s) {
  for (const Edge& e : g.canonical_edges())
    if (s.test(e.u) && s.test(e.v)) return false;
  return true;
}

// Maximal independent set by random vertex order.
inline IndependentSet greedy_is(const Graph& g, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<VertexId> order(g.n());
  for (VertexId v = 0; v < g.n(); ++v) order[v] = v;
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);
  DynamicBitset chosen(g.n());
  std::uint32_t size = 0;
  for (VertexId v : order) {
    bool ok = true;
    for (VertexId w : g.neighbors(v)) {
      if (chosen.test(w)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      chosen.set(v);
      ++size;
    }
  }
  IndependentSet out;
  out.vertices = std::move(chosen);
  out.size = size;
  return out;
}

// Edge-list text format: header "n m", then m lines "i j". Round-trips the raw
// edge list exactly, including splice repetitions.
inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << g.n() << ' ' << g.m() << '\n';
  for (const Edge& e : g.edge_list()) out << e.u << ' ' << e.v << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  auto fail = [&](std::size_t line_no, const std::string& msg) {
    throw io_error(path + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto parse_two = [&](const std::string& line, std::size_t line_no, std::uint64_t& a,
                       std::uint64_t& b) {
    std::istringstream ss(line);
    long long x = -1, y = -1;
    if (!(ss >> x >> y)) fail(line_no, "expected two integers, got '" + line + "'");
    std::string rest;
    if (ss >> rest) fail(line_no, "trailing content '" + rest + "'");
    if (x < 0 || y < 0) fail(line_no, "negative value");
    a = static_cast<std::uint64_t>(x);
    b = static_cast<std::uint64_t>(y);
  };

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(1, "missing header");
  ++line_no;
  std::uint64_t n = 0, m = 0;
  parse_two(line, line_no, n, m);
  if (n > std::numeric_limits<VertexId>::max() - 1) fail(line_no, "n too large");

  std::vector<Edge> edges;
  edges.reserve(m);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && edges.size() == m) break;  // tolerate one trailing blank line
    std::uint64_t a = 0, b = 0;
    parse_two(line, line_no, a, b);
    if (edges.size() == m) fail(line_no, "more than m=" + std::to_string(m) + " edges");
    if (a >= n || b >= n) fail(line_no, "vertex out of range");
    if (a == b) fail(line_no, "self-loop");
    edges.push_back(Edge{static_cast<VertexId>(a), static_cast<VertexId>(b)});
  }
  if (edges.size() != m)
    fail(line_no + 1, "expected m=" + std::to_string(m) + " edges, found " +
                          std::to_string(edges.size()));
  return Graph(static_cast<VertexId>(n), std::move(edges));
}

}  // namespace qmis
