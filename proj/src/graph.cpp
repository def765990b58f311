#include "vrjp/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <numeric>
#include <tuple>
#include <ostream>
#include <sstream>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

WiredGraph::WiredGraph(std::size_t n, std::vector<Edge> inner_edges, std::vector<double> pinnings,
                       double pinning_tolerance)
    : n_(n), inner_(std::move(inner_edges)), pinnings_(std::move(pinnings)),
      pinning_tolerance_(pinning_tolerance) {
  if (n_ == 0) throw PreconditionError("graph needs at least one inner vertex");
  if (pinnings_.size() != n_) throw PreconditionError("pinning vector size does not match vertex count");
  const auto vn = static_cast<VertexId>(n_);
  for (auto& e : inner_) {
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.a < 0 || e.b >= vn) throw PreconditionError("edge endpoint out of range");
    if (e.a == e.b) throw PreconditionError("self-loop");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw PreconditionError("edge weight must be positive and finite");
  }
  std::sort(inner_.begin(), inner_.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  for (std::size_t k = 1; k < inner_.size(); ++k) {
    if (inner_[k].a == inner_[k - 1].a && inner_[k].b == inner_[k - 1].b)
      throw PreconditionError("duplicate edge");
  }
  for (double h : pinnings_) {
    if (!(h >= 0.0) || !std::isfinite(h)) throw PreconditionError("pinning must be nonnegative and finite");
  }

  plus_ = inner_;
  for (std::size_t i = 0; i < n_; ++i) {
    if (pinnings_[i] > 0.0) plus_.push_back({static_cast<VertexId>(i), vn, pinnings_[i]});
  }
  adjacency_.assign(n_ + 1, {});
  for (std::size_t k = 0; k < plus_.size(); ++k) {
    const auto& e = plus_[k];
    adjacency_[static_cast<std::size_t>(e.a)].push_back({e.b, e.weight, k});
    adjacency_[static_cast<std::size_t>(e.b)].push_back({e.a, e.weight, k});
  }

  std::vector<double> w(plus_.size());
  std::transform(plus_.begin(), plus_.end(), w.begin(), [](const Edge& e) { return e.weight; });
  if (!connected_with(*this, w)) throw PreconditionError("G_+ is not connected");
}

double WiredGraph::weight(VertexId i, VertexId j) const {
  for (const auto& nb : neighbors(i)) {
    if (nb.vertex == j) return nb.weight;
  }
  return 0.0;
}

double WiredGraph::total_weight(VertexId v) const {
  double s = 0.0;
  for (const auto& nb : neighbors(v)) s += nb.weight;
  return s;
}

std::string WiredGraph::fingerprint() const {
  // FNV-1a over the exact bit patterns.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int k = 0; k < 8; ++k) {
      h ^= (x >> (8 * k)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(n_);
  for (const auto& e : plus_) {
    mix(static_cast<std::uint64_t>(e.a));
    mix(static_cast<std::uint64_t>(e.b));
    std::uint64_t bits;
    std::memcpy(&bits, &e.weight, sizeof bits);
    mix(bits);
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

bool connected_with(const WiredGraph& g, std::span<const double> conductances) {
  const auto& edges = g.edges_plus();
  if (conductances.size() != edges.size()) throw PreconditionError("conductance vector size mismatch");
  DisjointSets sets(g.size() + 1);
  std::size_t components = g.size() + 1;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (conductances[k] > 0.0 &&
        sets.unite(static_cast<std::size_t>(edges[k].a), static_cast<std::size_t>(edges[k].b)))
      --components;
  }
  return components == 1;
}

Eigen::MatrixXd incidence_matrix(const WiredGraph& g) {
  const auto& edges = g.edges_plus();
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    f(edges[k].a, col) = 1.0;
    if (edges[k].b != g.rho()) f(edges[k].b, col) = -1.0;
  }
  return f;
}

std::vector<double> edge_conductances(const WiredGraph& g, const Eigen::VectorXd& u) {
  if (static_cast<std::size_t>(u.size()) != g.size()) throw PreconditionError("field dimension mismatch");
  const auto& edges = g.edges_plus();
  std::vector<double> c(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double ub = edges[k].b == g.rho() ? 0.0 : u[edges[k].b];
    c[k] = std::exp(std::log(edges[k].weight) + u[edges[k].a] + ub);
  }
  return c;
}

Eigen::MatrixXd laplacian_from_conductances(const WiredGraph& g, std::span<const double> c) {
  const auto& edges = g.edges_plus();
  if (c.size() != edges.size()) throw PreconditionError("conductance vector size mismatch");
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto a = edges[k].a;
    const auto b = edges[k].b;
    d(a, a) += c[k];
    if (b != g.rho()) {
      d(b, b) += c[k];
      d(a, b) -= c[k];
      d(b, a) -= c[k];
    }
  }
  return d;
}

Eigen::MatrixXd laplacian(const WiredGraph& g, const Eigen::VectorXd& u) {
  return laplacian_from_conductances(g, edge_conductances(g, u));
}

double log_det(const Eigen::MatrixXd& d) {
  Eigen::LLT<Eigen::MatrixXd> llt(d);
  if (llt.info() != Eigen::Success) throw FactorizationError("matrix is not positive definite");
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

namespace {

struct TreeEnumerator {
  const std::vector<Edge>& edges;
  const std::vector<double>& weight;
  std::size_t vertices;
  double sum = 0.0;
  std::size_t count = 0;

  // parent-array union-find without path compression so that it can be undone
  std::vector<std::size_t> parent;

  std::size_t root(std::size_t x) const {
    while (parent[x] != x) x = parent[x];
    return x;
  }

  void run(std::size_t next, std::size_t chosen, double product) {
    if (chosen + 1 == vertices) {
      sum += product;
      ++count;
      return;
    }
    if (edges.size() - next < vertices - 1 - chosen) return;
    const auto ra = root(static_cast<std::size_t>(edges[next].a));
    const auto rb = root(static_cast<std::size_t>(edges[next].b));
    if (ra != rb) {
      parent[ra] = rb;
      run(next + 1, chosen + 1, product * weight[next]);
      parent[ra] = ra;
    }
    run(next + 1, chosen, product);
  }
};

}  // namespace

double spanning_tree_sum(const WiredGraph& g, const Eigen::VectorXd& u) {
  if (g.size() + 1 > kSpanningTreeOracleLimit)
    throw ResourceGuardError("spanning tree enumeration refused above 8 vertices");
  const auto c = edge_conductances(g, u);
  TreeEnumerator t{g.edges_plus(), c, g.size() + 1, 0.0, 0, {}};
  t.parent.resize(g.size() + 1);
  std::iota(t.parent.begin(), t.parent.end(), 0);
  t.run(0, 0, 1.0);
  return t.sum;
}

std::size_t spanning_tree_count(const WiredGraph& g) {
  if (g.size() + 1 > kSpanningTreeOracleLimit)
    throw ResourceGuardError("spanning tree enumeration refused above 8 vertices");
  const std::vector<double> ones(g.edges_plus().size(), 1.0);
  TreeEnumerator t{g.edges_plus(), ones, g.size() + 1, 0.0, 0, {}};
  t.parent.resize(g.size() + 1);
  std::iota(t.parent.begin(), t.parent.end(), 0);
  t.run(0, 0, 1.0);
  return t.count;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_graph(std::ostream& out, const WiredGraph& g) {
  out << "vertices " << g.size() << '\n';
  for (const auto& e : g.inner_edges())
    out << "edge " << e.a << ' ' << e.b << ' ' << format_double(e.weight) << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.pinnings()[i] > 0.0) out << "pin " << i << ' ' << format_double(g.pinnings()[i]) << '\n';
  }
}

namespace {

double parse_double(const std::string& token, std::size_t line) {
  double x = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), x);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw PreconditionError("graph file line " + std::to_string(line) + ": bad number '" + token + "'");
  return x;
}

}  // namespace

WiredGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  long n = -1;
  std::vector<Edge> edges;
  std::vector<std::pair<long, double>> pins;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw PreconditionError("graph file line " + std::to_string(lineno) + ": " + why);
    };
    std::string rest;
    if (key == "vertices") {
      if (n >= 0) fail("duplicate vertices header");
      if (!(ls >> n) || n <= 0) fail("bad vertex count");
    } else if (key == "edge") {
      long i = 0, j = 0;
      std::string w;
      if (n < 0) fail("edge before vertices header");
      if (!(ls >> i >> j >> w)) fail("expected 'edge i j w'");
      edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), parse_double(w, lineno)});
    } else if (key == "pin") {
      long i = 0;
      std::string h;
      if (n < 0) fail("pin before vertices header");
      if (!(ls >> i >> h)) fail("expected 'pin i h'");
      if (i < 0 || i >= n) fail("pin vertex out of range");
      pins.emplace_back(i, parse_double(h, lineno));
    } else {
      fail("unknown record '" + key + "'");
    }
    if (ls >> rest) fail("trailing tokens");
  }
  if (n < 0) throw PreconditionError("graph file has no vertices header");
  std::vector<double> h(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& [i, v] : pins) {
    const auto k = static_cast<std::size_t>(i);
    if (seen[k]) throw PreconditionError("duplicate pin for vertex " + std::to_string(i));
    seen[k] = true;
    h[k] = v;
  }
  return WiredGraph(static_cast<std::size_t>(n), std::move(edges), std::move(h));
}

}  // namespace vrjp
