#pragma once

// Finite weighted graphs with a wiring (pinning) vertex rho, plus the dense
// Laplacian / incidence linear algebra built on top of them.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vrjp {

/// Vertex index. Inner vertices are 0..n-1; in "extended" indexing the
/// wiring vertex rho is n.
using VertexId = int;

/// Undirected edge {a, b} with a < b. Pinning edges use b == rho.
struct Edge {
  VertexId a = 0;
  VertexId b = 0;
  double weight = 0.0;
};

struct Neighbor {
  VertexId vertex = 0;
  double weight = 0.0;
  std::size_t edge = 0;  // index into WiredGraph::edges_plus()
};

/// G_+ = (Lambda + {rho}, E_+): inner vertices, positive inner edges and the
/// pinning edges {i, rho} with h_i > 0. Immutable after construction.
class WiredGraph {
 public:
  WiredGraph() = default;

  /// Throws PreconditionError on non-positive inner weights, negative
  /// pinnings, self-loops, duplicate pairs, or a disconnected G_+.
  WiredGraph(std::size_t n, std::vector<Edge> inner_edges, std::vector<double> pinnings,
             double pinning_tolerance = 0.0);

  std::size_t size() const { return n_; }
  VertexId rho() const { return static_cast<VertexId>(n_); }

  const std::vector<Edge>& inner_edges() const { return inner_; }
  const std::vector<double>& pinnings() const { return pinnings_; }
  double pinning(VertexId i) const { return pinnings_.at(static_cast<std::size_t>(i)); }

  /// All positive-weight edges: inner edges in lexicographic order followed by
  /// pinning edges (i, rho) with h_i > 0 in increasing i. This order indexes
  /// conductance vectors, incidence columns and Ward matrices.
  const std::vector<Edge>& edges_plus() const { return plus_; }

  /// Neighbors of v in G_+ (v may be rho).
  const std::vector<Neighbor>& neighbors(VertexId v) const {
    return adjacency_.at(static_cast<std::size_t>(v));
  }

  /// W_ij in extended indexing (0 when {i,j} is not in E_+).
  double weight(VertexId i, VertexId j) const;

  /// Sum of all weights at v, pinning included.
  double total_weight(VertexId v) const;

  /// Relative tolerance achieved when the pinnings were obtained by truncating
  /// an infinite series; 0 for exactly specified pinnings.
  double pinning_tolerance() const { return pinning_tolerance_; }

  /// Short stable text digest of the weights, used to tag results.
  std::string fingerprint() const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> inner_;
  std::vector<double> pinnings_;
  std::vector<Edge> plus_;
  std::vector<std::vector<Neighbor>> adjacency_;
  double pinning_tolerance_ = 0.0;
};

/// True when every vertex of the extended graph is reachable from rho using
/// only edges whose entry in `conductances` is positive.
bool connected_with(const WiredGraph& g, std::span<const double> conductances);

/// Signed incidence matrix F (rows: inner vertices, columns: E_+), with the
/// orientation e_+ = smaller id. The rho row is dropped.
Eigen::MatrixXd incidence_matrix(const WiredGraph& g);

/// Conductances W_e e^{u_{e+} + u_{e-}} over E_+ (u_rho = 0), evaluated as
/// exp(log W_e + u_{e+} + u_{e-}).
std::vector<double> edge_conductances(const WiredGraph& g, const Eigen::VectorXd& u);

/// Grounded weighted Laplacian for arbitrary nonnegative conductances on E_+.
Eigen::MatrixXd laplacian_from_conductances(const WiredGraph& g, std::span<const double> c);

/// D(u): D_ij = -W_ij e^{u_i+u_j}, D_ii = sum_k W_ik e^{u_i+u_k} + h_i e^{u_i}.
Eigen::MatrixXd laplacian(const WiredGraph& g, const Eigen::VectorXd& u);

/// ln det of a symmetric positive definite matrix via Cholesky.
/// Throws FactorizationError when the matrix is not positive definite.
double log_det(const Eigen::MatrixXd& d);

/// Largest |Lambda + {rho}| accepted by spanning_tree_sum.
inline constexpr std::size_t kSpanningTreeOracleLimit = 8;

/// Sum over spanning trees T of G_+ of prod_{e in T} W_e e^{u_{e+}+u_{e-}},
/// by explicit enumeration. Refuses graphs above kSpanningTreeOracleLimit.
double spanning_tree_sum(const WiredGraph& g, const Eigen::VectorXd& u);

/// Number of spanning trees visited by the enumeration (unit weights).
std::size_t spanning_tree_count(const WiredGraph& g);

// Text format:
//   vertices n
//   edge i j w
//   pin i h
// Lines starting with '#' are comments. Doubles use shortest round-trip form.
void write_graph(std::ostream& out, const WiredGraph& g);
WiredGraph read_graph(std::istream& in);

/// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

}  // namespace vrjp
