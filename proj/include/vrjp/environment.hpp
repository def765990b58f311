#pragma once

// The environment law nu on wired graphs and the bosonic (u, s) sector of the
// H^{2|2} measure: B-factors, log densities, Ward matrices and moment bounds.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vrjp/graph.hpp"

namespace vrjp {

/// Field over the inner vertices; u_rho = s_rho = 0 implicitly.
struct FieldConfig {
  Eigen::VectorXd u;
  std::optional<Eigen::VectorXd> s;
};

/// B_e = cosh(u_a - u_b) + (s_a - s_b)^2 e^{u_a + u_b} / 2 for e = {a, b} in
/// extended indexing (b == rho allowed). With s absent, s = 0.
double B_edge(const WiredGraph& g, const FieldConfig& field, const Edge& e);

/// B_i = B_{i rho} = cosh u_i + s_i^2 e^{u_i} / 2.
double B_pin(const FieldConfig& field, VertexId i);

/// Log density of the (normalised) environment law nu at u:
///   -sum_E W_e (cosh(u_i-u_j) - 1) - sum_i h_i (cosh u_i - 1)
///   + log det D(u) / 2 - sum_i u_i - |Lambda| log(2 pi) / 2
/// plus u_tilt when a tilt vertex is given (density of e^{u_tilt} d nu).
double log_density_u(const WiredGraph& g, const Eigen::VectorXd& u,
                     std::optional<VertexId> tilt = std::nullopt);

/// Q_e = e^{u_{e+}+u_{e-}} / B_e and G = sqrt(Q) F^t D^{-1} F sqrt(Q) over E_+.
struct WardMatrices {
  Eigen::VectorXd q;
  Eigen::MatrixXd g;
};
WardMatrices ward_matrices(const WiredGraph& g, const FieldConfig& field);

struct WardValue {
  double statistic = 0.0;       // prod_e B_e^{m_e} * det(Id - M G)
  double det_factor = 0.0;      // det(Id - M G)
  double det_lower_bound = 0.0; // prod_{E_+} (1 - m_e / W_e)
};

/// m is indexed like g.edges_plus(). Edges outside E_+ carry m_e = 0 and
/// contribute B^0 = 1, so they are not represented.
WardValue ward_statistic(const WiredGraph& g, const FieldConfig& field, std::span<const double> m);

/// det(D - F M Q F^t) / det D computed from the two vertex-indexed matrices;
/// equals det(Id - M G).
double ward_determinant_vertex_route(const WiredGraph& g, const FieldConfig& field, std::span<const double> m);

/// prod_e (1 - m_e / W_e)^{-1}; requires 0 <= m_e < W_e on E_+.
double cosh_moment_bound(const WiredGraph& g, std::span<const double> m);

/// exp((2m+1)^2 / 8 * sum_k 1/W_k); 1 for an empty path.
double path_moment_bound(std::span<const double> path_weights, double m);

/// exp((2 sigma m - 1)^2 / (8 w)): Gaussian bound on E[e^{sigma m (u_i - u_j)}]
/// across a single isolated edge of weight w.
double single_edge_gaussian_bound(double w, int sigma, double m);

}  // namespace vrjp
