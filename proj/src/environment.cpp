#include "vrjp/environment.hpp"

#include <cmath>
#include <numbers>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

double field_at(const Eigen::VectorXd& v, const WiredGraph& g, VertexId i) {
  return i == g.rho() ? 0.0 : v[i];
}

void check_field(const WiredGraph& g, const FieldConfig& field) {
  if (static_cast<std::size_t>(field.u.size()) != g.size()) throw PreconditionError("u dimension mismatch");
  if (field.s && static_cast<std::size_t>(field.s->size()) != g.size())
    throw PreconditionError("s dimension mismatch");
}

std::vector<double> b_factors(const WiredGraph& g, const FieldConfig& field) {
  std::vector<double> b;
  b.reserve(g.edges_plus().size());
  for (const auto& e : g.edges_plus()) b.push_back(B_edge(g, field, e));
  return b;
}

}  // namespace

double B_edge(const WiredGraph& g, const FieldConfig& field, const Edge& e) {
  const double ua = field_at(field.u, g, e.a);
  const double ub = field_at(field.u, g, e.b);
  double b = std::cosh(ua - ub);
  if (field.s) {
    const double ds = field_at(*field.s, g, e.a) - field_at(*field.s, g, e.b);
    b += 0.5 * ds * ds * std::exp(ua + ub);
  }
  return b;
}

double B_pin(const FieldConfig& field, VertexId i) {
  const double ui = field.u[i];
  double b = std::cosh(ui);
  if (field.s) {
    const double si = (*field.s)[i];
    b += 0.5 * si * si * std::exp(ui);
  }
  return b;
}

double log_density_u(const WiredGraph& g, const Eigen::VectorXd& u, std::optional<VertexId> tilt) {
  if (static_cast<std::size_t>(u.size()) != g.size()) throw PreconditionError("u dimension mismatch");
  double s = 0.0;
  for (const auto& e : g.inner_edges()) s -= e.weight * (std::cosh(u[e.a] - u[e.b]) - 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double h = g.pinnings()[i];
    const auto ii = static_cast<Eigen::Index>(i);
    if (h > 0.0) s -= h * (std::cosh(u[ii]) - 1.0);
    s -= u[ii];
  }
  s += 0.5 * log_det(laplacian(g, u));
  s -= 0.5 * static_cast<double>(g.size()) * std::log(2.0 * std::numbers::pi);
  if (tilt) {
    if (*tilt < 0 || static_cast<std::size_t>(*tilt) >= g.size()) throw PreconditionError("tilt vertex out of range");
    s += u[*tilt];
  }
  return s;
}

WardMatrices ward_matrices(const WiredGraph& g, const FieldConfig& field) {
  check_field(g, field);
  const auto& edges = g.edges_plus();
  const auto b = b_factors(g, field);
  Eigen::VectorXd q(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double ua = field_at(field.u, g, edges[k].a);
    const double ub = field_at(field.u, g, edges[k].b);
    q[static_cast<Eigen::Index>(k)] = std::exp(ua + ub) / b[k];
  }
  const Eigen::MatrixXd f = incidence_matrix(g);
  Eigen::LLT<Eigen::MatrixXd> llt(laplacian(g, field.u));
  if (llt.info() != Eigen::Success) throw FactorizationError("D(u) is not positive definite");
  const Eigen::MatrixXd dinv_f = llt.solve(f);
  const Eigen::VectorXd root_q = q.array().sqrt();
  Eigen::MatrixXd gm = root_q.asDiagonal() * (f.transpose() * dinv_f) * root_q.asDiagonal();
  gm = 0.5 * (gm + gm.transpose());
  return {std::move(q), std::move(gm)};
}

WardValue ward_statistic(const WiredGraph& g, const FieldConfig& field, std::span<const double> m) {
  const auto& edges = g.edges_plus();
  if (m.size() != edges.size()) throw PreconditionError("m must be indexed by E_+");
  WardValue out;
  out.det_lower_bound = 1.0;
  bool all_zero = true;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!(m[k] >= 0.0)) throw PreconditionError("m_e must be nonnegative");
    if (m[k] != 0.0) all_zero = false;
    out.det_lower_bound *= 1.0 - m[k] / edges[k].weight;
  }
  if (all_zero) {
    out.statistic = out.det_factor = 1.0;
    return out;
  }
  const auto wm = ward_matrices(g, field);
  const auto b = b_factors(g, field);
  const auto ne = static_cast<Eigen::Index>(edges.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(ne, ne);
  double log_b = 0.0;
  for (Eigen::Index k = 0; k < ne; ++k) {
    const double mk = m[static_cast<std::size_t>(k)];
    a.row(k) -= mk * wm.g.row(k);
    log_b += mk * std::log(b[static_cast<std::size_t>(k)]);
  }
  out.det_factor = a.partialPivLu().determinant();
  out.statistic = std::exp(log_b) * out.det_factor;
  return out;
}

double ward_determinant_vertex_route(const WiredGraph& g, const FieldConfig& field, std::span<const double> m) {
  check_field(g, field);
  const auto& edges = g.edges_plus();
  if (m.size() != edges.size()) throw PreconditionError("m must be indexed by E_+");
  const auto cond = edge_conductances(g, field.u);
  const auto b = b_factors(g, field);
  std::vector<double> reduced(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double ua = field_at(field.u, g, edges[k].a);
    const double ub = field_at(field.u, g, edges[k].b);
    reduced[k] = cond[k] - m[k] * std::exp(ua + ub) / b[k];
  }
  const Eigen::MatrixXd d = laplacian_from_conductances(g, cond);
  const Eigen::MatrixXd dm = laplacian_from_conductances(g, reduced);
  const auto lu = dm.partialPivLu();
  const Eigen::MatrixXd lu_m = lu.matrixLU();
  double log_abs = 0.0;
  double sign = static_cast<double>(lu.permutationP().determinant());
  for (Eigen::Index i = 0; i < lu_m.rows(); ++i) {
    const double v = lu_m(i, i);
    if (v == 0.0) return 0.0;
    if (v < 0.0) sign = -sign;
    log_abs += std::log(std::abs(v));
  }
  return sign * std::exp(log_abs - log_det(d));
}

double cosh_moment_bound(const WiredGraph& g, std::span<const double> m) {
  const auto& edges = g.edges_plus();
  if (m.size() != edges.size()) throw PreconditionError("m must be indexed by E_+");
  double bound = 1.0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!(m[k] >= 0.0) || !(m[k] < edges[k].weight))
      throw PreconditionError("cosh moment bound requires 0 <= m_e < W_e on every edge");
    bound /= 1.0 - m[k] / edges[k].weight;
  }
  return bound;
}

double path_moment_bound(std::span<const double> path_weights, double m) {
  if (!(m >= 1.0)) throw PreconditionError("path moment bound requires m >= 1");
  double s = 0.0;
  for (double w : path_weights) {
    if (!(w > 0.0)) throw PreconditionError("path weights must be positive");
    s += 1.0 / w;
  }
  return std::exp((2.0 * m + 1.0) * (2.0 * m + 1.0) / 8.0 * s);
}

double single_edge_gaussian_bound(double w, int sigma, double m) {
  if (!(w > 0.0)) throw PreconditionError("edge weight must be positive");
  if (sigma != 1 && sigma != -1) throw PreconditionError("sigma must be +1 or -1");
  const double a = 2.0 * sigma * m - 1.0;
  return std::exp(a * a / (8.0 * w));
}

}  // namespace vrjp
