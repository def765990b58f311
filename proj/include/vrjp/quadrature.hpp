#pragma once

// Deterministic quadrature oracles for the environment law on one- and
// two-vertex graphs.

#include <functional>
#include <variant>
#include <vector>

#include "vrjp/graph.hpp"

namespace vrjp {

struct Normalization {};

/// f(u) = e^{sigma m u}.
struct ExpMoment {
  int sigma = 1;
  double m = 1.0;
};

using Integrand = std::variant<Normalization, ExpMoment>;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double lower = 0.0;  // integration window
  double upper = 0.0;
  bool wide_window = false;  // window wider than 60: slow tail decay
};

/// Log of the single-vertex environment density
/// sqrt(h/2pi) e^{h} e^{-h cosh u} e^{-u/2}.
double single_vertex_log_density(double h, double u);

/// Integral of f(u) times the single-vertex density (pinning h > 0) to
/// absolute accuracy about 1e-10 on an adaptively chosen finite window.
/// Also computes E[e^{sigma m (u_i - u_j)}] across an isolated edge of weight h.
QuadratureResult quadrature_1v(double h, const Integrand& f);

/// Single-vertex CDF evaluated at increasing points.
std::vector<double> single_vertex_cdf(double h, const std::vector<double>& sorted_points);

/// Nested adaptive quadrature of f(u_0, u_1) nu(du) on a two-vertex graph.
double quadrature_2v(const WiredGraph& g, const std::function<double(double, double)>& f);

}  // namespace vrjp
