#pragma once

// Wired finite boxes cut out of Z^d with translation-invariant ambient weights.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "vrjp/graph.hpp"

namespace vrjp {

using Point = std::vector<int>;

/// Translation-invariant weights on Z^d: an explicit finite-range part plus an
/// optional radial part w(||delta||_inf). Both parts add up.
struct AmbientWeight {
  int dimension = 1;
  std::vector<std::pair<Point, double>> short_range;  // must be symmetric in delta
  std::function<double(double)> radial;                // monotone decreasing on [1, inf)

  double operator()(const Point& delta) const;

  /// sum_{delta != 0} W(delta) with the radial part truncated at `tolerance`
  /// relative accuracy. Throws PreconditionError when the tail bound does not
  /// become small (non-summable profile).
  double row_sum(double tolerance) const;
};

/// Points of {offset, ..., offset+side-1}^d, linear index sum_l x_l side^l.
std::vector<Point> box_points(int dimension, int side, int offset = 0);

/// Wired graph on the given inner points: inner edges carry W(p_i - p_j) when
/// positive, pinning h_i = sum over the complement of W(p_i - q). The radial
/// part of the complement sum is evaluated shell by shell in ||.||_inf; the
/// remaining shells are replaced by the midpoint of their integral bracket
/// once half its width is below tolerance * partial sum. The worst achieved
/// ratio is stored as the graph's pinning tolerance.
WiredGraph build_wired_graph(std::span<const Point> inner, const AmbientWeight& ambient,
                             double tolerance = 1e-10);

/// Upper bound for sum_{r > radius} w(r) * #{x in Z^d : ||x||_inf = r}, using
/// the integral of w(x) 2d (2x+1)^{d-1} over [radius, inf). Returns +inf when
/// the integrand is not decreasing at `radius` (bound not yet valid).
double radial_tail_bound(const std::function<double(double)>& w, int dimension, double radius);

int linf_distance(const Point& a, const Point& b);

}  // namespace vrjp
