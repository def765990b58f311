#include "vrjp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

constexpr double kMaxShellRadius = 2e7;

// #{x in Z^d : ||x||_inf = r} = (2r+1)^d - (2r-1)^d for r >= 1.
double shell_size(int d, double r) {
  double s = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= d; ++k) {
    if (k % 2 == 1) s += 2.0 * binom * std::pow(2.0 * r, d - k);
    binom = binom * (d - k) / (k + 1);
  }
  return s;
}

struct Tail {
  long radius = 0;
  double value = 0.0;  // estimate of sum_{r > radius} w(r) |shell_r|
  double error = 0.0;
};

// Shells beyond R are replaced by the midpoint of the integral bracket
//   int_{R+1}^inf g <= sum_{r>R} g(r) <= int_R^inf g
// (g = w * shell size, decreasing there); R grows until half the bracket
// width is below tolerance * reference.
Tail radial_tail(const std::function<double(double)>& w, int d, long start, double tolerance, double reference) {
  auto g = [&](double x) { return w(x) * shell_size(d, x); };
  long r = std::max<long>(start, 1);
  for (;;) {
    const double x = static_cast<double>(r);
    const bool decreasing = g(x) >= g(x + 1.0) && g(x + 1.0) >= g(2.0 * x) && g(2.0 * x) >= g(4.0 * x);
    if (decreasing && g(x) <= 2.0 * tolerance * reference) {
      boost::math::quadrature::exp_sinh<double> tail;
      const double upper = tail.integrate([&](double t) { return g(x + t); }, 1e-12);
      boost::math::quadrature::tanh_sinh<double> unit;
      const double first = unit.integrate(g, x, x + 1.0, 1e-12);
      if (std::isfinite(upper)) return {r, upper - 0.5 * first, 0.5 * first};
    }
    if (r > kMaxShellRadius) throw PreconditionError("radial weight series does not converge (non-summable profile)");
    r = std::max(r + 1, static_cast<long>(r * 1.5));
  }
}

}  // namespace

int linf_distance(const Point& a, const Point& b) {
  int m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double AmbientWeight::operator()(const Point& delta) const {
  double w = 0.0;
  for (const auto& [offset, value] : short_range) {
    if (offset == delta) w += value;
  }
  if (radial) {
    int r = 0;
    for (int x : delta) r = std::max(r, std::abs(x));
    if (r > 0) w += radial(static_cast<double>(r));
  }
  return w;
}

double radial_tail_bound(const std::function<double(double)>& w, int dimension, double radius) {
  const double d = dimension;
  auto g = [&](double x) { return w(x) * 2.0 * d * std::pow(2.0 * x + 1.0, d - 1.0); };
  const double g0 = g(radius);
  if (!(g0 >= g(radius + 1.0) && g(radius + 1.0) >= g(2.0 * radius) && g(2.0 * radius) >= g(4.0 * radius)))
    return std::numeric_limits<double>::infinity();
  boost::math::quadrature::exp_sinh<double> integrator;
  const double value = integrator.integrate([&](double t) { return g(radius + t); }, 1e-12);
  if (!std::isfinite(value)) return std::numeric_limits<double>::infinity();
  return value;
}

double AmbientWeight::row_sum(double tolerance) const {
  double total = 0.0;
  for (const auto& sr : short_range) total += sr.second;
  if (!radial) return total;
  // establish a reference scale from the first shell, then truncate
  const double first = radial(1.0) * shell_size(dimension, 1.0);
  const auto tail = radial_tail(radial, dimension, 8, tolerance, first);
  double partial = tail.value;
  for (long r = tail.radius; r >= 1; --r) partial += radial(static_cast<double>(r)) * shell_size(dimension, static_cast<double>(r));
  return total + partial;
}

std::vector<Point> box_points(int dimension, int side, int offset) {
  if (dimension < 1 || side < 1) throw PreconditionError("box needs dimension >= 1 and side >= 1");
  std::size_t count = 1;
  for (int k = 0; k < dimension; ++k) count *= static_cast<std::size_t>(side);
  std::vector<Point> pts;
  pts.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    Point p(static_cast<std::size_t>(dimension));
    std::size_t rest = idx;
    for (int k = 0; k < dimension; ++k) {
      p[static_cast<std::size_t>(k)] = offset + static_cast<int>(rest % static_cast<std::size_t>(side));
      rest /= static_cast<std::size_t>(side);
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

WiredGraph build_wired_graph(std::span<const Point> inner, const AmbientWeight& ambient, double tolerance) {
  const std::size_t n = inner.size();
  if (n == 0) throw PreconditionError("empty inner vertex set");
  std::map<Point, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    if (inner[i].size() != static_cast<std::size_t>(ambient.dimension))
      throw PreconditionError("point dimension does not match ambient weight");
    if (!index.emplace(inner[i], i).second) throw PreconditionError("duplicate inner point");
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Point delta(inner[i].size());
      for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = inner[j][k] - inner[i][k];
      const double w = ambient(delta);
      if (w > 0.0) edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), w});
    }
  }

  std::vector<double> h(n, 0.0);
  // finite-range part: neighbors that fall outside the inner set
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [offset, value] : ambient.short_range) {
      Point q = inner[i];
      for (std::size_t k = 0; k < q.size(); ++k) q[k] += offset[k];
      if (!index.contains(q)) h[i] += value;
    }
  }

  double achieved = 0.0;
  if (ambient.radial) {
    const int d = ambient.dimension;
    // exact part: shells up to the farthest inner point
    std::vector<int> reach(n, 0);
    std::vector<double> finite_part(n, 0.0);
    int reach_max = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> inside;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const int r = linf_distance(inner[i], inner[j]);
        if (static_cast<std::size_t>(r) >= inside.size()) inside.resize(static_cast<std::size_t>(r) + 1, 0);
        ++inside[static_cast<std::size_t>(r)];
      }
      reach[i] = std::max<int>(1, static_cast<int>(inside.size()) - 1);
      reach_max = std::max(reach_max, reach[i]);
      double s = 0.0;
      for (int r = reach[i]; r >= 1; --r) {
        const double in = static_cast<std::size_t>(r) < inside.size() ? inside[static_cast<std::size_t>(r)] : 0.0;
        s += ambient.radial(r) * (shell_size(d, r) - in);
      }
      finite_part[i] = s;
    }
    const double smallest = *std::min_element(finite_part.begin(), finite_part.end());
    if (!(smallest > 0.0)) throw PreconditionError("radial weight vanishes on the complement");
    const auto tail = radial_tail(ambient.radial, d, reach_max + 1, tolerance, smallest);
    const long radius = tail.radius;
    // suffix sums over full shells (reach_i, radius], accumulated from the far end
    std::vector<double> suffix(static_cast<std::size_t>(radius) + 2, 0.0);
    suffix[static_cast<std::size_t>(radius) + 1] = tail.value;
    for (long r = radius; r >= 1; --r)
      suffix[static_cast<std::size_t>(r)] =
          suffix[static_cast<std::size_t>(r) + 1] + ambient.radial(static_cast<double>(r)) * shell_size(d, static_cast<double>(r));
    for (std::size_t i = 0; i < n; ++i) {
      const double radial_part = finite_part[i] + suffix[static_cast<std::size_t>(reach[i]) + 1];
      h[i] += radial_part;
      achieved = std::max(achieved, tail.error / radial_part);
    }
  }
  for (double v : h) {
    if (!std::isfinite(v)) throw PreconditionError("pinning sum is not finite");
  }
  return WiredGraph(n, std::move(edges), std::move(h), achieved);
}

}  // namespace vrjp
