#include "vrjp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vrjp/environment.hpp"
#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

constexpr double kLogDrop = 60.0;  // e^{-60} ~ 1e-26 relative to the peak

double moment_rate(const Integrand& f) {
  if (std::holds_alternative<ExpMoment>(f)) {
    const auto& e = std::get<ExpMoment>(f);
    if (e.sigma != 1 && e.sigma != -1) throw PreconditionError("sigma must be +1 or -1");
    return e.sigma * e.m;
  }
  return 0.0;
}

// [a, b] outside of which log g is more than kLogDrop below its peak.
std::pair<double, double> window_for(const std::function<double(double)>& log_g, double peak) {
  const double top = log_g(peak);
  double a = peak - 1.0;
  while (top - log_g(a) < kLogDrop) a -= 1.0;
  double b = peak + 1.0;
  while (top - log_g(b) < kLogDrop) b += 1.0;
  return {a, b};
}

}  // namespace

double single_vertex_log_density(double h, double u) {
  return 0.5 * std::log(h / (2.0 * std::numbers::pi)) + h * (1.0 - std::cosh(u)) - 0.5 * u;
}

QuadratureResult quadrature_1v(double h, const Integrand& f) {
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("quadrature_1v needs h > 0");
  const double r = moment_rate(f);
  auto log_g = [h, r](double u) { return single_vertex_log_density(h, u) + r * u; };
  // stationary point of r u - u/2 - h cosh u
  const double peak = std::asinh((r - 0.5) / h);
  const auto [a, b] = window_for(log_g, peak);
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double u) { return std::exp(log_g(u)); }, a, b, 25, 1e-14, &err);
  return {value, err, a, b, (b - a) > 60.0};
}

std::vector<double> single_vertex_cdf(double h, const std::vector<double>& sorted_points) {
  if (!(h > 0.0)) throw PreconditionError("single_vertex_cdf needs h > 0");
  auto log_g = [h](double u) { return single_vertex_log_density(h, u); };
  auto g = [&](double u) { return std::exp(log_g(u)); };
  const auto [a, b] = window_for(log_g, std::asinh(-0.5 / h));
  std::vector<double> out(sorted_points.size());
  double acc = 0.0;
  double prev = a;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  using GL = boost::math::quadrature::gauss<double, 10>;
  for (std::size_t k = 0; k < sorted_points.size(); ++k) {
    const double x = std::clamp(sorted_points[k], a, b);
    if (x < prev) throw PreconditionError("single_vertex_cdf needs increasing points");
    if (x > prev) acc += (x - prev) < 0.02 ? GL::integrate(g, prev, x) : GK::integrate(g, prev, x, 15, 1e-13);
    prev = x;
    out[k] = std::min(acc, 1.0);
  }
  return out;
}

double quadrature_2v(const WiredGraph& g, const std::function<double(double, double)>& f) {
  if (g.size() != 2) throw PreconditionError("quadrature_2v needs a two-vertex graph");
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  // coarse scan for a window that carries all the mass
  Eigen::VectorXd u(2);
  double top = -std::numeric_limits<double>::infinity();
  for (double x = -30; x <= 30; x += 0.25) {
    for (double y = -30; y <= 30; y += 0.25) {
      u << x, y;
      top = std::max(top, log_density_u(g, u));
    }
  }
  double lo = 30, hi = -30;
  for (double x = -30; x <= 30; x += 0.25) {
    for (double y = -30; y <= 30; y += 0.25) {
      u << x, y;
      if (log_density_u(g, u) > top - kLogDrop) {
        lo = std::min({lo, x, y});
        hi = std::max({hi, x, y});
      }
    }
  }
  lo -= 0.5;
  hi += 0.5;
  auto inner = [&](double x) {
    return GK::integrate(
        [&](double y) {
          Eigen::VectorXd v(2);
          v << x, y;
          return std::exp(log_density_u(g, v)) * f(x, y);
        },
        lo, hi, 15, 1e-12);
  };
  return GK::integrate(inner, lo, hi, 15, 1e-11);
}

}  // namespace vrjp
