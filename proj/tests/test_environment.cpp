#include <doctest.h>

#include <cmath>
#include <random>

#include "vrjp/environment.hpp"
#include "vrjp/errors.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/quadrature.hpp"

using namespace vrjp;

namespace {

WiredGraph two_vertex() { return WiredGraph(2, {{0, 1, 1.0}}, {2.0, 3.0}); }

// E[e^{a u}] for the single-vertex law with pinning h:
// sqrt(h/2pi) e^h * 2 K_{a - 1/2}(h).
double bessel_moment(double h, double a) {
  return std::sqrt(h / (2.0 * M_PI)) * std::exp(h) * 2.0 * std::cyl_bessel_k(std::abs(a - 0.5), h);
}

}  // namespace

TEST_SUITE("h22_environment") {
  TEST_CASE("B factors") {
    const auto g = two_vertex();
    FieldConfig f{Eigen::Vector2d::Zero(), Eigen::VectorXd(Eigen::Vector2d::Zero())};
    for (const auto& e : g.edges_plus()) CHECK(B_edge(g, f, e) == 1.0);
    f.u = Eigen::Vector2d(1.0, 0.0);
    CHECK(B_edge(g, f, g.edges_plus()[0]) == doctest::Approx(std::cosh(1.0)));
    CHECK(B_pin(f, 0) == doctest::Approx(1.5430806348));
    f.u = Eigen::Vector2d::Zero();
    f.s = Eigen::Vector2d(2.0, 0.0);
    CHECK(B_edge(g, f, g.edges_plus()[0]) == doctest::Approx(3.0));
    CHECK(B_pin(f, 0) == doctest::Approx(3.0));
  }

  TEST_CASE("log density values") {
    const WiredGraph single(1, {}, {1.0});
    CHECK(log_density_u(single, Eigen::VectorXd::Zero(1)) == doctest::Approx(-0.5 * std::log(2 * M_PI)));
    const auto g = two_vertex();
    CHECK(log_density_u(g, Eigen::Vector2d::Zero()) ==
          doctest::Approx(-std::log(2 * M_PI) + 0.5 * std::log(11.0)).epsilon(1e-14));
    const Eigen::Vector2d u(0.3, -1.1);
    CHECK(log_density_u(g, u, 0) - log_density_u(g, u) == doctest::Approx(0.3));
    CHECK(log_density_u(g, u, 1) - log_density_u(g, u) == doctest::Approx(-1.1));
    // matches the closed single-vertex form
    for (double x : {-2.0, 0.0, 0.7})
      CHECK(log_density_u(WiredGraph(1, {}, {2.5}), Eigen::VectorXd::Constant(1, x)) ==
            doctest::Approx(single_vertex_log_density(2.5, x)).epsilon(1e-13));
  }

  TEST_CASE("single-vertex quadrature against Bessel forms") {
    for (double h : {0.5, 1.0, 2.0, 5.0}) {
      CHECK(std::abs(quadrature_1v(h, Normalization{}).value - 1.0) < 1e-8);
      CHECK(std::abs(quadrature_1v(h, ExpMoment{1, 1.0}).value - 1.0) < 1e-8);
      CHECK(std::abs(quadrature_1v(h, ExpMoment{-1, 1.0}).value - (1.0 + 1.0 / h)) < 1e-6);
      CHECK(std::abs(bessel_moment(h, -1.0) - (1.0 + 1.0 / h)) < 1e-12);
      for (double m : {1.5, 2.0}) {
        for (int s : {1, -1}) {
          const double ref = bessel_moment(h, s * m);
          CHECK(quadrature_1v(h, ExpMoment{s, m}).value == doctest::Approx(ref).epsilon(1e-8));
        }
      }
    }
    CHECK_THROWS_AS(quadrature_1v(0.0, Normalization{}), PreconditionError);
  }

  TEST_CASE("single-vertex cdf") {
    const auto f = single_vertex_cdf(1.0, {-30.0, -1.0, 0.0, 1.0, 30.0});
    CHECK(f[0] == doctest::Approx(0.0));
    CHECK(f[4] == doctest::Approx(1.0));
    CHECK(f[1] < f[2]);
    CHECK(f[2] < f[3]);
    // P(u <= 0) = P(e^u <= 1); the density has an e^{-u/2} tilt so mass leans left
    CHECK(f[2] > 0.5);
  }

  TEST_CASE("two-vertex quadrature") {
    const auto g = two_vertex();
    CHECK(quadrature_2v(g, [](double, double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(quadrature_2v(g, [](double a, double) { return std::exp(a); }) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(quadrature_2v(g, [](double, double b) { return std::exp(b); }) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK_THROWS_AS(quadrature_2v(WiredGraph(1, {}, {1.0}), [](double, double) { return 1.0; }), PreconditionError);
  }

  TEST_CASE("single-edge Gaussian bound dominates quadrature") {
    for (double w : {1.0, 4.0, 16.0})
      for (double m : {1.0, 2.0})
        for (int s : {1, -1})
          CHECK(quadrature_1v(w, ExpMoment{s, m}).value <= single_edge_gaussian_bound(w, s, m));
    CHECK(single_edge_gaussian_bound(1.0, -1, 1.0) == doctest::Approx(std::exp(9.0 / 8)));
  }

  TEST_CASE("path and cosh bounds") {
    CHECK(path_moment_bound(std::vector<double>{1.0, 1.0}, 1.0) == doctest::Approx(std::exp(9.0 / 4)));
    CHECK(path_moment_bound(std::vector<double>{}, 1.0) == 1.0);
    CHECK(path_moment_bound(std::vector<double>{1e12}, 1.0) == doctest::Approx(1.0));
    const auto g = two_vertex();
    CHECK(cosh_moment_bound(g, std::vector<double>{0, 0, 0}) == 1.0);
    CHECK(cosh_moment_bound(g, std::vector<double>{0.5, 0.5, 0.5}) == doctest::Approx(2.0 * (4.0 / 3) * 1.2));
    CHECK_THROWS_AS(cosh_moment_bound(g, std::vector<double>{1.0, 0, 0}), PreconditionError);
    // single vertex h = 2: E[cosh u] = (1 + 1.5) / 2 <= 2
    const double ecosh = 0.5 * (quadrature_1v(2.0, ExpMoment{1, 1.0}).value + quadrature_1v(2.0, ExpMoment{-1, 1.0}).value);
    CHECK(ecosh == doctest::Approx(1.25).epsilon(1e-8));
    CHECK(ecosh <= cosh_moment_bound(WiredGraph(1, {}, {2.0}), std::vector<double>{1.0}));
  }

  TEST_CASE("Ward statistic: trivial m and the vertex route") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      const auto g = random_wired_graph(1 + t % 5, rng, 1.0, 5.0);
      const auto n = static_cast<Eigen::Index>(g.size());
      FieldConfig f{Eigen::VectorXd(n), Eigen::VectorXd(n)};
      for (Eigen::Index i = 0; i < n; ++i) {
        f.u[i] = gauss(rng);
        (*f.s)[i] = gauss(rng);
      }
      std::vector<double> zero(g.edges_plus().size(), 0.0), m;
      CHECK(ward_statistic(g, f, zero).statistic == 1.0);
      for (const auto& e : g.edges_plus()) m.push_back(0.4 * e.weight * std::uniform_real_distribution<double>(0, 1)(rng));
      const auto w = ward_statistic(g, f, m);
      CHECK(std::abs(w.det_factor - ward_determinant_vertex_route(g, f, m)) <= 1e-9);
      CHECK(w.det_factor >= w.det_lower_bound);
      // statistic = prod B^m * det factor
      double prod = 1.0;
      for (std::size_t k = 0; k < m.size(); ++k) prod *= std::pow(B_edge(g, f, g.edges_plus()[k]), m[k]);
      CHECK(w.statistic == doctest::Approx(prod * w.det_factor).epsilon(1e-12));
    }
  }

  TEST_CASE("Ward matrix is symmetric positive semidefinite") {
    const auto g = two_vertex();
    FieldConfig f{Eigen::Vector2d(0.2, -0.4), Eigen::VectorXd(Eigen::Vector2d(0.5, 1.0))};
    const auto wm = ward_matrices(g, f);
    CHECK((wm.g - wm.g.transpose()).norm() < 1e-14);
    CHECK(wm.q.size() == 3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(wm.g);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}
