#include <doctest.h>

#include <cmath>
#include <sstream>

#include "vrjp/errors.hpp"
#include "vrjp/quadrature.hpp"
#include "vrjp/sampler.hpp"
#include "vrjp/weights.hpp"

using namespace vrjp;

namespace {

WiredGraph two_vertex() { return WiredGraph(2, {{0, 1, 1.0}}, {2.0, 3.0}); }

bool within(const MeanEstimate& e, double target, double k = 3.0) { return std::abs(e.mean - target) <= k * e.se; }

}  // namespace

TEST_SUITE("h22_environment") {
  TEST_CASE("sampler is deterministic per seed") {
    const auto g = two_vertex();
    SamplerConfig cfg;
    cfg.sweeps = 500;
    const auto a = sample_u_mcmc(g, cfg, 42);
    const auto b = sample_u_mcmc(g, cfg, 42);
    const auto c = sample_u_mcmc(g, cfg, 43);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    std::ostringstream sa, sb;
    write_batch(sa, a);
    write_batch(sb, b);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("# seed=42", 0) == 0);
    CHECK(a.draws() == 500);
  }

  TEST_CASE("chains do not depend on the worker count") {
    const auto g = two_vertex();
    SamplerConfig cfg;
    cfg.sweeps = 300;
    const auto one = sample_chains(g, cfg, 7, 3, 1);
    const auto three = sample_chains(g, cfg, 7, 3, 3);
    REQUIRE(one.size() == 3);
    for (std::size_t c = 0; c < 3; ++c) CHECK(one[c].values == three[c].values);
    CHECK(one[0].values != one[1].values);
  }

  TEST_CASE("single vertex h = 1: e^{-u} and e^{u} moments") {
    const WiredGraph g(1, {}, {1.0});
    SamplerConfig cfg;
    cfg.sweeps = 1'000'000;
    const auto batch = sample_u_mcmc(g, cfg, 1);
    CHECK(batch.diagnostics_ok);
    CHECK(batch.acceptance_rate > 0.2);
    CHECK(batch.acceptance_rate < 0.6);
    const std::vector<SampleBatch> chains{batch};
    const auto em = estimate_exp_moment(chains, 0, -1, 1.0);
    const auto ep = estimate_exp_moment(chains, 0, 1, 1.0);
    CHECK(within(em.value, 2.0));
    CHECK(within(ep.value, 1.0));
    CHECK(em.reliable);
  }

  TEST_CASE("tilted sampler reweights by e^{u_tilt}") {
    // E_tilt[e^{-u}] = E[e^{u} e^{-u}] = 1; E_tilt[e^{u}] = E[e^{2u}]
    const WiredGraph g(1, {}, {2.0});
    SamplerConfig cfg;
    cfg.sweeps = 200'000;
    cfg.tilt = 0;
    const std::vector<SampleBatch> chains{sample_u_mcmc(g, cfg, 2)};
    CHECK(within(estimate_exp_moment(chains, 0, -1, 1.0).value, 1.0));
    CHECK(within(estimate_exp_moment(chains, 0, 1, 1.0).value, quadrature_1v(2.0, ExpMoment{1, 2.0}).value));
  }

  TEST_CASE("two-vertex example: e^{u_i} has mean one") {
    const auto g = two_vertex();
    SamplerConfig cfg;
    cfg.sweeps = 100'000;
    const auto chains = sample_chains(g, cfg, 3, 2, 1);
    CHECK(within(estimate_exp_moment(chains, 0, 1, 1.0).value, 1.0));
    CHECK(within(estimate_exp_moment(chains, 1, 1, 1.0).value, 1.0));
    const double ref = quadrature_2v(g, [](double a, double) { return std::exp(-a); });
    CHECK(within(estimate_exp_moment(chains, 0, -1, 1.0).value, ref));
  }

  TEST_CASE("s given u is centred Gaussian with covariance D^{-1}") {
    const WiredGraph g1(1, {}, {1.0}), g4(1, {}, {4.0});
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
    std::vector<double> a, b, sq;
    for (std::uint64_t k = 0; k < 100'000; ++k) {
      a.push_back(sample_s_given_u(g1, u, k)[0]);
      b.push_back(sample_s_given_u(g4, u, k + (1ULL << 32))[0]);
    }
    for (double x : a) sq.push_back(x * x);
    const auto mean = batch_means(a);
    const auto var1 = batch_means(sq);
    sq.clear();
    for (double x : b) sq.push_back(x * x);
    const auto var4 = batch_means(sq);
    CHECK(within(mean, 0.0));
    CHECK(within(var1, 1.0));
    CHECK(within(var4, 0.25));
  }

  TEST_CASE("Ward identity on the two-vertex example, m = 1/2") {
    const auto g = two_vertex();
    SamplerConfig cfg;
    cfg.sweeps = 50'000;
    const auto chains = sample_chains(g, cfg, 11, 2, 1);
    const std::vector<double> m(3, 0.5);
    const auto w = ward_check(g, chains, m, 99);
    CHECK(w.samples == 100'000);
    CHECK(w.det_bound_violations == 0);
    CHECK(w.max_route_discrepancy < 1e-9);
    CHECK(within(w.statistic, 1.0));
    CHECK(w.holds);
    const auto c = cosh_moment_bound_check(g, chains, m);
    CHECK(c.holds);
    CHECK(c.rhs == doctest::Approx(3.2));
  }

  TEST_CASE("hierarchical moment below c_H") {
    const auto g = hierarchical_graph(HierarchicalModel::compliant(2, 8.0, 2.0));
    SamplerConfig cfg;
    cfg.sweeps = 20'000;
    const auto chains = sample_chains(g, cfg, 5, 2, 1);
    const double bound = constant_cH(8.0, 2.0, 1.0);
    for (int s : {1, -1}) {
      const auto e = estimate_exp_moment(chains, 0, s, 1.0);
      CHECK(e.value.mean <= bound + 3 * e.value.se);
    }
  }

  TEST_CASE("monotonicity in the pinning") {
    const WiredGraph plus(1, {}, {2.0}), minus(1, {}, {1.0});
    SamplerConfig cfg;
    cfg.sweeps = 100'000;
    const auto r = monotonicity_check(plus, minus, 0, 1.0, -1, cfg, 4, 2, 1);
    CHECK(r.ordered);
    CHECK(within(r.larger.value, 1.5));
    CHECK(within(r.smaller.value, 2.0));
    CHECK_THROWS_AS(monotonicity_check(minus, plus, 0, 1.0, -1, cfg, 4, 1, 1), PreconditionError);
  }

  TEST_CASE("larger graphs use the low-rank path and stay consistent") {
    // path of 25 vertices, pinned everywhere
    std::vector<Edge> e;
    for (int i = 0; i + 1 < 25; ++i) e.push_back({i, i + 1, 3.0});
    const WiredGraph path(25, e, std::vector<double>(25, 0.5));
    SamplerConfig cfg;
    cfg.sweeps = 4000;
    cfg.refresh_interval = 50;
    const auto chains = sample_chains(path, cfg, 8, 2, 1);
    CHECK(chains[0].diagnostics_ok);
    for (VertexId i : {0, 12, 24}) CHECK(within(estimate_exp_moment(chains, i, 1, 1.0).value, 1.0, 4.0));
  }
}
