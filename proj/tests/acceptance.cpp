// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vrjp/electrical.hpp"
#include "vrjp/environment.hpp"
#include "vrjp/errors.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/lattice.hpp"
#include "vrjp/quadrature.hpp"
#include "vrjp/sampler.hpp"
#include "vrjp/stats.hpp"
#include "vrjp/vrjp_sim.hpp"
#include "vrjp/weights.hpp"

using namespace vrjp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

bool within3(const MeanEstimate& e, double target) { return std::abs(e.mean - target) <= 3.0 * e.se; }

// --- independent spanning-tree enumeration (union-find over edge subsets)

int find(std::vector<int>& p, int x) {
  while (p[static_cast<std::size_t>(x)] != x) x = p[static_cast<std::size_t>(x)] = p[static_cast<std::size_t>(p[static_cast<std::size_t>(x)])];
  return x;
}

double tree_sum_bruteforce(const WiredGraph& g, const std::vector<double>& c) {
  const auto& edges = g.edges_plus();
  const int v = static_cast<int>(g.size()) + 1;
  const int need = v - 1;
  const int m = static_cast<int>(edges.size());
  double total = 0.0;
  std::vector<int> pick(static_cast<std::size_t>(need));
  std::iota(pick.begin(), pick.end(), 0);
  if (need > m) return 0.0;
  for (;;) {
    std::vector<int> parent(static_cast<std::size_t>(v));
    std::iota(parent.begin(), parent.end(), 0);
    bool acyclic = true;
    double prod = 1.0;
    for (int k : pick) {
      const auto& e = edges[static_cast<std::size_t>(k)];
      const int a = find(parent, e.a), b = find(parent, e.b);
      if (a == b) {
        acyclic = false;
        break;
      }
      parent[static_cast<std::size_t>(a)] = b;
      prod *= c[static_cast<std::size_t>(k)];
    }
    if (acyclic) total += prod;
    int i = need - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - need + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < need; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return total;
}

// --- criteria

Outcome criterion1() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto g = random_wired_graph(1 + static_cast<std::size_t>(t % 7), rng, 0.1, 5.0);
    Eigen::VectorXd u(static_cast<Eigen::Index>(g.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = unif(rng);
    const double det = std::exp(log_det(laplacian(g, u)));
    const double brute = tree_sum_bruteforce(g, edge_conductances(g, u));
    const double lib = spanning_tree_sum(g, u);
    worst = std::max({worst, std::abs(det - brute) / brute, std::abs(lib - brute) / brute});
  }
  return {worst <= 1e-10, "50 graphs (|Lambda| <= 7), max rel diff " + num(worst, 3) + " (tol 1e-10)"};
}

double bessel_moment(double h, double a) {
  return std::sqrt(h / (2.0 * M_PI)) * std::exp(h) * 2.0 * std::cyl_bessel_k(std::abs(a - 0.5), h);
}

Outcome criterion2() {
  double e_mass = 0.0, e_plus = 0.0, e_minus = 0.0, e_bessel = 0.0;
  for (double h : {0.5, 1.0, 2.0, 5.0}) {
    e_mass = std::max(e_mass, std::abs(quadrature_1v(h, Normalization{}).value - 1.0));
    e_plus = std::max(e_plus, std::abs(quadrature_1v(h, ExpMoment{1, 1.0}).value - 1.0));
    const double minus = quadrature_1v(h, ExpMoment{-1, 1.0}).value;
    e_minus = std::max(e_minus, std::abs(minus - (1.0 + 1.0 / h)));
    e_bessel = std::max({e_bessel, std::abs(minus - bessel_moment(h, -1.0)), std::abs(1.0 - bessel_moment(h, 0.0))});
  }
  const bool pass = e_mass <= 1e-8 && e_plus <= 1e-8 && e_minus <= 1e-6 && e_bessel <= 1e-6;
  return {pass, "mass err " + num(e_mass, 2) + ", E[e^u] err " + num(e_plus, 2) + ", E[e^-u] err " + num(e_minus, 2) +
                    ", vs Bessel " + num(e_bessel, 2)};
}

Outcome criterion3() {
  // 1-vertex KS at >= 1e6 effective samples
  const WiredGraph single(1, {}, {1.0});
  SamplerConfig cfg;
  cfg.sweeps = 4'000'000;
  cfg.thinning = 2;
  cfg.burn_in = 5000;
  const auto chains = sample_chains(single, cfg, 3003, 2, 0);
  std::vector<double> pooled;
  double ess = 0.0;
  bool diag = true;
  for (const auto& c : chains) {
    const auto x = c.coordinate(0);
    ess += effective_sample_size(x);
    pooled.insert(pooled.end(), x.begin(), x.end());
    diag = diag && c.diagnostics_ok;
  }
  const double ks = ks_distance(pooled, [](const std::vector<double>& s) { return single_vertex_cdf(1.0, s); });
  bool pass = ess >= 1e6 && ks < 0.01 && diag;
  std::string detail = "KS " + num(ks, 3) + " at ESS " + num(ess, 4);

  // E[e^{u_i}] = 1 on 5 multi-vertex graphs
  std::mt19937_64 rng(3004);
  int checked = 0, ok = 0;
  SamplerConfig small;
  small.sweeps = 40'000;
  for (int t = 0; t < 5; ++t) {
    const auto g = random_wired_graph(2 + static_cast<std::size_t>(t), rng, 0.5, 3.0);
    const auto ch = sample_chains(g, small, derive_seed(3005, static_cast<std::uint64_t>(t)), 2, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto e = estimate_exp_moment(ch, static_cast<VertexId>(i), 1, 1.0);
      ++checked;
      ok += within3(e.value, 1.0) && e.reliable;
    }
  }
  pass = pass && ok == checked;
  detail += "; E[e^u_i] = 1 within 3 SE at " + std::to_string(ok) + "/" + std::to_string(checked) + " vertices of 5 graphs";
  return {pass, detail};
}

Outcome criterion4() {
  std::mt19937_64 rng(4004);
  SamplerConfig cfg;
  cfg.sweeps = 50'000;
  int good = 0;
  std::size_t violations = 0, samples = 0;
  std::string means;
  const int instances = 6;
  for (int t = 0; t < instances; ++t) {
    const auto g = random_wired_graph(1 + static_cast<std::size_t>(t % 5), rng, 2.0, 5.0);
    std::vector<double> m;
    for (const auto& e : g.edges_plus()) m.push_back(std::min(1.0, e.weight / 4.0));
    const auto chains = sample_chains(g, cfg, derive_seed(4005, static_cast<std::uint64_t>(t)), 2, 0);
    const auto w = ward_check(g, chains, m, derive_seed(4006, static_cast<std::uint64_t>(t)));
    violations += w.det_bound_violations;
    samples += w.samples;
    good += within3(w.statistic, 1.0);
    means += (t ? ", " : "") + num(w.statistic.mean, 4) + "+-" + num(w.statistic.se, 2);
  }
  const bool pass = good == instances && violations == 0 && samples >= static_cast<std::size_t>(instances) * 100'000;
  return {pass, std::to_string(good) + "/" + std::to_string(instances) + " instances within 3 SE of 1 [" + means +
                    "]; det bound violations " + std::to_string(violations) + "/" + std::to_string(samples)};
}

Outcome criterion5() {
  bool pass = true;
  std::string detail;
  // (a) single edge
  int a_ok = 0, a_n = 0;
  for (double w : {1.0, 4.0, 16.0})
    for (double m : {1.0, 2.0})
      for (int s : {1, -1}) {
        ++a_n;
        a_ok += quadrature_1v(w, ExpMoment{s, m}).value <= std::exp((2.0 * s * m - 1.0) * (2.0 * s * m - 1.0) / (8.0 * w));
      }
  pass = pass && a_ok == a_n;
  detail += "(a) " + std::to_string(a_ok) + "/" + std::to_string(a_n);

  SamplerConfig cfg;
  cfg.sweeps = 20'000;
  // (b) hierarchical, N <= 3
  int b_ok = 0, b_n = 0;
  for (int n = 1; n <= 3; ++n) {
    const auto g = hierarchical_graph(HierarchicalModel::compliant(n, 8.0, 2.0));
    const auto chains = sample_chains(g, cfg, derive_seed(5005, static_cast<std::uint64_t>(n)), 2, 0);
    for (double m : {1.0, 2.0})
      for (int s : {1, -1}) {
        const auto e = estimate_exp_moment(chains, 0, s, m);
        ++b_n;
        b_ok += e.value.mean <= constant_cH(8.0, 2.0, m) + 3 * e.value.se;
      }
  }
  pass = pass && b_ok == b_n;
  detail += "; (b) " + std::to_string(b_ok) + "/" + std::to_string(b_n);

  // (c) Euclidean, d in {1, 2}, N <= 3
  const double c_ref = constant_C(36.0, 1, 2.0, 1.0);
  const bool c_value = std::abs(c_ref - 1.9060) < 5e-4;
  int c_ok = 0, c_n = 0;
  for (int d : {1, 2}) {
    const double wbar = d == 1 ? 36.0 : 576.0;
    for (int n = 1; n <= 3; ++n) {
      EuclideanLongRange model;
      model.dimension = d;
      model.wbar = wbar;
      model.alpha = 2.0;
      model.profile = RadialProfile(LogEnvelopeProfile{wbar, 2.0, d});
      const auto pts = box_points(d, 1 << n);
      const auto g = build_wired_graph(pts, model.ambient());
      const auto chains = sample_chains(g, cfg, derive_seed(5006, static_cast<std::uint64_t>(10 * d + n)), 2, 0);
      const double bound = constant_C(wbar, d, 2.0, 1.0);
      const VertexId centre = static_cast<VertexId>(g.size() / 2);
      for (VertexId i : {VertexId{0}, centre})
        for (int s : {1, -1}) {
          const auto e = estimate_exp_moment(chains, i, s, 1.0);
          ++c_n;
          c_ok += e.value.mean <= bound + 3 * e.value.se;
        }
    }
  }
  pass = pass && c_ok == c_n && c_value;
  detail += "; (c) " + std::to_string(c_ok) + "/" + std::to_string(c_n) + ", C(36,1,2,1) = " + num(c_ref, 6);
  return {pass, detail};
}

Outcome criterion6() {
  long pairs = 0, bad = 0;
  int boxes = 0;
  for (int d = 1; d <= 12; ++d) {
    for (int n = 1; n * d <= 12; ++n) {
      ++boxes;
      const auto pts = box_points(d, 1 << n);
      std::vector<BinaryString> z;
      z.reserve(pts.size());
      for (const auto& p : pts) z.push_back(phi(p, n, d));
      for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
          const int dh = hierarchical_distance(z[a], z[b]);
          int linf = 0;
          for (int k = 0; k < d; ++k) linf = std::max(linf, std::abs(pts[a][static_cast<std::size_t>(k)] - pts[b][static_cast<std::size_t>(k)]));
          const long scale = 1L << ((dh + d - 1) / d);
          ++pairs;
          bad += !(scale > linf);
        }
      }
    }
  }
  return {bad == 0, std::to_string(bad) + " violations over " + std::to_string(pairs) + " pairs in " +
                        std::to_string(boxes) + " boxes"};
}

Outcome criterion7() {
  bool pass = true;
  std::string detail;
  // explicit level counts over (-2^5, 2^5]^d
  int size_bad = 0;
  for (int d = 1; d <= 3; ++d) {
    const AnnuliFlow f(d, 5);
    std::vector<long> count(6, 0);
    for (const auto& p : box_points(d, 64, -31)) {
      if (std::all_of(p.begin(), p.end(), [](int x) { return x == 0; })) {
        ++count[0];
        continue;
      }
      // smallest k with p in (-2^k, 2^k]^d; k = 0 means {0,1}^d, which carries no level
      int m = 0;
      for (int x : p) m = std::max(m, x > 0 ? x : 1 - x);
      int k = 0;
      while ((1 << k) < m) ++k;
      if (k >= 1) ++count[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k <= 5; ++k) {
      const long lib = f.level_size(k);
      size_bad += lib != count[static_cast<std::size_t>(k)] || lib < (1L << (k * d));
    }
    pass = pass && f.node_rule_exact();
  }
  pass = pass && size_bad == 0;
  detail += "level sizes " + std::string(size_bad ? "wrong" : "ok") + "; exact node rule " + (pass ? "ok" : "broken");

  // materialized node rule (floating point) on small instances
  double node_err = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const int k = d == 3 ? 2 : 3;
    const AnnuliFlow f(d, k);
    const auto flow = f.materialize();
    node_err = std::max(node_err, flow.node_rule_error([&](VertexId v) { return f.level_of(f.point_of(v)) == k; }));
  }
  pass = pass && node_err < 1e-12;

  int e_ok = 0, e_n = 0;
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d)
    for (double alpha : {1.5, 2.0}) {
      const AnnuliFlow f(d, 5);
      const RadialProfile w(LogEnvelopeProfile{36.0, alpha, d});
      const double e = f.energy([&](double r) { return w(r); });
      const double bound = annuli_energy_bound(d, 5, 36.0, alpha);
      ++e_n;
      e_ok += std::isfinite(e) && e <= bound;
      worst = std::max(worst, e / bound);
    }
  pass = pass && e_ok == e_n;
  detail += "; float node rule err " + num(node_err, 2) + "; energy <= bound " + std::to_string(e_ok) + "/" +
            std::to_string(e_n) + " (max ratio " + num(worst, 3) + ")";
  return {pass, detail};
}

Outcome criterion8() {
  // series: x - a - rho with conductances c1, c2; parallel: two edges x - rho merged
  double series_err = 0.0, parallel_err = 0.0;
  std::mt19937_64 rng(8008);
  std::uniform_real_distribution<double> unif(0.1, 10.0);
  for (int t = 0; t < 20; ++t) {
    const double c1 = unif(rng), c2 = unif(rng), c3 = unif(rng);
    const WiredGraph s(2, {{0, 1, c1}}, {0.0, c2});
    series_err = std::max(series_err, std::abs(effective_resistance(s, 0).value - (1 / c1 + 1 / c2)) * c1);
    // x pinned directly (c3) and through a (c1, c2): parallel of c3 and the series pair
    const WiredGraph p(2, {{0, 1, c1}}, {c3, c2});
    const double ref = 1.0 / (c3 + 1.0 / (1 / c1 + 1 / c2));
    parallel_err = std::max(parallel_err, std::abs(effective_resistance(p, 0).value - ref) / ref);
  }
  bool pass = series_err <= 1e-10 && parallel_err <= 1e-10;

  // Thomson on random graphs: harmonic flow plus cycle perturbations
  long flows = 0, thomson_bad = 0;
  for (int t = 0; t < 30; ++t) {
    const auto g = random_wired_graph(2 + static_cast<std::size_t>(t % 6), rng, 0.5, 4.0);
    std::vector<double> c;
    for (const auto& e : g.edges_plus()) c.push_back(e.weight * unif(rng));
    const double r = effective_resistance(g, c, 0).value;
    const auto h = harmonic_flow(g, c, 0);
    ++flows;
    thomson_bad += thomson_upper_bound(g, h, c) < r * (1 - 1e-10);
    // push eps around every triangle through rho
    for (const auto& e : g.inner_edges()) {
      if (g.weight(e.a, g.rho()) == 0.0 || g.weight(e.b, g.rho()) == 0.0) continue;
      FlowAssignment f = h;
      const double eps = 0.1 * unif(rng);
      f.set(e.a, e.b, h(e.a, e.b) + eps);
      f.set(e.b, g.rho(), h(e.b, g.rho()) + eps);
      f.set(e.a, g.rho(), h(e.a, g.rho()) - eps);
      ++flows;
      thomson_bad += thomson_upper_bound(g, f, c) < r * (1 - 1e-10);
    }
  }
  pass = pass && thomson_bad == 0;

  long rayleigh_bad = 0;
  for (int t = 0; t < 50; ++t) {
    const auto g = random_wired_graph(2 + static_cast<std::size_t>(t % 6), rng, 0.5, 4.0);
    std::vector<double> lo, hi;
    for (const auto& e : g.edges_plus()) {
      lo.push_back(e.weight);
      hi.push_back(e.weight * (1.0 + unif(rng)));
    }
    for (VertexId x = 0; x < static_cast<VertexId>(g.size()); ++x) rayleigh_bad += !rayleigh_monotonicity_check(g, lo, hi, x).holds;
  }
  pass = pass && rayleigh_bad == 0;
  return {pass, "series err " + num(series_err, 2) + ", parallel err " + num(parallel_err, 2) + "; Thomson violations " +
                    std::to_string(thomson_bad) + "/" + std::to_string(flows) + "; Rayleigh violations " +
                    std::to_string(rayleigh_bad) + " over 50 ordered pairs"};
}

Outcome criterion9() {
  const std::vector<WiredGraph> graphs{
      WiredGraph(2, {{0, 1, 1.0}}, {2.0, 3.0}),
      WiredGraph(3, {{0, 1, 1.5}, {0, 2, 0.7}, {1, 2, 2.0}}, {1.0, 0.0, 2.5}),
  };
  bool pass = true;
  std::string detail;
  StopRule three;
  three.at_rho = false;
  three.max_jumps = 3;
  three.cap_is_truncation = false;
  const long samples = 100'000;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const auto& g = graphs[gi];
    std::vector<Walk> vrjp;
    vrjp.reserve(samples);
    for (long k = 0; k < samples; ++k)
      vrjp.push_back({discrete_skeleton(simulate_vrjp(g, 0, three, derive_seed(9000 + gi, static_cast<std::uint64_t>(k)))), false});
    SamplerConfig env;
    const auto ann = annealed_rwrc(g, env, 0, samples, three, 9100 + gi);
    const double tv = total_variation(path_law(vrjp, 3, g.rho()), path_law(ann.walks, 3, g.rho()));
    pass = pass && tv <= 0.02;
    detail += (gi ? "; " : "") + std::to_string(g.size()) + "-vertex TV " + num(tv, 3);

    // quenched identity at a sampled environment
    SamplerConfig q;
    q.sweeps = 10;
    const auto batch = sample_u_mcmc(g, q, 9200 + gi);
    const auto c = edge_conductances(g, batch.field(batch.draws() - 1).u);
    std::vector<Walk> walks;
    for (long k = 0; k < 50'000; ++k) walks.push_back(simulate_rwrc(g, c, 0, StopRule{}, derive_seed(9300 + gi, static_cast<std::uint64_t>(k))));
    const auto v = count_visits(walks, 0, g.rho());
    double cx = 0.0;
    for (const auto& nb : g.neighbors(0)) cx += c[nb.edge];
    const double ref = cx * effective_resistance(g, c, 0).value;
    pass = pass && within3(v.visits, ref) && v.excluded == 0;
    detail += ", E[N_x] " + num(v.visits.mean, 5) + " vs c(x)R " + num(ref, 5);
  }
  return {pass, detail};
}

Outcome criterion10() {
  const auto ambient = HighDimModel{3, 100.0, std::nullopt}.ambient();
  const double kx = std::pow(2.0, 11) * ambient.row_sum(1e-12);
  bool pass = std::abs(kx - 2048.0 * 600.0) < 1e-6;
  std::vector<double> r;
  for (int side : {4, 6, 8}) {
    const int off = (8 - side) / 2;
    const auto pts = box_points(3, side, off);
    const auto g = build_wired_graph(pts, ambient);
    const int local = 3 - off;
    const VertexId x = local + side * local + side * side * local;
    r.push_back(effective_resistance(g, x).value);
  }
  const bool monotone = r[0] <= r[1] && r[1] <= r[2];
  const auto pts = box_points(3, 8);
  const auto g = build_wired_graph(pts, ambient);
  const VertexId x = 3 + 8 * 3 + 64 * 3;
  std::vector<Walk> sk;
  for (long k = 0; k < 20'000; ++k) {
    const auto tr = simulate_vrjp(g, x, StopRule{}, derive_seed(10010, static_cast<std::uint64_t>(k)));
    sk.push_back({discrete_skeleton(tr), tr.truncated});
  }
  const auto v = count_visits(sk, x, g.rho());
  const double bound = kx * r[2];
  pass = pass && monotone && v.visits.mean <= bound + 3 * v.visits.se && v.excluded == 0;
  return {pass, "R^N over sides 4,6,8: " + num(r[0], 6) + ", " + num(r[1], 6) + ", " + num(r[2], 6) +
                    "; visits " + num(v.visits.mean, 4) + " +- " + num(v.visits.se, 2) + " <= K_x R = " + num(bound, 6)};
}

Outcome criterion11() {
  std::mt19937_64 rng(11011);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SamplerConfig cfg;
  cfg.sweeps = 20'000;
  int ok = 0, n = 0;
  std::string worst;
  for (int t = 0; t < 9; ++t) {
    const auto minus = random_wired_graph(1 + static_cast<std::size_t>(t % 5), rng, 0.5, 3.0);
    std::vector<Edge> e = minus.inner_edges();
    for (auto& x : e) x.weight *= 1.0 + 2.0 * unif(rng);
    std::vector<double> h = minus.pinnings();
    for (auto& x : h) x += 2.0 * unif(rng);
    const WiredGraph plus(minus.size(), e, h);
    const int sigma = t % 3 == 0 ? 1 : -1;
    const double m = t % 2 == 0 ? 1.0 : 2.0;
    const auto r = monotonicity_check(plus, minus, 0, m, sigma, cfg, derive_seed(11012, static_cast<std::uint64_t>(t)), 2, 0);
    ++n;
    ok += r.ordered;
  }
  // Euclidean box vs the dominated hierarchical box
  for (int d : {1, 2}) {
    const int nlev = d == 1 ? 3 : 2;
    const double wbar = d == 1 ? 36.0 : 576.0;
    const RadialProfile w(LogEnvelopeProfile{wbar, 2.0, d});
    EuclideanLongRange model;
    model.dimension = d;
    model.profile = w;
    const auto pts = box_points(d, 1 << nlev);
    const auto plus = build_wired_graph(pts, model.ambient());
    const double hmin = *std::min_element(plus.pinnings().begin(), plus.pinnings().end());
    const auto minus = hierarchical_box_graph(HierarchicalModel::from_profile(w, nlev, d, hmin), nlev, d);
    const auto r = monotonicity_check(plus, minus, 0, 1.0, -1, cfg, derive_seed(11013, static_cast<std::uint64_t>(d)), 2, 0);
    ++n;
    ok += r.ordered;
    worst += (d == 1 ? "" : "; ") + std::string("Euclid vs hier d=") + std::to_string(d) + ": " +
             num(r.larger.value.mean, 5) + " <= " + num(r.smaller.value.mean, 5);
  }
  return {ok == n, std::to_string(ok) + "/" + std::to_string(n) + " dominated pairs ordered; " + worst};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"matrix-tree exactness", criterion1},
      {"single-vertex closed forms", criterion2},
      {"MCMC validity", criterion3},
      {"Ward determinant identity", criterion4},
      {"moment bounds", criterion5},
      {"hierarchical vs sup-norm distance", criterion6},
      {"annuli flow", criterion7},
      {"electrical laws", criterion8},
      {"VRJP vs annealed random walk", criterion9},
      {"transience-bound pipeline", criterion10},
      {"monotonicity consistency", criterion11},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
