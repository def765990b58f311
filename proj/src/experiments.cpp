#include "vrjp/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vrjp/electrical.hpp"
#include "vrjp/environment.hpp"
#include "vrjp/errors.hpp"
#include "vrjp/lattice.hpp"
#include "vrjp/quadrature.hpp"
#include "vrjp/vrjp_sim.hpp"
#include "vrjp/weights.hpp"

namespace vrjp {

namespace {

using json = nlohmann::json;

// ---------------------------------------------------------------- schema reader

class Errors {
 public:
  void add(std::string msg) { list_.push_back(std::move(msg)); }
  bool empty() const { return list_.empty(); }
  const std::vector<std::string>& list() const { return list_; }

 private:
  std::vector<std::string> list_;
};

// Typed access to a JSON object that records every problem and, on finish(),
// rejects keys nobody asked for.
class Obj {
 public:
  Obj(const json& j, std::string path, Errors& errors) : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) errors_.add(path_ + ": expected an object");
  }

  ~Obj() { finish(); }
  Obj(const Obj&) = delete;
  Obj& operator=(const Obj&) = delete;

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.is_object() && j_.contains(key);
  }

  const json* raw(const std::string& key, bool required) {
    used_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) {
      if (required) errors_.add(where(key) + ": missing");
      return nullptr;
    }
    return &j_.at(key);
  }

  long integer(const std::string& key, std::optional<long> fallback, long min, long max) {
    const json* v = raw(key, !fallback);
    if (!v) return fallback.value_or(min);
    if (!v->is_number_integer()) {
      errors_.add(where(key) + ": expected an integer");
      return fallback.value_or(min);
    }
    const long x = v->get<long>();
    if (x < min || x > max) errors_.add(where(key) + ": out of range [" + std::to_string(min) + ", " + std::to_string(max) + "]");
    return x;
  }

  std::uint64_t seed(const std::string& key) {
    const json* v = raw(key, true);
    if (!v) return 0;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      errors_.add(where(key) + ": expected a nonnegative integer");
      return 0;
    }
    return v->get<std::uint64_t>();
  }

  double number(const std::string& key, std::optional<double> fallback, double min, double max,
                bool open_min = false) {
    const json* v = raw(key, !fallback);
    if (!v) return fallback.value_or(min);
    if (!v->is_number()) {
      errors_.add(where(key) + ": expected a number");
      return fallback.value_or(min);
    }
    const double x = v->get<double>();
    if (!(open_min ? x > min : x >= min) || !(x <= max)) errors_.add(where(key) + ": out of range");
    return x;
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = raw(key, false);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      errors_.add(where(key) + ": expected true or false");
      return fallback;
    }
    return v->get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback,
                     const std::vector<std::string>& choices = {}) {
    const json* v = raw(key, !fallback);
    if (!v) return fallback.value_or("");
    if (!v->is_string()) {
      errors_.add(where(key) + ": expected a string");
      return fallback.value_or("");
    }
    auto s = v->get<std::string>();
    if (!choices.empty() && std::find(choices.begin(), choices.end(), s) == choices.end())
      errors_.add(where(key) + ": unknown value '" + s + "'");
    return s;
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback, double min,
                              double max) {
    const json* v = raw(key, !fallback);
    if (!v) return fallback.value_or(std::vector<double>{});
    std::vector<double> out;
    if (!v->is_array() || v->empty()) {
      errors_.add(where(key) + ": expected a nonempty array of numbers");
      return out;
    }
    for (const auto& x : *v) {
      if (!x.is_number()) {
        errors_.add(where(key) + ": expected numbers");
        return {};
      }
      const double d = x.get<double>();
      if (!(d >= min && d <= max)) errors_.add(where(key) + ": entry out of range");
      out.push_back(d);
    }
    return out;
  }

  std::vector<long> integers(const std::string& key, std::optional<std::vector<long>> fallback, long min, long max) {
    const json* v = raw(key, !fallback);
    if (!v) return fallback.value_or(std::vector<long>{});
    std::vector<long> out;
    if (!v->is_array() || v->empty()) {
      errors_.add(where(key) + ": expected a nonempty array of integers");
      return out;
    }
    for (const auto& x : *v) {
      if (!x.is_number_integer()) {
        errors_.add(where(key) + ": expected integers");
        return {};
      }
      const long d = x.get<long>();
      if (d < min || d > max) errors_.add(where(key) + ": entry out of range");
      out.push_back(d);
    }
    return out;
  }

  const json& self() const { return j_; }
  std::string where(const std::string& key) const { return path_ + "." + key; }
  Errors& errors() { return errors_; }

 private:
  void finish() {
    if (done_ || !j_.is_object()) return;
    done_ = true;
    for (const auto& [key, _] : j_.items()) {
      if (!used_.count(key)) errors_.add(path_ + ": unknown key '" + key + "'");
    }
  }

  const json& j_;
  std::string path_;
  Errors& errors_;
  std::set<std::string> used_;
  bool done_ = false;
};

// ---------------------------------------------------------------- shared pieces

struct SamplerSettings {
  SamplerConfig config;
  int chains = 1;
};

SamplerSettings read_sampler(Obj& top) {
  SamplerSettings s;
  const json* v = top.raw("sampler", false);
  if (!v) return s;
  Obj o(*v, top.where("sampler"), top.errors());
  s.config.sweeps = o.integer("sweeps", 10000, 1, 1'000'000'000);
  s.config.burn_in = o.integer("burn_in", 1000, 0, 1'000'000'000);
  s.config.thinning = o.integer("thinning", 1, 1, 1'000'000);
  s.config.step_scale = o.number("step_scale", 1.0, 0.0, 100.0, true);
  s.config.adapt_interval = o.integer("adapt_interval", 50, 1, 1'000'000);
  s.chains = static_cast<int>(o.integer("chains", 4, 1, 1024));
  return s;
}

// Graphs given inline ({"vertices", "edges", "pins"}) or as {"file": path}.
std::optional<WiredGraph> read_graph_spec(const json& j, const std::string& path, Errors& errors) {
  Obj o(j, path, errors);
  if (o.has("file")) {
    const auto file = o.string("file", std::nullopt);
    if (!errors.empty()) return std::nullopt;
    std::ifstream in(file);
    if (!in) {
      errors.add(path + ".file: cannot open '" + file + "'");
      return std::nullopt;
    }
    try {
      return read_graph(in);
    } catch (const std::exception& e) {
      errors.add(path + ".file: " + e.what());
      return std::nullopt;
    }
  }
  const long n = o.integer("vertices", std::nullopt, 1, static_cast<long>(kMaxSamplingVertices));
  std::vector<Edge> edges;
  std::vector<double> pins(static_cast<std::size_t>(std::max(0L, n)), 0.0);
  if (const json* e = o.raw("edges", false)) {
    if (!e->is_array()) errors.add(path + ".edges: expected [[i, j, w], ...]");
    else
      for (const auto& t : *e) {
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() || !t[2].is_number()) {
          errors.add(path + ".edges: expected [[i, j, w], ...]");
          break;
        }
        edges.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
      }
  }
  if (const json* p = o.raw("pins", true)) {
    if (!p->is_array()) errors.add(path + ".pins: expected [[i, h], ...]");
    else
      for (const auto& t : *p) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number()) {
          errors.add(path + ".pins: expected [[i, h], ...]");
          break;
        }
        const long i = t[0].get<long>();
        if (i < 0 || i >= n) {
          errors.add(path + ".pins: vertex out of range");
          break;
        }
        pins[static_cast<std::size_t>(i)] += t[1].get<double>();
      }
  }
  if (!errors.empty()) return std::nullopt;
  try {
    return WiredGraph(static_cast<std::size_t>(n), std::move(edges), std::move(pins));
  } catch (const std::exception& e) {
    errors.add(path + ": " + e.what());
    return std::nullopt;
  }
}

void guard_sampling(const WiredGraph& g) {
  if (g.size() > kMaxSamplingVertices)
    throw ResourceGuardError("sampling experiments are limited to " + std::to_string(kMaxSamplingVertices) +
                             " vertices");
}

std::size_t box_volume(int d, long side) {
  double v = std::pow(static_cast<double>(side), d);
  if (v > static_cast<double>(kMaxSamplingVertices))
    throw ResourceGuardError("box with " + format_double(v) + " vertices exceeds the sampling guard");
  return static_cast<std::size_t>(v);
}

EuclideanLongRange model_one(int d, double wbar, double alpha) {
  EuclideanLongRange m;
  m.dimension = d;
  m.wbar = wbar;
  m.alpha = alpha;
  m.profile = RadialProfile(LogEnvelopeProfile{wbar, alpha, d});
  return m;
}

WiredGraph euclidean_box(int d, int n, double wbar, double alpha) {
  box_volume(d, 1L << n);
  const auto pts = box_points(d, 1 << n);
  return build_wired_graph(pts, model_one(d, wbar, alpha).ambient());
}

std::string fmt(double x) { return format_double(x); }
std::string fmt(long x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

long linear_index(const std::vector<long>& x, long side, long offset) {
  long id = 0, scale = 1;
  for (long c : x) {
    const long r = c - offset;
    if (r < 0 || r >= side) return -1;
    id += r * scale;
    scale *= side;
  }
  return id;
}

// ---------------------------------------------------------------- experiment kinds

struct Context {
  std::uint64_t seed = 0;
  SamplerSettings sampler;
  int workers = 0;
  bool dry = false;  // validation only
};

// moment_bounds: E[e^{sigma m u_i}] against c_H (hierarchical) or C (Euclidean).
void moment_bounds(Obj& top, Context& ctx, ResultTable& t) {
  const json* mj = top.raw("model", true);
  std::vector<double> ms = top.numbers("m", std::vector<double>{1.0}, 1.0, 50.0);
  std::vector<long> sigmas = top.integers("sigma", std::vector<long>{1, -1}, -1, 1);
  for (long s : sigmas) {
    if (s == 0) top.errors().add(top.where("sigma") + ": entries must be +1 or -1");
  }
  std::optional<std::vector<long>> vertex_list;
  if (const json* v = top.raw("vertices", false); v && !(v->is_string() && v->get<std::string>() == "all")) {
    vertex_list = top.integers("vertices", std::nullopt, 0, static_cast<long>(kMaxSamplingVertices) - 1);
  }
  if (!mj) return;
  Obj model(*mj, top.where("model"), top.errors());
  const auto type = model.string("type", std::nullopt, {"hierarchical", "euclidean"});
  struct Case {
    long n;
    int d;
    double alpha, wbar;
  };
  std::vector<Case> cases;
  if (type == "hierarchical") {
    const auto ns = model.integers("N", std::nullopt, 1, 12);
    const double wbar_h = model.number("Wbar", std::nullopt, 0.0, 1e12, true);
    const double alpha = model.number("alpha", std::nullopt, 1.0, 50.0, true);
    for (long n : ns) cases.push_back({n, 1, alpha, wbar_h});
  } else if (type == "euclidean") {
    const int d = static_cast<int>(model.integer("d", std::nullopt, 1, 3));
    const auto ns = model.integers("N", std::nullopt, 1, 12);
    const double wbar = model.number("Wbar", std::nullopt, 0.0, 1e12, true);
    const double alpha = model.number("alpha", std::nullopt, 1.0, 50.0, true);
    model.string("profile", "log_envelope", {"log_envelope"});
    for (long n : ns) cases.push_back({n, d, alpha, wbar});
  }
  if (ctx.dry || !top.errors().empty()) return;

  t.columns = {"model", "N", "d", "alpha", "Wbar", "vertex", "sigma", "m", "estimate", "se", "ess", "reliable", "bound", "pass"};
  for (const auto& c : cases) {
    const WiredGraph g = type == "hierarchical"
                             ? hierarchical_graph(HierarchicalModel::compliant(static_cast<int>(c.n), c.wbar, c.alpha))
                             : euclidean_box(c.d, static_cast<int>(c.n), c.wbar, c.alpha);
    guard_sampling(g);
    const auto chains = sample_chains(g, ctx.sampler.config, derive_seed(ctx.seed, static_cast<std::uint64_t>(c.n)),
                                      ctx.sampler.chains, ctx.workers);
    std::vector<long> vs;
    if (vertex_list) vs = *vertex_list;
    else
      for (std::size_t i = 0; i < g.size(); ++i) vs.push_back(static_cast<long>(i));
    for (long v : vs) {
      if (static_cast<std::size_t>(v) >= g.size()) throw PreconditionError("vertex outside the model");
      for (long sigma : sigmas) {
        for (double m : ms) {
          const auto est = estimate_exp_moment(chains, static_cast<VertexId>(v), static_cast<int>(sigma), m);
          const double bound = type == "hierarchical" ? constant_cH(c.wbar, c.alpha, m)
                                                      : constant_C(c.wbar, c.d, c.alpha, m);
          const bool pass = est.value.mean <= bound + 3.0 * est.value.se;
          t.rows.push_back({type, fmt(c.n), fmt(static_cast<long>(c.d)), fmt(c.alpha), fmt(c.wbar), fmt(v), fmt(sigma),
                            fmt(m), fmt(est.value.mean), fmt(est.value.se), fmt(est.ess), fmt_bool(est.reliable),
                            fmt(bound), fmt_bool(pass)});
        }
      }
    }
  }
}

// ward_scan: Monte Carlo of prod B^m det(Id - M G) on random small graphs.
void ward_scan(Obj& top, Context& ctx, ResultTable& t) {
  const long instances = top.integer("instances", 5, 1, 1000);
  const long max_vertices = top.integer("max_vertices", 5, 1, 7);
  const double wmin = top.number("wmin", 2.0, 0.0, 1e6, true);
  const double wmax = top.number("wmax", 5.0, 0.0, 1e6, true);
  const double frac = top.number("m_fraction", 0.25, 0.0, 1.0, true);
  const double cap = top.number("m_cap", 1.0, 0.0, 1e6, true);
  if (wmax < wmin) top.errors().add(top.where("wmax") + ": must be >= wmin");
  if (ctx.dry || !top.errors().empty()) return;

  t.columns = {"instance", "vertices", "edges", "samples", "mean", "se", "det_bound_violations", "route_discrepancy", "pass"};
  std::mt19937_64 rng(ctx.seed);
  for (long inst = 0; inst < instances; ++inst) {
    const auto n = 1 + static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(max_vertices));
    const auto g = random_wired_graph(n, rng, wmin, wmax);
    std::vector<double> m;
    for (const auto& e : g.edges_plus()) m.push_back(std::min(cap, frac * e.weight));
    const auto chains = sample_chains(g, ctx.sampler.config, derive_seed(ctx.seed, 2 * static_cast<std::uint64_t>(inst)),
                                      ctx.sampler.chains, ctx.workers);
    const auto w = ward_check(g, chains, m, derive_seed(ctx.seed, 2 * static_cast<std::uint64_t>(inst) + 1));
    if (w.det_bound_violations > 0) {
      t.hard_failure = true;
      t.notes.push_back("instance " + std::to_string(inst) + ": det(Id - MG) fell below prod(1 - m/W)");
    }
    const bool pass = w.holds && w.max_route_discrepancy <= 1e-9;
    t.rows.push_back({fmt(inst), fmt(g.size()), fmt(g.edges_plus().size()), fmt(w.samples), fmt(w.statistic.mean),
                      fmt(w.statistic.se), fmt(w.det_bound_violations), fmt(w.max_route_discrepancy), fmt_bool(pass)});
  }
}

// transience_bound: R^N over nested boxes, K_x, and annealed visit counts.
void transience_bound(Obj& top, Context& ctx, ResultTable& t) {
  const json* mj = top.raw("model", true);
  const auto sides = top.integers("sides", std::nullopt, 1, 4096);
  const auto x = top.integers("x", std::nullopt, 0, 4095);
  const long walks = top.integer("walks", 1000, 0, 100'000'000);
  const double holder_m = top.number("holder_m", 5.0, 1.0, 50.0);
  const bool empirical = top.boolean("empirical_kx", false);
  const long kx_max = top.integer("kx_max_vertices", 64, 1, static_cast<long>(kMaxSamplingVertices));
  if (!mj) return;
  Obj model(*mj, top.where("model"), top.errors());
  const auto type = model.string("type", std::nullopt, {"highdim", "euclidean"});
  const int d = static_cast<int>(model.integer("d", std::nullopt, 1, 6));
  const double wbar = model.number("Wbar", std::nullopt, 0.0, 1e12, true);
  const double alpha = type == "euclidean" ? model.number("alpha", std::nullopt, 1.0, 50.0, true) : 0.0;
  if (type == "euclidean") model.string("profile", "log_envelope", {"log_envelope"});
  if (type == "highdim" && d < 3) top.errors().add(top.where("model") + ".d: highdim needs d >= 3");
  if (!std::is_sorted(sides.begin(), sides.end())) top.errors().add(top.where("sides") + ": must be increasing");
  if (!sides.empty()) {
    for (long s : sides) {
      if ((sides.back() - s) % 2 != 0) top.errors().add(top.where("sides") + ": sides must share parity to nest");
    }
  }
  if (x.size() != static_cast<std::size_t>(d)) top.errors().add(top.where("x") + ": needs d coordinates");
  if (ctx.dry || !top.errors().empty()) return;

  AmbientWeight ambient;
  double constant = 0.0;
  if (type == "highdim") {
    ambient = HighDimModel{d, wbar, std::nullopt}.ambient();
    constant = std::pow(2.0, 2.0 * holder_m + 1.0);
  } else {
    ambient = model_one(d, wbar, alpha).ambient();
    constant = constant_C(wbar, d, alpha, holder_m);
  }
  const double row = ambient.row_sum(1e-10);
  const double kx = constant * row;
  t.notes.push_back("K_x = " + fmt(constant) + " * " + fmt(row));
  t.columns = {"side", "vertices", "x", "R", "method", "Kx", "bound", "visits", "visits_se", "walks_used",
               "excluded", "kx_empirical", "kx_empirical_se", "pass"};
  const long largest = sides.back();
  double previous_r = 0.0;
  for (std::size_t k = 0; k < sides.size(); ++k) {
    const long side = sides[k];
    const long offset = (largest - side) / 2;
    box_volume(d, side);
    const long xi = linear_index(x, side, offset);
    if (xi < 0) throw PreconditionError("x lies outside the box of side " + std::to_string(side));
    const auto pts = box_points(d, static_cast<int>(side), static_cast<int>(offset));
    const auto g = build_wired_graph(pts, ambient);
    const auto r = effective_resistance(g, static_cast<VertexId>(xi));
    if (k > 0 && r.value < previous_r * (1.0 - 1e-12)) {
      t.hard_failure = true;
      t.notes.push_back("R^N decreased between nested boxes");
    }
    previous_r = r.value;
    const double bound = visit_bound(kx, r);

    StopRule stop;
    std::vector<Walk> sk;
    sk.reserve(static_cast<std::size_t>(walks));
    for (long w = 0; w < walks; ++w) {
      const auto tr = simulate_vrjp(g, static_cast<VertexId>(xi), stop,
                                    derive_seed(ctx.seed, (static_cast<std::uint64_t>(side) << 32) + static_cast<std::uint64_t>(w)));
      sk.push_back({discrete_skeleton(tr), tr.truncated});
    }
    const auto visits = count_visits(sk, static_cast<VertexId>(xi), g.rho());
    const bool pass = walks == 0 || visits.visits.mean <= bound + 3.0 * visits.visits.se;

    std::string kx_emp, kx_emp_se;
    if (empirical && g.size() <= static_cast<std::size_t>(kx_max)) {
      SamplerConfig cfg = ctx.sampler.config;
      cfg.tilt = static_cast<VertexId>(xi);
      const auto chains = sample_chains(g, cfg, derive_seed(ctx.seed, 0xABCDEF00ULL + static_cast<std::uint64_t>(side)),
                                        ctx.sampler.chains, ctx.workers);
      const auto est = estimate_Kx(g, static_cast<VertexId>(xi), constant, row, chains);
      kx_emp = fmt(est.empirical.mean);
      kx_emp_se = fmt(est.empirical.se);
    }
    t.rows.push_back({fmt(side), fmt(g.size()), fmt(xi), fmt(r.value), "laplacian_solve", fmt(kx), fmt(bound),
                      walks ? fmt(visits.visits.mean) : "", walks ? fmt(visits.visits.se) : "", fmt(visits.used),
                      fmt(visits.excluded), kx_emp, kx_emp_se, fmt_bool(pass)});
  }
}

// vrjp_equivalence: VRJP skeleton vs annealed RWRC path laws; quenched visits.
void vrjp_equivalence(Obj& top, Context& ctx, ResultTable& t) {
  const json* gj = top.raw("graph", true);
  std::optional<WiredGraph> g;
  if (gj) g = read_graph_spec(*gj, top.where("graph"), top.errors());
  long start = 0;
  bool start_rho = false;
  if (const json* s = top.raw("start", false)) {
    if (s->is_string() && s->get<std::string>() == "rho") start_rho = true;
    else start = top.integer("start", 0, 0, static_cast<long>(kMaxSamplingVertices) - 1);
  }
  const int jumps = static_cast<int>(top.integer("jumps", 3, 1, 50));
  const long samples = top.integer("samples", 100000, 1, 100'000'000);
  const double tv_max = top.number("tv_threshold", 0.02, 0.0, 1.0, true);
  const long quenched = top.integer("quenched_walks", 0, 0, 100'000'000);
  if (g && !start_rho && static_cast<std::size_t>(start) >= g->size())
    top.errors().add(top.where("start") + ": outside the graph");
  if (ctx.dry || !top.errors().empty()) return;

  guard_sampling(*g);
  const VertexId s0 = start_rho ? g->rho() : static_cast<VertexId>(start);
  StopRule stop;
  stop.at_rho = false;
  stop.max_jumps = jumps;
  stop.cap_is_truncation = false;
  std::vector<Walk> vrjp;
  vrjp.reserve(static_cast<std::size_t>(samples));
  for (long k = 0; k < samples; ++k) {
    const auto tr = simulate_vrjp(*g, s0, stop, derive_seed(ctx.seed, static_cast<std::uint64_t>(k)));
    vrjp.push_back({discrete_skeleton(tr), false});
  }
  const auto annealed = annealed_rwrc(*g, ctx.sampler.config, s0, samples, stop, derive_seed(ctx.seed, 1ULL << 40));
  const double tv = total_variation(path_law(vrjp, jumps, g->rho()), path_law(annealed.walks, jumps, g->rho()));
  t.columns = {"check", "value", "se", "reference", "samples", "pass"};
  t.rows.push_back({"tv_path_law_" + std::to_string(jumps), fmt(tv), "", fmt(tv_max), fmt(samples), fmt_bool(tv <= tv_max)});
  t.notes.push_back("environment draws spaced by " + std::to_string(annealed.spacing) + " sweeps (pilot IAT " +
                    fmt(annealed.iat) + ")");

  if (quenched > 0 && !start_rho) {
    SamplerConfig cfg = ctx.sampler.config;
    cfg.thinning = 1;
    cfg.sweeps = 100;
    const auto env = sample_u_mcmc(*g, cfg, derive_seed(ctx.seed, 1ULL << 41));
    std::vector<std::pair<std::string, std::vector<double>>> cases;
    std::vector<double> w;
    for (const auto& e : g->edges_plus()) w.push_back(e.weight);
    cases.emplace_back("quenched_visits_W", w);
    cases.emplace_back("quenched_visits_sampled_c", edge_conductances(*g, env.field(env.draws() - 1).u));
    StopRule to_rho;
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
      const auto& c = cases[ci].second;
      std::vector<Walk> walks;
      walks.reserve(static_cast<std::size_t>(quenched));
      for (long k = 0; k < quenched; ++k)
        walks.push_back(simulate_rwrc(*g, c, s0, to_rho, derive_seed(ctx.seed, (2ULL + ci) << 40 | static_cast<std::uint64_t>(k))));
      const auto visits = count_visits(walks, s0, g->rho());
      double cx = 0.0;
      for (const auto& nb : g->neighbors(s0)) cx += c[nb.edge];
      const double ref = cx * effective_resistance(*g, c, s0).value;
      const bool pass = std::abs(visits.visits.mean - ref) <= 3.0 * visits.visits.se;
      t.rows.push_back({cases[ci].first, fmt(visits.visits.mean), fmt(visits.visits.se), fmt(ref), fmt(visits.used), fmt_bool(pass)});
    }
  }
}

// flow_energy: annuli flows, exact node rule, level sizes and the energy bound.
void flow_energy_kind(Obj& top, Context& ctx, ResultTable& t) {
  const auto dims = top.integers("dimensions", std::vector<long>{1, 2, 3}, 1, 3);
  const auto alphas = top.numbers("alphas", std::vector<double>{1.5, 2.0}, 1.0, 50.0);
  const long levels = top.integer("levels", 5, 1, 5);
  const double wbar = top.number("Wbar", 36.0, 0.0, 1e12, true);
  for (double a : alphas) {
    if (!(a > 1.0)) top.errors().add(top.where("alphas") + ": alpha must exceed 1");
  }
  if (ctx.dry || !top.errors().empty()) return;

  t.columns = {"d", "alpha", "K", "sizes_ok", "node_rule_exact", "energy", "bound", "pass"};
  for (long d : dims) {
    const AnnuliFlow flow(static_cast<int>(d), static_cast<int>(levels));
    bool sizes = true;
    for (int k = 0; k <= levels; ++k) sizes = sizes && flow.level_size(k) >= (std::int64_t{1} << (k * d));
    const bool exact = flow.node_rule_exact();
    if (!sizes || !exact) {
      t.hard_failure = true;
      t.notes.push_back("annuli flow invariant broken in d=" + std::to_string(d));
    }
    for (double a : alphas) {
      const RadialProfile w(LogEnvelopeProfile{wbar, a, static_cast<int>(d)});
      const double e = flow.energy([&w](double r) { return w(r); });
      const double bound = annuli_energy_bound(static_cast<int>(d), static_cast<int>(levels), wbar, a);
      t.rows.push_back({fmt(d), fmt(a), fmt(levels), fmt_bool(sizes), fmt_bool(exact), fmt(e), fmt(bound),
                        fmt_bool(sizes && exact && e <= bound)});
    }
  }
}

// monotonicity: ordered moments under edgewise dominated weights and pinnings.
void monotonicity_kind(Obj& top, Context& ctx, ResultTable& t) {
  const json* pj = top.raw("pairs", true);
  struct Pair {
    std::string label;
    std::optional<WiredGraph> plus, minus;
    long vertex;
    double m;
    int sigma;
  };
  std::vector<Pair> pairs;
  if (pj && (!pj->is_array() || pj->empty())) top.errors().add(top.where("pairs") + ": expected a nonempty array");
  if (pj && pj->is_array()) {
    for (std::size_t k = 0; k < pj->size(); ++k) {
      Obj p((*pj)[k], top.where("pairs") + "[" + std::to_string(k) + "]", top.errors());
      Pair pair;
      pair.vertex = p.integer("vertex", 0, 0, static_cast<long>(kMaxSamplingVertices) - 1);
      pair.m = p.number("m", 1.0, 1.0, 50.0);
      pair.sigma = static_cast<int>(p.integer("sigma", -1, -1, 1));
      if (pair.sigma == 0) top.errors().add(p.where("sigma") + ": must be +1 or -1");
      if (p.has("euclid_vs_hier")) {
        Obj e(*p.raw("euclid_vs_hier", true), p.where("euclid_vs_hier"), top.errors());
        const int d = static_cast<int>(e.integer("d", std::nullopt, 1, 3));
        const int n = static_cast<int>(e.integer("N", std::nullopt, 1, 6));
        const double wbar = e.number("Wbar", std::nullopt, 0.0, 1e12, true);
        const double alpha = e.number("alpha", std::nullopt, 1.0, 50.0, true);
        pair.label = "euclidean_vs_hierarchical(d=" + std::to_string(d) + ",N=" + std::to_string(n) + ")";
        if (!ctx.dry && top.errors().empty()) {
          pair.plus = euclidean_box(d, n, wbar, alpha);
          const double hmin = *std::min_element(pair.plus->pinnings().begin(), pair.plus->pinnings().end());
          const auto hier = HierarchicalModel::from_profile(model_one(d, wbar, alpha).profile, n, d, hmin);
          pair.minus = hierarchical_box_graph(hier, n, d);
        }
      } else {
        pair.label = p.string("label", "pair" + std::to_string(k));
        if (const json* gp = p.raw("plus", true)) pair.plus = read_graph_spec(*gp, p.where("plus"), top.errors());
        if (const json* gm = p.raw("minus", true)) pair.minus = read_graph_spec(*gm, p.where("minus"), top.errors());
      }
      pairs.push_back(std::move(pair));
    }
  }
  if (ctx.dry || !top.errors().empty()) return;

  t.columns = {"pair", "vertex", "sigma", "m", "plus_estimate", "plus_se", "minus_estimate", "minus_se", "pass"};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    guard_sampling(*p.plus);
    const auto r = monotonicity_check(*p.plus, *p.minus, static_cast<VertexId>(p.vertex), p.m, p.sigma,
                                      ctx.sampler.config, derive_seed(ctx.seed, k), ctx.sampler.chains, ctx.workers);
    t.rows.push_back({p.label, fmt(p.vertex), fmt(static_cast<long>(p.sigma)), fmt(p.m), fmt(r.larger.value.mean),
                      fmt(r.larger.value.se), fmt(r.smaller.value.mean), fmt(r.smaller.value.se), fmt_bool(r.ordered)});
  }
}

using Runner = void (*)(Obj&, Context&, ResultTable&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"moment_bounds", moment_bounds},     {"ward_scan", ward_scan},
      {"transience_bound", transience_bound}, {"vrjp_equivalence", vrjp_equivalence},
      {"flow_energy", flow_energy_kind},    {"monotonicity", monotonicity_kind},
  };
  return table;
}

// Parses (and, unless dry, runs) a config. Schema errors end up in `errors`.
ResultTable process(const std::string& text, int workers, bool dry, Errors& errors, std::string* output) {
  ResultTable table;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    errors.add(std::string("config is not valid JSON: ") + e.what());
    return table;
  }
  Obj top(j, "config", errors);
  if (!j.is_object()) return table;
  const long version = top.integer("version", std::nullopt, 0, 1'000'000);
  if (top.has("version") && version != kConfigVersion)
    errors.add("config.version: unsupported version " + std::to_string(version));
  std::vector<std::string> kinds;
  for (const auto& [k, _] : runners()) kinds.push_back(k);
  table.kind = top.string("kind", std::nullopt, kinds);
  Context ctx;
  ctx.seed = top.seed("seed");
  ctx.workers = workers;
  ctx.dry = dry;
  ctx.sampler = read_sampler(top);
  const auto out = top.string("output", std::nullopt);
  if (output) *output = out;
  const auto it = runners().find(table.kind);
  if (it == runners().end()) return table;
  if (!errors.empty()) ctx.dry = true;
  it->second(top, ctx, table);
  return table;
}

bool parses_as_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc() && r.ptr == end;
}

}  // namespace

ValidationResult validate_config(const std::string& json_text) {
  Errors errors;
  {
    std::string out;
    process(json_text, 1, true, errors, &out);
  }
  return {errors.empty(), errors.list()};
}

ResultTable run_experiment(const std::string& json_text, int workers) {
  Errors errors;
  ResultTable table;
  {
    Errors check;
    process(json_text, workers, true, check, nullptr);
    if (!check.empty()) {
      std::string msg = "invalid config:";
      for (const auto& e : check.list()) msg += "\n  " + e;
      throw PreconditionError(msg);
    }
  }
  table = process(json_text, workers, false, errors, nullptr);
  if (!errors.empty()) throw PreconditionError(errors.list().front());
  return table;
}

void write_csv(std::ostream& out, const ResultTable& table) {
  for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << table.columns[k];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << '\n';
  }
}

void write_json(std::ostream& out, const ResultTable& table) {
  json j;
  j["kind"] = table.kind;
  j["columns"] = table.columns;
  j["hard_failure"] = table.hard_failure;
  j["notes"] = table.notes;
  j["rows"] = json::array();
  for (const auto& row : table.rows) {
    json r = json::object();
    for (std::size_t k = 0; k < row.size() && k < table.columns.size(); ++k) {
      double x = 0.0;
      if (row[k] == "true" || row[k] == "false") r[table.columns[k]] = row[k] == "true";
      else if (parses_as_number(row[k], x) && std::isfinite(x)) r[table.columns[k]] = x;
      else r[table.columns[k]] = row[k];
    }
    j["rows"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

int run_config_file(const std::string& path, int workers, std::ostream& log) {
  std::ifstream in(path);
  if (!in) {
    log << "error: cannot read " << path << '\n';
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();
  const auto v = validate_config(text);
  if (!v.ok) {
    for (const auto& e : v.errors) log << "error: " << e << '\n';
    return 1;
  }
  std::string output;
  {
    Errors ignore;
    process(text, workers, true, ignore, &output);
  }
  ResultTable table;
  try {
    table = run_experiment(text, workers);
  } catch (const ResourceGuardError& e) {
    log << "error: resource guard: " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
  const std::filesystem::path base(output);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  {
    std::ofstream csv(output + ".csv");
    write_csv(csv, table);
  }
  {
    std::ofstream js(output + ".json");
    write_json(js, table);
  }
  std::size_t failed = 0;
  const auto pass_col = std::find(table.columns.begin(), table.columns.end(), "pass");
  if (pass_col != table.columns.end()) {
    const auto idx = static_cast<std::size_t>(pass_col - table.columns.begin());
    for (const auto& row : table.rows) failed += row[idx] != "true";
  }
  log << table.kind << ": " << table.rows.size() << " rows, " << failed << " failing; wrote " << output
      << ".csv and " << output << ".json\n";
  for (const auto& n : table.notes) log << "  " << n << '\n';
  if (table.hard_failure) {
    log << "hard invariant failure\n";
    return 2;
  }
  return 0;
}

WiredGraph random_wired_graph(std::size_t n, std::mt19937_64& rng, double wmin, double wmax, double edge_prob,
                              double pin_prob) {
  if (n == 0) throw PreconditionError("random graph needs at least one vertex");
  std::uniform_real_distribution<double> weight(wmin, wmax);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (coin(rng) < edge_prob) edges.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b), weight(rng)});
      }
    }
    std::vector<double> pins(n, 0.0);
    bool any = false;
    for (auto& h : pins) {
      if (coin(rng) < pin_prob) {
        h = weight(rng);
        any = true;
      }
    }
    if (!any) pins[static_cast<std::size_t>(rng() % n)] = weight(rng);
    try {
      return WiredGraph(n, std::move(edges), std::move(pins));
    } catch (const PreconditionError&) {
      // disconnected draw; try again
    }
  }
  throw PreconditionError("could not draw a connected wired graph");
}

KxEstimate estimate_Kx(const WiredGraph& g, VertexId x, double constant, double row_sum,
                       std::span<const SampleBatch> chains) {
  KxEstimate out;
  out.analytic = constant * row_sum;
  const VertexId rho = g.rho();
  bool first = true;
  for (const auto& e : g.edges_plus()) {
    const auto est = estimate_series(chains, [&](const SampleBatch& b, std::size_t d) {
      auto u = [&](VertexId v) { return v == rho ? 0.0 : b.at(d, static_cast<std::size_t>(v)); };
      const double base = u(e.a) + u(e.b);
      double s = 0.0;
      for (const auto& nb : g.neighbors(x)) s += nb.weight * std::exp(u(x) + u(nb.vertex) - base);
      return s;
    });
    if (first || est.value.mean > out.empirical.mean) {
      out.empirical = est.value;
      out.worst_edge = e;
      first = false;
    }
  }
  out.ratio = out.empirical.mean / out.analytic;
  return out;
}

std::string oracle_report(const WiredGraph& g) {
  std::ostringstream os;
  os << "graph: " << g.size() << " inner vertices, " << g.edges_plus().size() << " edges in E_+, fingerprint "
     << g.fingerprint() << '\n';
  if (g.size() + 1 <= kSpanningTreeOracleLimit) {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
      if (k > 0)
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = unif(rng);
      const double det = std::exp(log_det(laplacian(g, u)));
      const double trees = spanning_tree_sum(g, u);
      os << "matrix-tree " << (k == 0 ? "u=0" : "random u") << ": det D = " << format_double(det)
         << ", tree sum = " << format_double(trees) << ", rel diff = " << format_double(std::abs(det - trees) / trees)
         << '\n';
    }
    os << "spanning trees: " << spanning_tree_count(g) << '\n';
  } else {
    os << "matrix-tree: skipped (enumeration limited to " << kSpanningTreeOracleLimit << " vertices)\n";
  }
  if (g.size() == 1) {
    const double h = g.pinning(0);
    os << "quadrature: mass = " << format_double(quadrature_1v(h, Normalization{}).value)
       << ", E[e^u] = " << format_double(quadrature_1v(h, ExpMoment{1, 1.0}).value)
       << ", E[e^-u] = " << format_double(quadrature_1v(h, ExpMoment{-1, 1.0}).value)
       << " (closed form " << format_double(1.0 + 1.0 / h) << ")\n";
  } else if (g.size() == 2) {
    os << "quadrature: mass = " << format_double(quadrature_2v(g, [](double, double) { return 1.0; }))
       << ", E[e^u_0] = " << format_double(quadrature_2v(g, [](double a, double) { return std::exp(a); }))
       << ", E[e^u_1] = " << format_double(quadrature_2v(g, [](double, double b) { return std::exp(b); })) << '\n';
  }
  return os.str();
}

}  // namespace vrjp
