#include "vrjp/electrical.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

#include <boost/multiprecision/cpp_int.hpp>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

struct GroundedSystem {
  std::vector<int> index;  // inner vertex -> row, -1 when cut off from rho
  Eigen::MatrixXd laplacian;
};

GroundedSystem grounded_system(const WiredGraph& g, std::span<const double> c) {
  const auto& edges = g.edges_plus();
  if (c.size() != edges.size()) throw PreconditionError("conductances must be indexed by E_+");
  for (double x : c) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw PreconditionError("conductances must be finite and nonnegative");
  }
  const std::size_t n = g.size();
  std::vector<bool> seen(n + 1, false);
  std::queue<VertexId> todo;
  todo.push(g.rho());
  seen[n] = true;
  while (!todo.empty()) {
    const VertexId v = todo.front();
    todo.pop();
    for (const auto& nb : g.neighbors(v)) {
      if (c[nb.edge] > 0.0 && !seen[static_cast<std::size_t>(nb.vertex)]) {
        seen[static_cast<std::size_t>(nb.vertex)] = true;
        todo.push(nb.vertex);
      }
    }
  }
  GroundedSystem sys;
  sys.index.assign(n, -1);
  int rows = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) sys.index[i] = rows++;
  }
  sys.laplacian = Eigen::MatrixXd::Zero(rows, rows);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (c[k] == 0.0) continue;
    const int a = sys.index[static_cast<std::size_t>(edges[k].a)];
    if (a < 0) continue;
    sys.laplacian(a, a) += c[k];
    if (edges[k].b == g.rho()) continue;
    const int b = sys.index[static_cast<std::size_t>(edges[k].b)];
    sys.laplacian(b, b) += c[k];
    sys.laplacian(a, b) -= c[k];
    sys.laplacian(b, a) -= c[k];
  }
  return sys;
}

// Potentials (v_rho = 0) for unit current from x to rho; empty when x is cut off.
std::vector<double> unit_potential(const WiredGraph& g, std::span<const double> c, VertexId x) {
  if (x < 0 || static_cast<std::size_t>(x) >= g.size()) throw PreconditionError("vertex out of range");
  const auto sys = grounded_system(g, c);
  const int row = sys.index[static_cast<std::size_t>(x)];
  if (row < 0) return {};
  Eigen::LLT<Eigen::MatrixXd> llt(sys.laplacian);
  if (llt.info() != Eigen::Success) throw FactorizationError("grounded Laplacian is not positive definite");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.laplacian.rows());
  rhs[row] = 1.0;
  const Eigen::VectorXd v = llt.solve(rhs);
  std::vector<double> out(g.size() + 1, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (sys.index[i] >= 0) out[i] = v[sys.index[i]];
  }
  return out;
}

std::function<double(VertexId, VertexId)> conductance_lookup(const WiredGraph& g, std::span<const double> c) {
  std::map<std::pair<VertexId, VertexId>, double> table;
  const auto& edges = g.edges_plus();
  for (std::size_t k = 0; k < edges.size(); ++k) table[{edges[k].a, edges[k].b}] = c[k];
  return [table = std::move(table)](VertexId i, VertexId j) {
    const auto it = table.find({std::min(i, j), std::max(i, j)});
    return it == table.end() ? 0.0 : it->second;
  };
}

// Cubes {lo..hi}^d with a sign; an annulus is a signed combination of cubes.
struct SignedCube {
  int sign;
  std::int64_t lo, hi;
};

std::vector<SignedCube> level_cubes(int k) {
  if (k == 0) return {{1, 0, 0}};
  const std::int64_t a = std::int64_t{1} << k;
  const std::int64_t b = std::int64_t{1} << (k - 1);
  return {{1, -a + 1, a}, {-1, -b + 1, b}};
}

// #{(p, q) in [lo1,hi1] x [lo2,hi2] : |p - q| <= r}
std::int64_t interval_pairs(std::int64_t lo1, std::int64_t hi1, std::int64_t lo2, std::int64_t hi2, std::int64_t r) {
  std::int64_t s = 0;
  for (std::int64_t p = lo1; p <= hi1; ++p) {
    const std::int64_t a = std::max(lo2, p - r);
    const std::int64_t b = std::min(hi2, p + r);
    if (b >= a) s += b - a + 1;
  }
  return s;
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t out = 1;
  for (int k = 0; k < e; ++k) out *= base;
  return out;
}

}  // namespace

ResistanceResult effective_resistance(const WiredGraph& g, std::span<const double> conductances, VertexId x,
                                      std::string source) {
  ResistanceResult out;
  out.fingerprint = g.fingerprint();
  out.source = std::move(source);
  const auto v = unit_potential(g, conductances, x);
  if (v.empty()) {
    out.connected = false;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = v[static_cast<std::size_t>(x)];
  return out;
}

ResistanceResult effective_resistance(const WiredGraph& g, VertexId x) {
  std::vector<double> w;
  for (const auto& e : g.edges_plus()) w.push_back(e.weight);
  return effective_resistance(g, w, x, "W");
}

void FlowAssignment::set(VertexId i, VertexId j, double theta) {
  if (i == j) throw PreconditionError("flow on a self-loop");
  if (i < j) entries_[{i, j}] = theta;
  else entries_[{j, i}] = -theta;
}

double FlowAssignment::operator()(VertexId i, VertexId j) const {
  const auto it = entries_.find({std::min(i, j), std::max(i, j)});
  if (it == entries_.end()) return 0.0;
  return i < j ? it->second : -it->second;
}

std::map<VertexId, double> FlowAssignment::divergence() const {
  std::map<VertexId, double> div;
  for (const auto& [key, theta] : entries_) {
    div[key.first] += theta;
    div[key.second] -= theta;
  }
  return div;
}

double FlowAssignment::node_rule_error(const std::function<bool(VertexId)>& exempt) const {
  auto div = divergence();
  div.try_emplace(source_, 0.0);
  if (sink_) div.try_emplace(*sink_, 0.0);
  double err = 0.0;
  for (const auto& [v, d] : div) {
    if (exempt && exempt(v)) continue;
    double target = 0.0;
    if (v == source_) target += 1.0;
    if (sink_ && v == *sink_) target -= 1.0;
    err = std::max(err, std::abs(d - target));
  }
  return err;
}

FlowAssignment harmonic_flow(const WiredGraph& g, std::span<const double> conductances, VertexId x) {
  const auto v = unit_potential(g, conductances, x);
  if (v.empty()) throw PreconditionError("x is not connected to rho");
  FlowAssignment flow(x, g.rho());
  const auto& edges = g.edges_plus();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (conductances[k] == 0.0) continue;
    const double theta = conductances[k] * (v[static_cast<std::size_t>(edges[k].a)] - v[static_cast<std::size_t>(edges[k].b)]);
    if (theta != 0.0) flow.set(edges[k].a, edges[k].b, theta);
  }
  return flow;
}

double flow_energy(const FlowAssignment& flow, const std::function<double(VertexId, VertexId)>& conductance) {
  double e = 0.0;
  for (const auto& [key, theta] : flow.entries()) {
    if (theta == 0.0) continue;
    const double c = conductance(key.first, key.second);
    if (!(c > 0.0)) return std::numeric_limits<double>::infinity();
    e += theta * theta / c;
  }
  return e;
}

double thomson_upper_bound(const WiredGraph& g, const FlowAssignment& flow, std::span<const double> conductances) {
  if (conductances.size() != g.edges_plus().size()) throw PreconditionError("conductances must be indexed by E_+");
  if (!flow.sink() || *flow.sink() != g.rho()) throw PreconditionError("Thomson bound needs a unit flow into rho");
  if (flow.node_rule_error() > 1e-9) throw PreconditionError("flow violates the node rule");
  return flow_energy(flow, conductance_lookup(g, conductances));
}

RayleighResult rayleigh_monotonicity_check(const WiredGraph& g, std::span<const double> c_low,
                                           std::span<const double> c_high, VertexId x) {
  if (c_low.size() != c_high.size()) throw PreconditionError("conductance vectors differ in size");
  for (std::size_t k = 0; k < c_low.size(); ++k) {
    if (c_low[k] > c_high[k]) throw PreconditionError("Rayleigh check needs c_low <= c_high componentwise");
  }
  RayleighResult out;
  out.low = effective_resistance(g, c_low, x).value;
  out.high = effective_resistance(g, c_high, x).value;
  out.holds = out.high <= out.low * (1.0 + 1e-12);
  return out;
}

double visit_bound(double k_x, const ResistanceResult& r) {
  if (!(k_x > 0.0) || !(r.value > 0.0)) throw PreconditionError("visit bound needs positive inputs");
  return k_x * r.value;
}

AnnuliFlow::AnnuliFlow(int dimension, int levels) : d_(dimension), k_(levels) {
  if (dimension < 1 || levels < 1) throw PreconditionError("annuli flow needs d >= 1 and K >= 1");
  // |B_{K+1}| |B_{K+2}| must fit comfortably in 64 bits
  if (dimension * (levels + 3) > 30) throw ResourceGuardError("annuli flow too large for exact level arithmetic");
}

std::int64_t AnnuliFlow::level_size(int k) const {
  if (k < 0) throw PreconditionError("negative level");
  if (k == 0) return 1;
  return ipow(std::int64_t{1} << (k + 1), d_) - ipow(std::int64_t{1} << k, d_);
}

int AnnuliFlow::level_of(const Point& p) const {
  if (p.size() != static_cast<std::size_t>(d_)) throw PreconditionError("point dimension mismatch");
  bool origin = true;
  std::int64_t need = 0;  // smallest k with p in (-2^k, 2^k]^d
  for (int x : p) {
    if (x != 0) origin = false;
    int k = 0;
    while (!(x > -(std::int64_t{1} << k) && x <= (std::int64_t{1} << k))) ++k;
    need = std::max<std::int64_t>(need, k);
  }
  if (origin) return 0;
  return need == 0 ? -1 : static_cast<int>(need);
}

double AnnuliFlow::theta(int k) const {
  return 1.0 / (static_cast<double>(level_size(k)) * static_cast<double>(level_size(k + 1)));
}

bool AnnuliFlow::node_rule_exact() const {
  using boost::multiprecision::cpp_rational;
  auto th = [this](int k) { return cpp_rational(1, cpp_rational::value_type(level_size(k)) * level_size(k + 1)); };
  if (cpp_rational(level_size(1)) * th(0) != 1) return false;
  for (int k = 1; k < k_; ++k) {
    const cpp_rational out = cpp_rational(level_size(k + 1)) * th(k);
    const cpp_rational in = cpp_rational(level_size(k - 1)) * th(k - 1);
    if (out - in != 0) return false;
  }
  return true;
}

std::vector<std::int64_t> AnnuliFlow::distance_histogram(int k) const {
  if (k < 0 || k >= k_) throw PreconditionError("level out of range");
  const auto inner = level_cubes(k);
  const auto outer = level_cubes(k + 1);
  const std::int64_t max_r = std::int64_t{1} << (k + 2);
  auto pairs_within = [&](std::int64_t r) {
    std::int64_t s = 0;
    for (const auto& a : inner) {
      for (const auto& b : outer) s += a.sign * b.sign * ipow(interval_pairs(a.lo, a.hi, b.lo, b.hi, r), d_);
    }
    return s;
  };
  std::vector<std::int64_t> hist(static_cast<std::size_t>(max_r) + 1, 0);
  std::int64_t prev = pairs_within(0);
  hist[0] = prev;
  for (std::int64_t r = 1; r <= max_r; ++r) {
    const std::int64_t cur = pairs_within(r);
    hist[static_cast<std::size_t>(r)] = cur - prev;
    prev = cur;
  }
  return hist;
}

double AnnuliFlow::energy(const std::function<double(double)>& w) const {
  double e = 0.0;
  for (int k = 0; k < k_; ++k) {
    const auto hist = distance_histogram(k);
    const double th = theta(k);
    double s = 0.0;
    for (std::size_t r = 0; r < hist.size(); ++r) {
      if (hist[r] == 0) continue;
      const double wr = r == 0 ? 0.0 : w(static_cast<double>(r));
      if (!(wr > 0.0)) return std::numeric_limits<double>::infinity();
      s += static_cast<double>(hist[r]) / wr;
    }
    e += th * th * s;
  }
  return e;
}

VertexId AnnuliFlow::id_of(const Point& p) const {
  const std::int64_t side = std::int64_t{1} << (k_ + 1);
  const std::int64_t offset = -(std::int64_t{1} << k_) + 1;
  std::int64_t id = 0;
  std::int64_t scale = 1;
  for (int x : p) {
    const std::int64_t c = x - offset;
    if (c < 0 || c >= side) throw PreconditionError("point outside the materialized box");
    id += c * scale;
    scale *= side;
  }
  return static_cast<VertexId>(id);
}

Point AnnuliFlow::point_of(VertexId id) const {
  const std::int64_t side = std::int64_t{1} << (k_ + 1);
  const std::int64_t offset = -(std::int64_t{1} << k_) + 1;
  Point p(static_cast<std::size_t>(d_));
  std::int64_t rest = id;
  for (int l = 0; l < d_; ++l) {
    p[static_cast<std::size_t>(l)] = static_cast<int>(offset + rest % side);
    rest /= side;
  }
  return p;
}

FlowAssignment AnnuliFlow::materialize(std::int64_t max_pairs) const {
  std::int64_t pairs = 0;
  for (int k = 0; k < k_; ++k) pairs += level_size(k) * level_size(k + 1);
  if (pairs > max_pairs) throw ResourceGuardError("annuli flow too large to materialize");
  const int side = 1 << (k_ + 1);
  const auto pts = box_points(d_, side, -(1 << k_) + 1);
  std::vector<std::vector<VertexId>> by_level(static_cast<std::size_t>(k_) + 1);
  for (const auto& p : pts) {
    const int l = level_of(p);
    if (l >= 0 && l <= k_) by_level[static_cast<std::size_t>(l)].push_back(id_of(p));
  }
  FlowAssignment flow(id_of(Point(static_cast<std::size_t>(d_), 0)), std::nullopt);
  for (int k = 0; k < k_; ++k) {
    const double th = theta(k);
    for (VertexId i : by_level[static_cast<std::size_t>(k)]) {
      for (VertexId j : by_level[static_cast<std::size_t>(k) + 1]) flow.set(i, j, th);
    }
  }
  return flow;
}

double annuli_energy_bound(int dimension, int levels, double wbar, double alpha) {
  if (!(wbar > 0.0)) throw PreconditionError("wbar must be positive");
  double s = 0.0;
  for (int k = 0; k < levels; ++k) s += std::pow(static_cast<double>(k) + 2.0, -alpha);
  return std::ldexp(1.0, 3 * dimension) / wbar * s;
}

void write_flow(std::ostream& out, const FlowAssignment& flow) {
  out << "# source=" << flow.source() << " sink=";
  if (flow.sink()) out << *flow.sink();
  else out << "infinity";
  out << '\n';
  for (const auto& [key, theta] : flow.entries()) {
    out << "flow " << key.first << ' ' << key.second << ' ' << format_double(theta) << '\n';
  }
}

}  // namespace vrjp
