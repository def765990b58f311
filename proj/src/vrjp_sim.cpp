#include "vrjp/vrjp_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

void check_start(const WiredGraph& g, VertexId start) {
  if (start < 0 || start > g.rho()) throw PreconditionError("start vertex out of range");
}

double uniform01(std::mt19937_64& rng) {
  // (0, 1]: safe for -log
  return 1.0 - std::generate_canonical<double, 53>(rng);
}

std::string vertex_label(VertexId v, VertexId rho) { return v == rho ? "r" : std::to_string(v); }

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::hit_rho: return "hit_rho";
    case Termination::horizon: return "horizon";
    case Termination::step_cap: return "step_cap";
  }
  return "?";
}

Trace simulate_vrjp(const WiredGraph& g, VertexId start, const StopRule& stop, std::uint64_t seed) {
  check_start(g, start);
  std::mt19937_64 rng(seed);
  std::vector<double> local(g.size() + 1, 0.0);
  Trace trace;
  trace.start = start;
  VertexId at = start;
  double clock = 0.0;
  std::vector<double> rates;
  for (long jumps = 0;; ++jumps) {
    if (jumps >= stop.max_jumps) {
      trace.reason = Termination::step_cap;
      trace.truncated = stop.cap_is_truncation;
      break;
    }
    const auto& nbs = g.neighbors(at);
    rates.resize(nbs.size());
    double total = 0.0;
    for (std::size_t k = 0; k < nbs.size(); ++k) {
      rates[k] = nbs[k].weight * (1.0 + local[static_cast<std::size_t>(nbs[k].vertex)]);
      total += rates[k];
    }
    const double dur = -std::log(uniform01(rng)) / total;
    if (stop.time_horizon && clock + dur >= *stop.time_horizon) {
      const double cut = *stop.time_horizon - clock;
      if (cut > 0.0) trace.sojourns.push_back({at, cut});
      trace.reason = Termination::horizon;
      break;
    }
    clock += dur;
    local[static_cast<std::size_t>(at)] += dur;
    trace.sojourns.push_back({at, dur});
    double pick = std::generate_canonical<double, 53>(rng) * total;
    std::size_t k = 0;
    while (k + 1 < nbs.size() && pick >= rates[k]) pick -= rates[k++];
    at = nbs[k].vertex;
    if (stop.at_rho && at == g.rho()) {
      trace.reason = Termination::hit_rho;
      break;
    }
  }
  trace.final_vertex = at;
  return trace;
}

std::vector<VertexId> discrete_skeleton(const Trace& trace) {
  std::vector<VertexId> out;
  out.reserve(trace.sojourns.size() + 1);
  for (const auto& s : trace.sojourns) out.push_back(s.vertex);
  if (trace.reason != Termination::horizon || trace.sojourns.empty()) out.push_back(trace.final_vertex);
  return out;
}

Walk simulate_rwrc(const WiredGraph& g, std::span<const double> conductances, VertexId start, const StopRule& stop,
                   std::uint64_t seed) {
  check_start(g, start);
  const auto& edges = g.edges_plus();
  if (conductances.size() != edges.size()) throw PreconditionError("conductances must be indexed by E_+");
  for (double c : conductances) {
    if (!(c > 0.0) || !std::isfinite(c)) throw PreconditionError("conductances must be positive and finite");
  }
  // cumulative conductances per vertex
  std::vector<std::vector<double>> cumulative(g.size() + 1);
  for (std::size_t v = 0; v <= g.size(); ++v) {
    double acc = 0.0;
    for (const auto& nb : g.neighbors(static_cast<VertexId>(v))) {
      acc += conductances[nb.edge];
      cumulative[v].push_back(acc);
    }
  }
  std::mt19937_64 rng(seed);
  Walk walk;
  VertexId at = start;
  walk.path.push_back(at);
  for (long step = 0;; ++step) {
    if (step >= stop.max_jumps) {
      walk.truncated = stop.cap_is_truncation;
      break;
    }
    const auto& cum = cumulative[static_cast<std::size_t>(at)];
    const double pick = std::generate_canonical<double, 53>(rng) * cum.back();
    auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), pick) - cum.begin());
    k = std::min(k, cum.size() - 1);
    at = g.neighbors(at)[k].vertex;
    walk.path.push_back(at);
    if (stop.at_rho && at == g.rho()) break;
  }
  return walk;
}

AnnealedWalks annealed_rwrc(const WiredGraph& g, const SamplerConfig& env, VertexId start, long n_walks,
                            const StopRule& stop, std::uint64_t seed) {
  check_start(g, start);
  if (n_walks <= 0) throw PreconditionError("need at least one walk");
  SamplerConfig cfg = env;
  cfg.tilt = start == g.rho() ? std::nullopt : std::optional<VertexId>(start);
  cfg.thinning = 1;

  // pilot run for the mixing time
  SamplerConfig pilot = cfg;
  pilot.sweeps = std::max<long>(2000, std::min<long>(20000, 20 * n_walks));
  const auto pilot_batch = sample_u_mcmc(g, pilot, derive_seed(seed, 0));
  AnnealedWalks out;
  out.iat = 1.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    out.iat = std::max(out.iat, integrated_autocorrelation_time(pilot_batch.coordinate(i)));
  out.spacing = std::max<long>(1, static_cast<long>(std::ceil(10.0 * out.iat)));

  cfg.thinning = out.spacing;
  cfg.sweeps = out.spacing * n_walks;
  const auto batch = sample_u_mcmc(g, cfg, derive_seed(seed, 1));
  out.acceptance_rate = batch.acceptance_rate;
  out.diagnostics_ok = batch.diagnostics_ok && pilot_batch.diagnostics_ok;
  if (!out.diagnostics_ok) throw std::runtime_error("environment sampler diagnostics failed");

  out.walks.reserve(static_cast<std::size_t>(n_walks));
  for (std::size_t d = 0; d < batch.draws(); ++d) {
    const auto c = edge_conductances(g, batch.field(d).u);
    out.walks.push_back(simulate_rwrc(g, c, start, stop, derive_seed(seed, 2 + d)));
  }
  return out;
}

VisitStats count_visits(std::span<const Walk> walks, VertexId x, VertexId rho) {
  VisitStats out;
  std::vector<double> counts;
  for (const auto& w : walks) {
    if (w.truncated) {
      ++out.excluded;
      continue;
    }
    long n = 0;
    for (std::size_t k = 0; k < w.path.size(); ++k) {
      if (k > 0 && w.path[k] == rho) break;
      if (w.path[k] == x) ++n;
    }
    counts.push_back(static_cast<double>(n));
  }
  out.used = counts.size();
  if (!counts.empty()) {
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= static_cast<double>(counts.size());
    double ss = 0.0;
    for (double c : counts) ss += (c - mean) * (c - mean);
    const double n = static_cast<double>(counts.size());
    out.visits = {n, mean, n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0};
  }
  return out;
}

std::map<std::string, long> path_law(std::span<const Walk> walks, int jumps, VertexId rho) {
  std::map<std::string, long> law;
  for (const auto& w : walks) {
    std::string key;
    const std::size_t len = std::min(w.path.size(), static_cast<std::size_t>(jumps) + 1);
    for (std::size_t k = 0; k < len; ++k) {
      if (k) key += '-';
      key += vertex_label(w.path[k], rho);
    }
    ++law[key];
  }
  return law;
}

std::vector<Walk> skeleton_walks(std::span<const Trace> traces) {
  std::vector<Walk> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back({discrete_skeleton(t), t.truncated});
  return out;
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << "# start=" << trace.start << " reason=" << to_string(trace.reason) << " final=" << trace.final_vertex
      << " truncated=" << (trace.truncated ? 1 : 0) << '\n';
  for (const auto& s : trace.sojourns) out << s.vertex << ' ' << format_double(s.duration) << '\n';
}

void write_path_law(std::ostream& out, const std::map<std::string, long>& law) {
  out << "path,count\n";
  for (const auto& [path, count] : law) out << path << ',' << count << '\n';
}

}  // namespace vrjp
