#pragma once

// Exact event-driven VRJP simulation, its discrete skeleton, random walks in
// (random) conductances, and visit / path-law statistics.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrjp/graph.hpp"
#include "vrjp/sampler.hpp"
#include "vrjp/stats.hpp"

namespace vrjp {

enum class Termination { hit_rho, horizon, step_cap };

const char* to_string(Termination t);

struct StopRule {
  bool at_rho = true;                  // stop on the first arrival at rho
  std::optional<double> time_horizon;  // VRJP only
  long max_jumps = 1'000'000;
  bool cap_is_truncation = true;       // false: reaching max_jumps is the intended stop
};

struct Sojourn {
  VertexId vertex = 0;
  double duration = 0.0;
};

struct Trace {
  VertexId start = 0;
  std::vector<Sojourn> sojourns;  // completed sojourns, plus a cut one at a horizon
  VertexId final_vertex = 0;
  Termination reason = Termination::hit_rho;
  bool truncated = false;
};

/// Jump rate i -> j is W_ij (1 + L_j). `start` may be rho. Deterministic per seed.
Trace simulate_vrjp(const WiredGraph& g, VertexId start, const StopRule& stop, std::uint64_t seed);

/// Vertex sequence of the jumps (durations dropped).
std::vector<VertexId> discrete_skeleton(const Trace& trace);

struct Walk {
  std::vector<VertexId> path;
  bool truncated = false;
};

/// Markov chain with steps c_ij / c(i); conductances indexed like edges_plus().
Walk simulate_rwrc(const WiredGraph& g, std::span<const double> conductances, VertexId start, const StopRule& stop,
                   std::uint64_t seed);

struct AnnealedWalks {
  std::vector<Walk> walks;
  double iat = 0.0;       // pilot integrated autocorrelation time (sweeps, max over coordinates)
  long spacing = 0;       // sweeps between environment draws
  double acceptance_rate = 0.0;
  bool diagnostics_ok = true;
};

/// One RWRC per environment draw. The environment is tilted by e^{u_start}
/// unless start == rho; draws are spaced by at least 10 x the pilot IAT.
AnnealedWalks annealed_rwrc(const WiredGraph& g, const SamplerConfig& env, VertexId start, long n_walks,
                            const StopRule& stop, std::uint64_t seed);

struct VisitStats {
  MeanEstimate visits;
  std::size_t used = 0;
  std::size_t excluded = 0;  // truncated walks
  double excluded_fraction() const {
    const auto t = used + excluded;
    return t == 0 ? 0.0 : static_cast<double>(excluded) / static_cast<double>(t);
  }
};

/// Visits to x before the first arrival at rho; truncated walks are excluded.
VisitStats count_visits(std::span<const Walk> walks, VertexId x, VertexId rho);

/// Empirical law of the first `jumps` jumps ("0-1-r"; rho written as r).
std::map<std::string, long> path_law(std::span<const Walk> walks, int jumps, VertexId rho);

/// Wraps VRJP skeletons as walks.
std::vector<Walk> skeleton_walks(std::span<const Trace> traces);

/// `# start=.. reason=.. final=..` header then `v duration` per sojourn.
void write_trace(std::ostream& out, const Trace& trace);

/// CSV with header `path,count`.
void write_path_law(std::ostream& out, const std::map<std::string, long>& law);

}  // namespace vrjp
