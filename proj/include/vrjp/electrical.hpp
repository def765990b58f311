#pragma once

// Electrical-network tools on wired graphs: effective resistance, unit flows
// and their energies, Rayleigh monotonicity, and the annuli flow on Z^d.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vrjp/graph.hpp"
#include "vrjp/lattice.hpp"
#include "vrjp/weights.hpp"

namespace vrjp {

struct ResistanceResult {
  double value = 0.0;  // +inf when x is cut off from rho
  bool connected = true;
  std::string fingerprint;
  std::string source;  // "W" for the deterministic weights, "c" for sampled conductances
};

/// R(c, x <-> rho) from one grounded Laplacian solve. `conductances` is
/// indexed like g.edges_plus(); zero entries are treated as absent edges.
ResistanceResult effective_resistance(const WiredGraph& g, std::span<const double> conductances, VertexId x,
                                      std::string source = "c");

/// Same with the deterministic weights W as conductances.
ResistanceResult effective_resistance(const WiredGraph& g, VertexId x);

/// Antisymmetric edge flow. Only theta(a, b) with a < b is stored.
class FlowAssignment {
 public:
  FlowAssignment(VertexId source, std::optional<VertexId> sink) : source_(source), sink_(sink) {}

  void set(VertexId i, VertexId j, double theta);
  double operator()(VertexId i, VertexId j) const;
  VertexId source() const { return source_; }
  std::optional<VertexId> sink() const { return sink_; }  // nullopt: infinity
  const std::map<std::pair<VertexId, VertexId>, double>& entries() const { return entries_; }

  /// sum_j theta(v, j) for every vertex touching the flow.
  std::map<VertexId, double> divergence() const;

  /// Largest |div(v) - (1{v=source} - 1{v=sink})| over vertices not exempted.
  double node_rule_error(const std::function<bool(VertexId)>& exempt = {}) const;

 private:
  VertexId source_;
  std::optional<VertexId> sink_;
  std::map<std::pair<VertexId, VertexId>, double> entries_;
};

/// theta = c (v_i - v_j) for the unit-current potential v; source x, sink rho.
FlowAssignment harmonic_flow(const WiredGraph& g, std::span<const double> conductances, VertexId x);

/// sum over unordered pairs theta^2 / c; +inf if a flow-carrying pair has c = 0.
double flow_energy(const FlowAssignment& flow, const std::function<double(VertexId, VertexId)>& conductance);

/// Energy of a unit flow x -> rho on g; rejects flows violating the node rule
/// (tolerance 1e-9) or not sourced at x / sunk at rho.
double thomson_upper_bound(const WiredGraph& g, const FlowAssignment& flow, std::span<const double> conductances);

struct RayleighResult {
  double low = 0.0;   // R under the smaller conductances
  double high = 0.0;  // R under the larger conductances
  bool holds = false; // high <= low (1e-12 relative rounding slack)
};

/// Throws PreconditionError unless c_low <= c_high componentwise.
RayleighResult rayleigh_monotonicity_check(const WiredGraph& g, std::span<const double> c_low,
                                           std::span<const double> c_high, VertexId x);

/// K_x * R.
double visit_bound(double k_x, const ResistanceResult& r);

/// Unit flow from the origin of Z^d to infinity through the annuli
/// B_0 = {0}, B_k = (-2^k, 2^k]^d minus (-2^{k-1}, 2^{k-1}]^d, levels 0..K.
class AnnuliFlow {
 public:
  AnnuliFlow(int dimension, int levels);

  int dimension() const { return d_; }
  int levels() const { return k_; }

  /// |B_k| for 0 <= k <= K + 1.
  std::int64_t level_size(int k) const;

  /// Level of a point, or -1 when it lies in no annulus.
  int level_of(const Point& p) const;

  /// theta between consecutive levels k and k+1.
  double theta(int k) const;

  /// Exact node rule per level (rational arithmetic): net outflow 1 at the
  /// origin and 0 on levels 1..K-1.
  bool node_rule_exact() const;

  /// Energy of the levels 0..K-1 under W_ij = w(||i-j||_inf), through exact
  /// pair-distance histograms.
  double energy(const std::function<double(double)>& w) const;

  /// Number of (i in B_k, j in B_{k+1}) pairs at each l_inf distance r (index r).
  std::vector<std::int64_t> distance_histogram(int k) const;

  /// Explicit flow on the points of levels 0..K, indexed by box_points of the
  /// box (-2^K, 2^K]^d. Refuses more than `max_pairs` flow entries.
  FlowAssignment materialize(std::int64_t max_pairs = 2'000'000) const;

  /// Inverse of the indexing used by materialize().
  Point point_of(VertexId id) const;
  VertexId id_of(const Point& p) const;

 private:
  int d_;
  int k_;
};

/// (2^{3d} / wbar) sum_{k=0}^{K-1} (k+2)^{-alpha}.
double annuli_energy_bound(int dimension, int levels, double wbar, double alpha);

/// "flow i j theta" lines for a < b.
void write_flow(std::ostream& out, const FlowAssignment& flow);

}  // namespace vrjp
