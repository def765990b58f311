#pragma once

// Config-driven experiment runner behind the vrjp-lab CLI.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vrjp/graph.hpp"
#include "vrjp/sampler.hpp"
#include "vrjp/stats.hpp"

namespace vrjp {

inline constexpr int kConfigVersion = 1;
inline constexpr std::size_t kMaxSamplingVertices = 4096;

struct ValidationResult {
  bool ok = true;
  std::vector<std::string> errors;
};

/// Schema check of a JSON config: version, kind, known keys only, types and ranges.
ValidationResult validate_config(const std::string& json_text);

/// Result table; every cell is already formatted text. `pass` columns are
/// computed by the runner.
struct ResultTable {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  bool hard_failure = false;  // exact invariant broken (exit status 2)
  std::vector<std::string> notes;
};

/// Runs a validated config. Throws PreconditionError on schema errors and
/// ResourceGuardError on guard breaches.
ResultTable run_experiment(const std::string& json_text, int workers = 0);

void write_csv(std::ostream& out, const ResultTable& table);
void write_json(std::ostream& out, const ResultTable& table);

/// Reads the config, runs it and writes <output>.csv and <output>.json.
/// Returns 0, 1 for config / guard errors, 2 for hard invariant failures.
int run_config_file(const std::string& path, int workers, std::ostream& log);

/// Random connected wired graph: inner edges with probability `edge_prob`,
/// pinnings with probability `pin_prob` (at least one), weights uniform in
/// [wmin, wmax].
WiredGraph random_wired_graph(std::size_t n, std::mt19937_64& rng, double wmin, double wmax, double edge_prob = 0.6,
                              double pin_prob = 0.6);

struct KxEstimate {
  double analytic = 0.0;       // constant * lattice row sum at x
  MeanEstimate empirical;      // max_e W_e sum_{f at x} E[c_f / c_e] (at the maximizing edge)
  Edge worst_edge;
  double ratio = 0.0;          // empirical / analytic
};

/// `constant` is C(Wbar, d, alpha, m) for Model 1 or 2^{2m+1} for Model 2;
/// `row_sum` is sum_{k != x} W_xk over Z^d. `chains` sample the environment
/// of g tilted at the walk's start.
KxEstimate estimate_Kx(const WiredGraph& g, VertexId x, double constant, double row_sum,
                       std::span<const SampleBatch> chains);

/// Text report for `vrjp-lab oracle`: matrix-tree check and, for one or two
/// vertices, quadrature moments.
std::string oracle_report(const WiredGraph& g);

}  // namespace vrjp
