#pragma once

// Componentwise random-walk Metropolis for the environment law nu (optionally
// tilted by e^{u_tilt}), the exact Gaussian s | u conditional, and the Monte
// Carlo checks built on top of them.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vrjp/environment.hpp"
#include "vrjp/graph.hpp"
#include "vrjp/stats.hpp"

namespace vrjp {

struct SamplerConfig {
  long sweeps = 10000;       // retained-phase sweeps (after burn-in)
  long burn_in = 1000;
  long thinning = 1;         // keep every `thinning`-th sweep
  double step_scale = 1.0;   // initial proposal standard deviation
  std::optional<VertexId> tilt;
  long adapt_interval = 50;  // sweeps between step adjustments during burn-in
  long refresh_interval = 200;  // sweeps between exact refactorizations (low-rank path)
};

struct SampleBatch {
  std::size_t dimension = 0;
  std::vector<double> values;  // row-major, one row per retained draw
  std::uint64_t seed = 0;
  long burn_in = 0;
  long thinning = 1;
  std::optional<VertexId> tilt;
  double acceptance_rate = 0.0;  // post burn-in
  std::vector<double> ess;       // per coordinate
  std::vector<double> step_scale;
  bool diagnostics_ok = true;

  std::size_t draws() const { return dimension == 0 ? 0 : values.size() / dimension; }
  double at(std::size_t draw, std::size_t i) const { return values[draw * dimension + i]; }
  FieldConfig field(std::size_t draw) const;
  std::vector<double> coordinate(std::size_t i) const;
};

/// Deterministic in (g, config, seed).
SampleBatch sample_u_mcmc(const WiredGraph& g, const SamplerConfig& config, std::uint64_t seed);

/// Independent chains with seeds derive_seed(base_seed, c). Results are
/// indexed by chain and do not depend on `workers` (0 = from environment).
std::vector<SampleBatch> sample_chains(const WiredGraph& g, const SamplerConfig& config, std::uint64_t base_seed,
                                       int chains, int workers = 0);

/// Worker count from VRJP_LAB_WORKERS, defaulting to the hardware concurrency.
int default_workers();

/// Centered Gaussian with covariance D(u)^{-1}.
Eigen::VectorXd sample_s_given_u(const WiredGraph& g, const Eigen::VectorXd& u, std::uint64_t seed);

struct MomentEstimate {
  MeanEstimate value;
  double ess = 0.0;
  bool reliable = true;  // ess above the floor and every chain diagnostics_ok
};

/// Mean and batch-means SE of f over draws, pooled across chains.
MomentEstimate estimate_series(std::span<const SampleBatch> chains,
                               const std::function<double(const SampleBatch&, std::size_t)>& f,
                               double ess_floor = 100.0);

/// E[e^{sigma m u_i}].
MomentEstimate estimate_exp_moment(std::span<const SampleBatch> chains, VertexId i, int sigma, double m,
                                   double ess_floor = 100.0);

struct BoundCheck {
  MomentEstimate lhs;
  double rhs = 0.0;
  bool holds = false;  // lhs.mean <= rhs + 3 se
};

/// E[prod_e cosh(u_{e+} - u_{e-})^{m_e}] against prod_e (1 - m_e/W_e)^{-1}.
BoundCheck cosh_moment_bound_check(const WiredGraph& g, std::span<const SampleBatch> chains,
                                   std::span<const double> m);

struct WardCheck {
  MeanEstimate statistic;
  std::size_t samples = 0;
  std::size_t det_bound_violations = 0;
  double max_route_discrepancy = 0.0;  // |det(Id - MG) - vertex route|
  bool holds = false;                  // |mean - 1| <= 3 se and no violations
};

/// Monte Carlo of the Ward statistic: a fresh s | u for every retained draw.
WardCheck ward_check(const WiredGraph& g, std::span<const SampleBatch> chains, std::span<const double> m,
                     std::uint64_t s_seed);

struct MonotonicityResult {
  MomentEstimate larger;   // under (W+, h+)
  MomentEstimate smaller;  // under (W-, h-)
  bool ordered = false;    // larger.mean <= smaller.mean + 3 sqrt(se+^2 + se-^2)
};

/// Throws PreconditionError unless W+ >= W- and h+ >= h- componentwise.
MonotonicityResult monotonicity_check(const WiredGraph& g_plus, const WiredGraph& g_minus, VertexId i, double m,
                                      int sigma, const SamplerConfig& config, std::uint64_t seed, int chains,
                                      int workers = 0);

/// Columnar text: '#' header with seed/burn_in/thinning, a u_0 .. u_{n-1}
/// header row, then one row per draw.
void write_batch(std::ostream& out, const SampleBatch& batch);

}  // namespace vrjp
