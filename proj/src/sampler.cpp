#include "vrjp/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

// One Metropolis chain. Two determinant strategies:
//  - dense: keep D, refactorize the proposed D' from scratch;
//  - low-rank: keep G = D^{-1}; changing u_i rescales the deg(i) conductances
//    at i, so D' = D + V Gamma V^t and det D'/det D = det(Id + Gamma V^t G V).
class Chain {
 public:
  Chain(const WiredGraph& g, const SamplerConfig& cfg, std::uint64_t seed)
      : g_(g), cfg_(cfg), n_(g.size()), rng_(seed), u_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_))),
        step_(n_, cfg.step_scale), tried_(n_, 0), accepted_(n_, 0) {
    std::size_t max_deg = 0;
    for (std::size_t i = 0; i < n_; ++i) max_deg = std::max(max_deg, g.neighbors(static_cast<VertexId>(i)).size());
    low_rank_ = n_ >= 16 && 4 * max_deg <= n_;
    refresh();
  }

  void sweep() {
    for (std::size_t i = 0; i < n_; ++i) update(static_cast<VertexId>(i));
  }

  void adapt() {
    for (std::size_t i = 0; i < n_; ++i) {
      if (tried_[i] == 0) continue;
      const double r = static_cast<double>(accepted_[i]) / static_cast<double>(tried_[i]);
      if (r < 0.3) step_[i] *= 0.7;
      else if (r > 0.5) step_[i] *= 1.4;
      tried_[i] = accepted_[i] = 0;
    }
  }

  void reset_counters() {
    std::fill(tried_.begin(), tried_.end(), 0);
    std::fill(accepted_.begin(), accepted_.end(), 0);
  }

  double acceptance() const {
    long t = 0, a = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      t += tried_[i];
      a += accepted_[i];
    }
    return t == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(t);
  }

  void refresh() {
    if (!low_rank_) {
      d_ = laplacian(g_, u_);
      logdet_ = log_det(d_);
      return;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(laplacian(g_, u_));
    if (llt.info() != Eigen::Success) throw FactorizationError("D(u) is not positive definite");
    const auto& l = llt.matrixLLT();
    logdet_ = 0.0;
    for (Eigen::Index k = 0; k < l.rows(); ++k) logdet_ += 2.0 * std::log(l(k, k));
    ginv_ = llt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_)));
  }

  bool low_rank() const { return low_rank_; }
  const Eigen::VectorXd& u() const { return u_; }
  const std::vector<double>& steps() const { return step_; }

 private:
  double u_at(VertexId k) const { return k == g_.rho() ? 0.0 : u_[k]; }

  void update(VertexId i) {
    const auto ii = static_cast<std::size_t>(i);
    const double delta = step_[ii] * normal_(rng_);
    const double ui = u_[i];
    const double up = ui + delta;
    double local = -delta;
    if (cfg_.tilt && *cfg_.tilt == i) local += delta;
    for (const auto& nb : g_.neighbors(i)) {
      const double uk = u_at(nb.vertex);
      local -= nb.weight * (std::cosh(up - uk) - std::cosh(ui - uk));
    }
    ++tried_[ii];
    if (!std::isfinite(local)) return;
    const double log_uniform = std::log(uniform_(rng_));
    // The determinant factor is bounded by e^{|delta| deg}; skip it when the
    // proposal is already rejected regardless.
    const double half_bound = 0.5 * std::abs(delta) * static_cast<double>(2 * g_.neighbors(i).size());
    if (log_uniform >= local + half_bound) return;
    if (low_rank_) {
      propose_low_rank(i, delta, local, log_uniform);
    } else {
      propose_dense(i, delta, local, log_uniform);
    }
  }

  void propose_dense(VertexId i, double delta, double local, double log_uniform) {
    const double f = std::expm1(delta);
    proposal_ = d_;
    for (const auto& nb : g_.neighbors(i)) {
      const double dc = nb.weight * std::exp(u_[i] + u_at(nb.vertex)) * f;
      proposal_(i, i) += dc;
      if (nb.vertex != g_.rho()) {
        proposal_(i, nb.vertex) -= dc;
        proposal_(nb.vertex, i) -= dc;
        proposal_(nb.vertex, nb.vertex) += dc;
      }
    }
    llt_.compute(proposal_);
    if (llt_.info() != Eigen::Success) return;
    const auto& l = llt_.matrixLLT();
    double ld = 0.0;
    for (Eigen::Index k = 0; k < l.rows(); ++k) ld += 2.0 * std::log(l(k, k));
    if (log_uniform < local + 0.5 * (ld - logdet_)) {
      d_.swap(proposal_);
      logdet_ = ld;
      u_[i] += delta;
      ++accepted_[static_cast<std::size_t>(i)];
    }
  }

  void propose_low_rank(VertexId i, double delta, double local, double log_uniform) {
    const auto& nbs = g_.neighbors(i);
    const auto k = static_cast<Eigen::Index>(nbs.size());
    const double f = std::expm1(delta);
    gamma_.resize(k);
    s_.resize(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto& na = nbs[static_cast<std::size_t>(a)];
      gamma_[a] = na.weight * std::exp(u_[i] + u_at(na.vertex)) * f;
      for (Eigen::Index b = 0; b <= a; ++b) {
        const auto& nbb = nbs[static_cast<std::size_t>(b)];
        // v_e = e_i - e_k (e_rho dropped)
        double v = ginv_(i, i);
        const bool ra = na.vertex == g_.rho();
        const bool rb = nbb.vertex == g_.rho();
        if (!rb) v -= ginv_(i, nbb.vertex);
        if (!ra) v -= ginv_(na.vertex, i);
        if (!ra && !rb) v += ginv_(na.vertex, nbb.vertex);
        s_(a, b) = s_(b, a) = v;
      }
    }
    m_ = gamma_.asDiagonal() * s_;
    m_.diagonal().array() += 1.0;
    lu_.compute(m_);
    const double det = lu_.determinant();
    if (!(det > 0.0) || !std::isfinite(det)) return;
    if (log_uniform < local + 0.5 * std::log(det)) {
      y_.resize(static_cast<Eigen::Index>(n_), k);
      for (Eigen::Index a = 0; a < k; ++a) {
        const auto& na = nbs[static_cast<std::size_t>(a)];
        y_.col(a) = ginv_.col(i);
        if (na.vertex != g_.rho()) y_.col(a) -= ginv_.col(na.vertex);
      }
      const Eigen::MatrixXd z = lu_.solve(Eigen::MatrixXd(gamma_.asDiagonal()));
      ginv_.noalias() -= y_ * z * y_.transpose();
      logdet_ += std::log(det);
      u_[i] += delta;
      ++accepted_[static_cast<std::size_t>(i)];
    }
  }

  const WiredGraph& g_;
  SamplerConfig cfg_;
  std::size_t n_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  Eigen::VectorXd u_;
  std::vector<double> step_;
  std::vector<long> tried_;
  std::vector<long> accepted_;
  bool low_rank_ = false;
  double logdet_ = 0.0;
  Eigen::MatrixXd d_, proposal_, ginv_, s_, m_, y_;
  Eigen::VectorXd gamma_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

Eigen::VectorXd gaussian_given_u(const WiredGraph& g, const Eigen::VectorXd& u, std::mt19937_64& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(laplacian(g, u));
  if (llt.info() != Eigen::Success) throw FactorizationError("D(u) is not positive definite");
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(u.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
  // D = L L^t, so L^{-t} z has covariance D^{-1}
  return llt.matrixU().solve(z);
}

}  // namespace

FieldConfig SampleBatch::field(std::size_t draw) const {
  FieldConfig f;
  f.u = Eigen::Map<const Eigen::VectorXd>(values.data() + draw * dimension, static_cast<Eigen::Index>(dimension));
  return f;
}

std::vector<double> SampleBatch::coordinate(std::size_t i) const {
  std::vector<double> out(draws());
  for (std::size_t d = 0; d < out.size(); ++d) out[d] = at(d, i);
  return out;
}

SampleBatch sample_u_mcmc(const WiredGraph& g, const SamplerConfig& config, std::uint64_t seed) {
  if (g.size() == 0) throw PreconditionError("sampler needs at least one vertex");
  if (config.sweeps <= 0 || config.burn_in < 0 || config.thinning <= 0 || !(config.step_scale > 0.0))
    throw PreconditionError("invalid sampler configuration");
  if (config.tilt && (*config.tilt < 0 || static_cast<std::size_t>(*config.tilt) >= g.size()))
    throw PreconditionError("tilt vertex out of range");
  Chain chain(g, config, seed);
  const long interval = std::max(1L, config.adapt_interval);
  const long refresh = std::max(1L, config.refresh_interval);
  for (long s = 1; s <= config.burn_in; ++s) {
    chain.sweep();
    if (s % interval == 0) chain.adapt();
    if (chain.low_rank() && s % refresh == 0) chain.refresh();
  }
  chain.reset_counters();

  SampleBatch batch;
  batch.dimension = g.size();
  batch.seed = seed;
  batch.burn_in = config.burn_in;
  batch.thinning = config.thinning;
  batch.tilt = config.tilt;
  batch.values.reserve(static_cast<std::size_t>(config.sweeps / config.thinning) * g.size());
  for (long s = 1; s <= config.sweeps; ++s) {
    chain.sweep();
    if (chain.low_rank() && s % refresh == 0) chain.refresh();
    if (s % config.thinning == 0) {
      const auto& u = chain.u();
      batch.values.insert(batch.values.end(), u.data(), u.data() + u.size());
    }
  }
  batch.acceptance_rate = chain.acceptance();
  batch.step_scale = chain.steps();
  batch.diagnostics_ok = batch.acceptance_rate >= 0.05 && batch.acceptance_rate <= 0.95;
  batch.ess.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto series = batch.coordinate(i);
    if (!std::all_of(series.begin(), series.end(), [](double x) { return std::isfinite(x); }))
      batch.diagnostics_ok = false;
    batch.ess[i] = effective_sample_size(series);
  }
  return batch;
}

int default_workers() {
  if (const char* env = std::getenv("VRJP_LAB_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w > 0) return w;
    } catch (const std::exception&) {
    }
    throw PreconditionError("VRJP_LAB_WORKERS must be a positive integer");
  }
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

std::vector<SampleBatch> sample_chains(const WiredGraph& g, const SamplerConfig& config, std::uint64_t base_seed,
                                       int chains, int workers) {
  if (chains <= 0) throw PreconditionError("need at least one chain");
  if (workers <= 0) workers = default_workers();
  workers = std::min(workers, chains);
  std::vector<SampleBatch> out(static_cast<std::size_t>(chains));
  if (workers == 1) {
    for (int c = 0; c < chains; ++c)
      out[static_cast<std::size_t>(c)] = sample_u_mcmc(g, config, derive_seed(base_seed, static_cast<std::uint64_t>(c)));
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int c = next++; c < chains; c = next++) {
        try {
          out[static_cast<std::size_t>(c)] =
              sample_u_mcmc(g, config, derive_seed(base_seed, static_cast<std::uint64_t>(c)));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

Eigen::VectorXd sample_s_given_u(const WiredGraph& g, const Eigen::VectorXd& u, std::uint64_t seed) {
  if (static_cast<std::size_t>(u.size()) != g.size()) throw PreconditionError("u dimension mismatch");
  std::mt19937_64 rng(seed);
  return gaussian_given_u(g, u, rng);
}

MomentEstimate estimate_series(std::span<const SampleBatch> chains,
                               const std::function<double(const SampleBatch&, std::size_t)>& f, double ess_floor) {
  if (chains.empty()) throw PreconditionError("no chains to estimate from");
  std::vector<MeanEstimate> parts;
  MomentEstimate out;
  for (const auto& b : chains) {
    if (b.draws() == 0) throw PreconditionError("empty sample batch");
    std::vector<double> series(b.draws());
    for (std::size_t d = 0; d < series.size(); ++d) series[d] = f(b, d);
    parts.push_back(batch_means(series));
    out.ess += effective_sample_size(series);
    if (!b.diagnostics_ok) out.reliable = false;
  }
  out.value = merge_all(parts);
  if (out.ess < ess_floor) out.reliable = false;
  return out;
}

MomentEstimate estimate_exp_moment(std::span<const SampleBatch> chains, VertexId i, int sigma, double m,
                                   double ess_floor) {
  if (sigma != 1 && sigma != -1) throw PreconditionError("sigma must be +1 or -1");
  if (chains.empty() || i < 0 || static_cast<std::size_t>(i) >= chains.front().dimension)
    throw PreconditionError("vertex out of range");
  const double r = sigma * m;
  const auto ii = static_cast<std::size_t>(i);
  return estimate_series(
      chains, [r, ii](const SampleBatch& b, std::size_t d) { return std::exp(r * b.at(d, ii)); }, ess_floor);
}

BoundCheck cosh_moment_bound_check(const WiredGraph& g, std::span<const SampleBatch> chains,
                                   std::span<const double> m) {
  BoundCheck out;
  out.rhs = cosh_moment_bound(g, m);
  const auto& edges = g.edges_plus();
  const VertexId rho = g.rho();
  out.lhs = estimate_series(chains, [&](const SampleBatch& b, std::size_t d) {
    double log_prod = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (m[k] == 0.0) continue;
      const double ua = b.at(d, static_cast<std::size_t>(edges[k].a));
      const double ub = edges[k].b == rho ? 0.0 : b.at(d, static_cast<std::size_t>(edges[k].b));
      log_prod += m[k] * std::log(std::cosh(ua - ub));
    }
    return std::exp(log_prod);
  });
  out.holds = out.lhs.value.mean <= out.rhs + 3.0 * out.lhs.value.se;
  return out;
}

WardCheck ward_check(const WiredGraph& g, std::span<const SampleBatch> chains, std::span<const double> m,
                     std::uint64_t s_seed) {
  WardCheck out;
  std::vector<MeanEstimate> parts;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto& b = chains[c];
    std::mt19937_64 rng(derive_seed(s_seed, c));
    std::vector<double> series(b.draws());
    for (std::size_t d = 0; d < b.draws(); ++d) {
      FieldConfig field = b.field(d);
      field.s = gaussian_given_u(g, field.u, rng);
      const auto w = ward_statistic(g, field, m);
      series[d] = w.statistic;
      if (w.det_factor < w.det_lower_bound * (1.0 - 1e-12) - 1e-14) ++out.det_bound_violations;
      const double alt = ward_determinant_vertex_route(g, field, m);
      out.max_route_discrepancy = std::max(out.max_route_discrepancy, std::abs(alt - w.det_factor));
    }
    out.samples += series.size();
    parts.push_back(batch_means(series));
  }
  out.statistic = merge_all(parts);
  out.holds = std::abs(out.statistic.mean - 1.0) <= 3.0 * out.statistic.se && out.det_bound_violations == 0;
  return out;
}

MonotonicityResult monotonicity_check(const WiredGraph& g_plus, const WiredGraph& g_minus, VertexId i, double m,
                                      int sigma, const SamplerConfig& config, std::uint64_t seed, int chains,
                                      int workers) {
  if (g_plus.size() != g_minus.size()) throw PreconditionError("dominated graphs need a common vertex set");
  for (const auto& e : g_minus.edges_plus()) {
    if (g_plus.weight(e.a, e.b) < e.weight)
      throw PreconditionError("W+ >= W- and h+ >= h- must hold componentwise");
  }
  MonotonicityResult out;
  const auto plus = sample_chains(g_plus, config, derive_seed(seed, 0), chains, workers);
  const auto minus = sample_chains(g_minus, config, derive_seed(seed, 1), chains, workers);
  out.larger = estimate_exp_moment(plus, i, sigma, m);
  out.smaller = estimate_exp_moment(minus, i, sigma, m);
  const double se = std::hypot(out.larger.value.se, out.smaller.value.se);
  out.ordered = out.larger.value.mean <= out.smaller.value.mean + 3.0 * se;
  return out;
}

void write_batch(std::ostream& out, const SampleBatch& batch) {
  out << "# seed=" << batch.seed << " burn_in=" << batch.burn_in << " thinning=" << batch.thinning;
  if (batch.tilt) out << " tilt=" << *batch.tilt;
  out << " acceptance=" << format_double(batch.acceptance_rate) << '\n';
  for (std::size_t i = 0; i < batch.dimension; ++i) out << (i ? " " : "") << "u_" << i;
  out << '\n';
  for (std::size_t d = 0; d < batch.draws(); ++d) {
    for (std::size_t i = 0; i < batch.dimension; ++i) out << (i ? " " : "") << format_double(batch.at(d, i));
    out << '\n';
  }
}

}  // namespace vrjp
