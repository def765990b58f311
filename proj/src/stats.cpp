#include "vrjp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "vrjp/errors.hpp"

namespace vrjp {

MeanEstimate MeanEstimate::merged(const MeanEstimate& other) const {
  if (count == 0.0) return other;
  if (other.count == 0.0) return *this;
  const double n = count + other.count;
  const double wa = count / n;
  const double wb = other.count / n;
  return {n, wa * mean + wb * other.mean, std::sqrt(wa * wa * se * se + wb * wb * other.se * other.se)};
}

MeanEstimate merge_all(std::span<const MeanEstimate> parts) {
  // pooled directly from sufficient statistics so the result does not depend on order
  double n = 0.0;
  for (const auto& p : parts) n += p.count;
  if (n == 0.0) return {};
  double mean = 0.0;
  double var = 0.0;
  for (const auto& p : parts) {
    const double w = p.count / n;
    mean += w * p.mean;
    var += w * w * p.se * p.se;
  }
  return {n, mean, std::sqrt(var)};
}

MeanEstimate batch_means(std::span<const double> series, int batches) {
  const auto n = series.size();
  if (n == 0) throw PreconditionError("batch means of an empty series");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  const auto b = static_cast<std::size_t>(std::max(2, batches));
  if (n < 2 * b) {
    // too short for batching: plain iid standard error
    double ss = 0.0;
    for (double x : series) ss += (x - mean) * (x - mean);
    const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    return {static_cast<double>(n), mean, std::sqrt(var / static_cast<double>(n))};
  }
  const std::size_t len = n / b;
  std::vector<double> means(b);
  for (std::size_t k = 0; k < b; ++k) {
    const auto first = series.begin() + static_cast<std::ptrdiff_t>(k * len);
    means[k] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(len), 0.0) / static_cast<double>(len);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(b);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double var_batch = ss / static_cast<double>(b - 1);
  return {static_cast<double>(n), mean, std::sqrt(var_batch / static_cast<double>(b))};
}

double integrated_autocorrelation_time(std::span<const double> series) {
  const auto n = series.size();
  if (n < 4) return 1.0;
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = series[k] - mean;
  double c0 = 0.0;
  for (double v : x) c0 += v * v;
  c0 /= static_cast<double>(n);
  if (c0 == 0.0) return 1.0;
  double tau = 1.0;
  const std::size_t max_lag = std::min<std::size_t>(n / 4, 50000);
  for (std::size_t lag = 1; lag < max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t k = 0; k + lag < n; ++k) c += x[k] * x[k + lag];
    c /= static_cast<double>(n);
    tau += 2.0 * c / c0;
    if (static_cast<double>(lag) >= 6.0 * tau) break;
  }
  return std::max(tau, 1.0 / static_cast<double>(n));
}

double effective_sample_size(std::span<const double> series) {
  return static_cast<double>(series.size()) / integrated_autocorrelation_time(series);
}

double ks_distance(std::vector<double> samples,
                   const std::function<std::vector<double>(const std::vector<double>&)>& cdf_at_sorted) {
  if (samples.empty()) throw PreconditionError("KS distance of an empty sample");
  std::sort(samples.begin(), samples.end());
  const auto f = cdf_at_sorted(samples);
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    d = std::max(d, std::abs(static_cast<double>(k + 1) / n - f[k]));
    d = std::max(d, std::abs(f[k] - static_cast<double>(k) / n));
  }
  return d;
}

double total_variation(const std::map<std::string, long>& a, const std::map<std::string, long>& b) {
  double na = 0.0, nb = 0.0;
  for (const auto& [_, c] : a) na += static_cast<double>(c);
  for (const auto& [_, c] : b) nb += static_cast<double>(c);
  if (na == 0.0 || nb == 0.0) throw PreconditionError("total variation of an empty law");
  std::set<std::string> keys;
  for (const auto& [k, _] : a) keys.insert(k);
  for (const auto& [k, _] : b) keys.insert(k);
  double tv = 0.0;
  for (const auto& k : keys) {
    const auto ia = a.find(k);
    const auto ib = b.find(k);
    const double pa = ia == a.end() ? 0.0 : static_cast<double>(ia->second) / na;
    const double pb = ib == b.end() ? 0.0 : static_cast<double>(ib->second) / nb;
    tv += std::abs(pa - pb);
  }
  return 0.5 * tv;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0x632be59bd9b4e019ULL * (stream + 1));
  splitmix64(s);
  return splitmix64(s);
}

}  // namespace vrjp
