#pragma once

// Monte Carlo bookkeeping: batch-means errors, autocorrelation times,
// goodness-of-fit distances and deterministic seed streams.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace vrjp {

/// Sample mean with its standard error. Merging pools independent estimates
/// (e.g. separate chains) and is associative and order independent.
struct MeanEstimate {
  double count = 0.0;
  double mean = 0.0;
  double se = 0.0;

  MeanEstimate merged(const MeanEstimate& other) const;
};

MeanEstimate merge_all(std::span<const MeanEstimate> parts);

inline constexpr int kDefaultBatches = 30;

/// Mean and batch-means standard error of a correlated series.
MeanEstimate batch_means(std::span<const double> series, int batches = kDefaultBatches);

/// Integrated autocorrelation time with Sokal's adaptive window (c = 6).
double integrated_autocorrelation_time(std::span<const double> series);

/// n / tau_int.
double effective_sample_size(std::span<const double> series);

/// sup_x |F_n(x) - F(x)| for the given samples against a continuous CDF.
/// `cdf_at_sorted` receives the sorted samples and must return F at each.
double ks_distance(std::vector<double> samples,
                   const std::function<std::vector<double>(const std::vector<double>&)>& cdf_at_sorted);

/// Total variation distance between two empirical laws on a finite alphabet.
double total_variation(const std::map<std::string, long>& a, const std::map<std::string, long>& b);

/// SplitMix64 step; used to derive independent per-chain / per-task seeds.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace vrjp
