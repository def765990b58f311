#pragma once

// Weight families: Euclidean long-range profiles, high-dimensional
// nearest-neighbour models and hierarchical weights on binary trees.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vrjp/graph.hpp"
#include "vrjp/lattice.hpp"

namespace vrjp {

/// w(x) = scale * x^{-exponent}.
struct PowerProfile {
  double scale = 1.0;
  double exponent = 3.0;
};

/// Smallest monotone decreasing majorant of Wbar (log2 x)^alpha x^{-2d}:
/// the raw expression rises on [1, e^{alpha/(2d)}], so it is held at its
/// maximum there.
struct LogEnvelopeProfile {
  double wbar = 1.0;
  double alpha = 2.0;
  int dimension = 1;
};

/// Named radial profile w : [1, inf) -> (0, inf).
class RadialProfile {
 public:
  using Family = std::variant<PowerProfile, LogEnvelopeProfile>;

  RadialProfile(Family family);  // NOLINT(google-explicit-constructor)

  double operator()(double x) const;
  std::string name() const;
  const Family& family() const { return family_; }

  /// Spot-checks w(x_{k+1}) <= w(x_k) on a grid of sample arguments.
  bool monotone_on_samples() const;

 private:
  Family family_;
};

/// Model 1: W_ij = w(||i-j||_inf).
struct EuclideanLongRange {
  int dimension = 1;
  RadialProfile profile{PowerProfile{}};
  double wbar = 1.0;
  double alpha = 2.0;

  AmbientWeight ambient() const;

  /// w(x) >= Wbar (log2 x)^alpha / x^{2d} at sampled x >= 1, profile monotone,
  /// and the lattice row sum finite.
  bool model_one_compliant() const;
};

/// Model 2: W_ij >= Wbar 1{||i-j||_2 = 1} plus an optional summable
/// long-range addition w(||i-j||_inf).
struct HighDimModel {
  int dimension = 3;
  double wbar = 1.0;
  std::optional<RadialProfile> extra;

  /// Throws PreconditionError when dimension < 3 or wbar <= 0.
  AmbientWeight ambient() const;
};

/// Model 3 on the leaves {0,1}^N: W_ij = w^H(d_H(i,j)), uniform pinning h^H.
struct HierarchicalModel {
  int levels = 1;
  std::vector<double> level_weights;  // level_weights[l-1] = w^H(l), 1 <= l <= levels
  double pinning = 1.0;

  double weight_at(int level) const;

  /// w^H(l) = wbar_h 2^{-2l} l^alpha and h^H = wbar_h 2^{-(2+N)} (N+1)^alpha,
  /// i.e. the smallest weights meeting the hierarchical bound assumption.
  static HierarchicalModel compliant(int levels, double wbar_h, double alpha);

  /// Hierarchical comparison model for a Euclidean box of side 2^N in
  /// dimension d: N*d levels with w^H(l) = w(2^{ceil(l/d)}).
  static HierarchicalModel from_profile(const RadialProfile& profile, int n, int d, double pinning);

  /// w^H(l) >= wbar_h 2^{-2l} l^alpha for 1 <= l <= N and
  /// h^H >= wbar_h 2^{-(2+N)} (N+1)^alpha (with a 1e-12 relative slack).
  bool meets_assumption(double wbar_h, double alpha) const;
};

using BinaryString = std::vector<std::uint8_t>;

/// Digit interleaving {0..2^N-1}^d -> {0,1}^{Nd}: z_n is digit floor(n/d) of
/// coordinate n mod d.
BinaryString phi(const Point& i, int n, int d);
Point phi_inverse(const BinaryString& z, int n, int d);

/// Least n with z_m = z'_m for all m >= n (or the length when no such n < L).
int hierarchical_distance(const BinaryString& z, const BinaryString& zp);

struct DistanceComparison {
  int hierarchical = 0;
  bool bound_ok = false;  // 2^{ceil(dH/d)} > ||i-j||_inf
};
DistanceComparison compare_dH_linf(const Point& i, const Point& j, int n, int d);

/// w^H(d_H(i,j)) for distinct leaves; throws on i == j.
double hierarchical_weight(const HierarchicalModel& model, const BinaryString& i, const BinaryString& j);

/// Complete graph on the 2^N leaves (leaf k has digits z_n = bit n of k).
WiredGraph hierarchical_graph(const HierarchicalModel& model);

/// Hierarchical model transported to the box {0..2^N-1}^d via phi; vertices
/// follow box_points(d, 2^N) order. `model.levels` must equal N*d.
WiredGraph hierarchical_box_graph(const HierarchicalModel& model, int n, int d);

/// Nearest-neighbour chain i_1 - ... - i_N - rho reduced from the antichain
/// of the binary tree. Vertex l-1 is i_l.
struct AntichainModel {
  WiredGraph graph;
  std::vector<double> path_weights;  // W_{i_1 i_2}, ..., W_{i_{N-1} i_N}, h_{i_N}
  bool other_weights_zeroed = true;  // non-path antichain weights are omitted
};
AntichainModel antichain_effective_model(int levels, const std::vector<double>& level_weights, double pinning);

/// sum_{l >= 2} l^{-alpha}, alpha > 1.
double zeta_tail(double alpha);

/// exp((2m+1)^2 / wbar_h * sum_{l>=2} l^{-alpha}).
double constant_cH(double wbar_h, double alpha, double m);

/// c_H(Wbar d^{-alpha} 2^{-2d}, alpha, m).
double constant_C(double wbar, int d, double alpha, double m);

}  // namespace vrjp
