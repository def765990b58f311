#include "vrjp/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double log_envelope(const LogEnvelopeProfile& p, double x) {
  const double peak = std::exp(p.alpha / (2.0 * p.dimension));
  const double y = std::max(x, peak);
  return p.wbar * std::pow(std::log2(y), p.alpha) * std::pow(y, -2.0 * p.dimension);
}

std::vector<double> sample_arguments() {
  std::vector<double> xs;
  for (double x = 1.0; x < 1e6; x *= 1.1) xs.push_back(x);
  for (int k = 1; k <= 64; ++k) xs.push_back(k);
  std::sort(xs.begin(), xs.end());
  return xs;
}

}  // namespace

RadialProfile::RadialProfile(Family family) : family_(std::move(family)) {
  std::visit(Overloaded{
                 [](const PowerProfile& p) {
                   if (!(p.scale > 0.0) || !(p.exponent > 0.0))
                     throw PreconditionError("power profile needs scale > 0 and exponent > 0");
                 },
                 [](const LogEnvelopeProfile& p) {
                   if (!(p.wbar > 0.0) || !(p.alpha > 1.0) || p.dimension < 1)
                     throw PreconditionError("log-envelope profile needs Wbar > 0, alpha > 1, d >= 1");
                 },
             },
             family_);
}

double RadialProfile::operator()(double x) const {
  return std::visit(Overloaded{
                        [x](const PowerProfile& p) { return p.scale * std::pow(x, -p.exponent); },
                        [x](const LogEnvelopeProfile& p) { return log_envelope(p, x); },
                    },
                    family_);
}

std::string RadialProfile::name() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&os](const PowerProfile& p) { os << "power(scale=" << p.scale << ",exponent=" << p.exponent << ")"; },
                 [&os](const LogEnvelopeProfile& p) {
                   os << "log_envelope(Wbar=" << p.wbar << ",alpha=" << p.alpha << ",d=" << p.dimension << ")";
                 },
             },
             family_);
  return os.str();
}

bool RadialProfile::monotone_on_samples() const {
  const auto xs = sample_arguments();
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if ((*this)(xs[k]) > (*this)(xs[k - 1])) return false;
  }
  return true;
}

AmbientWeight EuclideanLongRange::ambient() const {
  AmbientWeight a;
  a.dimension = dimension;
  a.radial = [p = profile](double x) { return p(x); };
  return a;
}

bool EuclideanLongRange::model_one_compliant() const {
  if (!profile.monotone_on_samples()) return false;
  for (double x : sample_arguments()) {
    const double lower = wbar * std::pow(std::log2(x), alpha) * std::pow(x, -2.0 * dimension);
    if (profile(x) < lower * (1.0 - 1e-12)) return false;
  }
  try {
    (void)ambient().row_sum(1e-6);
  } catch (const PreconditionError&) {
    return false;
  }
  return true;
}

AmbientWeight HighDimModel::ambient() const {
  if (dimension < 3) throw PreconditionError("high-dimensional model needs d >= 3");
  if (!(wbar > 0.0)) throw PreconditionError("high-dimensional model needs Wbar > 0");
  AmbientWeight a;
  a.dimension = dimension;
  for (int k = 0; k < dimension; ++k) {
    for (int sign : {-1, 1}) {
      Point delta(static_cast<std::size_t>(dimension), 0);
      delta[static_cast<std::size_t>(k)] = sign;
      a.short_range.emplace_back(delta, wbar);
    }
  }
  if (extra) a.radial = [p = *extra](double x) { return p(x); };
  return a;
}

double HierarchicalModel::weight_at(int level) const {
  if (level < 1 || level > levels) throw PreconditionError("hierarchical level out of range");
  return level_weights.at(static_cast<std::size_t>(level - 1));
}

HierarchicalModel HierarchicalModel::compliant(int levels, double wbar_h, double alpha) {
  if (levels < 1) throw PreconditionError("hierarchical model needs N >= 1");
  HierarchicalModel m;
  m.levels = levels;
  for (int l = 1; l <= levels; ++l) m.level_weights.push_back(wbar_h * std::pow(2.0, -2.0 * l) * std::pow(l, alpha));
  m.pinning = wbar_h * std::pow(2.0, -(2.0 + levels)) * std::pow(levels + 1.0, alpha);
  return m;
}

HierarchicalModel HierarchicalModel::from_profile(const RadialProfile& profile, int n, int d, double pinning) {
  if (n < 1 || d < 1) throw PreconditionError("need N >= 1 and d >= 1");
  HierarchicalModel m;
  m.levels = n * d;
  for (int l = 1; l <= m.levels; ++l) {
    const int up = (l + d - 1) / d;
    m.level_weights.push_back(profile(std::ldexp(1.0, up)));
  }
  m.pinning = pinning;
  return m;
}

bool HierarchicalModel::meets_assumption(double wbar_h, double alpha) const {
  constexpr double slack = 1.0 - 1e-12;
  for (int l = 1; l <= levels; ++l) {
    if (weight_at(l) < slack * wbar_h * std::pow(2.0, -2.0 * l) * std::pow(l, alpha)) return false;
  }
  return pinning >= slack * wbar_h * std::pow(2.0, -(2.0 + levels)) * std::pow(levels + 1.0, alpha);
}

BinaryString phi(const Point& i, int n, int d) {
  if (n < 1 || d < 1 || i.size() != static_cast<std::size_t>(d)) throw PreconditionError("phi: bad shape");
  for (int x : i) {
    if (x < 0 || x >= (1 << n)) throw PreconditionError("phi: coordinate out of range");
  }
  BinaryString z(static_cast<std::size_t>(n * d));
  for (int idx = 0; idx < n * d; ++idx) {
    z[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>((i[static_cast<std::size_t>(idx % d)] >> (idx / d)) & 1);
  }
  return z;
}

Point phi_inverse(const BinaryString& z, int n, int d) {
  if (z.size() != static_cast<std::size_t>(n * d)) throw PreconditionError("phi_inverse: length mismatch");
  Point i(static_cast<std::size_t>(d), 0);
  for (int idx = 0; idx < n * d; ++idx) {
    const auto bit = z[static_cast<std::size_t>(idx)];
    if (bit > 1) throw PreconditionError("phi_inverse: not a binary string");
    i[static_cast<std::size_t>(idx % d)] |= bit << (idx / d);
  }
  return i;
}

int hierarchical_distance(const BinaryString& z, const BinaryString& zp) {
  if (z.size() != zp.size()) throw PreconditionError("hierarchical distance: length mismatch");
  for (std::size_t k = z.size(); k-- > 0;) {
    if (z[k] != zp[k]) return static_cast<int>(k) + 1;
  }
  return 0;
}

DistanceComparison compare_dH_linf(const Point& i, const Point& j, int n, int d) {
  const int dh = hierarchical_distance(phi(i, n, d), phi(j, n, d));
  const int up = (dh + d - 1) / d;
  return {dh, (1L << up) > linf_distance(i, j)};
}

double hierarchical_weight(const HierarchicalModel& model, const BinaryString& i, const BinaryString& j) {
  if (i.size() != static_cast<std::size_t>(model.levels)) throw PreconditionError("leaf length does not match N");
  const int dh = hierarchical_distance(i, j);
  if (dh == 0) throw PreconditionError("hierarchical weight undefined for i == j");
  return model.weight_at(dh);
}

WiredGraph hierarchical_graph(const HierarchicalModel& model) {
  if (model.levels < 1 || model.levels > 12) throw ResourceGuardError("hierarchical graph supports 1 <= N <= 12");
  if (static_cast<int>(model.level_weights.size()) != model.levels) throw PreconditionError("need one weight per level");
  if (!(model.pinning > 0.0)) throw PreconditionError("hierarchical pinning must be positive");
  const std::size_t leaves = std::size_t{1} << model.levels;
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < leaves; ++a) {
    for (std::size_t b = a + 1; b < leaves; ++b) {
      const int dh = std::bit_width(a ^ b);
      const double w = model.weight_at(dh);
      if (w > 0.0) edges.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b), w});
    }
  }
  return WiredGraph(leaves, std::move(edges), std::vector<double>(leaves, model.pinning));
}

WiredGraph hierarchical_box_graph(const HierarchicalModel& model, int n, int d) {
  if (model.levels != n * d) throw PreconditionError("hierarchical box graph needs N*d levels");
  if (n * d > 12) throw ResourceGuardError("hierarchical box graph supports N*d <= 12");
  const auto pts = box_points(d, 1 << n);
  std::vector<BinaryString> codes;
  codes.reserve(pts.size());
  for (const auto& p : pts) codes.push_back(phi(p, n, d));
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const double w = model.weight_at(hierarchical_distance(codes[a], codes[b]));
      if (w > 0.0) edges.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b), w});
    }
  }
  return WiredGraph(pts.size(), std::move(edges), std::vector<double>(pts.size(), model.pinning));
}

AntichainModel antichain_effective_model(int levels, const std::vector<double>& level_weights, double pinning) {
  if (levels < 1) throw PreconditionError("antichain model needs N >= 1");
  if (static_cast<int>(level_weights.size()) < levels) throw PreconditionError("need w^H(l) for 1 <= l <= N");
  if (!(pinning > 0.0)) throw PreconditionError("pinning must be positive");
  const auto n = static_cast<std::size_t>(levels);
  std::vector<Edge> edges;
  std::vector<double> h(n);
  std::vector<double> path;
  h[0] = pinning;
  for (int l = 2; l <= levels; ++l) {
    const double w = std::ldexp(level_weights[static_cast<std::size_t>(l - 1)], 2 * l - 3);
    edges.push_back({l - 2, l - 1, w});
    path.push_back(w);
    h[static_cast<std::size_t>(l - 1)] = std::ldexp(pinning, l - 1);
  }
  path.push_back(h[n - 1]);
  return {WiredGraph(n, std::move(edges), std::move(h)), std::move(path), true};
}

double zeta_tail(double alpha) {
  if (!(alpha > 1.0)) throw PreconditionError("sum l^{-alpha} diverges for alpha <= 1");
  return std::riemann_zeta(alpha) - 1.0;
}

double constant_cH(double wbar_h, double alpha, double m) {
  if (!(wbar_h > 0.0)) throw PreconditionError("c_H needs Wbar^H > 0");
  if (!(m >= 1.0)) throw PreconditionError("c_H needs m >= 1");
  return std::exp((2.0 * m + 1.0) * (2.0 * m + 1.0) / wbar_h * zeta_tail(alpha));
}

double constant_C(double wbar, int d, double alpha, double m) {
  if (d < 1) throw PreconditionError("C needs d >= 1");
  return constant_cH(wbar * std::pow(d, -alpha) * std::pow(2.0, -2.0 * d), alpha, m);
}

}  // namespace vrjp
