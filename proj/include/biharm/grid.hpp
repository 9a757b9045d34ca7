#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace biharm::grid {

/// Fixed-tree pairwise reduction; deterministic regardless of caller threading.
double pairwise_sum(std::span<const double> v);

/// omega_{N-1}: area of the unit sphere in R^N.
double unit_sphere_area(int N);

/// Geometrically graded radial grid on [r_min, r_max], r_min > 0.
struct RadialGrid {
  double r_min = 0.0;
  double r_max = 0.0;
  double ratio = 0.0;  // r_{j+1}/r_j, constant
  std::vector<double> nodes;

  int n() const { return static_cast<int>(nodes.size()); }
  // Virtual geometric continuation used by clamped boundary stencils.
  double node_at(int j) const;  // j may be < 0 or >= n()
  std::uint64_t fingerprint() const;
};

/// Builds the geometric grid. Requires 0 < r_min < r_max, n_nodes >= 2
/// (>= 16 for anything beyond endpoint bookkeeping).
RadialGrid build_grid(double r_min, double r_max, int n_nodes);

constexpr double kInf = std::numeric_limits<double>::infinity();

/// One decaying envelope term: |g(r)| <= amp * r^power * exp(-rate * r^2)
/// on the side it describes.
struct DecayTerm {
  double amp = 0.0;
  double power = 0.0;
  double rate = 0.0;  // 0 means pure power decay
};

/// Sum-of-terms envelope with an optional support window: the function
/// vanishes identically outside [support_min, support_max], and inside, each
/// term bounds it as above. known=false means no usable decay information.
struct Envelope {
  bool known = false;
  double support_min = 0.0;
  double support_max = kInf;
  std::vector<DecayTerm> terms;

  static Envelope unknown() { return {}; }
  static Envelope zero();
  static Envelope single(double amp, double power, double rate = 0.0);
  static Envelope compact(double lo, double hi, double amp);
};

Envelope envelope_sum(const Envelope& a, const Envelope& b);
Envelope envelope_product(const Envelope& a, const Envelope& b);
Envelope envelope_scale(const Envelope& a, double c);

/// Composite interpolatory quadrature for integrals
///   omega_{N-1} * int_{r_min}^{r_max} f(r) r^{sigma + N - 1} dr,
/// exact for globally cubic integrands, locally fourth order.
struct Quadrature {
  RadialGrid grid;
  int N = 0;
  double surface_measure = 0.0;            // omega_{N-1}
  std::vector<double> weights;             // nodal dr-weights, all positive
  std::vector<double> measure;             // weights[i] * r_i^{N-1}
  // Per-interval decomposition: interval j spans [r_j, r_{j+1}] and
  // contributes interval_w[j][m] to node interval_base[j]+m, m=0..3.
  std::vector<std::array<double, 4>> interval_w;
  std::vector<int> interval_base;

  int n() const { return grid.n(); }

  /// omega * int f(r) r^{sigma+N-1} dr over the whole grid.
  double integrate(const std::function<double(double)>& f, double sigma) const;

  /// Same for node-sampled values.
  double integrate_nodes(std::span<const double> f, double sigma) const;

  /// omega * int over [nodes[i_lo], nodes[i_hi]] only (0 <= i_lo < i_hi < n).
  double integrate_between(const std::function<double(double)>& f, double sigma,
                           int i_lo, int i_hi) const;

  /// Discrete L^2(r^{N-1} dr) inner product and norm of nodal vectors
  /// (no surface measure factor).
  double inner(std::span<const double> f, std::span<const double> g) const;
  double norm(std::span<const double> f) const;
};

Quadrature build_quadrature(const RadialGrid& g, int N);

/// Upper bound for the mass of omega * int f r^{sigma+N-1} dr discarded
/// outside [r_min, r_max], from the integrand's decay envelopes at 0 and
/// infinity. Returns +inf when an envelope is unknown or does not decay
/// fast enough for the truncated integral to be controlled.
double tail_estimate(const Envelope& at_zero, const Envelope& at_inf, double sigma,
                     int N, const RadialGrid& g);

}  // namespace biharm::grid
