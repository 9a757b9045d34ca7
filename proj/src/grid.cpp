#include "biharm/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace biharm::grid {

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double unit_sphere_area(int N) {
  if (N < 1) throw std::invalid_argument("unit_sphere_area: N >= 1 required");
  return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

double RadialGrid::node_at(int j) const {
  if (j >= 0 && j < n()) return nodes[static_cast<std::size_t>(j)];
  return r_min * std::pow(ratio, static_cast<double>(j));
}

std::uint64_t RadialGrid::fingerprint() const {
  auto mix = [](std::uint64_t h, std::uint64_t x) {
    h ^= x;
    h *= 0x100000001b3ULL;
    return h;
  };
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto bits = [](double d) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(d));
    __builtin_memcpy(&u, &d, sizeof(u));
    return u;
  };
  h = mix(h, bits(r_min));
  h = mix(h, bits(r_max));
  h = mix(h, static_cast<std::uint64_t>(n()));
  return h;
}

RadialGrid build_grid(double r_min, double r_max, int n_nodes) {
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw std::invalid_argument("build_grid: need 0 < r_min < r_max");
  }
  if (n_nodes < 2) {
    throw std::invalid_argument("build_grid: n_nodes >= 2 required");
  }
  RadialGrid g;
  g.r_min = r_min;
  g.r_max = r_max;
  g.ratio = std::pow(r_max / r_min, 1.0 / static_cast<double>(n_nodes - 1));
  g.nodes.resize(static_cast<std::size_t>(n_nodes));
  for (int j = 0; j < n_nodes; ++j) {
    g.nodes[static_cast<std::size_t>(j)] = r_min * std::pow(r_max / r_min, static_cast<double>(j) / (n_nodes - 1));
  }
  g.nodes.front() = r_min;
  g.nodes.back() = r_max;
  return g;
}

Envelope Envelope::zero() {
  Envelope e;
  e.known = true;
  e.support_min = kInf;
  e.support_max = 0.0;
  return e;
}

Envelope Envelope::single(double amp, double power, double rate) {
  Envelope e;
  e.known = true;
  e.terms = {DecayTerm{amp, power, rate}};
  return e;
}

Envelope Envelope::compact(double lo, double hi, double amp) {
  Envelope e;
  e.known = true;
  e.support_min = lo;
  e.support_max = hi;
  e.terms = {DecayTerm{amp, 0.0, 0.0}};
  return e;
}

Envelope envelope_sum(const Envelope& a, const Envelope& b) {
  if (!a.known || !b.known) return Envelope::unknown();
  // Union window plus both term lists overestimates |f+g|: each term bound
  // is nonnegative and the corresponding function vanishes outside its own
  // window, so extending its integration range only enlarges the estimate.
  Envelope e;
  e.known = true;
  e.support_min = std::min(a.support_min, b.support_min);
  e.support_max = std::max(a.support_max, b.support_max);
  e.terms = a.terms;
  e.terms.insert(e.terms.end(), b.terms.begin(), b.terms.end());
  return e;
}

Envelope envelope_product(const Envelope& a, const Envelope& b) {
  if (!a.known || !b.known) return Envelope::unknown();
  Envelope e;
  e.known = true;
  e.support_min = std::max(a.support_min, b.support_min);
  e.support_max = std::min(a.support_max, b.support_max);
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      e.terms.push_back(DecayTerm{ta.amp * tb.amp, ta.power + tb.power, ta.rate + tb.rate});
    }
  }
  return e;
}

Envelope envelope_scale(const Envelope& a, double c) {
  Envelope e = a;
  for (auto& t : e.terms) t.amp *= std::abs(c);
  return e;
}

namespace {

// Integrals over [x[base], x[base+1]] of the cubic Lagrange basis on
// nodes x[s..s+3], accumulated exactly via monomials in t - x[s].
std::array<double, 4> cubic_panel_weights(const std::vector<double>& x, int s, int base) {
  const double origin = x[static_cast<std::size_t>(s)];
  double xi[4];
  for (int i = 0; i < 4; ++i) xi[i] = x[static_cast<std::size_t>(s + i)] - origin;
  const double lo = x[static_cast<std::size_t>(base)] - origin;
  const double hi = x[static_cast<std::size_t>(base + 1)] - origin;

  auto mono = [lo, hi](int k) {  // int_lo^hi t^k dt
    return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
  };

  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) {
    double roots[3];
    int m = 0;
    double denom = 1.0;
    for (int k = 0; k < 4; ++k) {
      if (k == i) continue;
      roots[m++] = xi[k];
      denom *= xi[i] - xi[k];
    }
    // (t-a)(t-b)(t-c) = t^3 - e1 t^2 + e2 t - e3
    const double e1 = roots[0] + roots[1] + roots[2];
    const double e2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2];
    const double e3 = roots[0] * roots[1] * roots[2];
    w[static_cast<std::size_t>(i)] = (mono(3) - e1 * mono(2) + e2 * mono(1) - e3 * mono(0)) / denom;
  }
  return w;
}

}  // namespace

Quadrature build_quadrature(const RadialGrid& g, int N) {
  if (g.n() < 4) throw std::invalid_argument("build_quadrature: grid needs >= 4 nodes");
  if (N < 1) throw std::invalid_argument("build_quadrature: N >= 1 required");
  Quadrature q;
  q.grid = g;
  q.N = N;
  q.surface_measure = unit_sphere_area(N);
  const int n = g.n();
  q.weights.assign(static_cast<std::size_t>(n), 0.0);
  q.interval_w.resize(static_cast<std::size_t>(n - 1));
  q.interval_base.resize(static_cast<std::size_t>(n - 1));
  for (int j = 0; j < n - 1; ++j) {
    int s = j - 1;
    if (s < 0) s = 0;
    if (s > n - 4) s = n - 4;
    const auto w = cubic_panel_weights(g.nodes, s, j);
    q.interval_base[static_cast<std::size_t>(j)] = s;
    q.interval_w[static_cast<std::size_t>(j)] = w;
    for (int m = 0; m < 4; ++m) {
      q.weights[static_cast<std::size_t>(s + m)] += w[static_cast<std::size_t>(m)];
    }
  }
  q.measure.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    q.measure[static_cast<std::size_t>(i)] =
        q.weights[static_cast<std::size_t>(i)] * std::pow(g.nodes[static_cast<std::size_t>(i)], N - 1);
  }
  return q;
}

double Quadrature::integrate(const std::function<double(double)>& f, double sigma) const {
  const int nn = n();
  std::vector<double> terms(static_cast<std::size_t>(nn));
  for (int i = 0; i < nn; ++i) {
    const double r = grid.nodes[static_cast<std::size_t>(i)];
    const double v = f(r);
    if (!std::isfinite(v)) {
      throw std::runtime_error("integrate: non-finite integrand at node r=" + std::to_string(r));
    }
    terms[static_cast<std::size_t>(i)] =
        weights[static_cast<std::size_t>(i)] * v * std::pow(r, sigma + N - 1);
  }
  return surface_measure * pairwise_sum(terms);
}

double Quadrature::integrate_nodes(std::span<const double> f, double sigma) const {
  const int nn = n();
  if (static_cast<int>(f.size()) != nn) {
    throw std::invalid_argument("integrate_nodes: sample size mismatch");
  }
  std::vector<double> terms(static_cast<std::size_t>(nn));
  for (int i = 0; i < nn; ++i) {
    const double r = grid.nodes[static_cast<std::size_t>(i)];
    const double v = f[static_cast<std::size_t>(i)];
    if (!std::isfinite(v)) {
      throw std::runtime_error("integrate_nodes: non-finite sample at node r=" + std::to_string(r));
    }
    terms[static_cast<std::size_t>(i)] =
        weights[static_cast<std::size_t>(i)] * v * std::pow(r, sigma + N - 1);
  }
  return surface_measure * pairwise_sum(terms);
}

double Quadrature::integrate_between(const std::function<double(double)>& f, double sigma,
                                     int i_lo, int i_hi) const {
  if (i_lo < 0 || i_hi >= n() || i_lo >= i_hi) {
    throw std::invalid_argument("integrate_between: bad node range");
  }
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(4 * (i_hi - i_lo)));
  for (int j = i_lo; j < i_hi; ++j) {
    const int s = interval_base[static_cast<std::size_t>(j)];
    const auto& w = interval_w[static_cast<std::size_t>(j)];
    for (int m = 0; m < 4; ++m) {
      const double r = grid.nodes[static_cast<std::size_t>(s + m)];
      const double v = f(r);
      if (!std::isfinite(v)) {
        throw std::runtime_error("integrate_between: non-finite integrand at node r=" +
                                 std::to_string(r));
      }
      terms.push_back(w[static_cast<std::size_t>(m)] * v * std::pow(r, sigma + N - 1));
    }
  }
  return surface_measure * pairwise_sum(terms);
}

double Quadrature::inner(std::span<const double> f, std::span<const double> g) const {
  const int nn = n();
  std::vector<double> terms(static_cast<std::size_t>(nn));
  for (int i = 0; i < nn; ++i) {
    terms[static_cast<std::size_t>(i)] =
        measure[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
  }
  return pairwise_sum(terms);
}

double Quadrature::norm(std::span<const double> f) const { return std::sqrt(inner(f, f)); }

namespace {

// int_R^inf r^E exp(-s r^2) dr  <=  R^{E-1} exp(-s R^2) / s, valid once
// s R^2 >= max(E-1, 0) + 1 (incomplete-gamma remainder bound).
double gaussian_tail_bound(double E, double s, double R) {
  const double x = s * R * R;
  const double a = 0.5 * (E + 1.0);
  if (x < 2.0 * std::max(a - 1.0, 0.0) + 1.0) return kInf;
  return std::pow(R, E - 1.0) * std::exp(-x) / s;
}

double side_bound_inf(const Envelope& env, double sigma, int N, double R) {
  if (!env.known) return kInf;
  if (R >= env.support_max) return 0.0;
  double total = 0.0;
  for (const auto& t : env.terms) {
    const double E = t.power + sigma + N - 1;
    if (t.rate > 0.0) {
      total += t.amp * gaussian_tail_bound(E, t.rate, R);
    } else if (env.support_max < kInf) {
      // truncated power integral int_R^{smax} r^E dr
      const double hi = env.support_max;
      total += t.amp * std::abs(std::pow(hi, E + 1.0) - std::pow(R, E + 1.0)) /
               std::max(std::abs(E + 1.0), 1e-12);
    } else {
      if (E >= -1.0) return kInf;
      total += t.amp * std::pow(R, E + 1.0) / (-E - 1.0);
    }
  }
  return total;
}

double side_bound_zero(const Envelope& env, double sigma, int N, double r0) {
  if (!env.known) return kInf;
  if (r0 <= env.support_min) return 0.0;
  const double lo = env.support_min;
  double total = 0.0;
  for (const auto& t : env.terms) {
    const double E = t.power + sigma + N - 1;
    if (E <= -1.0) {
      if (lo <= 0.0) return kInf;
      total += t.amp * std::abs(std::pow(r0, E + 1.0) - std::pow(lo, E + 1.0)) /
               std::max(std::abs(E + 1.0), 1e-12);
    } else {
      total += t.amp * std::pow(r0, E + 1.0) / (E + 1.0);
    }
  }
  return total;
}

}  // namespace

double tail_estimate(const Envelope& at_zero, const Envelope& at_inf, double sigma, int N,
                     const RadialGrid& g) {
  const double below = side_bound_zero(at_zero, sigma, N, g.r_min);
  const double above = side_bound_inf(at_inf, sigma, N, g.r_max);
  return unit_sphere_area(N) * (below + above);
}

}  // namespace biharm::grid
