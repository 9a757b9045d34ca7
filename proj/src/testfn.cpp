#include "biharm/testfn.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace biharm::testfn {

Jet jet_var(double r) { return Jet{r, 1.0, 0.0, 0.0, 0.0}; }
Jet jet_const(double c) { return Jet{c, 0.0, 0.0, 0.0, 0.0}; }

Jet operator+(const Jet& a, const Jet& b) {
  return Jet{a.f0 + b.f0, a.f1 + b.f1, a.f2 + b.f2, a.f3 + b.f3, a.f4 + b.f4};
}

Jet operator-(const Jet& a, const Jet& b) {
  return Jet{a.f0 - b.f0, a.f1 - b.f1, a.f2 - b.f2, a.f3 - b.f3, a.f4 - b.f4};
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet h;
  h.f0 = a.f0 * b.f0;
  h.f1 = a.f1 * b.f0 + a.f0 * b.f1;
  h.f2 = a.f2 * b.f0 + 2.0 * a.f1 * b.f1 + a.f0 * b.f2;
  h.f3 = a.f3 * b.f0 + 3.0 * a.f2 * b.f1 + 3.0 * a.f1 * b.f2 + a.f0 * b.f3;
  h.f4 = a.f4 * b.f0 + 4.0 * a.f3 * b.f1 + 6.0 * a.f2 * b.f2 + 4.0 * a.f1 * b.f3 + a.f0 * b.f4;
  return h;
}

Jet operator*(double c, const Jet& a) {
  return Jet{c * a.f0, c * a.f1, c * a.f2, c * a.f3, c * a.f4};
}

namespace {

// Faa di Bruno to order 4 for h = phi(g), given phi^{(k)} at g.f0.
Jet compose(const double d[5], const Jet& g) {
  Jet h;
  h.f0 = d[0];
  h.f1 = d[1] * g.f1;
  h.f2 = d[2] * g.f1 * g.f1 + d[1] * g.f2;
  h.f3 = d[3] * g.f1 * g.f1 * g.f1 + 3.0 * d[2] * g.f1 * g.f2 + d[1] * g.f3;
  h.f4 = d[4] * std::pow(g.f1, 4.0) + 6.0 * d[3] * g.f1 * g.f1 * g.f2 +
         d[2] * (4.0 * g.f1 * g.f3 + 3.0 * g.f2 * g.f2) + d[1] * g.f4;
  return h;
}

}  // namespace

Jet jexp(const Jet& g) {
  const double e = std::exp(g.f0);
  const double d[5] = {e, e, e, e, e};
  return compose(d, g);
}

Jet jpow(const Jet& g, double s) {
  if (!(g.f0 > 0.0)) throw std::domain_error("jpow: base must be positive");
  double d[5];
  d[0] = std::pow(g.f0, s);
  double fac = 1.0;
  for (int k = 1; k <= 4; ++k) {
    fac *= s - (k - 1);
    d[k] = fac * std::pow(g.f0, s - k);
  }
  return compose(d, g);
}

TensorNorms cartesian_tensor_norms(const Jet& f, double r, int N) {
  if (!(r > 0.0)) throw std::invalid_argument("cartesian_tensor_norms: r > 0 required");
  TensorNorms t;
  const double n1 = static_cast<double>(N - 1);
  t.d1 = std::abs(f.f1);
  t.d2 = std::sqrt(f.f2 * f.f2 + n1 * std::pow(f.f1 / r, 2.0));
  const double s = f.f2 / r - f.f1 / (r * r);
  t.d3 = std::sqrt(f.f3 * f.f3 + 3.0 * n1 * s * s);
  const double sp = f.f3 / r - 2.0 * f.f2 / (r * r) + 2.0 * f.f1 / (r * r * r);
  const double qq = f.f2 / (r * r) - f.f1 / (r * r * r);
  t.d4 = std::sqrt(f.f4 * f.f4 + 6.0 * n1 * sp * sp + 3.0 * n1 * (N + 1.0) * qq * qq);
  return t;
}

namespace {

struct PowerTerm {
  double c;
  double m;  // r^m
  double s;  // (1+r^2)^{-s}; unused by the gaussian family
};

using TermList = std::vector<PowerTerm>;

// d/dr [c r^m exp(-sigma r^2)] = c m r^{m-1} e(.) - 2 sigma c r^{m+1} e(.)
TermList d_gauss(const TermList& in, double sigma) {
  TermList out;
  for (const auto& t : in) {
    if (t.m != 0.0) out.push_back({t.c * t.m, t.m - 1.0, 0.0});
    out.push_back({-2.0 * sigma * t.c, t.m + 1.0, 0.0});
  }
  return out;
}

// d/dr [c r^m (1+r^2)^{-s}] = c m r^{m-1}(.)^{-s} - 2 s c r^{m+1} (.)^{-s-1}
TermList d_rational(const TermList& in) {
  TermList out;
  for (const auto& t : in) {
    if (t.m != 0.0) out.push_back({t.c * t.m, t.m - 1.0, t.s});
    out.push_back({-2.0 * t.s * t.c, t.m + 1.0, t.s + 1.0});
  }
  return out;
}

double amp_sum(const TermList& t) {
  double a = 0.0;
  for (const auto& x : t) a += std::abs(x.c);
  return a;
}

double min_power(const TermList& t) {
  double m = grid::kInf;
  for (const auto& x : t) m = std::min(m, x.m);
  return m;
}

}  // namespace

TestFunction TestFunction::power_gaussian(double p, double sigma) {
  if (!(p >= 0.0)) throw std::invalid_argument("power_gaussian: p >= 0 required");
  if (!(sigma > 0.0)) throw std::invalid_argument("power_gaussian: sigma > 0 required");
  std::array<TermList, 5> lists;
  lists[0] = {PowerTerm{1.0, p, 0.0}};
  for (int k = 1; k <= 4; ++k) lists[static_cast<std::size_t>(k)] = d_gauss(lists[static_cast<std::size_t>(k - 1)], sigma);

  TestFunction f;
  f.eval_ = [lists, sigma](double r) {
    Jet j;
    const double e = std::exp(-sigma * r * r);
    double* out[5] = {&j.f0, &j.f1, &j.f2, &j.f3, &j.f4};
    for (int k = 0; k <= 4; ++k) {
      double v = 0.0;
      for (const auto& t : lists[static_cast<std::size_t>(k)]) v += t.c * std::pow(r, t.m);
      *out[k] = v * e;
    }
    return j;
  };
  for (int k = 0; k <= 4; ++k) {
    const auto& lk = lists[static_cast<std::size_t>(k)];
    double m_max = -grid::kInf;
    for (const auto& t : lk) m_max = std::max(m_max, t.m);
    f.env_zero_[static_cast<std::size_t>(k)] = grid::Envelope::single(amp_sum(lk), min_power(lk), 0.0);
    f.env_inf_[static_cast<std::size_t>(k)] = grid::Envelope::single(amp_sum(lk), m_max, sigma);
  }
  std::ostringstream os;
  os << "pg(p=" << p << ",s=" << sigma << ")";
  f.label_ = os.str();
  return f;
}

TestFunction TestFunction::rational(int p, int q) {
  if (p < 0) throw std::invalid_argument("rational: p >= 0 required");
  if (q < 1) throw std::invalid_argument("rational: q >= 1 required");
  std::array<TermList, 5> lists;
  lists[0] = {PowerTerm{1.0, static_cast<double>(p), static_cast<double>(q)}};
  for (int k = 1; k <= 4; ++k) lists[static_cast<std::size_t>(k)] = d_rational(lists[static_cast<std::size_t>(k - 1)]);

  TestFunction f;
  f.eval_ = [lists](double r) {
    Jet j;
    const double base = 1.0 + r * r;
    double* out[5] = {&j.f0, &j.f1, &j.f2, &j.f3, &j.f4};
    for (int k = 0; k <= 4; ++k) {
      double v = 0.0;
      for (const auto& t : lists[static_cast<std::size_t>(k)]) {
        v += t.c * std::pow(r, t.m) * std::pow(base, -t.s);
      }
      *out[k] = v;
    }
    return j;
  };
  for (int k = 0; k <= 4; ++k) {
    const auto& lk = lists[static_cast<std::size_t>(k)];
    double p_inf = -grid::kInf;
    for (const auto& t : lk) p_inf = std::max(p_inf, t.m - 2.0 * t.s);  // (1+r^2)^{-s} <= r^{-2s}
    f.env_zero_[static_cast<std::size_t>(k)] = grid::Envelope::single(amp_sum(lk), min_power(lk), 0.0);
    f.env_inf_[static_cast<std::size_t>(k)] = grid::Envelope::single(amp_sum(lk), p_inf, 0.0);
  }
  std::ostringstream os;
  os << "rat(p=" << p << ",q=" << q << ")";
  f.label_ = os.str();
  return f;
}

TestFunction TestFunction::annulus_bump(double a, double b) {
  if (!(a > 0.0 && b > a)) throw std::invalid_argument("annulus_bump: need 0 < a < b");
  TestFunction f;
  f.eval_ = [a, b](double r) {
    if (r <= a || r >= b) return Jet{};
    const Jet t = (1.0 / (b - a)) * (jet_var(r) - jet_const(a));
    const Jet g = t * (jet_const(1.0) - t);
    // exp(4 - 1/g); peak value 1 at the midpoint
    return jexp(jet_const(4.0) - jpow(g, -1.0));
  };
  // Derivative magnitudes on the support, sampled with a safety factor.
  for (int k = 0; k <= 4; ++k) {
    double amp = 1.0;
    for (int i = 1; i < 256; ++i) {
      const double r = a + (b - a) * i / 256.0;
      const Jet j = f.eval_(r);
      const double vals[5] = {j.f0, j.f1, j.f2, j.f3, j.f4};
      amp = std::max(amp, std::abs(vals[k]));
    }
    f.env_zero_[static_cast<std::size_t>(k)] = grid::Envelope::compact(a, b, 2.0 * amp);
    f.env_inf_[static_cast<std::size_t>(k)] = grid::Envelope::compact(a, b, 2.0 * amp);
  }
  std::ostringstream os;
  os << "bump(" << a << "," << b << ")";
  f.label_ = os.str();
  return f;
}

TestFunction TestFunction::linear_combination(double c1, const TestFunction& f1, double c2,
                                              const TestFunction& f2) {
  TestFunction f;
  auto e1 = f1.eval_, e2 = f2.eval_;
  f.eval_ = [c1, e1, c2, e2](double r) { return c1 * e1(r) + c2 * e2(r); };
  for (int k = 0; k <= 4; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    f.env_zero_[ks] = grid::envelope_sum(grid::envelope_scale(f1.env_zero_[ks], c1),
                                         grid::envelope_scale(f2.env_zero_[ks], c2));
    f.env_inf_[ks] = grid::envelope_sum(grid::envelope_scale(f1.env_inf_[ks], c1),
                                        grid::envelope_scale(f2.env_inf_[ks], c2));
  }
  std::ostringstream os;
  os << c1 << "*" << f1.label_ << "+" << c2 << "*" << f2.label_;
  f.label_ = os.str();
  return f;
}

TestFunction TestFunction::scaled_argument(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("scaled_argument: s > 0 required");
  TestFunction f;
  auto inner = eval_;
  f.eval_ = [inner, s](double r) {
    Jet j = inner(s * r);
    j.f1 *= s;
    j.f2 *= s * s;
    j.f3 *= s * s * s;
    j.f4 *= s * s * s * s;
    return j;
  };
  for (int k = 0; k <= 4; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    auto remap = [s, k](grid::Envelope e) {
      if (!e.known) return e;
      for (auto& t : e.terms) {
        t.amp *= std::pow(s, t.power + k);
        t.rate *= s * s;
      }
      e.support_min /= s;
      if (e.support_max < grid::kInf) e.support_max /= s;
      return e;
    };
    f.env_zero_[ks] = remap(env_zero_[ks]);
    f.env_inf_[ks] = remap(env_inf_[ks]);
  }
  std::ostringstream os;
  os << label_ << "@s=" << s;
  f.label_ = os.str();
  return f;
}

TestFunction TestFunction::product_with(const TestFunction& other) const {
  TestFunction f;
  auto e1 = eval_, e2 = other.eval_;
  f.eval_ = [e1, e2](double r) { return e1(r) * e2(r); };
  // Leibniz: (fg)^{(k)} = sum C(k,j) f^{(j)} g^{(k-j)}
  static const double binom[5][5] = {{1, 0, 0, 0, 0},
                                     {1, 1, 0, 0, 0},
                                     {1, 2, 1, 0, 0},
                                     {1, 3, 3, 1, 0},
                                     {1, 4, 6, 4, 1}};
  for (int k = 0; k <= 4; ++k) {
    grid::Envelope z = grid::Envelope::zero();
    grid::Envelope i = grid::Envelope::zero();
    for (int j = 0; j <= k; ++j) {
      const double c = binom[k][j];
      z = grid::envelope_sum(z, grid::envelope_scale(grid::envelope_product(
                                   env_zero_[static_cast<std::size_t>(j)],
                                   other.env_zero_[static_cast<std::size_t>(k - j)]), c));
      i = grid::envelope_sum(i, grid::envelope_scale(grid::envelope_product(
                                   env_inf_[static_cast<std::size_t>(j)],
                                   other.env_inf_[static_cast<std::size_t>(k - j)]), c));
    }
    f.env_zero_[static_cast<std::size_t>(k)] = z;
    f.env_inf_[static_cast<std::size_t>(k)] = i;
  }
  f.label_ = label_ + "*" + other.label_;
  return f;
}

Jet TestFunction::eval(double r) const {
  if (!(r > 0.0)) throw std::invalid_argument("TestFunction::eval: r > 0 required");
  if (!eval_) throw std::logic_error("TestFunction: empty");
  return eval_(r);
}

grid::Envelope TestFunction::envelope_zero(int order) const {
  if (order < 0 || order > 4) throw std::invalid_argument("envelope_zero: order 0..4");
  return env_zero_[static_cast<std::size_t>(order)];
}

grid::Envelope TestFunction::envelope_inf(int order) const {
  if (order < 0 || order > 4) throw std::invalid_argument("envelope_inf: order 0..4");
  return env_inf_[static_cast<std::size_t>(order)];
}

Jet eval_derivatives(const TestFunction& f, double r) { return f.eval(r); }

CutoffSequence::CutoffSequence(int n) : n_(n) {
  if (n < 2) {
    throw std::invalid_argument(
        "CutoffSequence: n >= 2 required (the plateau B(n)\\B(2/n) is empty for n=1)");
  }
}

Jet CutoffSequence::profile(double t) {
  if (t <= 1.0) return jet_const(1.0);
  if (t >= 2.0) return Jet{};
  // h(2-t) / (h(2-t) + h(t-1)) with h(x) = exp(-1/x)
  const Jet jt = jet_var(t);
  const Jet ha = jexp(jet_const(0.0) - jpow(jet_const(2.0) - jt, -1.0));
  const Jet hb = jexp(jet_const(0.0) - jpow(jt - jet_const(1.0), -1.0));
  return ha * jpow(ha + hb, -1.0);
}

Jet CutoffSequence::eval(double r) const {
  const double n = static_cast<double>(n_);
  auto rescale = [](Jet j, double c) {
    j.f1 *= c;
    j.f2 *= c * c;
    j.f3 *= c * c * c;
    j.f4 *= c * c * c * c;
    return j;
  };
  const Jet inner = rescale(profile(n * r), n);       // phi(n r)
  const Jet outer = rescale(profile(r / n), 1.0 / n); // phi(r / n)
  return (jet_const(1.0) - inner) * outer;
}

TestFunction CutoffSequence::as_testfn() const {
  const int n = n_;
  TestFunction f;
  CutoffSequence self(n);
  f.eval_ = [self](double r) { return self.eval(r); };
  for (int k = 0; k <= 4; ++k) {
    // |D^k phi_n| <= C / r^k on the support, C profile-dependent; the
    // envelope only needs compactness for tail bookkeeping.
    const double amp = std::pow(4.0, k) * 16.0;
    const auto e = grid::Envelope::compact(1.0 / n, 2.0 * n, amp);
    f.env_zero_[static_cast<std::size_t>(k)] = e;
    f.env_inf_[static_cast<std::size_t>(k)] = e;
  }
  f.label_ = "phi_" + std::to_string(n);
  return f;
}

CutoffSequence make_cutoff(int n) { return CutoffSequence(n); }

CutoffBoundReport cutoff_bound_check(const std::vector<int>& ns, int n_samples, int N,
                                     double c_limit) {
  CutoffBoundReport rep;
  rep.per_order = {0.0, 0.0, 0.0, 0.0};
  for (int n : ns) {
    const CutoffSequence seq(n);
    // The derivatives live on the two ramps t in (1,2) with t = n r
    // (inner) and t = r / n (outer); sample both with the same t-grid so
    // the observed sup is n-independent, plus a plateau spot check.
    std::vector<double> radii;
    radii.reserve(static_cast<std::size_t>(2 * n_samples) + 3);
    for (int i = 0; i < n_samples; ++i) {
      const double t = 1.0 + (i + 0.5) / n_samples;
      radii.push_back(t / n);
      radii.push_back(t * n);
    }
    radii.push_back(1.0);
    radii.push_back(0.5 / n);
    radii.push_back(2.1 * n);
    for (double r : radii) {
      const Jet j = seq.eval(r);
      const TensorNorms t = cartesian_tensor_norms(j, r, N);
      const double scaled[4] = {r * t.d1, r * r * t.d2, r * r * r * t.d3, r * r * r * r * t.d4};
      for (int k = 0; k < 4; ++k) {
        if (scaled[k] > rep.per_order[static_cast<std::size_t>(k)]) {
          rep.per_order[static_cast<std::size_t>(k)] = scaled[k];
        }
        if (scaled[k] > rep.c_profile) {
          rep.c_profile = scaled[k];
          std::ostringstream os;
          os << "phi_" << n << " at r=" << r << " order " << (k + 1);
          rep.worst_sample = os.str();
        }
      }
    }
  }
  rep.pass = rep.c_profile <= c_limit;
  return rep;
}

int rational_q_min(int p, double beta, int N) {
  // smallest integer q with 2(p - 2q) + 4 beta + N - 1 <= -9
  const double q = (2.0 * p + 4.0 * beta + N + 8.0) / 4.0;
  return static_cast<int>(std::ceil(q));
}

std::vector<TestFunction> make_family(const FamilySpec& spec, double beta, int N) {
  std::vector<TestFunction> base;
  for (int p : spec.gauss_p) {
    for (double s : spec.gauss_sigma) base.push_back(TestFunction::power_gaussian(p, s));
  }
  for (int p : spec.rational_p) {
    const int q0 = rational_q_min(p, beta, N);
    for (int i = 0; i < spec.rational_q_count; ++i) {
      base.push_back(TestFunction::rational(p, q0 + 2 * i));
    }
  }
  std::vector<TestFunction> family = base;
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, base.size() - 1);
  std::uniform_real_distribution<double> mag(0.25, 1.0);
  std::uniform_int_distribution<int> sign(0, 1);
  for (int i = 0; i < spec.n_combos; ++i) {
    std::size_t i1 = pick(rng);
    std::size_t i2 = pick(rng);
    if (i2 == i1) i2 = (i1 + 1) % base.size();
    const double c1 = (sign(rng) ? 1.0 : -1.0) * mag(rng);
    const double c2 = (sign(rng) ? 1.0 : -1.0) * mag(rng);
    family.push_back(TestFunction::linear_combination(c1, base[i1], c2, base[i2]));
  }
  return family;
}

}  // namespace biharm::testfn
