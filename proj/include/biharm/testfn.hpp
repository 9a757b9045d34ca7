#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "biharm/grid.hpp"

namespace biharm::testfn {

/// Value and first four derivatives of a scalar function of r.
struct Jet {
  double f0 = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0, f4 = 0.0;
};

Jet jet_var(double r);
Jet jet_const(double c);
Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);  // Leibniz to order 4
Jet operator*(double c, const Jet& a);
Jet jexp(const Jet& g);
Jet jpow(const Jet& g, double s);  // requires g.f0 > 0

/// Frobenius norms of the Cartesian derivative tensors of the radial
/// extension u(x) = f(|x|), evaluated from the radial jet. The closed
/// forms were derived once by exact Cartesian differentiation at a point
/// (r, 0, ..., 0) and are cross-checked against finite differences in the
/// test suite.
struct TensorNorms {
  double d1 = 0.0;  // |Du|
  double d2 = 0.0;  // |D^2 u|
  double d3 = 0.0;  // |D^3 u|
  double d4 = 0.0;  // |D^4 u|
};
TensorNorms cartesian_tensor_norms(const Jet& f, double r, int N);

/// Closed-form radial test function with exact derivatives up to order 4;
/// the numerical stand-in for compactly supported smooth functions on
/// R^N minus the origin.
class TestFunction {
 public:
  TestFunction() = default;

  /// f(r) = r^p exp(-sigma r^2), p >= 0 (real powers allowed), sigma > 0.
  static TestFunction power_gaussian(double p, double sigma);
  /// f(r) = r^p (1+r^2)^{-q}, p >= 0, q >= 1.
  static TestFunction rational(int p, int q);
  /// Smooth bump supported exactly on the annulus [a, b], peak value ~1.
  static TestFunction annulus_bump(double a, double b);
  static TestFunction linear_combination(double c1, const TestFunction& f1, double c2,
                                         const TestFunction& f2);
  /// r -> f(s r); stays inside the closed-form families.
  TestFunction scaled_argument(double s) const;
  /// Pointwise product (used for cutoff multiplication).
  TestFunction product_with(const TestFunction& other) const;

  Jet eval(double r) const;  // throws for r <= 0
  double operator()(double r) const { return eval(r).f0; }
  const std::string& label() const { return label_; }

  /// Envelopes of the order-k derivative (k = 0..4) near 0 / near infinity.
  grid::Envelope envelope_zero(int order) const;
  grid::Envelope envelope_inf(int order) const;

 private:
  friend class CutoffSequence;
  std::function<Jet(double)> eval_;
  std::array<grid::Envelope, 5> env_zero_{};
  std::array<grid::Envelope, 5> env_inf_{};
  std::string label_;
};

/// (f, f', f'', f''', f'''') at r; rejects r <= 0.
Jet eval_derivatives(const TestFunction& f, double r);

/// Smooth cutoff phi_n: vanishes on B(1/n) and outside B(2n), equals 1 on
/// B(n) \ B(2/n). Defined for n >= 2 (the plateau is empty for n = 1).
class CutoffSequence {
 public:
  explicit CutoffSequence(int n);
  int n() const { return n_; }
  Jet eval(double r) const;
  TestFunction as_testfn() const;

  /// Base profile: 1 on [0,1], 0 on [2,inf), smooth ramp between.
  static Jet profile(double t);

 private:
  int n_ = 2;
};

CutoffSequence make_cutoff(int n);

/// Sampled verification of the scale-invariant derivative bounds
/// sup_x |x|^k |D^k phi_n(x)| <= C with one C for all n in `ns`.
struct CutoffBoundReport {
  bool pass = false;
  double c_profile = 0.0;         // observed sup over all n and samples
  std::array<double, 4> per_order{};  // sup of r^k |D^k phi_n| for k=1..4
  std::string worst_sample;
};
CutoffBoundReport cutoff_bound_check(const std::vector<int>& ns, int n_samples, int N,
                                     double c_limit);

/// Default sweep family (power-gaussians, rationals with integrable-by-
/// construction exponents, and seeded two-member linear combinations).
struct FamilySpec {
  std::vector<int> gauss_p = {4, 5, 6, 7, 8};
  std::vector<double> gauss_sigma = {0.25, 0.5, 1.0, 2.0};
  std::vector<int> rational_p = {4, 6};
  int rational_q_count = 2;  // q_min(p), q_min(p)+2, ...
  int n_combos = 50;
  std::uint64_t seed = 42;
};

/// Smallest q such that r^{4 beta} u^2 r^{N-1} decays like r^{-9} or faster.
int rational_q_min(int p, double beta, int N);

std::vector<TestFunction> make_family(const FamilySpec& spec, double beta, int N);

}  // namespace biharm::testfn
