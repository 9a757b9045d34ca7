#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "biharm/testfn.hpp"

using namespace biharm;
using testfn::Jet;
using testfn::TestFunction;

TEST_CASE("frozen evaluation examples") {
  const auto f1 = TestFunction::power_gaussian(0, 0.5);  // e^{-r^2/2}
  CHECK(f1.eval(0.7).f1 == doctest::Approx(-0.7 * std::exp(-0.245)).epsilon(1e-14));

  const auto f2 = TestFunction::power_gaussian(4, 1.0);  // r^4 e^{-r^2}
  CHECK(f2.eval(1.0).f0 == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(f2.eval(1.0).f1 == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));

  const auto f3 = TestFunction::rational(4, 3);  // r^4 (1+r^2)^{-3}
  CHECK(f3.eval(2.0).f0 == doctest::Approx(16.0 / 125.0).epsilon(1e-14));

  CHECK_THROWS(f1.eval(0.0));
  CHECK_THROWS(f1.eval(-1.0));
}

namespace {

// centered difference (fourth order) of the exact (k-1)-th derivative,
// step h = 1e-4 r
double fd_next_order(const TestFunction& f, double r, int k) {
  const double h = 1e-4 * r;
  auto d = [&](double x) {
    const Jet j = f.eval(x);
    const double v[5] = {j.f0, j.f1, j.f2, j.f3, j.f4};
    return v[k - 1];
  };
  return (d(r - 2 * h) - 8 * d(r - h) + 8 * d(r + h) - d(r + 2 * h)) / (12.0 * h);
}

std::vector<TestFunction> consistency_sample() {
  std::vector<TestFunction> fs;
  fs.push_back(TestFunction::power_gaussian(4, 0.25));
  fs.push_back(TestFunction::power_gaussian(7, 2.0));
  fs.push_back(TestFunction::rational(4, 9));
  fs.push_back(TestFunction::rational(6, 10));
  fs.push_back(TestFunction::annulus_bump(0.5, 3.0));
  fs.push_back(TestFunction::linear_combination(0.7, fs[0], -0.4, fs[2]));
  fs.push_back(fs[1].scaled_argument(1.7));
  fs.push_back(fs[0].product_with(fs[2]));
  return fs;
}

}  // namespace

TEST_CASE("derivative consistency: all four orders, relative 1e-6") {
  for (const auto& f : consistency_sample()) {
    for (double r : {0.31, 0.8, 1.0, 1.9, 2.6}) {
      const Jet j = f.eval(r);
      const double exact[5] = {j.f0, j.f1, j.f2, j.f3, j.f4};
      double scale = 0.0;
      for (double v : exact) scale = std::max(scale, std::abs(v));
      if (scale < 1e-8) continue;  // outside or at the edge of a bump support
      for (int k = 1; k <= 4; ++k) {
        const double fd = fd_next_order(f, r, k);
        CHECK(std::abs(fd - exact[k]) <= 1e-6 * std::max(scale, std::abs(exact[k])));
      }
    }
  }
}

TEST_CASE("jet arithmetic: exp and pow against closed forms") {
  const Jet r = testfn::jet_var(2.0);
  const Jet g = testfn::jpow(r, 3.0);  // r^3
  CHECK(g.f0 == doctest::Approx(8.0));
  CHECK(g.f1 == doctest::Approx(12.0));
  CHECK(g.f2 == doctest::Approx(12.0));
  CHECK(g.f3 == doctest::Approx(6.0));
  CHECK(g.f4 == doctest::Approx(0.0));

  const Jet e = testfn::jexp((-1.0) * (r * r));  // e^{-r^2}
  const double v = std::exp(-4.0);
  CHECK(e.f0 == doctest::Approx(v).epsilon(1e-13));
  CHECK(e.f1 == doctest::Approx(-4.0 * v).epsilon(1e-13));          // -2r e
  CHECK(e.f2 == doctest::Approx((16.0 - 2.0) * v).epsilon(1e-13));  // (4r^2-2) e
  CHECK_THROWS(testfn::jpow(testfn::jet_const(-1.0), 0.5));
}

namespace {

// Cartesian finite-difference oracle for the tensor norms of u(x) = f(|x|)
// at the axis point (r, 0, ..., 0). Each distinct nonzero index pattern is
// differenced directly; h is Richardson-refined once.
struct CartOracle {
  double d3sq, d4sq;
};

double radial_at(const TestFunction& f, double x1, double x2, double x3) {
  return f(std::sqrt(x1 * x1 + x2 * x2 + x3 * x3));
}

CartOracle cartesian_fd(const TestFunction& f, double r, int N, double h) {
  auto u = [&](double a, double b, double c) { return radial_at(f, r + a, b, c); };
  // D111: third derivative along the axis
  const double d111 =
      (u(2 * h, 0, 0) - 2 * u(h, 0, 0) + 2 * u(-h, 0, 0) - u(-2 * h, 0, 0)) / (2 * h * h * h);
  // D1mm: d/dx1 of second transverse difference
  auto dmm = [&](double a) { return (u(a, h, 0) - 2 * u(a, 0, 0) + u(a, -h, 0)) / (h * h); };
  const double d1mm = (dmm(h) - dmm(-h)) / (2 * h);
  // D1111
  const double d1111 = (u(2 * h, 0, 0) - 4 * u(h, 0, 0) + 6 * u(0, 0, 0) - 4 * u(-h, 0, 0) +
                        u(-2 * h, 0, 0)) /
                       (h * h * h * h);
  // D11mm: second along axis of second transverse
  const double d11mm = (dmm(h) - 2 * dmm(0) + dmm(-h)) / (h * h);
  // Dmmm'm': second transverse in two distinct transverse directions
  auto dm2 = [&](double b) { return (u(0, b, h) - 2 * u(0, b, 0) + u(0, b, -h)) / (h * h); };
  const double dmmm2 = (dm2(h) - 2 * dm2(0) + dm2(-h)) / (h * h);
  // Dmmmm: pure fourth transverse
  const double dmmmm = (u(0, 2 * h, 0) - 4 * u(0, h, 0) + 6 * u(0, 0, 0) - 4 * u(0, -h, 0) +
                        u(0, -2 * h, 0)) /
                       (h * h * h * h);
  CartOracle o;
  o.d3sq = d111 * d111 + 3.0 * (N - 1) * d1mm * d1mm;
  o.d4sq = d1111 * d1111 + 6.0 * (N - 1) * d11mm * d11mm +
           3.0 * (N - 1) * (N - 2) * dmmm2 * dmmm2 + (N - 1) * dmmmm * dmmmm;
  return o;
}

}  // namespace

TEST_CASE("tensor norms: frozen identities") {
  // |Du| = |f'|; |D^2u|^2 = f''^2 + (N-1)(f'/r)^2
  const auto f = TestFunction::power_gaussian(4, 1.0);
  for (double r : {0.8, 1.3}) {
    const Jet j = f.eval(r);
    const auto t = testfn::cartesian_tensor_norms(j, r, 9);
    CHECK(t.d1 == doctest::Approx(std::abs(j.f1)).epsilon(1e-14));
    CHECK(t.d2 * t.d2 ==
          doctest::Approx(j.f2 * j.f2 + 8.0 * std::pow(j.f1 / r, 2.0)).epsilon(1e-13));
    // |Lap u| <= sqrt(N) |D^2 u|
    const double lap = j.f2 + 8.0 * j.f1 / r;
    CHECK(std::abs(lap) <= std::sqrt(9.0) * t.d2 * (1 + 1e-13));
  }

  // locally quadratic profile r^2/2: D^2 = I, higher tensors vanish
  const Jet quad{0.5 * 1.21, 1.1, 1.0, 0.0, 0.0};
  const auto tq = testfn::cartesian_tensor_norms(quad, 1.1, 9);
  CHECK(tq.d2 * tq.d2 == doctest::Approx(9.0).epsilon(1e-13));
  CHECK(tq.d3 == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(tq.d4 == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("tensor norms: cartesian finite-difference oracle") {
  struct Case {
    TestFunction f;
    double r;
    int N;
  };
  const std::vector<Case> cases = {{TestFunction::power_gaussian(4, 1.0), 1.3, 9},
                                   {TestFunction::rational(4, 9), 0.8, 5}};
  for (const auto& c : cases) {
    const Jet j = c.f.eval(c.r);
    const auto t = testfn::cartesian_tensor_norms(j, c.r, c.N);
    const auto o1 = cartesian_fd(c.f, c.r, c.N, 0.02 * c.r);
    const auto o2 = cartesian_fd(c.f, c.r, c.N, 0.01 * c.r);
    // Richardson on the h^2 leading error
    const double d3sq = (4.0 * o2.d3sq - o1.d3sq) / 3.0;
    const double d4sq = (4.0 * o2.d4sq - o1.d4sq) / 3.0;
    CHECK(t.d3 * t.d3 == doctest::Approx(d3sq).epsilon(2e-5));
    CHECK(t.d4 * t.d4 == doctest::Approx(d4sq).epsilon(2e-4));
  }
}

TEST_CASE("cutoff sequence: plateau, support, n >= 2") {
  CHECK_THROWS(testfn::make_cutoff(1));
  CHECK_THROWS(testfn::make_cutoff(0));

  const auto phi2 = testfn::make_cutoff(2);
  CHECK(phi2.eval(1.5).f0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(phi2.eval(1.5).f1 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(phi2.eval(0.25).f0 == 0.0);  // phi_n(1/(2n)) = 0
  CHECK(phi2.eval(5.0).f0 == 0.0);   // outside B(2n)

  for (int n : {2, 4, 8}) {
    const auto phi = testfn::make_cutoff(n);
    for (double r : {0.6 / n, 1.5 / n, 0.5 * n, 1.5 * n}) {
      const double v = phi.eval(r).f0;
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("cutoff sequence: scale-invariant derivative bounds, one C across n") {
  const std::vector<int> ns = {2, 4, 8, 16};
  const auto rep = testfn::cutoff_bound_check(ns, 400, 9, 1e5);
  CHECK(rep.pass);
  CHECK(rep.c_profile > 0.0);
  CHECK(std::isfinite(rep.c_profile));

  // per-n sups agree (the bounds are scale-exact by construction)
  std::vector<double> sups;
  for (int n : ns) {
    sups.push_back(testfn::cutoff_bound_check({n}, 400, 9, 1e5).c_profile);
  }
  for (double s : sups) {
    CHECK(s == doctest::Approx(sups[0]).epsilon(0.05));
  }
}

TEST_CASE("default family: composition and determinism") {
  testfn::FamilySpec spec;
  const auto fam = testfn::make_family(spec, 2.0, 9);
  CHECK(fam.size() == 20 + 4 + 50);

  const auto fam2 = testfn::make_family(spec, 2.0, 9);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    CHECK(fam[i].label() == fam2[i].label());
    CHECK(fam[i](1.234) == fam2[i](1.234));
  }

  spec.seed = 43;
  const auto fam3 = testfn::make_family(spec, 2.0, 9);
  bool any_diff = false;
  for (std::size_t i = 24; i < fam.size(); ++i) {
    if (fam[i].label() != fam3[i].label()) any_diff = true;
  }
  CHECK(any_diff);

  // q floor keeps the heaviest integrand integrable: 2(p-2q)+4b+N-1 <= -9
  for (int p : {4, 6}) {
    const int q = testfn::rational_q_min(p, 2.0, 11);
    CHECK(2.0 * (p - 2.0 * q) + 8.0 + 11.0 - 1.0 <= -9.0 + 1e-12);
    CHECK(2.0 * (p - 2.0 * (q - 1)) + 8.0 + 11.0 - 1.0 > -9.0);
  }
}

TEST_CASE("scaled argument stays exact") {
  const auto f = TestFunction::power_gaussian(5, 0.5);
  const auto fs = f.scaled_argument(2.0);
  for (double r : {0.4, 1.1}) {
    const Jet a = fs.eval(r);
    const Jet b = f.eval(2.0 * r);
    CHECK(a.f0 == doctest::Approx(b.f0).epsilon(1e-14));
    CHECK(a.f1 == doctest::Approx(2.0 * b.f1).epsilon(1e-14));
    CHECK(a.f4 == doctest::Approx(16.0 * b.f4).epsilon(1e-14));
  }
}
