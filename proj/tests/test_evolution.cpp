#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "biharm/evolution.hpp"
#include "biharm/spectral.hpp"
#include "biharm/testfn.hpp"

using namespace biharm;
using evolution::Scheme;

namespace {

params::OperatorParams default_params() {
  params::OperatorParams p;
  p.N = 9;
  p.alpha = 1.0;
  p.beta = 2.0;
  return p;
}

op::SectorOperator make_op(int n = 601) {
  const auto p = default_params();
  const auto g = grid::build_grid(1e-3, 25.0, n);
  return op::assemble(p, grid::build_quadrature(g, p.N), op::SectorIndex{0, p.N});
}

std::vector<double> sample(const op::SectorOperator& so, const testfn::TestFunction& f) {
  std::vector<double> u(static_cast<std::size_t>(so.n()));
  for (int i = 0; i < so.n(); ++i) {
    u[static_cast<std::size_t>(i)] = f(so.quad.grid.nodes[static_cast<std::size_t>(i)]);
  }
  return u;
}

}  // namespace

TEST_CASE("step: eigenvector scales by the resolvent factor") {
  const auto so = make_op();
  const auto sol = spectral::solve_sector(so, 2, 1e-8);
  const double mu = sol.mu.front();
  const auto& psi = sol.vectors.front();
  const double lambda = 5.0;
  const double dt = 0.1 / (mu + lambda);

  const evolution::Stepper st(so, dt, lambda, Scheme::ImplicitEuler);
  const auto out = st.step(psi);
  const double factor = 1.0 / (1.0 + dt * (mu + lambda));
  std::vector<double> diff(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) diff[i] = out[i] - factor * psi[i];
  CHECK(so.quad.norm(diff) / so.quad.norm(psi) <= 1e-8);
}

TEST_CASE("step: zero stays zero, dt -> 0 consistency") {
  const auto so = make_op();
  const std::vector<double> zero(static_cast<std::size_t>(so.n()), 0.0);
  const evolution::Stepper st(so, 1e-3, 1.0, Scheme::ImplicitEuler);
  const auto z = st.step(zero);
  for (double v : z) CHECK(v == 0.0);

  // one step vs the Taylor expansion u - dt (A + lambda) u
  const auto u0 = sample(so, testfn::TestFunction::power_gaussian(4, 1.0));
  const double lambda = 1.0;
  auto taylor_gap = [&](double dt) {
    const evolution::Stepper s(so, dt, lambda, Scheme::ImplicitEuler);
    const auto u1 = s.step(u0);
    auto au = so.A_band.apply(u0);
    std::vector<double> expect(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) {
      expect[i] = u0[i] - dt * (au[i] + lambda * u0[i]);
    }
    std::vector<double> diff(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) diff[i] = u1[i] - expect[i];
    return so.quad.norm(diff) / so.quad.norm(u0);
  };
  const double g1 = taylor_gap(1e-5);
  const double g2 = taylor_gap(5e-6);
  CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(0.25));  // O(dt^2) one-step defect
}

TEST_CASE("lambda shift: folding lambda into the operator is the same map") {
  const auto so = make_op(401);
  const double lambda = 3.0;
  auto so_shifted = so;
  for (int i = 0; i < so.n(); ++i) {
    const auto iu = static_cast<std::size_t>(i);
    so_shifted.S_B.at(i, i) += lambda * so.WM_diag[iu];
    so_shifted.B_band.at(i, i) += lambda * so.M_diag[iu];
    so_shifted.A_band.at(i, i) += lambda;
  }
  const auto u0 = sample(so, testfn::TestFunction::power_gaussian(5, 0.5));
  const auto t1 = evolution::evolve(so, u0, 0.02, 1e-3, lambda, Scheme::ImplicitEuler);
  const auto t2 = evolution::evolve(so_shifted, u0, 0.02, 1e-3, 0.0, Scheme::ImplicitEuler);
  std::vector<double> diff(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    diff[i] = t1.final_state[i] - t2.final_state[i];
  }
  CHECK(so.quad.norm(diff) / so.quad.norm(t1.final_state) <= 1e-10);
}

TEST_CASE("implicit Euler contracts the plain L2 norm at every step") {
  const auto so = make_op();
  const auto sol = spectral::solve_sector(so, 1, 1e-8);
  const double mu1 = sol.mu.front();
  const double lambda = 5.0;
  const double dt = 0.1 / (mu1 + lambda);
  const double T = 10.0 / (mu1 + lambda);

  for (const auto& f : {testfn::TestFunction::power_gaussian(4, 1.0),
                        testfn::TestFunction::power_gaussian(7, 0.25),
                        testfn::TestFunction::rational(4, 9)}) {
    const auto u0 = sample(so, f);
    const auto traj = evolution::evolve(so, u0, T, dt, lambda, Scheme::ImplicitEuler);
    const auto rep = evolution::contraction_check(traj);
    INFO("worst growth ", rep.worst_growth, " at step ", rep.first_violation);
    CHECK(rep.pass);
    // norms monotone all the way down
    CHECK(traj.norm_plain.back() < traj.norm_plain.front());
    // energy is nonnegative along the flow
    for (double e : traj.energy) CHECK(e >= -1e-10);
  }
}

TEST_CASE("scheme agreement: IE first order, CN second order") {
  const auto so = make_op(401);
  const auto sol = spectral::solve_sector(so, 1, 1e-8);
  const double lambda = 2.0;
  const double T = 0.5 / (sol.mu.front() + lambda);
  const auto u0 = sample(so, testfn::TestFunction::power_gaussian(4, 1.0));

  const double dt0 = T / 16.0;
  const auto ref = evolution::evolve(so, u0, T, dt0 / 8.0, lambda, Scheme::CrankNicolson);
  auto err_vs_ref = [&](Scheme s, double dt) {
    const auto t = evolution::evolve(so, u0, T, dt, lambda, s);
    std::vector<double> diff(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) {
      diff[i] = t.final_state[i] - ref.final_state[i];
    }
    return so.quad.norm(diff);
  };
  const double ie1 = err_vs_ref(Scheme::ImplicitEuler, dt0);
  const double ie2 = err_vs_ref(Scheme::ImplicitEuler, dt0 / 2.0);
  CHECK(ie1 / ie2 == doctest::Approx(2.0).epsilon(0.3));
  const double cn1 = err_vs_ref(Scheme::CrankNicolson, dt0);
  const double cn2 = err_vs_ref(Scheme::CrankNicolson, dt0 / 2.0);
  CHECK(cn1 / cn2 == doctest::Approx(4.0).epsilon(0.4));
}

TEST_CASE("semigroup property: exact composition with the same stepper") {
  const auto so = make_op(401);
  const auto u0 = sample(so, testfn::TestFunction::power_gaussian(4, 0.5));
  const double dt = 1e-3, T = 0.05, lambda = 1.0;
  const auto full = evolution::evolve(so, u0, 2 * T, dt, lambda, Scheme::ImplicitEuler);
  const auto half = evolution::evolve(so, u0, T, dt, lambda, Scheme::ImplicitEuler);
  const auto rest = evolution::evolve(so, half.final_state, T, dt, lambda, Scheme::ImplicitEuler);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    CHECK(full.final_state[i] == rest.final_state[i]);
  }
}

TEST_CASE("decay rate matches the spectral gap") {
  const auto so = make_op();
  const auto sol = spectral::solve_sector(so, 1, 1e-10);
  const double mu1 = sol.mu.front();
  const double lambda = 5.0;
  const double rate = mu1 + lambda;

  auto slope_at = [&](const std::vector<double>& u0, double dt) {
    const auto traj = evolution::evolve(so, u0, 10.0 / rate, dt, lambda, Scheme::ImplicitEuler);
    return evolution::decay_rate(traj);
  };

  // eigenvector data: Richardson over two dt levels within 1%
  {
    const auto& u0 = sol.vectors.front();
    const double s1 = slope_at(u0, 0.1 / rate);
    const double s2 = slope_at(u0, 0.05 / rate);
    const double extrap = 2.0 * s2 - s1;
    CHECK(extrap == doctest::Approx(-rate).epsilon(0.01));
  }
  // generic data: within 2%
  {
    const auto u0 = sample(so, testfn::TestFunction::power_gaussian(4, 1.0));
    const double s1 = slope_at(u0, 0.1 / rate);
    const double s2 = slope_at(u0, 0.05 / rate);
    const double extrap = 2.0 * s2 - s1;
    CHECK(extrap == doctest::Approx(-rate).epsilon(0.02));
  }

  // insufficient window rejected
  const auto u0 = sample(so, testfn::TestFunction::power_gaussian(4, 1.0));
  const auto tiny = evolution::evolve(so, u0, 0.1 / rate, 0.01 / rate, lambda,
                                      Scheme::ImplicitEuler);
  CHECK_THROWS(std::ignore = evolution::decay_rate(tiny));
}

TEST_CASE("smoothing proxy bounded on a dyadic grid") {
  const auto so = make_op(401);
  const auto sol = spectral::solve_sector(so, 1, 1e-8);
  const double mu1 = sol.mu.front();
  const auto u0 = sample(so, testfn::TestFunction::power_gaussian(4, 1.0));
  const auto rep = evolution::smoothing_check(so, u0, 0.0, 1e-4 / mu1, 1e-1 / mu1, 8);
  CHECK(rep.sup > 0.0);
  CHECK(std::isfinite(rep.sup));
  // roughly t-independent: no runaway growth across three decades
  const double lo = *std::min_element(rep.t_times_au_over_u0.begin(),
                                      rep.t_times_au_over_u0.end());
  CHECK(rep.sup / std::max(lo, 1e-300) < 1e3);
}

TEST_CASE("crank-nicolson with large dt: oscillation reported, not asserted") {
  const auto so = make_op(401);
  const auto sol = spectral::solve_sector(so, 1, 1e-8);
  const double rate = sol.mu.front();
  const auto u0 = sample(so, testfn::TestFunction::power_gaussian(4, 1.0));
  const auto traj = evolution::evolve(so, u0, 20.0 / rate, 2.0 / rate, 0.0,
                                      Scheme::CrankNicolson);
  const auto rep = evolution::contraction_check(traj);
  MESSAGE("CN large-dt worst growth: ", rep.worst_growth);
  CHECK(std::isfinite(rep.worst_growth));
}
