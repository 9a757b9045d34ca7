#include "biharm/evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace biharm::evolution {

Scheme scheme_from_string(const std::string& s) {
  if (s == "implicit-euler") return Scheme::ImplicitEuler;
  if (s == "crank-nicolson") return Scheme::CrankNicolson;
  throw std::invalid_argument("unknown scheme '" + s + "' (implicit-euler | crank-nicolson)");
}

std::string scheme_name(Scheme s) {
  return s == Scheme::ImplicitEuler ? "implicit-euler" : "crank-nicolson";
}

namespace {

linalg::BandedMatrix step_matrix(const op::SectorOperator& so, double dt, double lambda,
                                 double theta) {
  // D + theta dt (S_B + lambda D), D = diag(WM)
  const int n = so.n();
  linalg::BandedMatrix m(n, so.S_B.kl(), so.S_B.ku());
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - m.kl()); j <= std::min(n - 1, i + m.ku()); ++j) {
      double v = theta * dt * so.S_B.get(i, j);
      if (i == j) v += (1.0 + theta * dt * lambda) * so.WM_diag[static_cast<std::size_t>(i)];
      m.at(i, j) = v;
    }
  }
  return m;
}

}  // namespace

Stepper::Stepper(const op::SectorOperator& so, double dt, double lambda, Scheme scheme)
    : so_(so), dt_(dt), lambda_(lambda), scheme_(scheme) {
  if (!(dt > 0.0)) throw std::invalid_argument("Stepper: dt > 0 required");
  if (!(lambda >= 0.0)) throw std::invalid_argument("Stepper: lambda >= 0 required");
  const double theta = (scheme == Scheme::ImplicitEuler) ? 1.0 : 0.5;
  try {
    chol_ = std::make_unique<linalg::BandedCholesky>(step_matrix(so, dt, lambda, theta));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("Stepper: step matrix factorization failed (") +
                             e.what() + ")");
  }
}

std::vector<double> Stepper::step(std::span<const double> u) const {
  const int n = so_.n();
  if (static_cast<int>(u.size()) != n) throw std::invalid_argument("Stepper::step: size");
  std::vector<double> rhs(static_cast<std::size_t>(n));
  if (scheme_ == Scheme::ImplicitEuler) {
    for (int i = 0; i < n; ++i) {
      rhs[static_cast<std::size_t>(i)] =
          so_.WM_diag[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
    }
  } else {
    // (D - dt/2 (S_B + lambda D)) u
    std::vector<double> su(static_cast<std::size_t>(n));
    so_.S_B.apply(u, su);
    for (int i = 0; i < n; ++i) {
      rhs[static_cast<std::size_t>(i)] =
          (1.0 - 0.5 * dt_ * lambda_) * so_.WM_diag[static_cast<std::size_t>(i)] *
              u[static_cast<std::size_t>(i)] -
          0.5 * dt_ * su[static_cast<std::size_t>(i)];
    }
  }
  chol_->solve_in_place(rhs);
  return rhs;
}

double discrete_energy(const op::SectorOperator& so, std::span<const double> u, double lambda) {
  const int n = so.n();
  std::vector<double> su(static_cast<std::size_t>(n));
  so.S_B.apply(u, su);
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    terms[iu] = u[iu] * su[iu] / so.M_diag[iu] + lambda * so.W_diag[iu] * u[iu] * u[iu];
  }
  return grid::pairwise_sum(terms);
}

namespace {

double weighted_norm(const op::SectorOperator& so, std::span<const double> u) {
  std::vector<double> terms(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) terms[i] = so.WM_diag[i] * u[i] * u[i];
  return std::sqrt(grid::pairwise_sum(terms));
}

}  // namespace

report::TrajectoryResult evolve(const op::SectorOperator& so, std::span<const double> u0,
                                double T, double dt, double lambda, Scheme scheme) {
  if (!(T > 0.0)) throw std::invalid_argument("evolve: T > 0 required");
  const int n_steps = static_cast<int>(std::llround(T / dt));
  if (n_steps < 1) throw std::invalid_argument("evolve: T/dt < 1 step");
  const Stepper stepper(so, dt, lambda, scheme);

  report::TrajectoryResult traj;
  traj.scheme = scheme_name(scheme);
  traj.dt = dt;
  traj.lambda = lambda;

  std::vector<double> u(u0.begin(), u0.end());
  auto record = [&](int k) {
    traj.times.push_back(k * dt);
    traj.norm_plain.push_back(so.quad.norm(u));
    traj.norm_weighted.push_back(weighted_norm(so, u));
    traj.energy.push_back(discrete_energy(so, u, lambda));
  };
  record(0);
  for (int k = 1; k <= n_steps; ++k) {
    u = stepper.step(u);
    for (double v : u) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("evolve: non-finite state at step " + std::to_string(k));
      }
    }
    record(k);
  }
  traj.final_state = u;
  return traj;
}

ContractionReport contraction_check(const report::TrajectoryResult& t) {
  ContractionReport rep;
  rep.pass = true;
  for (std::size_t k = 1; k < t.norm_plain.size(); ++k) {
    if (t.norm_plain[k - 1] == 0.0) continue;
    const double growth = t.norm_plain[k] / t.norm_plain[k - 1] - 1.0;
    rep.worst_growth = std::max(rep.worst_growth, growth);
    if (growth > 1e-12 && rep.pass) {
      rep.pass = false;
      rep.first_violation = static_cast<int>(k);
    }
  }
  return rep;
}

double decay_rate(const report::TrajectoryResult& t) {
  const std::size_t n = t.times.size();
  if (n < 8) throw std::invalid_argument("decay_rate: trajectory too short");
  const std::size_t lo = n / 2;
  if (!(t.norm_plain[lo] > 0.0) || !(t.norm_plain[n - 1] > 0.0)) {
    throw std::invalid_argument("decay_rate: vanishing norms in the fit window");
  }
  if (t.norm_plain.front() / t.norm_plain.back() < std::exp(3.0)) {
    throw std::invalid_argument("decay_rate: window covers fewer than 3 e-foldings");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n - lo);
  for (std::size_t k = lo; k < n; ++k) {
    const double x = t.times[k];
    const double y = std::log(t.norm_plain[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

SmoothingReport smoothing_check(const op::SectorOperator& so, std::span<const double> u0,
                                double lambda, double t_min, double t_max, int n_points) {
  if (!(t_min > 0.0 && t_max > t_min) || n_points < 2) {
    throw std::invalid_argument("smoothing_check: bad time window");
  }
  SmoothingReport rep;
  const double u0_norm = so.quad.norm(u0);
  for (int i = 0; i < n_points; ++i) {
    const double t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (n_points - 1));
    const double dt = t / 32.0;
    const auto traj = evolve(so, u0, t, dt, lambda, Scheme::ImplicitEuler);
    const auto au = so.A_band.apply(traj.final_state);
    const double val = t * so.quad.norm(au) / u0_norm;
    rep.times.push_back(t);
    rep.t_times_au_over_u0.push_back(val);
    rep.sup = std::max(rep.sup, val);
  }
  return rep;
}

}  // namespace biharm::evolution
