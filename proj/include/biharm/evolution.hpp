#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "biharm/banded.hpp"
#include "biharm/report.hpp"
#include "biharm/sector_op.hpp"

namespace biharm::evolution {

enum class Scheme { ImplicitEuler, CrankNicolson };

Scheme scheme_from_string(const std::string& s);
std::string scheme_name(Scheme s);

/// One-step solver for u' = -(A + lambda) u in the M-weighted symmetric
/// formulation: implicit Euler solves (D + dt (S_B + lambda D)) u+ = D u
/// with D = diag(W M), an SPD banded system factored once.
class Stepper {
 public:
  Stepper(const op::SectorOperator& so, double dt, double lambda, Scheme scheme);

  std::vector<double> step(std::span<const double> u) const;
  double dt() const { return dt_; }
  double lambda() const { return lambda_; }
  Scheme scheme() const { return scheme_; }

 private:
  const op::SectorOperator& so_;
  double dt_ = 0.0;
  double lambda_ = 0.0;
  Scheme scheme_ = Scheme::ImplicitEuler;
  std::unique_ptr<linalg::BandedCholesky> chol_;
};

/// Discrete form energy a_lambda(u, u) of a nodal vector.
double discrete_energy(const op::SectorOperator& so, std::span<const double> u, double lambda);

/// Runs n_steps = round(T/dt) steps, recording both norms and the energy.
report::TrajectoryResult evolve(const op::SectorOperator& so, std::span<const double> u0,
                                double T, double dt, double lambda, Scheme scheme);

struct ContractionReport {
  bool pass = false;
  int first_violation = -1;   // step index, -1 if none
  double worst_growth = 0.0;  // max over steps of norm ratio - 1
};
/// Per-step monotonicity of the plain L^2(r^{N-1} dr) norm with slack
/// 1e-12; meaningful for the implicit-Euler scheme with lambda >= 0.
ContractionReport contraction_check(const report::TrajectoryResult& t);

/// Least-squares slope of log ||u(t)|| on the trailing half of the
/// trajectory; requires at least 3 e-foldings of decay over the window.
double decay_rate(const report::TrajectoryResult& t);

struct SmoothingReport {
  std::vector<double> times;
  std::vector<double> t_times_au_over_u0;  // t ||A u(t)|| / ||u0||
  double sup = 0.0;
};
/// Analytic-smoothing proxy on a dyadic time grid (reported, not asserted
/// against a theoretical constant).
SmoothingReport smoothing_check(const op::SectorOperator& so, std::span<const double> u0,
                                double lambda, double t_min, double t_max, int n_points);

}  // namespace biharm::evolution
