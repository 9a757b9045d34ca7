#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "biharm/forms.hpp"
#include "biharm/grid.hpp"
#include "biharm/params.hpp"
#include "biharm/report.hpp"
#include "biharm/testfn.hpp"

namespace biharm::analysis {

/// Least lambda >= 0 making the pointwise lower-bound expression of the
/// potential estimate nonnegative on a log grid in |x|, with the sharp
/// Rellich constant and the five lemma constants at the exponents
/// {alpha, 2 alpha, 2 beta, alpha+2 beta, 2(alpha+beta)} (the first and
/// fourth enter with the multiplicity 2 of the expansion).
struct Lambda0Result {
  double lambda0 = 0.0;
  double c0 = 0.0;
  std::array<double, 5> k{};
  double argmin_r = 0.0;  // radius where the constraint binds
};
Lambda0Result lambda0_search(const params::OperatorParams& p);

// ---- per-function primitives -------------------------------------------

/// Normalized residual of
///   int |x|^g (Lap^2 u) u = int |x|^g (Lap u)^2
///     - 2 int (D^2 |x|^g) grad u . grad u + 1/2 int u^2 Lap^2 |x|^g.
double stima_identity_residual(const grid::Quadrature& q, const testfn::TestFunction& u,
                               double gamma);

/// Normalized margin of int |x|^g (Lap^2 u) u >= k(g,N) int |x|^{g-4} u^2.
double lemma21_margin(const grid::Quadrature& q, const testfn::TestFunction& u, double gamma);

/// int (Lap u)^2 / int |x|^{-4} u^2; throws for u = 0.
double rellich_ratio(const grid::Quadrature& q, const testfn::TestFunction& u);
/// ||Lap^2 u||^2 / || |x|^{-4} u ||^2 (meaningful for N > 8).
double higher_rellich_ratio(const grid::Quadrature& q, const testfn::TestFunction& u);

/// Minimal C_eps with ||r^g D^h u|| <= eps ||r^{g+1} D^{h+1} u|| + C_eps ||r^{g-1} D^{h-1} u||.
double weighted_interp_cmin(const grid::Quadrature& q, const testfn::TestFunction& u,
                            double gamma, int h, double eps);

/// Minimal C for the three members of the 2-alpha chain at given eps:
/// which = 3, 2, 1 selects || r^{2a-(4-which)} D^{which} u || on the left.
double chain_cmin(const grid::Quadrature& q, const testfn::TestFunction& u, double alpha,
                  int which, double eps);

/// || r^{2a} D^4 u || / (|| r^{2a} Lap^2 u || + || r^{2a-4} u ||).
double weighted_cz_ratio(const grid::Quadrature& q, const testfn::TestFunction& u, double alpha);

/// alpha = 0 display: || r^{-h} D^{4-h} u || / || Lap^2 u ||, h = 0..4.
double remark35_ratio(const grid::Quadrature& q, const testfn::TestFunction& u, int h);

/// || V^2 u || / || A u + lambda u ||.
double potential_estimate_ratio(const grid::Quadrature& q, const testfn::TestFunction& u,
                                const params::OperatorParams& p);

/// || Vt^2 u || / || Lap^2 u + Vt^2 u ||  (j = 0 consequence of the a-priori
/// estimates for the transformed operator).
double sugano_j0_ratio(const grid::Quadrature& q, const testfn::TestFunction& u,
                       const params::OperatorParams& p);

/// || r^{2a-h} D^{4-h} u || / (|| A u || + || u ||), h = 0..4.
double d2_apriori_ratio(const grid::Quadrature& q, const testfn::TestFunction& u,
                        const params::OperatorParams& p, int h);

// ---- potential geometry -------------------------------------------------

/// Average of Vt^power over the ball of the given radius centered at
/// distance center_radius from the origin. Both routes are exact 1-D
/// reductions: a plain radial integral for origin-centered balls, and a
/// spherical-cap kernel otherwise (the radial function's average over any
/// ball only sees the sphere-area fraction inside it). seed/n_mc are
/// accepted for interface compatibility and ignored; a genuinely
/// Monte Carlo route remains available below for cross-checks.
double ball_average(const params::OperatorParams& p, double center_radius, double radius,
                    double power, std::uint64_t seed, int n_mc, double* stderr_out = nullptr);

/// Monte Carlo route regardless of the center (test cross-check against the
/// exact radial reduction for origin-centered balls).
double ball_average_mc(const params::OperatorParams& p, double center_radius, double radius,
                       double power, std::uint64_t seed, int n_mc, double* stderr_out = nullptr);

/// Reverse Hoelder ratio (avg Vt^q)^{1/q} / avg Vt on one ball.
double reverse_holder_ratio(const params::OperatorParams& p, double q_exp, double center_radius,
                            double radius, std::uint64_t seed, int n_mc);

/// Shen/Sugano auxiliary function m(x, Vt): 1/m = sup{ r : r^2 avg_{B_r(x)} Vt <= 1 },
/// located by bisection on the exact ball averages (monotone criterion).
double m_function(const params::OperatorParams& p, double center_radius, std::uint64_t seed,
                  int n_mc);

// ---- sweep context and aggregated checks --------------------------------

struct CheckContext {
  params::OperatorParams params;  // lambda should be >= lambda0 for gated checks
  grid::Quadrature quad;
  std::vector<testfn::TestFunction> family;
  std::vector<testfn::TestFunction> family_doubled;  // family + extra seeded combos
  testfn::FamilySpec spec;
  int threads = 1;

  double tol_identity = 1e-6;
  double tol_stima = 1e-7;
  double tol_margin = 1e-8;
  double tol_rellich = 1e-6;

  int mc_points = 100000;
  std::uint64_t seed = 42;
  std::vector<double> reverse_holder_extra_q;  // q = N/2 always runs; extras opt-in
};

/// Builds the context: validates params, computes lambda0 when unset,
/// assembles the family for (beta, N).
CheckContext make_context(params::OperatorParams p, const grid::RadialGrid& g,
                          const testfn::FamilySpec& spec, int threads = 1);

report::InequalityReport stima_identity_check(const CheckContext& c, double gamma);
report::InequalityReport lemma21_check(const CheckContext& c, double gamma);
report::InequalityReport form_identity_check(const CheckContext& c, int n_pairs);
report::InequalityReport accretivity_check(const CheckContext& c);
report::InequalityReport continuity_check(const CheckContext& c,
                                          report::ConstantEstimate* est = nullptr);
report::InequalityReport norm_equivalence_check(const CheckContext& c,
                                                report::ConstantEstimate* est = nullptr);
report::InequalityReport rellich_check(const CheckContext& c,
                                       report::ConstantEstimate* est = nullptr);
report::InequalityReport higher_rellich_check(const CheckContext& c,
                                              report::ConstantEstimate* est = nullptr);
report::InequalityReport weighted_interp_check(const CheckContext& c, double gamma, int h);
report::InequalityReport chain_check(const CheckContext& c, int which);
report::InequalityReport weighted_cz_check(const CheckContext& c);
report::InequalityReport remark35_check(const CheckContext& c);
report::InequalityReport potential_estimate_check(const CheckContext& c);
report::InequalityReport sugano_j0_check(const CheckContext& c);
report::InequalityReport d2_apriori_check(const CheckContext& c);
report::InequalityReport tilde_v_bounds_check(const CheckContext& c, int n_samples);
report::InequalityReport reverse_holder_check(const CheckContext& c,
                                              report::ConstantEstimate* est = nullptr);
/// Same sampling at an explicit integrability exponent.
report::InequalityReport reverse_holder_check_q(const CheckContext& c, double q_exp);
report::InequalityReport m_function_check(const CheckContext& c);
report::InequalityReport duality_check(const CheckContext& c, int n_pairs);
report::InequalityReport core_density_check(const CheckContext& c);
report::InequalityReport scale_covariance_check(const CheckContext& c);

/// The full section-2 + section-3 suite; N>8-gated checks come back with
/// status "skipped" below the bound. Constants (when requested) collect
/// every empirical estimate the suite produces.
std::vector<report::InequalityReport> run_verify_suite(
    const CheckContext& c, std::vector<report::ConstantEstimate>* constants = nullptr);

/// The constants table for the `constants` command: sharp and empirical
/// Rellich constants, higher-order Rellich, C_eps grid, sandwich constants,
/// lambda0 and the k(gamma, N) table.
std::vector<report::ConstantEstimate> constants_table(const CheckContext& c);

/// Deterministic fixed-chunk parallel map: out[i] = f(i), i < n.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace biharm::analysis
