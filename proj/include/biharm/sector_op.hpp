#pragma once

#include <vector>

#include "biharm/banded.hpp"
#include "biharm/grid.hpp"
#include "biharm/params.hpp"
#include "biharm/testfn.hpp"

namespace biharm::op {

/// Spherical-harmonic sector l in dimension N. The coefficients of A are
/// rotation invariant, so A restricted to f(r) Y_l reduces to a radial
/// operator with angular momentum term kappa_l = l(l+N-2).
struct SectorIndex {
  int l = 0;
  int N = 9;

  double kappa() const { return static_cast<double>(l) * (l + N - 2); }
  /// dim of degree-l spherical harmonics: C(l+N-1, l) - C(l+N-3, l-2).
  long multiplicity() const;
};

/// L_l f = f'' + (N-1)/r f' - kappa_l f / r^2 and its first two radial
/// derivatives (enough to compose L_l^2 and the adjoint terms).
struct SectorLaplacian {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};
SectorLaplacian sector_laplacian_jet(const testfn::Jet& f, double r, const SectorIndex& s);

/// L_l f at r.
double apply_sector_laplacian(const testfn::Jet& f, double r, const SectorIndex& s);
double apply_sector_laplacian(const testfn::TestFunction& f, double r, const SectorIndex& s);

/// L_l^2 f at r.
double apply_sector_bilaplacian(const testfn::Jet& f, double r, const SectorIndex& s);

/// A f = (1+r^alpha)^2 L_l^2 f + r^{2 beta} f at r.
double apply_A(const testfn::Jet& f, double r, const SectorIndex& s,
               const params::OperatorParams& p);
double apply_A(const testfn::TestFunction& f, double r, const SectorIndex& s,
               const params::OperatorParams& p);

/// Formal adjoint,
/// A* v = a^2 L^2 v + 4 (a^2)' (Lv)' + 2 (Delta a^2) Lv
///        + 4 Tr(D^2 a^2 D^2 v) + 4 (Delta a^2)' v' + (Delta^2 a^2) v + r^{2 beta} v,
/// sector-reduced for v = f(r) Y_l.
double apply_adjoint(const testfn::Jet& f, double r, const SectorIndex& s,
                     const params::OperatorParams& p);
double apply_adjoint(const testfn::TestFunction& f, double r, const SectorIndex& s,
                     const params::OperatorParams& p);

/// Derivatives of the diffusion coefficient a^2 = (1+r^alpha)^2 at r.
struct DiffusionDerivatives {
  double a2 = 0.0;        // a^2
  double da2 = 0.0;       // (a^2)'
  double dda2 = 0.0;      // (a^2)''
  double lap_a2 = 0.0;    // Delta a^2
  double dlap_a2 = 0.0;   // (Delta a^2)'
  double bilap_a2 = 0.0;  // Delta^2 a^2
};
DiffusionDerivatives diffusion_derivatives(double r, const params::OperatorParams& p);

/// Banded discretization of the sector-l reduction on a graded grid, with
/// clamped (extension-by-zero) ends. Fornberg-style stencil weights are
/// generated per node from the local spacing; the raw operator is
/// symmetrized once in the quadrature inner product, and everything else
/// is assembled from the symmetrized L so that W B is exactly symmetric
/// and A = M^{-1} B exactly.
struct SectorOperator {
  params::OperatorParams params;
  SectorIndex sector;
  grid::Quadrature quad;

  linalg::BandedMatrix L;       // kl = ku = 2
  linalg::BandedMatrix A_band;  // diag(a^2) L^2 + diag(r^{2 beta}), kl = ku = 4
  linalg::BandedMatrix B_band;  // L^2 + diag(Vt^2), W-symmetric
  linalg::BandedMatrix S_B;     // W B (plain-symmetric), the eigensolver object
  std::vector<double> M_diag;   // (1+r^alpha)^{-2}
  std::vector<double> WM_diag;  // W_i M_i
  std::vector<double> W_diag;   // quadrature measure w_i r_i^{N-1}

  int n() const { return quad.n(); }
};

/// Requires n_nodes >= 64 so that the composed stencils are meaningful.
SectorOperator assemble(const params::OperatorParams& p, const grid::Quadrature& quad,
                        const SectorIndex& sector);

/// Interpolation-derivative weights at z from the given nodes (Fornberg):
/// c[k*nd + j] = weight of node j for the k-th derivative, k = 0..m.
void fd_weights(double z, const double* x, int nd, int m, double* c);

}  // namespace biharm::op
