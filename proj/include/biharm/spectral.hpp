#pragma once

#include <span>
#include <vector>

#include "biharm/report.hpp"
#include "biharm/sector_op.hpp"

namespace biharm::spectral {

struct SectorEigenpairs {
  int l = 0;
  std::vector<double> mu;                    // ascending
  std::vector<std::vector<double>> vectors;  // WM-orthonormal nodal vectors
  std::vector<double> residuals;             // ||B x - mu M x||_W / ||x||_W
  int iterations = 0;
};

/// Lowest m eigenpairs of B x = mu M x in the quadrature inner product.
/// Enforces residual <= tol * max(1, mu) per pair; non-convergence or a
/// residual breach throws with diagnostics.
SectorEigenpairs solve_sector(const op::SectorOperator& so, int m, double tol);

/// Dense-driver oracle on the same matrices (independent algorithm).
double dense_oracle_lowest(const op::SectorOperator& so);

/// ||A_band x - mu x||_W / ||x||_W; cross-validates generalized eigenpairs
/// as genuine eigenpairs of the nonsymmetric operator.
double eigen_residual(std::span<const double> x, double mu, const op::SectorOperator& so);

/// Merge per-sector spectra with spherical-harmonic multiplicities into a
/// sorted global list.
report::SpectrumResult merge_spectrum(const std::vector<SectorEigenpairs>& sectors,
                                      const params::OperatorParams& p,
                                      std::uint64_t grid_fingerprint);

struct GrowthReport {
  bool pass = false;
  bool strictly_increasing = false;
  bool monotone_in_l = false;
  double min_gap = 0.0;
};
/// Requires >= 20 merged modes: mu strictly increasing on the computed
/// window, lowest mode nondecreasing in l, counting function nondecreasing.
GrowthReport growth_check(const report::SpectrumResult& s);

/// Assembles and solves sectors l = 0..l_max on the given grid.
report::SpectrumResult compute_spectrum(const params::OperatorParams& p,
                                        const grid::RadialGrid& g, int l_max, int modes,
                                        double tol, int threads = 1,
                                        std::vector<SectorEigenpairs>* raw = nullptr);

/// mu_1(l=0) on three nested grids + Richardson extrapolation and a
/// truncation study (r_max doubled, r_min halved).
struct RefinementStudy {
  double mu_coarse = 0.0, mu_mid = 0.0, mu_fine = 0.0;
  double observed_order = 0.0;
  double richardson = 0.0;
  double rel_gap_to_richardson = 0.0;  // |mu_fine - richardson| / richardson
  double truncation_delta = 0.0;       // relative mu_1 change under domain enlargement
};
RefinementStudy refinement_study(const params::OperatorParams& p, const grid::RadialGrid& g,
                                 int modes, double tol);

}  // namespace biharm::spectral
