#include "biharm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biharm/analysis.hpp"

namespace biharm::spectral {

SectorEigenpairs solve_sector(const op::SectorOperator& so, int m, double tol) {
  const auto sol = linalg::lowest_eigenpairs(so.S_B, so.WM_diag, m,
                                             std::max(1e-11, tol / 100.0));
  SectorEigenpairs out;
  out.l = so.sector.l;
  out.mu = sol.values;
  out.vectors = sol.vectors;
  out.iterations = sol.iterations;
  out.residuals.resize(static_cast<std::size_t>(m));
  const int n = so.n();
  std::vector<double> bx(static_cast<std::size_t>(n));
  for (int k = 0; k < m; ++k) {
    const auto& x = out.vectors[static_cast<std::size_t>(k)];
    so.B_band.apply(x, bx);
    std::vector<double> res(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      res[static_cast<std::size_t>(i)] =
          bx[static_cast<std::size_t>(i)] -
          out.mu[static_cast<std::size_t>(k)] * so.M_diag[static_cast<std::size_t>(i)] *
              x[static_cast<std::size_t>(i)];
    }
    const double r = so.quad.norm(res) / so.quad.norm(x);
    out.residuals[static_cast<std::size_t>(k)] = r;
    if (!(r <= tol * std::max(1.0, out.mu[static_cast<std::size_t>(k)]))) {
      throw std::runtime_error("solve_sector: residual " + std::to_string(r) + " for mode " +
                               std::to_string(k) + " exceeds tolerance after " +
                               std::to_string(sol.iterations) + " iterations");
    }
  }
  return out;
}

double dense_oracle_lowest(const op::SectorOperator& so) {
  const auto w = linalg::dense_pencil_eigenvalues(so.S_B, so.WM_diag);
  return w.front();
}

double eigen_residual(std::span<const double> x, double mu, const op::SectorOperator& so) {
  const int n = so.n();
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("eigen_residual: size");
  std::vector<double> ax(static_cast<std::size_t>(n));
  so.A_band.apply(x, ax);
  std::vector<double> res(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    res[static_cast<std::size_t>(i)] = ax[static_cast<std::size_t>(i)] - mu * x[static_cast<std::size_t>(i)];
  }
  return so.quad.norm(res) / so.quad.norm(x);
}

report::SpectrumResult merge_spectrum(const std::vector<SectorEigenpairs>& sectors,
                                      const params::OperatorParams& p,
                                      std::uint64_t grid_fingerprint) {
  if (sectors.empty()) throw std::invalid_argument("merge_spectrum: no sectors");
  report::SpectrumResult s;
  s.N = p.N;
  s.alpha = p.alpha;
  s.beta = p.beta;
  s.lambda = p.lambda;
  s.grid_fingerprint = grid_fingerprint;
  for (const auto& sec : sectors) {
    s.sectors.push_back(sec.l);
    const op::SectorIndex idx{sec.l, p.N};
    for (std::size_t k = 0; k < sec.mu.size(); ++k) {
      report::Mode m;
      m.l = sec.l;
      m.k = static_cast<int>(k) + 1;
      m.mu = sec.mu[k];
      m.residual = sec.residuals[k];
      m.multiplicity = idx.multiplicity();
      s.modes.push_back(m);
    }
  }
  std::sort(s.modes.begin(), s.modes.end(), [](const report::Mode& a, const report::Mode& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.l != b.l) return a.l < b.l;
    return a.k < b.k;
  });
  return s;
}

GrowthReport growth_check(const report::SpectrumResult& s) {
  if (s.modes.size() < 20) {
    throw std::invalid_argument("growth_check: needs >= 20 merged eigenvalues");
  }
  GrowthReport g;
  g.strictly_increasing = true;
  g.min_gap = grid::kInf;
  for (std::size_t i = 1; i < s.modes.size(); ++i) {
    const double gap = s.modes[i].mu - s.modes[i - 1].mu;
    g.min_gap = std::min(g.min_gap, gap);
    if (!(gap > 0.0)) g.strictly_increasing = false;
  }
  // lowest mode per sector nondecreasing in l
  g.monotone_in_l = true;
  double prev = -grid::kInf;
  for (int l : s.sectors) {
    double lowest = grid::kInf;
    for (const auto& m : s.modes) {
      if (m.l == l && m.k == 1) lowest = m.mu;
    }
    if (lowest < prev) g.monotone_in_l = false;
    prev = lowest;
  }
  g.pass = g.strictly_increasing && g.monotone_in_l;
  return g;
}

report::SpectrumResult compute_spectrum(const params::OperatorParams& p,
                                        const grid::RadialGrid& g, int l_max, int modes,
                                        double tol, int threads,
                                        std::vector<SectorEigenpairs>* raw) {
  p.validate();
  if (l_max < 0 || modes < 1) throw std::invalid_argument("compute_spectrum: bad l_max/modes");
  const auto quad = grid::build_quadrature(g, p.N);
  std::vector<SectorEigenpairs> sectors(static_cast<std::size_t>(l_max + 1));
  analysis::parallel_for(l_max + 1, threads, [&](int l) {
    const auto so = op::assemble(p, quad, op::SectorIndex{l, p.N});
    sectors[static_cast<std::size_t>(l)] = solve_sector(so, modes, tol);
  });
  auto result = merge_spectrum(sectors, p, g.fingerprint());
  if (raw) *raw = std::move(sectors);
  return result;
}

RefinementStudy refinement_study(const params::OperatorParams& p, const grid::RadialGrid& g,
                                 int modes, double tol) {
  RefinementStudy st;
  auto mu1_on = [&](double r_min, double r_max, int n) {
    const auto gr = grid::build_grid(r_min, r_max, n);
    const auto quad = grid::build_quadrature(gr, p.N);
    const auto so = op::assemble(p, quad, op::SectorIndex{0, p.N});
    return solve_sector(so, std::max(1, modes), tol).mu.front();
  };
  const int n = g.n();
  st.mu_coarse = mu1_on(g.r_min, g.r_max, (n - 1) / 4 + 1);
  st.mu_mid = mu1_on(g.r_min, g.r_max, (n - 1) / 2 + 1);
  st.mu_fine = mu1_on(g.r_min, g.r_max, n);
  const double d1 = st.mu_coarse - st.mu_mid;
  const double d2 = st.mu_mid - st.mu_fine;
  if (d2 != 0.0 && d1 / d2 > 0.0) {
    st.observed_order = std::log2(std::abs(d1 / d2));
    const double rho = std::pow(2.0, st.observed_order);
    st.richardson = st.mu_fine + (st.mu_fine - st.mu_mid) / (rho - 1.0);
  } else {
    st.observed_order = 0.0;
    st.richardson = st.mu_fine;
  }
  st.rel_gap_to_richardson = std::abs(st.mu_fine - st.richardson) / std::abs(st.richardson);
  const double mu_big = mu1_on(g.r_min / 2.0, g.r_max * 2.0, n + (n - 1) / 4);
  st.truncation_delta = std::abs(mu_big - st.mu_fine) / std::abs(st.mu_fine);
  return st;
}

}  // namespace biharm::spectral
