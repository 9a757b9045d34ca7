#include "biharm/sector_op.hpp"

#include <cmath>
#include <stdexcept>

namespace biharm::op {

namespace {

long binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long r = 1;
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

long SectorIndex::multiplicity() const {
  return binom(l + N - 1, l) - binom(l + N - 3, l - 2);
}

SectorLaplacian sector_laplacian_jet(const testfn::Jet& f, double r, const SectorIndex& s) {
  if (!(r > 0.0)) throw std::invalid_argument("sector_laplacian: r > 0 required");
  const double n1 = static_cast<double>(s.N - 1);
  const double k = s.kappa();
  const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
  SectorLaplacian out;
  out.v = f.f2 + n1 * f.f1 / r - k * f.f0 / r2;
  out.d1 = f.f3 + n1 * (f.f2 / r - f.f1 / r2) - k * (f.f1 / r2 - 2.0 * f.f0 / r3);
  out.d2 = f.f4 + n1 * (f.f3 / r - 2.0 * f.f2 / r2 + 2.0 * f.f1 / r3) -
           k * (f.f2 / r2 - 4.0 * f.f1 / r3 + 6.0 * f.f0 / r4);
  return out;
}

double apply_sector_laplacian(const testfn::Jet& f, double r, const SectorIndex& s) {
  return sector_laplacian_jet(f, r, s).v;
}

double apply_sector_laplacian(const testfn::TestFunction& f, double r, const SectorIndex& s) {
  return apply_sector_laplacian(f.eval(r), r, s);
}

double apply_sector_bilaplacian(const testfn::Jet& f, double r, const SectorIndex& s) {
  const SectorLaplacian L = sector_laplacian_jet(f, r, s);
  const double n1 = static_cast<double>(s.N - 1);
  return L.d2 + n1 * L.d1 / r - s.kappa() * L.v / (r * r);
}

double apply_A(const testfn::Jet& f, double r, const SectorIndex& s,
               const params::OperatorParams& p) {
  p.validate();
  return p.a2(r) * apply_sector_bilaplacian(f, r, s) + p.V2(r) * f.f0;
}

double apply_A(const testfn::TestFunction& f, double r, const SectorIndex& s,
               const params::OperatorParams& p) {
  return apply_A(f.eval(r), r, s, p);
}

DiffusionDerivatives diffusion_derivatives(double r, const params::OperatorParams& p) {
  if (!(r > 0.0)) throw std::invalid_argument("diffusion_derivatives: r > 0 required");
  DiffusionDerivatives d;
  const double al = p.alpha;
  const double N = static_cast<double>(p.N);
  // a^2 = 1 + 2 r^alpha + r^{2 alpha}; each term differentiates exactly and
  // Delta r^m = m (m+N-2) r^{m-2}, Delta^2 r^m = m(m-2)(m-2+N)(m-4+N) r^{m-4}.
  auto add_term = [&](double c, double m) {
    d.a2 += c * std::pow(r, m);
    if (m != 0.0) {
      d.da2 += c * m * std::pow(r, m - 1.0);
      d.dda2 += c * m * (m - 1.0) * std::pow(r, m - 2.0);
      const double lap_c = c * m * (m + N - 2.0);
      d.lap_a2 += lap_c * std::pow(r, m - 2.0);
      d.dlap_a2 += lap_c * (m - 2.0) * std::pow(r, m - 3.0);
      d.bilap_a2 += c * m * (m - 2.0) * (m - 2.0 + N) * (m - 4.0 + N) * std::pow(r, m - 4.0);
    }
  };
  add_term(1.0, 0.0);
  add_term(2.0, al);
  add_term(1.0, 2.0 * al);
  return d;
}

double apply_adjoint(const testfn::Jet& f, double r, const SectorIndex& s,
                     const params::OperatorParams& p) {
  p.validate();
  const DiffusionDerivatives d = diffusion_derivatives(r, p);
  const SectorLaplacian L = sector_laplacian_jet(f, r, s);
  const double n1 = static_cast<double>(s.N - 1);
  const double L2 = L.d2 + n1 * L.d1 / r - s.kappa() * L.v / (r * r);
  // Tr(D^2 a^2 D^2 v) = ((a^2)'' - (a^2)'/r) v_rr + ((a^2)'/r) Lv for v = f Y_l
  const double tr_term = (d.dda2 - d.da2 / r) * f.f2 + (d.da2 / r) * L.v;
  return d.a2 * L2 + 4.0 * d.da2 * L.d1 + 2.0 * d.lap_a2 * L.v + 4.0 * tr_term +
         4.0 * d.dlap_a2 * f.f1 + (d.bilap_a2 + p.V2(r)) * f.f0;
}

double apply_adjoint(const testfn::TestFunction& f, double r, const SectorIndex& s,
                     const params::OperatorParams& p) {
  return apply_adjoint(f.eval(r), r, s, p);
}

void fd_weights(double z, const double* x, int nd, int m, double* c) {
  // B. Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  std::vector<double> cc(static_cast<std::size_t>(nd) * static_cast<std::size_t>(m + 1), 0.0);
  auto C = [&](int j, int k) -> double& {
    return cc[static_cast<std::size_t>(k) * nd + static_cast<std::size_t>(j)];
  };
  double c1 = 1.0;
  double c4 = x[0] - z;
  C(0, 0) = 1.0;
  for (int i = 1; i < nd; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
        }
        C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) {
        C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
      }
      C(j, 0) = c4 * C(j, 0) / c3;
    }
    c1 = c2;
  }
  for (int k = 0; k <= m; ++k) {
    for (int j = 0; j < nd; ++j) {
      c[static_cast<std::size_t>(k) * nd + static_cast<std::size_t>(j)] = C(j, k);
    }
  }
}

SectorOperator assemble(const params::OperatorParams& p, const grid::Quadrature& quad,
                        const SectorIndex& sector) {
  p.validate();
  if (sector.N != p.N) throw std::invalid_argument("assemble: sector/params dimension mismatch");
  const int n = quad.n();
  if (n < 64) throw std::invalid_argument("assemble: grid too coarse (n_nodes >= 64 required)");

  SectorOperator op;
  op.params = p;
  op.sector = sector;
  op.quad = quad;

  const auto& nodes = quad.grid.nodes;
  const double n1 = static_cast<double>(p.N - 1);
  const double kap = sector.kappa();

  // Raw stencil operator: 5-point interpolation derivatives on the local
  // (virtually extended) geometric nodes; out-of-range columns multiply the
  // clamped zero extension and are dropped.
  linalg::BandedMatrix Lraw(n, 2, 2);
  for (int i = 0; i < n; ++i) {
    double xs[5], w[3 * 5];
    for (int m = -2; m <= 2; ++m) xs[m + 2] = quad.grid.node_at(i + m);
    fd_weights(nodes[static_cast<std::size_t>(i)], xs, 5, 2, w);
    const double r = nodes[static_cast<std::size_t>(i)];
    for (int m = -2; m <= 2; ++m) {
      const int j = i + m;
      if (j < 0 || j >= n) continue;
      double v = w[2 * 5 + (m + 2)] + (n1 / r) * w[1 * 5 + (m + 2)];
      if (m == 0) v -= kap / (r * r);
      Lraw.at(i, j) = v;
    }
  }

  op.W_diag = quad.measure;
  const auto& W = op.W_diag;

  // Symmetrize in the W inner product: L <- W^{-1} sym(W Lraw).
  op.L = linalg::BandedMatrix(n, 2, 2);
  for (int i = 0; i < n; ++i) {
    for (int m = -2; m <= 2; ++m) {
      const int j = i + m;
      if (j < 0 || j >= n) continue;
      const double s = 0.5 * (W[static_cast<std::size_t>(i)] * Lraw.get(i, j) +
                              W[static_cast<std::size_t>(j)] * Lraw.get(j, i));
      op.L.at(i, j) = s / W[static_cast<std::size_t>(i)];
    }
  }

  op.M_diag.resize(static_cast<std::size_t>(n));
  op.WM_diag.resize(static_cast<std::size_t>(n));
  std::vector<double> vt2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = nodes[static_cast<std::size_t>(i)];
    op.M_diag[static_cast<std::size_t>(i)] = 1.0 / p.a2(r);
    op.WM_diag[static_cast<std::size_t>(i)] =
        W[static_cast<std::size_t>(i)] * op.M_diag[static_cast<std::size_t>(i)];
    vt2[static_cast<std::size_t>(i)] = p.tilde_v2(r);
  }

  // S_B = L^T W L + diag(W Vt^2): built on the upper triangle and mirrored,
  // hence exactly symmetric.
  op.S_B = linalg::BandedMatrix(n, 4, 4);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j <= std::min(n - 1, i + 4); ++j) {
      const int k_lo = std::max({0, i - 2, j - 2});
      const int k_hi = std::min({n - 1, i + 2, j + 2});
      double s = 0.0;
      for (int k = k_lo; k <= k_hi; ++k) {
        s += op.L.get(k, i) * W[static_cast<std::size_t>(k)] * op.L.get(k, j);
      }
      if (i == j) s += W[static_cast<std::size_t>(i)] * vt2[static_cast<std::size_t>(i)];
      op.S_B.at(i, j) = s;
      if (i != j) op.S_B.at(j, i) = s;
    }
  }

  // B = W^{-1} S_B, A = M^{-1} B (exactly, so generalized eigenpairs of
  // (S_B, WM) are eigenpairs of A_band).
  op.B_band = linalg::BandedMatrix(n, 4, 4);
  op.A_band = linalg::BandedMatrix(n, 4, 4);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 4); j <= std::min(n - 1, i + 4); ++j) {
      const double b = op.S_B.get(i, j) / W[static_cast<std::size_t>(i)];
      op.B_band.at(i, j) = b;
      op.A_band.at(i, j) = b / op.M_diag[static_cast<std::size_t>(i)];
    }
  }
  return op;
}

}  // namespace biharm::op
