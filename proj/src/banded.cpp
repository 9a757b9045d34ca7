#include "biharm/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace biharm::linalg {

namespace {
constexpr double kInfResidual = 1e300;
}  // namespace

BandedMatrix::BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku) {
  if (n < 1 || kl < 0 || ku < 0) throw std::invalid_argument("BandedMatrix: bad shape");
  data_.assign(static_cast<std::size_t>((kl + ku + 1)) * static_cast<std::size_t>(n), 0.0);
}

double& BandedMatrix::at(int i, int j) {
  const int d = j - i;
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || d < -kl_ || d > ku_) {
    throw std::out_of_range("BandedMatrix::at outside band");
  }
  return data_[static_cast<std::size_t>(d + kl_) * n_ + static_cast<std::size_t>(i)];
}

double BandedMatrix::get(int i, int j) const {
  const int d = j - i;
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || d < -kl_ || d > ku_) return 0.0;
  return data_[static_cast<std::size_t>(d + kl_) * n_ + static_cast<std::size_t>(i)];
}

void BandedMatrix::apply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_) {
    throw std::invalid_argument("BandedMatrix::apply size mismatch");
  }
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    const int j_lo = std::max(0, i - kl_);
    const int j_hi = std::min(n_ - 1, i + ku_);
    for (int j = j_lo; j <= j_hi; ++j) {
      s += data_[static_cast<std::size_t>(j - i + kl_) * n_ + static_cast<std::size_t>(i)] *
           x[static_cast<std::size_t>(j)];
    }
    y[static_cast<std::size_t>(i)] = s;
  }
}

std::vector<double> BandedMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(n_));
  apply(x, y);
  return y;
}

BandedMatrix BandedMatrix::product(const BandedMatrix& a, const BandedMatrix& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("BandedMatrix::product size mismatch");
  const int n = a.n_;
  BandedMatrix c(n, a.kl_ + b.kl_, a.ku_ + b.ku_);
  for (int i = 0; i < n; ++i) {
    const int j_lo = std::max(0, i - c.kl_);
    const int j_hi = std::min(n - 1, i + c.ku_);
    for (int j = j_lo; j <= j_hi; ++j) {
      const int k_lo = std::max({0, i - a.kl_, j - b.ku_});
      const int k_hi = std::min({n - 1, i + a.ku_, j + b.kl_});
      double s = 0.0;
      for (int k = k_lo; k <= k_hi; ++k) s += a.get(i, k) * b.get(k, j);
      c.at(i, j) = s;
    }
  }
  return c;
}

std::vector<double> BandedMatrix::dense() const {
  std::vector<double> d(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    const int j_lo = std::max(0, i - kl_);
    const int j_hi = std::min(n_ - 1, i + ku_);
    for (int j = j_lo; j <= j_hi; ++j) {
      d[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)] = get(i, j);
    }
  }
  return d;
}

double BandedMatrix::symmetry_defect() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    const int j_hi = std::min(n_ - 1, i + std::max(kl_, ku_));
    for (int j = i + 1; j <= j_hi; ++j) {
      worst = std::max(worst, std::abs(get(i, j) - get(j, i)));
    }
  }
  return worst;
}

BandedCholesky::BandedCholesky(const BandedMatrix& spd) : n_(spd.n()), kd_(std::max(spd.kl(), spd.ku())) {
  // LAPACK upper-band storage, column major: ab[kd + i - j + j*ldab] for
  // max(0, j-kd) <= i <= j.
  const int ldab = kd_ + 1;
  ab_.assign(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n_), 0.0);
  for (int j = 0; j < n_; ++j) {
    for (int i = std::max(0, j - kd_); i <= j; ++i) {
      ab_[static_cast<std::size_t>(kd_ + i - j) + static_cast<std::size_t>(j) * ldab] = spd.get(i, j);
    }
  }
  const lapack_int info =
      LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', n_, kd_, ab_.data(), ldab);
  if (info != 0) {
    throw std::runtime_error("BandedCholesky: dpbtrf failed, info=" + std::to_string(info) +
                             " (matrix not positive definite?)");
  }
}

void BandedCholesky::solve_in_place(std::span<double> b) const {
  if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("BandedCholesky::solve size");
  const lapack_int info = LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', n_, kd_, 1, ab_.data(), kd_ + 1,
                                         b.data(), n_);
  if (info != 0) throw std::runtime_error("BandedCholesky: dpbtrs failed");
}

std::vector<double> BandedCholesky::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

void dense_symmetric_eig(std::vector<double>& a, std::vector<double>& values, int n) {
  values.assign(static_cast<std::size_t>(n), 0.0);
  const lapack_int info =
      LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'V', 'U', n, a.data(), n, values.data());
  if (info != 0) throw std::runtime_error("dense_symmetric_eig: dsyev failed");
}

namespace {

// Block modified Gram-Schmidt in the D-weighted inner product, run twice.
void d_orthonormalize(std::vector<std::vector<double>>& v, std::span<const double> D) {
  const std::size_t b = v.size();
  const std::size_t n = v.front().size();
  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += D[i] * x[i] * y[i];
    return s;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < b; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        const double c = dot(v[k], v[j]);
        for (std::size_t i = 0; i < n; ++i) v[j][i] -= c * v[k][i];
      }
      const double nrm = std::sqrt(dot(v[j], v[j]));
      if (!(nrm > 0.0)) throw std::runtime_error("subspace iteration: rank collapse");
      for (std::size_t i = 0; i < n; ++i) v[j][i] /= nrm;
    }
  }
}

}  // namespace

PencilEigResult lowest_eigenpairs(const BandedMatrix& S, std::span<const double> D, int m,
                                  double tol, int max_iter) {
  const int n = S.n();
  if (static_cast<int>(D.size()) != n) throw std::invalid_argument("lowest_eigenpairs: D size");
  if (m < 1 || m > n) throw std::invalid_argument("lowest_eigenpairs: bad m");
  const int b = std::min(n, m + std::max(4, m / 2));

  const BandedCholesky chol(S);

  // Deterministic smooth start block.
  std::vector<std::vector<double>> v(static_cast<std::size_t>(b),
                                     std::vector<double>(static_cast<std::size_t>(n)));
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = (i + 1.0) / (n + 1.0);
      v[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          std::sin((j + 1.0) * M_PI * x) + 1e-3 * std::cos((2.0 * j + 1.0) * M_PI * x);
    }
  }
  d_orthonormalize(v, D);

  PencilEigResult out;
  std::vector<double> h(static_cast<std::size_t>(b) * static_cast<std::size_t>(b));
  std::vector<double> theta;

  // Relative pencil residual of the k-th Ritz pair in the natural metric:
  // ||S x - theta D x||_{D^{-1}} / (theta ||x||_D).
  auto residual_of = [&](const std::vector<double>& x, const std::vector<double>& sx,
                         double th) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const double r = sx[iu] - th * D[iu] * x[iu];
      num += r * r / D[iu];
      den += D[iu] * x[iu] * x[iu];
    }
    return std::sqrt(num) / (std::abs(th) * std::sqrt(den) + 1e-300);
  };

  double worst_res = kInfResidual;
  double best_seen = kInfResidual;
  int stalled = 0;
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    // power step: v_j <- S^{-1} (D v_j)
    for (auto& col : v) {
      for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] *= D[static_cast<std::size_t>(i)];
      chol.solve_in_place(col);
    }
    d_orthonormalize(v, D);

    // Rayleigh-Ritz: H = V^T S V (V is D-orthonormal)
    std::vector<std::vector<double>> sv_cols(static_cast<std::size_t>(b));
    for (int j = 0; j < b; ++j) sv_cols[static_cast<std::size_t>(j)] = S.apply(v[static_cast<std::size_t>(j)]);
    for (int j = 0; j < b; ++j) {
      for (int k = j; k < b; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          s += v[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
               sv_cols[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        }
        h[static_cast<std::size_t>(j) * b + static_cast<std::size_t>(k)] = s;
        h[static_cast<std::size_t>(k) * b + static_cast<std::size_t>(j)] = s;
      }
    }
    std::vector<double> z = h;
    dense_symmetric_eig(z, theta, b);

    // rotate both the basis and S*basis to the Ritz vectors
    auto rotate = [&](const std::vector<std::vector<double>>& cols) {
      std::vector<std::vector<double>> w(static_cast<std::size_t>(b),
                                         std::vector<double>(static_cast<std::size_t>(n), 0.0));
      for (int j = 0; j < b; ++j) {
        for (int k = 0; k < b; ++k) {
          const double c = z[static_cast<std::size_t>(k) * b + static_cast<std::size_t>(j)];
          if (c == 0.0) continue;
          for (int i = 0; i < n; ++i) {
            w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] +=
                c * cols[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
          }
        }
      }
      return w;
    };
    auto vr = rotate(v);
    auto svr = rotate(sv_cols);
    v.swap(vr);

    worst_res = 0.0;
    for (int k = 0; k < m; ++k) {
      worst_res = std::max(worst_res, residual_of(v[static_cast<std::size_t>(k)],
                                                  svr[static_cast<std::size_t>(k)],
                                                  theta[static_cast<std::size_t>(k)]));
    }
    if (worst_res <= tol) {
      ++it;
      converged = true;
      break;
    }
    // rounding floor: stop once the residual stops improving at a small level
    if (worst_res < 0.98 * best_seen) {
      best_seen = worst_res;
      stalled = 0;
    } else if (++stalled >= 8 && worst_res < 1e-7) {
      ++it;
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw std::runtime_error("lowest_eigenpairs: no convergence after " + std::to_string(max_iter) +
                             " iterations (worst pencil residual " + std::to_string(worst_res) +
                             ", lowest Ritz value " +
                             std::to_string(theta.empty() ? 0.0 : theta.front()) + ")");
  }

  out.iterations = it;
  out.values.assign(theta.begin(), theta.begin() + m);
  out.vectors.assign(v.begin(), v.begin() + m);
  // canonical sign: largest-magnitude entry positive
  for (auto& col : out.vectors) {
    double best = 0.0;
    for (double x : col) {
      if (std::abs(x) > std::abs(best)) best = x;
    }
    if (best < 0.0) {
      for (double& x : col) x = -x;
    }
  }
  return out;
}

std::vector<double> dense_pencil_eigenvalues(const BandedMatrix& S, std::span<const double> D) {
  // Solved as D z = (1/mu) S z: the top of the inverted pencil's spectrum
  // is the bottom of the original one, and the dense reduction computes its
  // LARGEST eigenvalues to full relative precision (a direct reduction of
  // (S, D) would drown mu_1 in eps * ||L^{-1} S L^{-T}|| ~ eps / h_min^4).
  const int n = S.n();
  std::vector<double> a(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    a[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(i)] = D[static_cast<std::size_t>(i)];
  }
  std::vector<double> bmat = S.dense();
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsygv(LAPACK_ROW_MAJOR, 1, 'N', 'U', n, a.data(), n,
                                        bmat.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dense_pencil_eigenvalues: dsygv failed");
  // w holds 1/mu ascending; return mu ascending
  std::vector<double> mu(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double inv = w[w.size() - 1 - i];
    mu[i] = (inv > 0.0) ? 1.0 / inv : std::numeric_limits<double>::infinity();
  }
  return mu;
}

}  // namespace biharm::linalg
