#pragma once

#include <span>
#include <vector>

namespace biharm::linalg {

/// Square banded matrix, stored by diagonals.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku);

  int n() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  double& at(int i, int j);        // (i, j) must lie inside the band
  double get(int i, int j) const;  // 0 outside the band

  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;

  /// Band-aware product; result bandwidths add.
  static BandedMatrix product(const BandedMatrix& a, const BandedMatrix& b);

  /// Row-major dense copy (oracle and small-problem paths).
  std::vector<double> dense() const;

  /// max_ij |A_ij - A_ji| over the band (plain, unweighted).
  double symmetry_defect() const;

 private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  std::vector<double> data_;  // data_[(j - i + kl) * n + i]
};

/// Cholesky factorization of a symmetric positive definite banded matrix
/// (upper band is used), kept for repeated solves.
class BandedCholesky {
 public:
  explicit BandedCholesky(const BandedMatrix& spd);
  int n() const { return n_; }
  void solve_in_place(std::span<double> b) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  int n_ = 0, kd_ = 0;
  std::vector<double> ab_;
};

/// Lowest-m eigenpairs of the symmetric-definite pencil S x = mu D x
/// (S symmetric banded positive definite, D positive diagonal) by
/// shift-invert subspace iteration with Rayleigh-Ritz extraction. Stops
/// when the relative pencil residual ||Sx - mu Dx||_{D^{-1}} / (mu ||x||_D)
/// of every requested pair reaches `tol`, or at the rounding floor.
struct PencilEigResult {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // D-orthonormal
  int iterations = 0;
};
PencilEigResult lowest_eigenpairs(const BandedMatrix& S, std::span<const double> D, int m,
                                  double tol = 1e-10, int max_iter = 400);

/// Dense-solver oracle for the same pencil: all eigenvalues ascending,
/// via LAPACK's dense generalized symmetric driver.
std::vector<double> dense_pencil_eigenvalues(const BandedMatrix& S, std::span<const double> D);

/// Dense symmetric eigenvalues/vectors of a small matrix (row-major n x n).
void dense_symmetric_eig(std::vector<double>& a_inout_vectors, std::vector<double>& values, int n);

}  // namespace biharm::linalg
