#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Dense real-symmetric and complex-Hermitian linear algebra on small fixed
// sizes. Everything here is exact-storage: symmetry and antisymmetry are
// enforced by the setters, never by post-hoc symmetrization.

namespace entwit {

using complexd = std::complex<double>;

struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal invariant (solver non-convergence, failed eigenvalue
// pairing). Always a bug, never a user error.
struct InternalError : std::runtime_error {
  explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr double kDefaultPsdTol = 1e-9;
inline constexpr double kDefaultRankTol = 1e-8;

// Rectangular real matrix, row-major. Carrier for nullspace systems.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// entries(i,j) == entries(j,i) exactly: set() writes both mirror slots.
class RealSymMatrix {
 public:
  explicit RealSymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static RealSymMatrix identity(std::size_t n) {
    RealSymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1.0;
    return m;
  }

  std::size_t dim() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, double value) {
    data_[i * n_ + j] = value;
    data_[j * n_ + i] = value;
  }
  void add(std::size_t i, std::size_t j, double value) { set(i, j, data_[i * n_ + j] + value); }

  double trace() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += data_[i * n_ + i];
    return s;
  }
  double frobenius_norm() const;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

// re symmetric, im antisymmetric; im diagonal pinned to zero, so every stored
// matrix is self-adjoint by construction.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(std::size_t n) : n_(n), re_(n * n, 0.0), im_(n * n, 0.0) {}

  static HermitianMatrix identity(std::size_t n) {
    HermitianMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.re_[i * n + i] = 1.0;
    return m;
  }
  static HermitianMatrix from_real(const RealSymMatrix& a) {
    HermitianMatrix m(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
      for (std::size_t j = 0; j < a.dim(); ++j) m.re_[i * a.dim() + j] = a(i, j);
    return m;
  }

  std::size_t dim() const { return n_; }
  double re(std::size_t i, std::size_t j) const { return re_[i * n_ + j]; }
  double im(std::size_t i, std::size_t j) const { return im_[i * n_ + j]; }
  complexd operator()(std::size_t i, std::size_t j) const {
    return {re_[i * n_ + j], im_[i * n_ + j]};
  }

  // Writes (i,j) and the conjugate at (j,i). The imaginary part of a diagonal
  // entry is discarded.
  void set(std::size_t i, std::size_t j, complexd value) {
    re_[i * n_ + j] = value.real();
    re_[j * n_ + i] = value.real();
    if (i == j) {
      im_[i * n_ + i] = 0.0;
    } else {
      im_[i * n_ + j] = value.imag();
      im_[j * n_ + i] = -value.imag();
    }
  }
  void add(std::size_t i, std::size_t j, complexd value) { set(i, j, (*this)(i, j) + value); }

  double trace() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += re_[i * n_ + i];
    return s;
  }
  double frobenius_norm() const;
  double imag_frobenius_norm() const;
  RealSymMatrix real_part() const {
    RealSymMatrix a(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) a.set(i, j, 0.5 * (re_[i * n_ + j] + re_[j * n_ + i]));
    return a;
  }

 private:
  std::size_t n_;
  std::vector<double> re_, im_;
};

struct Spectrum {
  std::vector<double> eigenvalues;                // ascending
  std::vector<std::vector<double>> eigenvectors;  // eigenvectors[k] pairs with eigenvalues[k]

  bool has_eigenvectors() const { return !eigenvectors.empty(); }
};

// Cyclic Jacobi; sweeps until the off-diagonal Frobenius norm drops below
// 1e-14 * ||A||_F. Throws InvalidInput on non-finite entries.
Spectrum eig_sym(const RealSymMatrix& a, bool with_eigenvectors = false);

// Via the 2n x 2n real symmetric embedding [[re, -im], [im, re]]. Each
// eigenvalue appears twice in the embedding; the doubling is deduplicated by
// greedy adjacent pairing within 1e-8 absolute, and a pairing mismatch throws
// InternalError.
Spectrum eig_herm(const HermitianMatrix& a);

// min eigenvalue >= -tol * max(1, ||A||_F)
bool is_psd(const HermitianMatrix& a, double tol = kDefaultPsdTol);
bool is_psd(const RealSymMatrix& a, double tol = kDefaultPsdTol);

// B with B*A*B = I. Requires A positive definite: min eigenvalue
// > 1e-12 * ||A||_F, otherwise NotPositiveDefinite.
HermitianMatrix inv_sqrt(const HermitianMatrix& a);

// Orthonormal basis of {v : Mv = 0} by one-sided Jacobi SVD; tall systems are
// first compressed to square by Householder QR. Rank is decided by
// sigma_k <= rank_tol * sigma_max.
std::vector<std::vector<double>> nullspace(const RealMatrix& m,
                                           double rank_tol = kDefaultRankTol);

// Count of eigenvalues with |lambda| > tol * max|lambda|.
int numeric_rank(const HermitianMatrix& a, double tol = kDefaultRankTol);

}  // namespace entwit
