#include "entwit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace entwit {

namespace {

bool all_finite(const double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

double frobenius(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

// Cyclic Jacobi on a full symmetric buffer (row-major). V accumulates
// rotations; column k of V is the eigenvector for the k-th diagonal entry.
void jacobi(std::vector<double>& a, std::size_t n, std::vector<double>* v) {
  if (v) {
    v->assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) (*v)[i * n + i] = 1.0;
  }
  const double norm = frobenius(a);
  if (norm == 0.0) return;
  const double target = 1e-14 * norm;
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off2 = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off2 += a[p * n + q] * a[p * n + q];
    if (std::sqrt(2.0 * off2) <= target) return;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        if (v) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = (*v)[k * n + p], vkq = (*v)[k * n + q];
            (*v)[k * n + p] = c * vkp - s * vkq;
            (*v)[k * n + q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  throw InternalError("jacobi eigensolver did not converge");
}

Spectrum sorted_spectrum(const std::vector<double>& a, std::size_t n,
                         const std::vector<double>* v) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });
  Spectrum out;
  out.eigenvalues.reserve(n);
  for (std::size_t k : order) out.eigenvalues.push_back(a[k * n + k]);
  if (v) {
    out.eigenvectors.resize(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
      out.eigenvectors[idx].resize(n);
      for (std::size_t row = 0; row < n; ++row)
        out.eigenvectors[idx][row] = (*v)[row * n + order[idx]];
    }
  }
  return out;
}

std::vector<double> flat_of(const RealSymMatrix& m) {
  const std::size_t n = m.dim();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
  return a;
}

// [[re, -im], [im, re]]
std::vector<double> embedding_of(const HermitianMatrix& m) {
  const std::size_t n = m.dim();
  std::vector<double> e(4 * n * n);
  const std::size_t nn = 2 * n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      e[i * nn + j] = m.re(i, j);
      e[(i + n) * nn + (j + n)] = m.re(i, j);
      e[i * nn + (j + n)] = -m.im(i, j);
      e[(i + n) * nn + j] = m.im(i, j);
    }
  }
  return e;
}

}  // namespace

double RealSymMatrix::frobenius_norm() const { return frobenius(data_); }

double HermitianMatrix::frobenius_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < re_.size(); ++i) s += re_[i] * re_[i] + im_[i] * im_[i];
  return std::sqrt(s);
}

double HermitianMatrix::imag_frobenius_norm() const { return frobenius(im_); }

Spectrum eig_sym(const RealSymMatrix& a, bool with_eigenvectors) {
  std::vector<double> buf = flat_of(a);
  if (!all_finite(buf.data(), buf.size())) throw InvalidInput("eig_sym: non-finite entry");
  std::vector<double> v;
  jacobi(buf, a.dim(), with_eigenvectors ? &v : nullptr);
  return sorted_spectrum(buf, a.dim(), with_eigenvectors ? &v : nullptr);
}

Spectrum eig_herm(const HermitianMatrix& a) {
  const std::size_t n = a.dim();
  std::vector<double> buf = embedding_of(a);
  if (!all_finite(buf.data(), buf.size())) throw InvalidInput("eig_herm: non-finite entry");
  jacobi(buf, 2 * n, nullptr);
  Spectrum dbl = sorted_spectrum(buf, 2 * n, nullptr);
  Spectrum out;
  out.eigenvalues.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = dbl.eigenvalues[2 * k], hi = dbl.eigenvalues[2 * k + 1];
    if (std::abs(hi - lo) > 1e-8)
      throw InternalError("eig_herm: embedding eigenvalues failed to pair");
    out.eigenvalues.push_back(0.5 * (lo + hi));
  }
  return out;
}

bool is_psd(const HermitianMatrix& a, double tol) {
  if (tol < 0.0) throw InvalidInput("is_psd: negative tolerance");
  const Spectrum s = eig_herm(a);
  return s.eigenvalues.front() >= -tol * std::max(1.0, a.frobenius_norm());
}

bool is_psd(const RealSymMatrix& a, double tol) {
  if (tol < 0.0) throw InvalidInput("is_psd: negative tolerance");
  const Spectrum s = eig_sym(a);
  return s.eigenvalues.front() >= -tol * std::max(1.0, a.frobenius_norm());
}

HermitianMatrix inv_sqrt(const HermitianMatrix& a) {
  const std::size_t n = a.dim();
  std::vector<double> buf = embedding_of(a);
  if (!all_finite(buf.data(), buf.size())) throw InvalidInput("inv_sqrt: non-finite entry");
  std::vector<double> v;
  jacobi(buf, 2 * n, &v);
  const std::size_t nn = 2 * n;
  double min_eig = buf[0];
  for (std::size_t k = 1; k < nn; ++k) min_eig = std::min(min_eig, buf[k * nn + k]);
  if (min_eig <= 1e-12 * a.frobenius_norm() || min_eig <= 0.0)
    throw NotPositiveDefinite("inv_sqrt: matrix is not positive definite");

  // B = V diag(lambda^{-1/2}) V^T computed wholly in the embedding; the block
  // structure survives because the spectral calculus commutes with it.
  std::vector<double> b(nn * nn, 0.0);
  for (std::size_t k = 0; k < nn; ++k) {
    const double w = 1.0 / std::sqrt(buf[k * nn + k]);
    for (std::size_t i = 0; i < nn; ++i) {
      const double vik = v[i * nn + k] * w;
      for (std::size_t j = 0; j <= i; ++j) b[i * nn + j] += vik * v[j * nn + k];
    }
  }
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = i + 1; j < nn; ++j) b[i * nn + j] = b[j * nn + i];

  HermitianMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double re = 0.5 * (b[i * nn + j] + b[(i + n) * nn + (j + n)]);
      const double im = 0.5 * (b[(i + n) * nn + j] - b[i * nn + (j + n)]);
      out.set(i, j, {re, im});
    }
  }
  return out;
}

namespace {

// Householder QR; returns the square upper factor, which has the same column
// Gram matrix (hence the same singular values and right singular vectors).
RealMatrix qr_compress(const RealMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<double> a(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i * cols + j] = m(i, j);
  const std::size_t steps = std::min(rows, cols);
  std::vector<double> h(rows);
  for (std::size_t k = 0; k < steps; ++k) {
    double norm2 = 0.0;
    for (std::size_t i = k; i < rows; ++i) norm2 += a[i * cols + k] * a[i * cols + k];
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;
    const double alpha = a[k * cols + k] >= 0.0 ? -norm : norm;
    double hnorm2 = 0.0;
    for (std::size_t i = k; i < rows; ++i) {
      h[i] = a[i * cols + k];
      if (i == k) h[i] -= alpha;
      hnorm2 += h[i] * h[i];
    }
    if (hnorm2 == 0.0) continue;
    for (std::size_t j = k; j < cols; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < rows; ++i) dot += h[i] * a[i * cols + j];
      const double f = 2.0 * dot / hnorm2;
      for (std::size_t i = k; i < rows; ++i) a[i * cols + j] -= f * h[i];
    }
  }
  RealMatrix r(cols, cols);
  for (std::size_t i = 0; i < cols && i < rows; ++i)
    for (std::size_t j = i; j < cols; ++j) r(i, j) = a[i * cols + j];
  return r;
}

}  // namespace

std::vector<std::vector<double>> nullspace(const RealMatrix& m, double rank_tol) {
  if (rank_tol <= 0.0) throw InvalidInput("nullspace: rank_tol must be positive");
  const std::size_t cols = m.cols();
  if (cols == 0) return {};
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (!std::isfinite(m(i, j))) throw InvalidInput("nullspace: non-finite entry");

  const RealMatrix w0 = m.rows() > cols ? qr_compress(m) : m;
  const std::size_t rows = w0.rows();

  // One-sided Jacobi: orthogonalize column pairs of W, accumulate V. At
  // convergence the column norms of W are the singular values and the columns
  // of V are the right singular vectors.
  std::vector<double> w(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) w[i * cols + j] = w0(i, j);
  std::vector<double> v(cols * cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) v[j * cols + j] = 1.0;

  const int max_sweeps = 60;
  const double eps_ortho = 64.0 * std::numeric_limits<double>::epsilon();
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    double max_norm_sq = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      double s2 = 0.0;
      for (std::size_t i = 0; i < rows; ++i) s2 += w[i * cols + j] * w[i * cols + j];
      max_norm_sq = std::max(max_norm_sq, s2);
    }
    // Columns this far below the dominant one are numerically null; the dot
    // products between two of them are rounding noise and rotating the pair
    // can cycle forever without ever passing the relative orthogonality test.
    const double null_floor_sq = max_norm_sq * 1e-26;
    for (std::size_t p = 0; p < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          const double wp = w[i * cols + p], wq = w[i * cols + q];
          alpha += wp * wp;
          beta += wq * wq;
          gamma += wp * wq;
        }
        if (gamma == 0.0) continue;
        if (alpha <= null_floor_sq && beta <= null_floor_sq) continue;
        if (std::abs(gamma) <= eps_ortho * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < rows; ++i) {
          const double wp = w[i * cols + p], wq = w[i * cols + q];
          w[i * cols + p] = c * wp - s * wq;
          w[i * cols + q] = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < cols; ++i) {
          const double vp = v[i * cols + p], vq = v[i * cols + q];
          v[i * cols + p] = c * vp - s * vq;
          v[i * cols + q] = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged) throw InternalError("nullspace: jacobi svd did not converge");

  std::vector<double> sigma(cols);
  double sigma_max = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    double s2 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s2 += w[i * cols + j] * w[i * cols + j];
    sigma[j] = std::sqrt(s2);
    sigma_max = std::max(sigma_max, sigma[j]);
  }

  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < cols; ++j) {
    if (sigma[j] > rank_tol * sigma_max) continue;
    std::vector<double> vec(cols);
    for (std::size_t i = 0; i < cols; ++i) vec[i] = v[i * cols + j];
    basis.push_back(std::move(vec));
  }

  for (const auto& vec : basis) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < cols; ++j) dot += m(i, j) * vec[j];
      r2 += dot * dot;
    }
    if (std::sqrt(r2) > 10.0 * rank_tol * sigma_max)
      throw InternalError("nullspace: residual exceeds bound");
  }
  return basis;
}

int numeric_rank(const HermitianMatrix& a, double tol) {
  if (tol <= 0.0) throw InvalidInput("numeric_rank: tol must be positive");
  const Spectrum s = eig_herm(a);
  double max_abs = 0.0;
  for (double lam : s.eigenvalues) max_abs = std::max(max_abs, std::abs(lam));
  int rank = 0;
  for (double lam : s.eigenvalues)
    if (std::abs(lam) > tol * max_abs) ++rank;
  return rank;
}

}  // namespace entwit
