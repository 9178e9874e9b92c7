#include "entwit/choi.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace entwit {

namespace {

// (Psi x Id)|chi><chi| with chi = sum_i e_i x e_i; the redundant second
// construction route guarding the index convention.
HermitianMatrix choi_via_lift(const QuantumMap& psi) {
  HermitianMatrix chi(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) chi.set(3 * i + i, 3 * j + j, 1.0);
  return lift(psi, chi);
}

}  // namespace

ChoiMatrix choi_matrix(const QuantumMap& psi) {
  ChoiMatrix out;
  // Psi(E_kl)[i][j] is the raw coefficient, so C((i,k),(j,l)) = a_ijkl.
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          const int row = 3 * i + k, col = 3 * j + l;
          if (row > col) continue;
          out.inner.set(row, col, psi.coeff(i, j, k, l));
        }

  const HermitianMatrix other = choi_via_lift(psi);
  for (int row = 0; row < 9; ++row)
    for (int col = 0; col < 9; ++col)
      if (std::abs(out.inner(row, col) - other(row, col)) >
          1e-14 * std::max(1.0, psi.max_abs_coeff()))
        throw InternalError("choi_matrix: construction routes disagree");
  return out;
}

HermitianMatrix partial_transpose(const HermitianMatrix& rho) {
  if (rho.dim() != 9) throw InvalidInput("partial_transpose: expected a 9x9 matrix");
  HermitianMatrix out(9);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
          const int row = 3 * i + k, col = 3 * j + l;
          if (row > col) continue;
          out.set(row, col, rho(3 * j + k, 3 * i + l));
        }
  return out;
}

HermitianMatrix lift(const QuantumMap& phi, const HermitianMatrix& rho) {
  if (rho.dim() != 9) throw InvalidInput("lift: expected a 9x9 matrix");
  HermitianMatrix out(9);
  for (int i = 0; i < 3; ++i)
    for (int u = 0; u < 3; ++u)
      for (int j = 0; j < 3; ++j)
        for (int v = 0; v < 3; ++v) {
          const int row = 3 * i + u, col = 3 * j + v;
          if (row > col) continue;
          complexd w = 0.0;
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
              w += phi.coeff(i, j, k, l) * rho(3 * k + u, 3 * l + v);
          out.set(row, col, w);
        }
  return out;
}

double biquadratic_form(const QuantumMap& psi, const ZeroPoint& z) {
  HermitianMatrix proj(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) proj.set(i, j, z.x[i] * std::conj(z.x[j]));
  const HermitianMatrix image = apply(psi, proj);
  complexd value = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) value += std::conj(z.y[i]) * image(i, j) * z.y[j];
  return value.real();
}

ClassifyResult classify(const QuantumMap& psi, double tol) {
  const ChoiMatrix direct = choi_matrix(psi);
  const ChoiMatrix co = choi_matrix(transpose_compose(psi));
  const double min_direct = eig_herm(direct.inner).eigenvalues.front();
  const double min_co = eig_herm(co.inner).eigenvalues.front();
  return {min_direct >= -tol * std::max(1.0, direct.inner.frobenius_norm()),
          min_co >= -tol * std::max(1.0, co.inner.frobenius_norm()), min_direct, min_co};
}

bool check_kraus_rank1(const QuantumMap& psi, const Complex3x3& a, double scale) {
  // (A E_kl A^dagger)_ij = A_ik conj(A_jl)
  const double denom = std::max(1.0, psi.max_abs_coeff());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const complexd want = scale * a[i][k] * std::conj(a[j][l]);
          if (std::abs(psi.coeff(i, j, k, l) - want) > 1e-10 * denom) return false;
        }
  return true;
}

namespace {

bool matches_sorted(std::vector<double> numeric, std::vector<double> closed, double tol) {
  std::sort(numeric.begin(), numeric.end());
  std::sort(closed.begin(), closed.end());
  if (numeric.size() != closed.size()) return false;
  for (std::size_t i = 0; i < numeric.size(); ++i)
    if (std::abs(numeric[i] - closed[i]) > tol) return false;
  return true;
}

// Pop the closest list element for each requested value; true when every
// requested value was matched within tol.
bool contains_all(std::vector<double> values, const std::vector<double>& wanted, double tol) {
  for (double w : wanted) {
    std::size_t best = 0;
    double best_err = std::abs(values[0] - w);
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double err = std::abs(values[i] - w);
      if (err < best_err) {
        best = i;
        best_err = err;
      }
    }
    if (best_err > tol) return false;
    values.erase(values.begin() + static_cast<long>(best));
  }
  return true;
}

bool check_t_spectrum(double t) {
  const double t2 = t * t, t4 = t2 * t2, t8 = t4 * t4;
  const std::vector<double> direct = eig_herm(choi_matrix(make_psi_t(t)).inner).eigenvalues;
  const double hump = 2.0 - 3.0 * t2 + 2.0 * t4;
  if (!matches_sorted(direct, {1.0, 1.0, 1.0, t4, t4, t4, -(1.0 + t4), hump, hump}, 1e-9))
    return false;

  const std::vector<double> co =
      eig_herm(choi_matrix(transpose_compose(make_psi_t(t))).inner).eigenvalues;
  const double s = std::sqrt(5.0 - 8.0 * t2 + 10.0 * t4 - 8.0 * t4 * t2 + 5.0 * t8);
  const double lo = 0.5 * (1.0 + t4 - s), hi = 0.5 * (1.0 + t4 + s);
  const double flat = (t2 - 1.0) * (t2 - 1.0);
  return matches_sorted(co, {flat, flat, flat, lo, lo, lo, hi, hi, hi}, 1e-9);
}

bool check_pq_spectrum(double p, double q) {
  const double pq = p * q;
  const double c00 = (1.0 - pq) * (1.0 - pq);
  const double c04 = -pq * (1.0 + (p * p - 1.0) * q * q);
  const double c11 = (2.0 * p - q) * q;
  const double c08 = -(1.0 - pq) * (p * p + (p * p - 1.0) * (q * q - pq));
  const double quad_a = c08 + (p * p + q * q) * c00;
  const double quad_b = 2.0 * c04 * c04 - q * q * c00 * c08 - p * p * q * q * c00 * c00;
  const double disc = std::sqrt(quad_a * quad_a + 4.0 * quad_b);
  const std::vector<double> direct = eig_herm(choi_matrix(make_psi_pq(p, q)).inner).eigenvalues;
  if (!matches_sorted(direct,
                      {0.0, c11, c11, (1.0 - p * p * q * q) * c11, p * p * c00 - c08,
                       p * p * q * q * c11, p * p * q * q * c11, 0.5 * (quad_a + disc),
                       0.5 * (quad_a - disc)},
                      1e-9))
    return false;

  const std::vector<double> co =
      eig_herm(choi_matrix(transpose_compose(make_psi_pq(p, q))).inner).eigenvalues;
  const double u = (1.0 + p * p * q * q) * (2.0 * p - q);
  const double w = 4.0 * p * p * c00 * ((1.0 + pq) * (1.0 + pq) - 2.0 * q * q);
  const double co_min = 0.5 * q * (u - std::sqrt(u * u + w));
  return std::abs(co.front() - co_min) <= 1e-9;
}

bool check_mn_spectrum(double m, double n) {
  const MNFamilyParams params{m, n};
  const double b = params.b();
  std::vector<double> ev = eig_herm(choi_matrix(make_psi_mn(m, n)).inner).eigenvalues;
  if (!contains_all(ev, {0.0, 0.0, b, b}, 1e-9)) return false;

  // Quintic factor coefficients after removing {0,0,b,b}; the closed forms
  // hold in the quarter-plane convention |n| >= |m|.
  std::vector<double> rest = ev;
  for (double w : {0.0, 0.0, b, b}) {
    std::size_t best = 0;
    double best_err = std::abs(rest[0] - w);
    for (std::size_t i = 1; i < rest.size(); ++i)
      if (std::abs(rest[i] - w) < best_err) {
        best = i;
        best_err = std::abs(rest[i] - w);
      }
    rest.erase(rest.begin() + static_cast<long>(best));
  }
  const double mt = std::abs(n) >= std::abs(m) ? m : n;
  const double nt = std::abs(n) >= std::abs(m) ? n : m;
  double sum = 0.0, pair = 0.0;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    sum += rest[i];
    for (std::size_t j = i + 1; j < rest.size(); ++j) pair += rest[i] * rest[j];
  }
  if (std::abs(sum - 2.0 * mt * (mt - nt)) > 1e-9) return false;
  const double pair_want =
      0.5 * b * (2.0 * mt * mt + 4.0 * nt * nt + 7.0 * mt * mt * nt * nt);
  return std::abs(pair - pair_want) <= 1e-9;
}

bool check_choi_family_spectrum(const ChoiFamilyParams& f) {
  const double s = std::sqrt(3.0 * f.c * f.c + f.r0 * f.r0 + f.r1 * f.r1 + f.r2 * f.r2 -
                             f.r0 * f.r1 - f.r0 * f.r2 - f.r1 * f.r2);
  const double mid = 0.5 * (f.r + f.r0 + f.r1 + f.r2);
  const std::vector<double> ev =
      eig_herm(choi_matrix(make_choi_family(f.r, f.r0, f.r1, f.r2, f.c)).inner).eigenvalues;
  return matches_sorted(ev, {-f.r, f.r, f.r, f.r, 0.0, 0.0, 0.0, mid + s, mid - s}, 1e-9);
}

}  // namespace

bool spectrum_fixture_check(const FamilyParams& params) {
  return std::visit(
      [](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TFamilyParams>)
          return check_t_spectrum(p.t);
        else if constexpr (std::is_same_v<T, PQFamilyParams>)
          return check_pq_spectrum(p.p, p.q);
        else if constexpr (std::is_same_v<T, MNFamilyParams>)
          return check_mn_spectrum(p.m, p.n);
        else
          return check_choi_family_spectrum(p);
      },
      params);
}

}  // namespace entwit
