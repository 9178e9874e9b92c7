#pragma once

#include <array>
#include <cstdint>
#include <variant>

#include "entwit/linalg.hpp"

// Self-adjointness preserving linear maps M3 -> M3 stored as coefficient
// tensors, the named one-parameter families, and their closed-form
// positivity certificates.

namespace entwit {

using Complex3x3 = std::array<std::array<complexd, 3>, 3>;

// Coefficient tensor: output entry (i,j) receives coeff(i,j,k,l) * z_kl.
// Invariant: coeff(i,j,k,l) == conj(coeff(j,i,l,k)).
class QuantumMap {
 public:
  QuantumMap() : a_{} {}

  static QuantumMap identity_map();

  complexd coeff(int i, int j, int k, int l) const { return a_[index(i, j, k, l)]; }
  void set_coeff(int i, int j, int k, int l, complexd value) { a_[index(i, j, k, l)] = value; }
  void add_coeff(int i, int j, int k, int l, complexd value) { a_[index(i, j, k, l)] += value; }

  double self_adjointness_residual() const;
  double max_abs_coeff() const;

  QuantumMap& operator+=(const QuantumMap& o);
  QuantumMap& operator-=(const QuantumMap& o);
  QuantumMap& operator*=(double s);
  friend QuantumMap operator+(QuantumMap a, const QuantumMap& b) { return a += b; }
  friend QuantumMap operator-(QuantumMap a, const QuantumMap& b) { return a -= b; }
  friend QuantumMap operator*(double s, QuantumMap a) { return a *= s; }

  static int index(int i, int j, int k, int l) { return ((i * 3 + j) * 3 + k) * 3 + l; }

 private:
  std::array<complexd, 81> a_;
};

struct ChoiFamilyParams {
  double r, r0, r1, r2, c;
};
struct TFamilyParams {
  double t;
};
struct PQFamilyParams {
  double p, q;
};
// b and c are derived, recomputed on access so they can never go stale.
struct MNFamilyParams {
  double m, n;
  double b() const;
  double c() const;
};
using FamilyParams =
    std::variant<ChoiFamilyParams, TFamilyParams, PQFamilyParams, MNFamilyParams>;

QuantumMap make_choi_map();
QuantumMap make_choi_family(double r, double r0, double r1, double r2, double c);
QuantumMap make_psi_t(double t);
QuantumMap make_psi_pq(double p, double q);
QuantumMap make_psi_mn(double m, double n);
QuantumMap make_map(const FamilyParams& params);

HermitianMatrix apply(const QuantumMap& psi, const HermitianMatrix& z);

// adjoint tensor: a'(i,j,k,l) = a(l,k,j,i)
QuantumMap adjoint(const QuantumMap& psi);

// tensor of T o Psi: a'(i,j,k,l) = a(j,i,k,l)
QuantumMap transpose_compose(const QuantumMap& psi);

// Z -> Q Psi(Z) Q^dagger
QuantumMap conjugate(const QuantumMap& psi, const Complex3x3& q);

// Psi(I)^{-1/2} (Psi(Z) + eps Tr(Z) I) Psi(I)^{-1/2} with Psi(I) shifted by
// 3 eps I; NotPositiveDefinite when the shifted Psi(I) is not PD.
QuantumMap unitalize(const QuantumMap& psi, double epsilon = 0.0);

bool in_region_R(double p, double q);
bool in_region_A(double m, double n);
bool choi_family_is_positive(double r, double r0, double r1, double r2, double c);

struct SamplingReport {
  double min_eigenvalue_found;
  std::array<complexd, 3> worst_point;
};

// Randomized falsification only: samples Gaussian-normalized unit vectors x
// and reports the smallest eigenvalue of Psi(|x><x|) seen. Deterministic for
// a fixed seed across platforms.
SamplingReport verify_positivity_sampling(const QuantumMap& psi, int trials,
                                          std::uint64_t seed);

}  // namespace entwit
