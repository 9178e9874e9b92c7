#pragma once

#include "entwit/linalg.hpp"
#include "entwit/qmaps.hpp"

// Bridge between maps and bipartite 9x9 matrices. The composite index
// convention is fixed once here: row = 3 * (first factor i) + (second
// factor k), and the partial transpose acts on the first factor.

namespace entwit {

// block (i,j) holds apply(Psi, E_kl)[i][j] at entry ((i,k),(j,l))
struct ChoiMatrix {
  HermitianMatrix inner;

  ChoiMatrix() : inner(9) {}
};

// Projective representatives: x and y nonzero, defined up to complex scale.
struct ZeroPoint {
  std::array<complexd, 3> x;
  std::array<complexd, 3> y;
};

ChoiMatrix choi_matrix(const QuantumMap& psi);

// entry ((i,k),(j,l)) -> entry ((j,k),(i,l)); involution, trace preserving
HermitianMatrix partial_transpose(const HermitianMatrix& rho);

// (Phi x Id) rho: output block (i,j) = sum_kl a_ijkl rho_block(k,l)
HermitianMatrix lift(const QuantumMap& phi, const HermitianMatrix& rho);

// p_Psi(x,y) = <y| Psi(|x><x|) |y>, real by the tensor invariant
double biquadratic_form(const QuantumMap& psi, const ZeroPoint& z);

struct ClassifyResult {
  bool is_cp;
  bool is_co_cp;
  double min_choi_eig;
  double min_co_choi_eig;
};

// CP iff C(Psi) is PSD; co-CP iff C(T o Psi) is PSD, with the composition
// done on the tensor (index swap), not on matrices.
ClassifyResult classify(const QuantumMap& psi, double tol = kDefaultPsdTol);

// true iff apply(psi, Z) == scale * A Z A^dagger on the matrix-unit basis,
// to 1e-10 relative
bool check_kraus_rank1(const QuantumMap& psi, const Complex3x3& a, double scale);

// Numeric spectrum of the family's Choi matrix against the known closed
// forms (t, pq, choi-family) or the known partial fixture (mn), at 1e-9.
bool spectrum_fixture_check(const FamilyParams& params);

}  // namespace entwit
