#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "entwit/linalg.hpp"
#include "entwit/qmaps.hpp"

using namespace entwit;

namespace {

HermitianMatrix random_hermitian3(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HermitianMatrix a(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      a.set(i, j, i == j ? complexd{u(rng), 0.0} : complexd{u(rng), u(rng)});
  return a;
}

// tr(A B) for self-adjoint A, B
double hs_trace(const HermitianMatrix& a, const HermitianMatrix& b) {
  complexd s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) s += a(i, j) * std::conj(b(i, j));
  return s.real();
}

HermitianMatrix projector(const std::array<complexd, 3>& x) {
  HermitianMatrix p(3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) p.set(i, j, x[i] * std::conj(x[j]));
  return p;
}

}  // namespace

TEST_CASE("identity map and self-adjointness of all families") {
  std::mt19937_64 rng(5);
  HermitianMatrix z = random_hermitian3(rng);
  HermitianMatrix out = apply(QuantumMap::identity_map(), z);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(out(i, j) - z(i, j)) <= 1e-15);

  CHECK(make_choi_map().self_adjointness_residual() == 0.0);
  CHECK(make_psi_t(1.7).self_adjointness_residual() == 0.0);
  CHECK(make_psi_pq(0.5, 0.8).self_adjointness_residual() == 0.0);
  CHECK(make_psi_mn(-0.5, 0.5).self_adjointness_residual() == 0.0);
  CHECK(make_choi_family(1.0, 2.0, 0.5, 0.25, 0.3).self_adjointness_residual() == 0.0);
}

TEST_CASE("explicit action of the base map") {
  // (0,0) entry collects z00 + z11, off-diagonal entries flip sign
  std::mt19937_64 rng(11);
  HermitianMatrix z = random_hermitian3(rng);
  HermitianMatrix out = apply(make_choi_map(), z);
  CHECK(std::abs(out(0, 0) - (z(0, 0) + z(1, 1))) <= 1e-15);
  CHECK(std::abs(out(1, 1) - (z(1, 1) + z(2, 2))) <= 1e-15);
  CHECK(std::abs(out(2, 2) - (z(0, 0) + z(2, 2))) <= 1e-15);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(std::abs(out(i, j) + z(i, j)) <= 1e-15);
}

TEST_CASE("make_map dispatches to the family constructors") {
  const QuantumMap a = make_map(TFamilyParams{1.3});
  const QuantumMap b = make_psi_t(1.3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          CHECK(a.coeff(i, j, k, l) == b.coeff(i, j, k, l));
  const QuantumMap c = make_map(MNFamilyParams{-0.5, 0.5});
  const QuantumMap d = make_psi_mn(-0.5, 0.5);
  for (int i = 0; i < 81; ++i)
    CHECK(c.coeff(i / 27, (i / 9) % 3, (i / 3) % 3, i % 3) ==
          d.coeff(i / 27, (i / 9) % 3, (i / 3) % 3, i % 3));
}

TEST_CASE("adjoint duality against 100 random pairs") {
  std::mt19937_64 rng(101);
  const QuantumMap psi = make_psi_pq(0.5, 0.8);
  const QuantumMap psi_dag = adjoint(psi);
  for (int rep = 0; rep < 100; ++rep) {
    HermitianMatrix x = random_hermitian3(rng);
    HermitianMatrix y = random_hermitian3(rng);
    const double lhs = hs_trace(apply(psi, x), y);
    const double rhs = hs_trace(x, apply(psi_dag, y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
  }
  // involution
  const QuantumMap twice = adjoint(psi_dag);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          CHECK(twice.coeff(i, j, k, l) == psi.coeff(i, j, k, l));
}

TEST_CASE("transpose composition acts as matrix transpose of the output") {
  std::mt19937_64 rng(55);
  const QuantumMap psi = make_psi_mn(-0.4, 0.6);
  const QuantumMap tpsi = transpose_compose(psi);
  for (int rep = 0; rep < 20; ++rep) {
    HermitianMatrix z = random_hermitian3(rng);
    HermitianMatrix lhs = apply(tpsi, z);
    HermitianMatrix rhs = apply(psi, z);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(lhs(i, j) - std::conj(rhs(i, j))) <= 1e-14);
  }
}

TEST_CASE("conjugation by a matrix") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Complex3x3 q;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q[i][j] = {u(rng), u(rng)};
  const QuantumMap psi = make_psi_t(0.7);
  const QuantumMap conj_psi = conjugate(psi, q);
  for (int rep = 0; rep < 20; ++rep) {
    HermitianMatrix z = random_hermitian3(rng);
    HermitianMatrix inner = apply(psi, z);
    HermitianMatrix lhs = apply(conj_psi, z);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        complexd w = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) w += q[i][a] * inner(a, b) * std::conj(q[j][b]);
        CHECK(std::abs(lhs(i, j) - w) <= 1e-12);
      }
  }
}

TEST_CASE("t-family trace and second-symmetric-function identities") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double t : {0.0, 0.5, 1.0, 2.0, -3.0}) {
    const QuantumMap psi = make_psi_t(t);
    const double e = 1.0 - t * t + t * t * t * t;
    for (int rep = 0; rep < 25; ++rep) {
      std::array<complexd, 3> x;
      for (auto& v : x) v = {u(rng), u(rng)};
      const double norm_sq =
          std::norm(x[0]) + std::norm(x[1]) + std::norm(x[2]);
      HermitianMatrix out = apply(psi, projector(x));
      CHECK(out.trace() ==
            doctest::Approx(2.0 * e * norm_sq).epsilon(1e-12));
      // sum of principal 2x2 minors
      double minors = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          minors += (out(i, i) * out(j, j) - out(i, j) * out(j, i)).real();
      CHECK(minors == doctest::Approx(e * e * norm_sq * norm_sq).epsilon(1e-11));
    }
  }
}

TEST_CASE("unitalize returns a unital map and rejects degenerate input") {
  for (const QuantumMap& psi :
       {make_psi_t(2.0), make_psi_t(0.0), make_psi_pq(0.5, 0.8)}) {
    const QuantumMap unital = unitalize(psi);
    HermitianMatrix at_id = apply(unital, HermitianMatrix::identity(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(at_id(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10);
  }
  // p = 1/sqrt2, q = 2p kills the whole (0,0) row of the map at identity
  CHECK_THROWS_AS(unitalize(make_psi_pq(1.0 / std::sqrt(2.0), std::sqrt(2.0))),
                  NotPositiveDefinite);
}

TEST_CASE("region membership fixtures") {
  CHECK(in_region_R(0.5, 0.8));
  CHECK(in_region_R(0.4, 0.8));            // 2p - q = 0 boundary included
  CHECK_FALSE(in_region_R(0.5, 1.2));      // 2p - q < 0
  CHECK_FALSE(in_region_R(0.0, 0.5));      // open in p
  CHECK_FALSE(in_region_R(1.0 / std::sqrt(2.0), 1.0));
  CHECK_FALSE(in_region_R(0.3, -0.1));

  CHECK(in_region_A(-0.5, 0.5));
  // the curved boundary n = -2m/(1+m^2) passes through (-0.5, 0.8); the
  // membership test is exact, so probe a hair inside rather than on the knife edge
  CHECK(in_region_A(-0.5, 0.79));
  CHECK(in_region_A(-1.0, 1.0));
  CHECK_FALSE(in_region_A(0.5, 0.5));
  CHECK_FALSE(in_region_A(-0.5, 1.5));

  CHECK(choi_family_is_positive(0.0, 1.0, 1.0, 1.0, 0.0));
  CHECK(choi_family_is_positive(1.0, 1.0, 1.0, 1.0, 0.0));
  CHECK_FALSE(choi_family_is_positive(1.0, 2.0, 1.0, 1.0, 0.0));
  CHECK_FALSE(choi_family_is_positive(1.0, 1.0, 1.0, 1.0, 1.0));
  CHECK_FALSE(choi_family_is_positive(-0.1, 1.0, 1.0, 1.0, 0.0));
}

TEST_CASE("positivity sampling: positive map stays nonnegative") {
  const SamplingReport report =
      verify_positivity_sampling(make_choi_map(), 10000, 42);
  CHECK(report.min_eigenvalue_found >= -1e-12);
}

TEST_CASE("positivity sampling: violation found and reproducible") {
  // 2p - q < 0 makes one diagonal coefficient negative
  const QuantumMap psi = make_psi_pq(0.5, 1.2);
  const SamplingReport report = verify_positivity_sampling(psi, 2000, 7);
  CHECK(report.min_eigenvalue_found < -1e-6);

  HermitianMatrix out = apply(psi, projector(report.worst_point));
  const double recomputed = eig_herm(out).eigenvalues.front();
  CHECK(recomputed ==
        doctest::Approx(report.min_eigenvalue_found).epsilon(1e-12));
}

TEST_CASE("positivity sampling: scaling and determinism") {
  const QuantumMap neg = -1.0 * make_choi_map();
  const SamplingReport report = verify_positivity_sampling(neg, 10, 3);
  CHECK(report.min_eigenvalue_found <= -0.5);  // -max eig <= -trace/3 = -2/3

  const SamplingReport a = verify_positivity_sampling(make_psi_mn(-0.5, 0.5), 500, 9);
  const SamplingReport b = verify_positivity_sampling(make_psi_mn(-0.5, 0.5), 500, 9);
  CHECK(a.min_eigenvalue_found == b.min_eigenvalue_found);
  for (int i = 0; i < 3; ++i) CHECK(a.worst_point[i] == b.worst_point[i]);

  CHECK_THROWS_AS(verify_positivity_sampling(make_choi_map(), 0, 1), InvalidInput);
}

TEST_CASE("maps inside the regions pass randomized falsification") {
  CHECK(verify_positivity_sampling(make_psi_pq(0.5, 0.8), 2000, 17)
            .min_eigenvalue_found >= -1e-9);
  CHECK(verify_positivity_sampling(make_psi_mn(-0.5, 0.5), 2000, 17)
            .min_eigenvalue_found >= -1e-9);
  CHECK(verify_positivity_sampling(make_psi_t(1.4), 2000, 17)
            .min_eigenvalue_found >= -1e-9);
}
