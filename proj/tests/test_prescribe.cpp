#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "entwit/choi.hpp"
#include "entwit/prescribe.hpp"
#include "entwit/qmaps.hpp"

using namespace entwit;

namespace {

double map_dot(const QuantumMap& a, const QuantumMap& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          s += (a.coeff(i, j, k, l) * std::conj(b.coeff(i, j, k, l))).real();
  return s;
}

// || psi - proj_span(basis) psi || / || psi ||, basis orthonormal
double projection_residual(const QuantumMap& psi, const std::vector<QuantumMap>& basis) {
  QuantumMap rem = psi;
  for (const QuantumMap& b : basis) {
    QuantumMap scaled = b;
    scaled *= map_dot(rem, b);
    rem -= scaled;
  }
  return std::sqrt(map_dot(rem, rem) / map_dot(psi, psi));
}

void check_annihilation(const std::vector<QuantumMap>& basis, const ZeroSet& zeros,
                        int phase_grid) {
  for (const QuantumMap& psi : basis) {
    for (const ZeroPoint& z : zeros.points(phase_grid)) {
      CHECK(std::abs(biquadratic_form(psi, z)) <= 1e-9);
      HermitianMatrix proj(3);
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) proj.set(i, j, z.x[i] * std::conj(z.x[j]));
      const HermitianMatrix out = apply(psi, proj);
      double norm_sq = 0.0;
      for (int i = 0; i < 3; ++i) {
        complexd w = 0.0;
        for (int j = 0; j < 3; ++j) w += out(i, j) * z.y[j];
        norm_sq += std::norm(w);
      }
      CHECK(std::sqrt(norm_sq) <= 1e-9);
    }
  }
}

void check_orthonormal(const std::vector<QuantumMap>& basis) {
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = 0; b <= a; ++b)
      CHECK(std::abs(map_dot(basis[a], basis[b]) - (a == b ? 1.0 : 0.0)) <= 1e-10);
}

}  // namespace

TEST_CASE("zero set point counts and canonical membership") {
  const ZeroSet zc = choi_zero_set();
  CHECK(zc.points(8).size() == 3 + 4 + 64);
  CHECK(zc.points(2).size() == 3 + 4 + 4);

  // the four canonical real points are present as fixed points
  int canonical_found = 0;
  for (const ZeroPoint& z : zc.fixed_points) {
    bool all_real = true;
    for (int i = 0; i < 3; ++i)
      all_real = all_real && std::abs(z.x[i].imag()) == 0.0 &&
                 std::abs(z.x[i] - z.y[i]) == 0.0;
    if (all_real) ++canonical_found;
  }
  CHECK(canonical_found >= 4);

  CHECK(t_zero_set(2.0).points(8).size() == 4 + 64 + 24);
  CHECK(ZeroSet{}.empty());
  CHECK_FALSE(zc.empty());
}

TEST_CASE("assemble: shape, provenance, finiteness") {
  const ZeroSet zeros = t_zero_set(1.5);
  const LinearSystem sys = assemble(zeros, 4);
  const std::size_t n_points = zeros.points(4).size();
  REQUIRE(sys.matrix.rows() == 162 + 12 * n_points);
  REQUIRE(sys.matrix.cols() == 162);
  REQUIRE(sys.provenance.size() == sys.matrix.rows());
  for (std::size_t r = 0; r < sys.matrix.rows(); ++r) {
    const bool self_adj = r < 162;
    CHECK((sys.provenance[r].kind == RowProvenance::Kind::SelfAdjointness) == self_adj);
    double norm = 0.0;
    for (int c = 0; c < 162; ++c) norm += sys.matrix(r, c) * sys.matrix(r, c);
    CHECK(std::isfinite(norm));
  }
  // zero-equation rows come in groups of 12 per point, half on the adjoint side
  int adjoint_rows = 0;
  for (std::size_t r = 162; r < sys.matrix.rows(); ++r)
    if (sys.provenance[r].adjoint_side) ++adjoint_rows;
  CHECK(adjoint_rows == static_cast<int>(6 * n_points));
}

TEST_CASE("empty zero set leaves the full self-adjoint space") {
  const std::vector<QuantumMap> basis = solve_family(ZeroSet{}, 2);
  CHECK(basis.size() == 81);
  check_orthonormal(basis);
}

TEST_CASE("base zero set pins the five-dimensional family containing the base map") {
  const ZeroSet zeros = choi_zero_set();
  const std::vector<QuantumMap> basis = solve_family(zeros, 8);
  REQUIRE(basis.size() == 5);
  check_orthonormal(basis);
  CHECK(projection_residual(make_choi_map(), basis) <= 1e-8);
  check_annihilation(basis, zeros, 8);
}

TEST_CASE("t zero set pins a line spanned by the map itself") {
  const ZeroSet zeros = t_zero_set(2.0);
  const std::vector<QuantumMap> basis = solve_family(zeros, 8);
  REQUIRE(basis.size() == 1);
  CHECK(projection_residual(make_psi_t(2.0), basis) <= 1e-8);
  CHECK(basis[0].self_adjointness_residual() <= 1e-10);
  check_annihilation(basis, zeros, 8);

  // dimension is insensitive to refining the phase grid further
  CHECK(solve_family(zeros, 16).size() == 1);
}

TEST_CASE("pq zero set pins a line") {
  const ZeroSet zeros = pq_zero_set(0.5, 0.8);
  const std::vector<QuantumMap> basis = solve_family(zeros, 8);
  REQUIRE(basis.size() == 1);
  CHECK(projection_residual(make_psi_pq(0.5, 0.8), basis) <= 1e-8);
}

TEST_CASE("mn zero sets: dimension depends on the parameter position") {
  const ZeroSet za = mn_zero_set(-0.5, 0.5);
  const std::vector<QuantumMap> ba = solve_family(za, 8);
  CHECK(ba.size() == 4);
  CHECK(projection_residual(make_psi_mn(-0.5, 0.5), ba) <= 1e-8);
  check_annihilation(ba, za, 8);

  const std::vector<QuantumMap> bb = solve_family(mn_zero_set(-0.3, 0.5), 8);
  CHECK(bb.size() == 3);
  CHECK(projection_residual(make_psi_mn(-0.3, 0.5), bb) <= 1e-8);
}

TEST_CASE("coarse phase grids are rejected as unstable") {
  CHECK_THROWS_AS(solve_family(t_zero_set(2.0), 1), UnstableDimension);
}
