#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "entwit/choi.hpp"
#include "entwit/linalg.hpp"
#include "entwit/qmaps.hpp"

namespace entwit {

// Zero prescription: given points (x; y), find all self-adjoint coefficient
// tensors with Psi(|x><x|)|y> = 0 and Psi^dagger(|y><y|)|x> = 0 at every
// point.  Continuous phase orbits are cut by sampling a phase grid; grid
// doubling certifies that the samples pin the same subspace.

class EmptyZeroSet : public std::runtime_error {
 public:
  explicit EmptyZeroSet(const std::string& what) : std::runtime_error(what) {}
};

class UnstableDimension : public std::runtime_error {
 public:
  explicit UnstableDimension(const std::string& what) : std::runtime_error(what) {}
};

// Template for a family of points x_i = x_base[i] * exp(I * sum_a expo[i][a] * phi_a),
// phases phi_a running over a uniform grid on [0, 2pi).
struct PhaseOrbit {
  int n_phases = 1;  // 1 or 2
  std::array<complexd, 3> x_base{};
  std::array<complexd, 3> y_base{};
  std::array<std::array<int, 2>, 3> x_expo{};
  std::array<std::array<int, 2>, 3> y_expo{};
};

struct ZeroSet {
  std::vector<ZeroPoint> fixed_points;
  std::vector<PhaseOrbit> phase_orbits;

  bool empty() const { return fixed_points.empty() && phase_orbits.empty(); }
  // All concrete points at the given grid: fixed points first, then orbits
  // expanded phase by phase.
  std::vector<ZeroPoint> points(int phase_grid) const;
};

// Normalized zero sets of the reference families.  Each contains the four
// canonical real points (1,1,-1), (1,-1,1), (-1,1,1), (1,1,1) with y = x.
ZeroSet choi_zero_set();
ZeroSet t_zero_set(double t);
ZeroSet pq_zero_set(double p, double q);
ZeroSet mn_zero_set(double m, double n);

struct RowProvenance {
  enum class Kind { SelfAdjointness, ZeroEquation };
  Kind kind = Kind::SelfAdjointness;
  ZeroPoint point{};     // ZeroEquation only
  int row_index = 0;     // index within the group this row belongs to
  bool adjoint_side = false;  // ZeroEquation: row constrains Psi^dagger, not Psi
};

// Rows over 162 real unknowns: u[2*idx] = Re a, u[2*idx+1] = Im a with
// idx = ((i*3+j)*3+k)*3+l.
struct LinearSystem {
  RealMatrix matrix;
  std::vector<RowProvenance> provenance;

  LinearSystem() : matrix(0, 162) {}
};

LinearSystem assemble(const ZeroSet& zeros, int phase_grid);

std::vector<QuantumMap> solve_family(const ZeroSet& zeros, int phase_grid,
                                     double rank_tol = 1e-9);

}  // namespace entwit
