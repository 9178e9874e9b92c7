#include "entwit/prescribe.hpp"

#include <cmath>
#include <complex>
#include <cstddef>

namespace entwit {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

ZeroPoint make_point(complexd x0, complexd x1, complexd x2, complexd y0, complexd y1,
                     complexd y2) {
  return ZeroPoint{{x0, x1, x2}, {y0, y1, y2}};
}

// Representatives scaled to max-abs 1 so system entries stay O(1).
ZeroPoint normalized(const ZeroPoint& p) {
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < 3; ++i) {
    mx = std::max(mx, std::abs(p.x[i]));
    my = std::max(my, std::abs(p.y[i]));
  }
  if (mx == 0.0 || my == 0.0)
    throw InvalidInput("zero set contains a point with a zero vector");
  ZeroPoint out;
  for (int i = 0; i < 3; ++i) {
    out.x[i] = p.x[i] / mx;
    out.y[i] = p.y[i] / my;
  }
  return out;
}

void append_canonical_four(std::vector<ZeroPoint>& points) {
  points.push_back(make_point(1, 1, -1, 1, 1, -1));
  points.push_back(make_point(1, -1, 1, 1, -1, 1));
  points.push_back(make_point(-1, 1, 1, -1, 1, 1));
  points.push_back(make_point(1, 1, 1, 1, 1, 1));
}

// (e^{i phi0}, e^{i phi1}, e^{i phi2}; same), gauge-fixed to phase 1 in the
// first component.
PhaseOrbit diagonal_orbit() {
  PhaseOrbit o;
  o.n_phases = 2;
  o.x_base = {1.0, 1.0, 1.0};
  o.y_base = o.x_base;
  o.x_expo[1][0] = 1;
  o.x_expo[2][1] = 1;
  o.y_expo = o.x_expo;
  return o;
}

}  // namespace

std::vector<ZeroPoint> ZeroSet::points(int phase_grid) const {
  if (phase_grid < 1) throw InvalidInput("phase_grid must be >= 1");
  std::vector<ZeroPoint> out = fixed_points;
  for (const PhaseOrbit& orbit : phase_orbits) {
    if (orbit.n_phases < 1 || orbit.n_phases > 2)
      throw InvalidInput("phase orbit must have 1 or 2 phases");
    const int inner = orbit.n_phases == 2 ? phase_grid : 1;
    for (int j0 = 0; j0 < phase_grid; ++j0)
      for (int j1 = 0; j1 < inner; ++j1) {
        const double phi[2] = {kTwoPi * j0 / phase_grid, kTwoPi * j1 / phase_grid};
        ZeroPoint p;
        for (int i = 0; i < 3; ++i) {
          double ax = 0.0, ay = 0.0;
          for (int a = 0; a < orbit.n_phases; ++a) {
            ax += orbit.x_expo[i][a] * phi[a];
            ay += orbit.y_expo[i][a] * phi[a];
          }
          p.x[i] = orbit.x_base[i] * std::polar(1.0, ax);
          p.y[i] = orbit.y_base[i] * std::polar(1.0, ay);
        }
        out.push_back(p);
      }
  }
  return out;
}

ZeroSet choi_zero_set() {
  ZeroSet z;
  z.fixed_points.push_back(make_point(1, 0, 0, 0, 1, 0));
  z.fixed_points.push_back(make_point(0, 1, 0, 0, 0, 1));
  z.fixed_points.push_back(make_point(0, 0, 1, 1, 0, 0));
  append_canonical_four(z.fixed_points);
  z.phase_orbits.push_back(diagonal_orbit());
  return z;
}

ZeroSet t_zero_set(double t) {
  ZeroSet z;
  append_canonical_four(z.fixed_points);
  z.phase_orbits.push_back(diagonal_orbit());
  // (1, t e^{i phi}, 0 ; t e^{-i phi}, 1, 0) and its two cyclic shifts.
  for (int shift = 0; shift < 3; ++shift) {
    PhaseOrbit o;
    o.n_phases = 1;
    o.x_base = {0.0, 0.0, 0.0};
    o.y_base = {0.0, 0.0, 0.0};
    o.x_base[shift] = 1.0;
    o.x_base[(shift + 1) % 3] = t;
    o.x_expo[(shift + 1) % 3][0] = 1;
    o.y_base[shift] = t;
    o.y_base[(shift + 1) % 3] = 1.0;
    o.y_expo[shift][0] = -1;
    z.phase_orbits.push_back(o);
  }
  return z;
}

ZeroSet pq_zero_set(double p, double q) {
  ZeroSet z;
  z.fixed_points.push_back(make_point(0, 0, 1, 1, 0, 0));
  append_canonical_four(z.fixed_points);
  z.phase_orbits.push_back(diagonal_orbit());
  {
    PhaseOrbit o;  // (1, p e^{i phi}, 0 ; q e^{-i phi}, 1, 0)
    o.n_phases = 1;
    o.x_base = {1.0, p, 0.0};
    o.x_expo[1][0] = 1;
    o.y_base = {q, 1.0, 0.0};
    o.y_expo[0][0] = -1;
    z.phase_orbits.push_back(o);
  }
  {
    PhaseOrbit o;  // (0, 1, q e^{i phi} ; 0, p e^{-i phi}, 1)
    o.n_phases = 1;
    o.x_base = {0.0, 1.0, q};
    o.x_expo[2][0] = 1;
    o.y_base = {0.0, p, 1.0};
    o.y_expo[1][0] = -1;
    z.phase_orbits.push_back(o);
  }
  return z;
}

ZeroSet mn_zero_set(double m, double n) {
  ZeroSet z;
  z.fixed_points.push_back(make_point(1, 0, 0, m, 1, 0));
  z.fixed_points.push_back(make_point(1, n, 0, 0, 1, 0));
  z.fixed_points.push_back(make_point(0, 1, 0, 0, 0, 1));
  z.fixed_points.push_back(make_point(0, 0, 1, 1, 0, 0));
  append_canonical_four(z.fixed_points);
  for (double second : {1.0, -1.0}) {
    PhaseOrbit o;  // (1, +-1, e^{i phi} ; same)
    o.n_phases = 1;
    o.x_base = {1.0, second, 1.0};
    o.x_expo[2][0] = 1;
    o.y_base = o.x_base;
    o.y_expo = o.x_expo;
    z.phase_orbits.push_back(o);
  }
  return z;
}

LinearSystem assemble(const ZeroSet& zeros, int phase_grid) {
  if (phase_grid < 1) throw InvalidInput("assemble: phase_grid must be >= 1");
  std::vector<ZeroPoint> pts;
  for (const ZeroPoint& p : zeros.points(phase_grid)) pts.push_back(normalized(p));

  const std::size_t n_rows = 162 + 12 * pts.size();
  LinearSystem sys;
  sys.matrix = RealMatrix(n_rows, 162);
  sys.provenance.resize(n_rows);

  std::size_t row = 0;
  // a_ijkl - conj(a_jilk) = 0, one real and one imaginary row per entry
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const int idx = QuantumMap::index(i, j, k, l);
          const int mirror = QuantumMap::index(j, i, l, k);
          sys.matrix(row, 2 * idx) += 1.0;
          sys.matrix(row, 2 * mirror) -= 1.0;
          sys.provenance[row] = {RowProvenance::Kind::SelfAdjointness, {},
                                 static_cast<int>(row), false};
          ++row;
          sys.matrix(row, 2 * idx + 1) += 1.0;
          sys.matrix(row, 2 * mirror + 1) += 1.0;
          sys.provenance[row] = {RowProvenance::Kind::SelfAdjointness, {},
                                 static_cast<int>(row), false};
          ++row;
        }

  for (const ZeroPoint& p : pts) {
    int local = 0;
    // components of Psi(|x><x|)|y>: coefficient of a_{c,j,k,l} is
    // x_k conj(x_l) y_j
    for (int comp = 0; comp < 3; ++comp) {
      const std::size_t row_re = row++;
      const std::size_t row_im = row++;
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const complexd w = p.x[k] * std::conj(p.x[l]) * p.y[j];
            const int idx = QuantumMap::index(comp, j, k, l);
            sys.matrix(row_re, 2 * idx) += w.real();
            sys.matrix(row_re, 2 * idx + 1) -= w.imag();
            sys.matrix(row_im, 2 * idx) += w.imag();
            sys.matrix(row_im, 2 * idx + 1) += w.real();
          }
      sys.provenance[row_re] = {RowProvenance::Kind::ZeroEquation, p, local++, false};
      sys.provenance[row_im] = {RowProvenance::Kind::ZeroEquation, p, local++, false};
    }
    // components of Psi^dagger(|y><y|)|x>: coefficient of a_{i,j,k,d} is
    // conj(y_i) y_j x_k
    for (int comp = 0; comp < 3; ++comp) {
      const std::size_t row_re = row++;
      const std::size_t row_im = row++;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) {
            const complexd w = std::conj(p.y[i]) * p.y[j] * p.x[k];
            const int idx = QuantumMap::index(i, j, k, comp);
            sys.matrix(row_re, 2 * idx) += w.real();
            sys.matrix(row_re, 2 * idx + 1) -= w.imag();
            sys.matrix(row_im, 2 * idx) += w.imag();
            sys.matrix(row_im, 2 * idx + 1) += w.real();
          }
      sys.provenance[row_re] = {RowProvenance::Kind::ZeroEquation, p, local++, true};
      sys.provenance[row_im] = {RowProvenance::Kind::ZeroEquation, p, local++, true};
    }
  }
  return sys;
}

namespace {

double dot_embedded(const QuantumMap& a, const QuantumMap& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          s += (a.coeff(i, j, k, l) * std::conj(b.coeff(i, j, k, l))).real();
  return s;
}

}  // namespace

std::vector<QuantumMap> solve_family(const ZeroSet& zeros, int phase_grid,
                                     double rank_tol) {
  const LinearSystem coarse = assemble(zeros, phase_grid);
  const LinearSystem fine = assemble(zeros, 2 * phase_grid);
  const std::vector<std::vector<double>> ns_coarse = nullspace(coarse.matrix, rank_tol);
  const std::vector<std::vector<double>> ns_fine = nullspace(fine.matrix, rank_tol);
  if (ns_coarse.size() != ns_fine.size())
    throw UnstableDimension("solve_family: dimension " + std::to_string(ns_coarse.size()) +
                            " at phase grid " + std::to_string(phase_grid) + " but " +
                            std::to_string(ns_fine.size()) + " at phase grid " +
                            std::to_string(2 * phase_grid));

  std::vector<QuantumMap> family;
  family.reserve(ns_fine.size());
  for (const std::vector<double>& v : ns_fine) {
    QuantumMap raw;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const int idx = QuantumMap::index(i, j, k, l);
            raw.set_coeff(i, j, k, l, {v[2 * idx], v[2 * idx + 1]});
          }
    if (raw.self_adjointness_residual() > 1e-10)
      throw InternalError("solve_family: nullspace vector violates self-adjointness");
    QuantumMap sym;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            sym.set_coeff(i, j, k, l,
                          0.5 * (raw.coeff(i, j, k, l) + std::conj(raw.coeff(j, i, l, k))));
    family.push_back(sym);
  }

  // Symmetrization nudges the vectors; restore orthonormality in the same
  // 162-real embedding the system is posed in.
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double overlap = dot_embedded(family[i], family[j]);
      QuantumMap scaled = family[j];
      scaled *= overlap;
      family[i] -= scaled;
    }
    const double norm = std::sqrt(dot_embedded(family[i], family[i]));
    if (norm < 0.5)
      throw InternalError("solve_family: basis collapsed during orthonormalization");
    family[i] *= 1.0 / norm;
  }
  return family;
}

}  // namespace entwit
