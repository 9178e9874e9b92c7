#include "entwit/sdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace entwit {

namespace {

using Flat9 = std::array<double, 81>;

Flat9 flatten(const RealSymMatrix& a) {
  Flat9 out;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) out[i * 9 + j] = a(i, j);
  return out;
}

// Orthonormal basis of {X symmetric 9x9 : Tr X = 0}: 36 normalized
// off-diagonal pair matrices, then 8 traceless diagonal steps.
std::vector<RealSymMatrix> slice_basis() {
  std::vector<RealSymMatrix> basis;
  basis.reserve(44);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 9; ++i)
    for (int j = i + 1; j < 9; ++j) {
      RealSymMatrix v(9);
      v.set(i, j, inv_sqrt2);
      basis.push_back(v);
    }
  for (int k = 1; k < 9; ++k) {
    RealSymMatrix v(9);
    const double norm = std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) v.set(i, i, 1.0 / norm);
    v.set(k, k, -static_cast<double>(k) / norm);
    basis.push_back(v);
  }
  return basis;
}

double dot(const RealSymMatrix& a, const RealSymMatrix& b) {
  double s = 0.0;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) s += a(i, j) * b(i, j);
  return s;
}

// Lower Cholesky of a flat n x n symmetric matrix; false when a pivot is not
// strictly positive (also catches non-finite input).
bool cholesky(int n, const std::vector<double>& a, std::vector<double>& l) {
  l.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        l[i * n + i] = std::sqrt(s);
      } else {
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }
  return true;
}

bool cholesky9(const Flat9& a, Flat9& l) {
  l.fill(0.0);
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * 9 + j];
      for (int k = 0; k < j; ++k) s -= l[i * 9 + k] * l[j * 9 + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        l[i * 9 + i] = std::sqrt(s);
      } else {
        l[i * 9 + j] = s / l[j * 9 + j];
      }
    }
  }
  return true;
}

// W = L^-1 B L^-T for lower-triangular L and symmetric B, all 9x9.
Flat9 sandwich(const Flat9& l, const Flat9& b) {
  Flat9 y;  // y = L^-1 b, column by column
  for (int c = 0; c < 9; ++c)
    for (int r = 0; r < 9; ++r) {
      double s = b[r * 9 + c];
      for (int k = 0; k < r; ++k) s -= l[r * 9 + k] * y[k * 9 + c];
      y[r * 9 + c] = s / l[r * 9 + r];
    }
  Flat9 w;  // w^T = L^-1 y^T
  for (int c = 0; c < 9; ++c)
    for (int r = 0; r < 9; ++r) {
      double s = y[c * 9 + r];
      for (int k = 0; k < r; ++k) s -= l[r * 9 + k] * w[c * 9 + k];
      w[c * 9 + r] = s / l[r * 9 + r];
    }
  return w;
}

double log_det_from_chol(const Flat9& l) {
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += std::log(l[i * 9 + i]);
  return 2.0 * s;
}

const QuantumMap& choi_adjoint_map() {
  static const QuantumMap psi = adjoint(make_choi_map());
  return psi;
}

// rho0 = I/9, the strictly feasible start.
RealSymMatrix scaled_identity() {
  RealSymMatrix rho(9);
  for (int i = 0; i < 9; ++i) rho.set(i, i, 1.0 / 9.0);
  return rho;
}

void validate_problem(const SdpProblem& problem) {
  if (problem.objective.dim() != 9) throw InvalidInput("sdp: objective must be 9x9");
  if (std::abs(problem.trace_target - 1.0) > 1e-12)
    throw InvalidInput("sdp: trace target must be 1");
  if (problem.blocks.empty()) throw InvalidInput("sdp: no constraint blocks");

  // Each block must map symmetric to symmetric; apply_block routes the lift
  // block through the Hermitian type and rejects residual imaginary parts.
  const std::vector<RealSymMatrix> basis = slice_basis();
  const RealSymMatrix rho0 = scaled_identity();
  for (BlockKind kind : problem.blocks) {
    for (const RealSymMatrix& v : basis) (void)apply_block(kind, v);
    const Spectrum s = eig_sym(apply_block(kind, rho0));
    if (s.eigenvalues.front() < 1.0 / 18.0 - 1e-9)
      throw InvalidInput("sdp: maximally mixed state is not strictly feasible");
  }
}

}  // namespace

RealSymMatrix apply_block(BlockKind kind, const RealSymMatrix& rho) {
  if (rho.dim() != 9) throw InvalidInput("apply_block: expected a 9x9 matrix");
  switch (kind) {
    case BlockKind::Identity:
      return rho;
    case BlockKind::PartialTranspose: {
      RealSymMatrix out(9);
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
    case BlockKind::ChoiAdjointLift: {
      const HermitianMatrix lifted = lift(choi_adjoint_map(), HermitianMatrix::from_real(rho));
      if (lifted.imag_frobenius_norm() > 1e-12 * (1.0 + lifted.frobenius_norm()))
        throw InternalError("apply_block: lift of a real state came out complex");
      return lifted.real_part();
    }
  }
  throw InvalidInput("apply_block: unknown block kind");
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts) {
  if (opts.gap_tol <= 0.0 || opts.max_iter < 1 || opts.mu_shrink <= 0.0 ||
      opts.mu_shrink >= 1.0)
    throw InvalidInput("sdp: bad options");
  validate_problem(problem);

  const std::vector<RealSymMatrix> basis = slice_basis();
  const int dim = static_cast<int>(basis.size());
  const int n_blocks = static_cast<int>(problem.blocks.size());
  const double m_rows = 9.0 * n_blocks;

  const RealSymMatrix rho0 = scaled_identity();
  const double c0 = dot(problem.objective, rho0);
  std::vector<double> c(dim);
  for (int i = 0; i < dim; ++i) c[i] = dot(problem.objective, basis[i]);

  // Block images of the affine parameterization rho(u) = rho0 + sum u_i V_i.
  std::vector<Flat9> block_at_rho0(n_blocks);
  std::vector<std::vector<Flat9>> block_of_basis(n_blocks, std::vector<Flat9>(dim));
  for (int a = 0; a < n_blocks; ++a) {
    block_at_rho0[a] = flatten(apply_block(problem.blocks[a], rho0));
    for (int i = 0; i < dim; ++i)
      block_of_basis[a][i] = flatten(apply_block(problem.blocks[a], basis[i]));
  }

  const auto blocks_at = [&](const std::vector<double>& u, std::vector<Flat9>& s) {
    for (int a = 0; a < n_blocks; ++a) {
      s[a] = block_at_rho0[a];
      for (int i = 0; i < dim; ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        const Flat9& v = block_of_basis[a][i];
        for (int e = 0; e < 81; ++e) s[a][e] += ui * v[e];
      }
    }
  };
  const auto linear_objective = [&](const std::vector<double>& u) {
    double s = c0;
    for (int i = 0; i < dim; ++i) s += c[i] * u[i];
    return s;
  };

  std::vector<double> u(dim, 0.0);
  std::vector<Flat9> s_blocks(n_blocks), l_blocks(n_blocks), s_try(n_blocks),
      l_try(n_blocks);
  std::vector<std::vector<Flat9>> w(n_blocks, std::vector<Flat9>(dim));
  std::vector<double> grad(dim), h(dim * dim), h_chol, step(dim), u_try(dim);

  SdpSolution out;
  out.status = SdpStatus::Optimal;
  double t_bar = 1.0;
  int stages = 0;
  bool failed = false;

  while (true) {
    for (int inner = 0; inner < 60 && !failed; ++inner) {
      blocks_at(u, s_blocks);
      for (int a = 0; a < n_blocks; ++a)
        if (!cholesky9(s_blocks[a], l_blocks[a])) {
          failed = true;
          break;
        }
      if (failed) break;

      for (int i = 0; i < dim; ++i) grad[i] = t_bar * c[i];
      for (int a = 0; a < n_blocks; ++a)
        for (int i = 0; i < dim; ++i) {
          w[a][i] = sandwich(l_blocks[a], block_of_basis[a][i]);
          for (int e = 0; e < 9; ++e) grad[i] -= w[a][i][e * 9 + e];
        }
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
          double s = 0.0;
          for (int a = 0; a < n_blocks; ++a) {
            const Flat9& wi = w[a][i];
            const Flat9& wj = w[a][j];
            for (int e = 0; e < 81; ++e) s += wi[e] * wj[e];
          }
          h[i * dim + j] = s;
          h[j * dim + i] = s;
        }

      // Newton direction; a failed factorization escalates a diagonal ridge.
      double h_trace = 0.0;
      for (int i = 0; i < dim; ++i) h_trace += h[i * dim + i];
      double ridge = 0.0;
      bool solved = false;
      std::vector<double> h_work;
      for (int attempt = 0; attempt < 8 && !solved; ++attempt) {
        h_work.assign(h.begin(), h.end());
        for (int i = 0; i < dim; ++i) h_work[i * dim + i] += ridge;
        if (cholesky(dim, h_work, h_chol)) {
          for (int i = 0; i < dim; ++i) {
            double s = -grad[i];
            for (int k = 0; k < i; ++k) s -= h_chol[i * dim + k] * step[k];
            step[i] = s / h_chol[i * dim + i];
          }
          for (int i = dim - 1; i >= 0; --i) {
            double s = step[i];
            for (int k = i + 1; k < dim; ++k) s -= h_chol[k * dim + i] * step[k];
            step[i] = s / h_chol[i * dim + i];
          }
          solved = true;
        } else {
          ridge = std::max(ridge * 100.0, 1e-12 * h_trace / dim);
        }
      }
      if (!solved) {
        failed = true;
        break;
      }

      double dec2 = 0.0;
      for (int i = 0; i < dim; ++i) dec2 -= grad[i] * step[i];
      if (!std::isfinite(dec2) || dec2 <= 1e-16) break;

      double f0 = t_bar * linear_objective(u);
      for (int a = 0; a < n_blocks; ++a) f0 -= log_det_from_chol(l_blocks[a]);

      double alpha = 1.0;
      bool accepted = false;
      for (int halving = 0; halving < 60; ++halving, alpha *= 0.5) {
        for (int i = 0; i < dim; ++i) u_try[i] = u[i] + alpha * step[i];
        blocks_at(u_try, s_try);
        bool pd = true;
        for (int a = 0; a < n_blocks && pd; ++a) pd = cholesky9(s_try[a], l_try[a]);
        if (!pd) continue;
        double f_try = t_bar * linear_objective(u_try);
        for (int a = 0; a < n_blocks; ++a) f_try -= log_det_from_chol(l_try[a]);
        if (std::isfinite(f_try) && f_try <= f0 - 1e-4 * alpha * dec2) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // No admissible step: fatal while the decrement still demanded one.
        if (dec2 > 1e-8) failed = true;
        break;
      }
      u = u_try;
      ++out.iterations;
    }

    if (failed) {
      out.status = SdpStatus::NumericalFailure;
      break;
    }
    if (m_rows / t_bar <= opts.gap_tol) break;
    ++stages;
    if (stages >= opts.max_iter) {
      out.status = SdpStatus::MaxIterations;
      break;
    }
    t_bar /= opts.mu_shrink;
  }

  RealSymMatrix rho = rho0;
  for (int i = 0; i < dim; ++i)
    for (int r = 0; r < 9; ++r)
      for (int col = r; col < 9; ++col)
        if (basis[i](r, col) != 0.0) rho.add(r, col, u[i] * basis[i](r, col));
  out.rho = rho;
  out.objective_value = dot(problem.objective, rho);
  out.duality_gap_estimate = m_rows / t_bar;
  return out;
}

SdpProblem build_problem(const QuantumMap& witness, bool with_choi_constraint) {
  const ChoiMatrix cm = choi_matrix(witness);
  if (cm.inner.imag_frobenius_norm() > 1e-12)
    throw ComplexObjective("build_problem: objective depends on Im(rho)");
  SdpProblem p;
  p.objective = cm.inner.real_part();
  p.blocks = {BlockKind::Identity, BlockKind::PartialTranspose};
  if (with_choi_constraint) p.blocks.push_back(BlockKind::ChoiAdjointLift);
  validate_problem(p);
  return p;
}

namespace {

double t_objective(double t, double s11, double s22, double s04) {
  const double t2 = t * t, t4 = t2 * t2;
  const double unital = 1.0 - t2 + t4;
  return ((1.0 - t2) * (1.0 - t2) + 3.0 * t2 * (2.0 - t2) * s11 -
          3.0 * (1.0 - 2.0 * t2) * s22 - 6.0 * unital * s04) /
         (2.0 * unital);
}

// The objective decreases in s04, so the optimal s04 sits at the upper bound
// cut by the seven feasibility constraints.
double s04_upper(double s11, double s22) {
  return std::min(std::min(1.0 / 3.0, std::sqrt(s11 * s22)),
                  std::min(1.0 / 3.0 - s11 - s22, (1.0 / 3.0 - s22) / 2.0));
}

double s04_lower(double s11, double s22) {
  return std::max(std::max(-1.0 / 3.0, -std::sqrt(s11 * s22)),
                  (s11 + s22 - 1.0 / 3.0) / 2.0);
}

bool in_triangle(double s11, double s22) {
  return s11 >= 0.0 && s22 >= 0.0 && s11 + s22 <= 1.0 / 3.0 &&
         s04_upper(s11, s22) >= s04_lower(s11, s22);
}

}  // namespace

ReducedTSolution reduced_t_program(double t) {
  // The objective decreases in s04, so every candidate sits on one of the four
  // bound pieces. Minimizing each smooth piece inside its own feasibility
  // pocket keeps the compass search away from the kinks of the pointwise min,
  // where two pieces cross within ~1e-6 of the optimum and axis moves stall.
  const auto piece_val = [](int piece, double s11, double s22) {
    switch (piece) {
      case 0: return 1.0 / 3.0;
      case 1: return std::sqrt(s11 * s22);
      case 2: return 1.0 / 3.0 - s11 - s22;
      default: return (1.0 / 3.0 - s22) / 2.0;
    }
  };

  ReducedTSolution best;
  best.objective_value = std::numeric_limits<double>::infinity();
  for (int piece = 0; piece < 4; ++piece) {
    const auto feasible = [&](double s11, double s22, double* s04) {
      if (!in_triangle(s11, s22)) return false;
      *s04 = piece_val(piece, s11, s22);
      return *s04 <= s04_upper(s11, s22) + 1e-14 &&
             *s04 >= s04_lower(s11, s22) - 1e-14;
    };

    ReducedTSolution cur;
    cur.objective_value = std::numeric_limits<double>::infinity();
    const double step0 = 1e-3;
    const int cells = static_cast<int>(1.0 / 3.0 / step0);
    for (int i = 0; i <= cells; ++i)
      for (int j = 0; j + i <= cells; ++j) {
        const double s11 = i * step0, s22 = j * step0;
        double s04;
        if (!feasible(s11, s22, &s04)) continue;
        const double value = t_objective(t, s11, s22, s04);
        if (value < cur.objective_value) cur = {value, s11, s22, s04};
      }
    if (!std::isfinite(cur.objective_value)) continue;

    double h = step0;
    while (h >= 1e-11) {
      bool improved = false;
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          if (dx == 0 && dy == 0) continue;
          const double s11 = cur.s11 + h * dx, s22 = cur.s22 + h * dy;
          double s04;
          if (!feasible(s11, s22, &s04)) continue;
          const double value = t_objective(t, s11, s22, s04);
          if (value < cur.objective_value) {
            cur = {value, s11, s22, s04};
            improved = true;
          }
        }
      if (!improved) h *= 0.5;
    }
    if (cur.objective_value < best.objective_value) best = cur;
  }

  // The minimizer usually sits where two bound pieces intersect, and a compass
  // search zigzag-stalls against that curved active set. Each intersection is
  // a smooth curve, so a scan plus golden-section refinement along it reaches
  // the kink minima to full precision.
  const auto consider = [&](double s11, double s22, double s04) {
    if (!in_triangle(s11, s22)) return std::numeric_limits<double>::infinity();
    if (s04 > s04_upper(s11, s22) + 1e-12 || s04 < s04_lower(s11, s22) - 1e-12)
      return std::numeric_limits<double>::infinity();
    const double value = t_objective(t, s11, s22, s04);
    if (value < best.objective_value) best = {value, s11, s22, s04};
    return value;
  };
  using CurvePoint = std::array<double, 3>;
  const auto search_curve = [&](double lo, double hi, auto&& point_of) {
    const auto value_at = [&](double a) {
      const CurvePoint p = point_of(a);
      return consider(p[0], p[1], p[2]);
    };
    const int scan = 2000;
    double best_a = lo, best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= scan; ++i) {
      const double a = lo + (hi - lo) * i / scan;
      const double value = value_at(a);
      if (value < best_value) {
        best_value = value;
        best_a = a;
      }
    }
    if (!std::isfinite(best_value)) return;
    const double span = (hi - lo) / scan;
    double a = std::max(lo, best_a - span), b = std::min(hi, best_a + span);
    const double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = value_at(x1), f2 = value_at(x2);
    while (b - a > 1e-13) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = value_at(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = value_at(x2);
      }
    }
    value_at(0.5 * (a + b));
  };

  // sqrt(s11*s22) meets 1/3 - s11 - s22
  search_curve(0.0, 1.0 / 3.0, [](double a) -> CurvePoint {
    const double root = 4.0 / 3.0 - 3.0 * a;
    if (a < 0.0 || root < 0.0) return {-1.0, -1.0, 0.0};
    const double y = 0.5 * (std::sqrt(root) - std::sqrt(a));
    if (y < 0.0) return {-1.0, -1.0, 0.0};
    return {a, y * y, 1.0 / 3.0 - a - y * y};
  });
  // sqrt(s11*s22) meets (1/3 - s22)/2
  search_curve(1e-9, 1.0 / 3.0, [](double a) -> CurvePoint {
    const double half = 0.5 * (1.0 / 3.0 - a);
    return {half * half / a, a, half};
  });
  // 1/3 - s11 - s22 meets (1/3 - s22)/2
  search_curve(0.0, 1.0 / 3.0, [](double a) -> CurvePoint {
    const double s11 = 1.0 / 6.0 - 0.5 * a;
    return {s11, a, s11};
  });
  // triangle edges, where the upper bound collapses to s04 = 0
  search_curve(0.0, 1.0 / 3.0,
               [](double a) -> CurvePoint { return {0.0, a, 0.0}; });
  search_curve(0.0, 1.0 / 3.0,
               [](double a) -> CurvePoint { return {a, 0.0, 0.0}; });
  search_curve(0.0, 1.0 / 3.0,
               [](double a) -> CurvePoint { return {a, 1.0 / 3.0 - a, 0.0}; });
  return best;
}

double closed_form_min_t(double t) {
  const double t2 = t * t, t4 = t2 * t2;
  const double unital = 1.0 - t2 + t4;
  if (std::abs(t) >= 1.0) {
    const double s = std::sqrt(3.0 + 3.0 * t4 + 3.0 * t4 * t4);
    return (3.0 * (1.0 + t4) - 2.0 * s) / (6.0 * unital);
  }
  const double s = std::sqrt(12.0 - 3.0 * t4);
  return t2 * (t2 - 4.0 + s) / (4.0 * unital);
}

RealSymMatrix closed_form_state_t(double t) {
  const double t2 = t * t, t4 = t2 * t2;
  double s11, s22, s00, s04;
  if (std::abs(t) >= 1.0) {
    const double s = std::sqrt(3.0 + 3.0 * t4 + 3.0 * t4 * t4);
    s11 = 2.0 / 9.0 - 1.0 / (3.0 * s);
    s22 = 2.0 / 9.0 - t4 / (3.0 * s);
    s00 = 1.0 / 3.0 - s11 - s22;
    s04 = s00;
  } else {
    const double s = std::sqrt(12.0 - 3.0 * t4);
    s11 = (4.0 + t2) / (6.0 * s) - 1.0 / 6.0;
    s22 = s / (9.0 * (2.0 + t2));
    s00 = 1.0 / 3.0 - s11 - s22;
    s04 = 0.5 * (s00 + s11);
  }
  RealSymMatrix rho(9);
  for (int d : {0, 4, 8}) rho.set(d, d, s00);
  for (int d : {1, 5, 6}) rho.set(d, d, s11);
  for (int d : {2, 3, 7}) rho.set(d, d, s22);
  rho.set(0, 4, s04);
  rho.set(0, 8, s04);
  rho.set(4, 8, s04);
  return rho;
}

}  // namespace entwit
