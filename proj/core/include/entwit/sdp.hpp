#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "entwit/choi.hpp"
#include "entwit/linalg.hpp"
#include "entwit/qmaps.hpp"

namespace entwit {

// Minimize Tr(C rho) over 9x9 real symmetric rho with Tr rho = 1 under
// semidefinite block constraints, by log-barrier path following over the
// 44-dimensional traceless slice.

// The objective would pick up Im(rho) dependence, so restricting the variable
// to real symmetric matrices is invalid for this witness.
class ComplexObjective : public std::runtime_error {
 public:
  explicit ComplexObjective(const std::string& what) : std::runtime_error(what) {}
};

enum class BlockKind {
  Identity,         // rho itself
  PartialTranspose, // rho^Gamma
  ChoiAdjointLift,  // (Psi_C^dagger x Id) rho
};

struct SdpProblem {
  RealSymMatrix objective;
  std::vector<BlockKind> blocks;
  double trace_target = 1.0;

  SdpProblem() : objective(9) {}
};

enum class SdpStatus { Optimal, MaxIterations, NumericalFailure };

struct SdpSolution {
  RealSymMatrix rho;
  double objective_value = 0.0;
  double duality_gap_estimate = 0.0;
  int iterations = 0;  // accepted Newton steps over all barrier stages
  SdpStatus status = SdpStatus::Optimal;

  SdpSolution() : rho(9) {}
};

struct SdpOptions {
  double gap_tol = 1e-9;
  int max_iter = 200;  // barrier stages, not Newton steps
  double mu_shrink = 0.2;
};

// Applies one constraint block to a real symmetric state.
RealSymMatrix apply_block(BlockKind kind, const RealSymMatrix& rho);

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts = {});

// blocks = [identity, partial-transpose] plus the Choi-adjoint lift when
// requested. The witness must have a real Choi matrix (||Im C||_F <= 1e-12),
// else ComplexObjective.
SdpProblem build_problem(const QuantumMap& witness, bool with_choi_constraint);

struct ReducedTSolution {
  double objective_value = 0.0;
  double s11 = 0.0;
  double s22 = 0.0;
  double s04 = 0.0;
};

// The 3-variable reduction of the t-family program: dense grid (step 1e-3)
// plus coordinate descent polish to 1e-10.
ReducedTSolution reduced_t_program(double t);

// Closed-form optimum of the t-family program and the sparse optimal state
// realizing it.
double closed_form_min_t(double t);
RealSymMatrix closed_form_state_t(double t);

}  // namespace entwit
