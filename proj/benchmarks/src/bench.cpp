#include <benchmark/benchmark.h>

#include <random>

#include "entwit/choi.hpp"
#include "entwit/linalg.hpp"
#include "entwit/prescribe.hpp"
#include "entwit/qmaps.hpp"
#include "entwit/sdp.hpp"

namespace {

entwit::HermitianMatrix random_hermitian(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  entwit::HermitianMatrix a(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      a.set(i, j, {u(rng), i == j ? 0.0 : u(rng)});
  return a;
}

void BM_EigHerm9(benchmark::State& state) {
  const entwit::HermitianMatrix a = random_hermitian(9, 11);
  for (auto _ : state)
    benchmark::DoNotOptimize(entwit::eig_herm(a).eigenvalues.front());
}
BENCHMARK(BM_EigHerm9);

void BM_EigSym9WithVectors(benchmark::State& state) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  entwit::RealSymMatrix a(9);
  for (int i = 0; i < 9; ++i)
    for (int j = i; j < 9; ++j) a.set(i, j, u(rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(entwit::eig_sym(a, true).eigenvectors.size());
}
BENCHMARK(BM_EigSym9WithVectors);

void BM_ChoiMatrix(benchmark::State& state) {
  const entwit::QuantumMap psi = entwit::make_psi_pq(0.5, 0.8);
  for (auto _ : state)
    benchmark::DoNotOptimize(entwit::choi_matrix(psi).inner(0, 0));
}
BENCHMARK(BM_ChoiMatrix);

void BM_PartialTranspose(benchmark::State& state) {
  const entwit::HermitianMatrix rho = random_hermitian(9, 13);
  for (auto _ : state)
    benchmark::DoNotOptimize(entwit::partial_transpose(rho).re(0, 0));
}
BENCHMARK(BM_PartialTranspose);

void BM_PositivitySampling(benchmark::State& state) {
  const entwit::QuantumMap psi = entwit::make_psi_mn(-0.5, 0.5);
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        entwit::verify_positivity_sampling(psi, state.range(0), seed++)
            .min_eigenvalue_found);
}
BENCHMARK(BM_PositivitySampling)->Arg(200)->Arg(2000);

void BM_ZeroSetLine(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        entwit::solve_family(entwit::t_zero_set(2.0), state.range(0)).size());
}
BENCHMARK(BM_ZeroSetLine)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SolveWitness(benchmark::State& state) {
  const entwit::SdpProblem problem = entwit::build_problem(
      entwit::unitalize(entwit::make_psi_t(2.0)), state.range(0) == 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(entwit::solve(problem).objective_value);
}
BENCHMARK(BM_SolveWitness)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ReducedTProgram(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(entwit::reduced_t_program(2.0).objective_value);
}
BENCHMARK(BM_ReducedTProgram)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
