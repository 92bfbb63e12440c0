#include <benchmark/benchmark.h>

#include <random>

#include "sympidx/floer_book.hpp"
#include "sympidx/path_index.hpp"

using namespace sympidx;

namespace {

Mat sample(int n) {
  std::mt19937_64 rng(42);
  return random_symplectic(n, rng);
}

void BM_polar_unitary(benchmark::State& state) {
  SympMatrix A(sample(static_cast<int>(state.range(0))), true);
  for (auto _ : state) benchmark::DoNotOptimize(polar_unitary(A));
}
BENCHMARK(BM_polar_unitary)->Arg(1)->Arg(2)->Arg(4);

void BM_rho_eigen(benchmark::State& state) {
  std::mt19937_64 rng(7);
  int n = static_cast<int>(state.range(0));
  Mat D(0, 0);
  for (int i = 0; i < n; ++i) {
    Mat b = (i % 2) ? rotation2(0.4 + 0.3 * i)
                    : random_hyperbolic_symplectic(1, rng);
    D = D.rows() == 0 ? b : block_diag(D, b);
  }
  SympMatrix A(renormalize_symplectic(D), true);
  for (auto _ : state) benchmark::DoNotOptimize(rho_eigen(A));
}
BENCHMARK(BM_rho_eigen)->Arg(1)->Arg(2)->Arg(4);

void BM_delta_tilde(benchmark::State& state) {
  QuadHamiltonian H;
  H.dim = 4;
  Mat S = Mat::Identity(4, 4);
  H.S = [S](double) { return S; };
  SympPath p = linear_flow(H, 0.0, 2.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(delta_tilde(p));
}
BENCHMARK(BM_delta_tilde)->Arg(256)->Arg(1024);

void BM_linear_flow(benchmark::State& state) {
  QuadHamiltonian H;
  H.dim = 4;
  Mat S = sample(2).transpose() * sample(2);
  S = 0.1 * (S + Mat(S.transpose()));
  H.S = [S](double) { return S; };
  for (auto _ : state)
    benchmark::DoNotOptimize(
        linear_flow(H, 0.0, 1.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_linear_flow)->Arg(256)->Arg(4096);

void BM_derive_levels(benchmark::State& state) {
  floer::GeometryParams p;
  p.m = 2;
  p.q = 2;
  p.r = 1.0;
  p.eps0 = 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(floer::derive_levels(p));
}
BENCHMARK(BM_derive_levels);

}  // namespace

BENCHMARK_MAIN();
