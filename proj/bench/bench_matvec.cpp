// Serial reference vs OpenMP matvec vs cached CSR, on the Sz = 0 sector.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "kondo/hamiltonian.hpp"

using namespace kondo;

namespace {

struct Fixture {
  std::unique_ptr<HamiltonianOperator> h;
  Eigen::VectorXcd in, out;

  Fixture(int n, bool cache) {
    ChainSpec s;
    s.n_sites = n;
    s.j2 = 0.3;
    s.j_prime = 0.5;
    s.variant = Variant::end_quenched;
    h = std::make_unique<HamiltonianOperator>(s, std::make_shared<const SectorBasis>(n, n / 2), cache);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    in.resize(static_cast<Eigen::Index>(h->dim()));
    for (auto& x : in) x = cplx(g(rng), g(rng));
    out.resize(in.size());
  }
  std::span<const cplx> src() const { return {in.data(), static_cast<std::size_t>(in.size())}; }
  std::span<cplx> dst() { return {out.data(), static_cast<std::size_t>(out.size())}; }
};

void BM_serial(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), false);
  for (auto _ : st) {
    f.h->apply_serial<cplx>(f.src(), f.dst());
    benchmark::DoNotOptimize(f.out.data());
  }
  st.counters["dim"] = static_cast<double>(f.h->dim());
}

void BM_openmp(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), false);
  for (auto _ : st) {
    f.h->apply<cplx>(f.src(), f.dst());
    benchmark::DoNotOptimize(f.out.data());
  }
  st.counters["dim"] = static_cast<double>(f.h->dim());
}

void BM_csr(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), true);
  for (auto _ : st) {
    f.h->apply<cplx>(f.src(), f.dst());
    benchmark::DoNotOptimize(f.out.data());
  }
  st.counters["dim"] = static_cast<double>(f.h->dim());
}

}  // namespace

BENCHMARK(BM_serial)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_openmp)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_csr)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
