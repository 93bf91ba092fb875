#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

#include "pcgs/cg.hpp"
#include "pcgs/precond.hpp"
#include "pcgs/sampler.hpp"
#include "pcgs/synth.hpp"

using namespace pcgs;

namespace {

/// Synthetic logistic-regression conditional with a shrinkage-shaped λ: a few
/// large scales for the signals and small ones elsewhere.
struct Problem {
  SparseDesignMatrix x;
  std::vector<double> omega, lambda;
  double tau = 0.05;

  explicit Problem(std::size_t p) {
    const SimSpec spec{.n = 2 * p, .p = p, .n_factors = std::min<std::size_t>(20, p - 1), .n_signals = 10, .seed = 1};
    x = SparseDesignMatrix::from_dense(simulate_design(spec));
    Rng rng(2);
    omega.resize(x.n_rows());
    for (double& w : omega) w = 0.1 + 0.15 * rng.uniform();
    lambda.resize(p);
    for (std::size_t j = 0; j < p; ++j) lambda[j] = j < 10 ? 20.0 : std::abs(rng.normal() / rng.normal());
  }

  GaussianTarget target() const {
    return {PrecisionOperator(x, omega, prior_precision_diagonal(tau, lambda)), std::vector<double>(lambda.size(), 0.0)};
  }
};

const Problem& problem(std::size_t p) {
  static std::map<std::size_t, Problem> cache;
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, Problem(p)).first;
  return it->second;
}

void BM_Matvec(benchmark::State& state) {
  const Problem& pr = problem(static_cast<std::size_t>(state.range(0)));
  std::vector<double> v(pr.x.n_cols(), 1.0), out(pr.x.n_rows());
  for (auto _ : state) {
    matvec(pr.x, v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * pr.x.nnz()));
}

void BM_MatvecTranspose(benchmark::State& state) {
  const Problem& pr = problem(static_cast<std::size_t>(state.range(0)));
  std::vector<double> w(pr.x.n_rows(), 1.0), out(pr.x.n_cols());
  for (auto _ : state) {
    matvec_t(pr.x, w, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * pr.x.nnz()));
}

void BM_PcgSolve(benchmark::State& state, const char* spec) {
  const Problem& pr = problem(static_cast<std::size_t>(state.range(0)));
  const GaussianTarget t = pr.target();
  std::vector<double> scale(pr.lambda.size());
  for (std::size_t j = 0; j < scale.size(); ++j) scale[j] = pr.tau * pr.lambda[j];
  const Preconditioner m = make_preconditioner(parse_preconditioner(spec), t.precision, {}, scale);
  Rng rng(3);
  const auto b = generate_rhs(t, rng);
  std::size_t iters = 0;
  for (auto _ : state) {
    const CGReport r = pcg_solve(t.precision, b, m, {}, {.rtol = 1e-6, .trace_level = TraceLevel::kNone});
    iters = r.iterations;
    benchmark::DoNotOptimize(r.solution.data());
  }
  state.counters["cg_iterations"] = static_cast<double>(iters);
}

void BM_CgSample(benchmark::State& state) {
  const Problem& pr = problem(static_cast<std::size_t>(state.range(0)));
  const GaussianTarget t = pr.target();
  const Preconditioner m = prior_preconditioner(pr.tau, pr.lambda);
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(cg_sample(t, m, {}, {.rtol = 1e-6, .trace_level = TraceLevel::kNone}, rng).beta.data());
}

void BM_DirectSample(benchmark::State& state) {
  const Problem& pr = problem(static_cast<std::size_t>(state.range(0)));
  const GaussianTarget t = pr.target();
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(direct_sample(t, rng).data());
}

}  // namespace

BENCHMARK(BM_Matvec)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MatvecTranspose)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_PcgSolve, prior, "prior")->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PcgSolve, jacobi, "jacobi")->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CgSample)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectSample)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
