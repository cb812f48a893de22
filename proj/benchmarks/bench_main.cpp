#include <benchmark/benchmark.h>

#include "dlimit/perturbed.hpp"
#include "dlimit/signal.hpp"
#include "dlimit/singular_solver.hpp"
#include "dlimit/study.hpp"

#include <cmath>
#include <string>

using namespace dlimit;

namespace {

Matrix jordan(int n) {
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) m(k, k + 1) = 1.0;
    return m;
}

void BM_MatExpPade(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    const Matrix a = Matrix::Random(n, n);
    for (auto _ : state) benchmark::DoNotOptimize(mat_exp_pade(a));
}
BENCHMARK(BM_MatExpPade)->Arg(2)->Arg(8)->Arg(32);

void BM_ParseSignal(benchmark::State& state) {
    const std::string text = "[sin(2*t) * t^3 + exp(-0.5*t), cos(t)^2 - 3*t + 1, 0.25*t^4]";
    for (auto _ : state) benchmark::DoNotOptimize(parse_signal(text, 3));
}
BENCHMARK(BM_ParseSignal);

void BM_SolveSingular(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    std::string text = "[";
    for (int k = 0; k < n; ++k) text += std::string(k ? ", " : "") + "sin(t) + t^2";
    const SolveRequest req{jordan(n), Vector::Ones(n), parse_signal(text + "]", n)};
    for (auto _ : state) benchmark::DoNotOptimize(solve_singular(req));
}
BENCHMARK(BM_SolveSingular)->Arg(2)->Arg(4)->Arg(6);

void BM_SolvePerturbed(benchmark::State& state) {
    const int i = static_cast<int>(state.range(0));
    const PerturbedSystem sys(PerturbationFamily::shift(jordan(2)).realize(i));
    const Vector x0 = Vector::Ones(2);
    const auto f = parse_signal("[sin(t), t]");
    const QuadratureSpec quad;
    for (auto _ : state) benchmark::DoNotOptimize(sys.solve(x0, f, 1.0, quad));
}
BENCHMARK(BM_SolvePerturbed)->Arg(16)->Arg(512);

void BM_PairPerturbed(benchmark::State& state) {
    const int i = static_cast<int>(state.range(0));
    const PerturbedSystem sys(PerturbationFamily::shift(jordan(2)).realize(i));
    const Vector x0 = Vector::Ones(2);
    const auto f = parse_signal("[sin(t), t]");
    const TestFunction lam(0.0, 1.0, Vector::Ones(2) / std::sqrt(2.0));
    const QuadratureSpec quad;
    for (auto _ : state) benchmark::DoNotOptimize(sys.pair(x0, f, lam, quad));
}
BENCHMARK(BM_PairPerturbed)->Arg(16)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ScalarStudy(benchmark::State& state) {
    StudyConfig cfg;
    cfg.system = SolveRequest{Matrix::Zero(1, 1), Vector::Constant(1, 2.0), parse_signal("[1]")};
    cfg.families = {PerturbationFamily::shift(cfg.system.N)};
    cfg.indices = {16, 32, 64, 100, 128, 256, 512};
    cfg.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_study(cfg));
}
BENCHMARK(BM_ScalarStudy)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
