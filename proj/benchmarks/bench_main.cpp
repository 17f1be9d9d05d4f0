#include <benchmark/benchmark.h>

#include <random>

#include "nlea/eigenpair.hpp"
#include "nlea/expr.hpp"
#include "nlea/simulate.hpp"
#include "nlea/sylvester.hpp"

using namespace nlea;

namespace {

Polynomial random_poly(std::mt19937& rng, int nvars, int max_exp, int terms) {
  std::uniform_int_distribution<int> expd(0, max_exp);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  Polynomial p(nvars);
  for (int t = 0; t < terms; ++t) {
    Monomial m(nvars);
    for (int i = 0; i < nvars; ++i) m[i] = expd(rng);
    p.add_term(m, Complex(coeff(rng), coeff(rng)));
  }
  return p;
}

PolyVec random_field(std::mt19937& rng, int nvars, int max_exp, int terms) {
  std::vector<Polynomial> entries;
  for (int i = 0; i < nvars; ++i) entries.push_back(random_poly(rng, nvars, max_exp, terms));
  return PolyVec(std::move(entries));
}

void BM_PolyMul(benchmark::State& state) {
  std::mt19937 rng(1);
  const int nvars = static_cast<int>(state.range(0));
  Polynomial a = random_poly(rng, nvars, 3, 12);
  Polynomial b = random_poly(rng, nvars, 3, 12);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_PolyMul)->Arg(2)->Arg(4)->Arg(6);

void BM_Compose(benchmark::State& state) {
  std::mt19937 rng(2);
  const int nvars = static_cast<int>(state.range(0));
  Polynomial p = random_poly(rng, nvars, 3, 10);
  std::vector<Polynomial> sub;
  for (int i = 0; i < nvars; ++i) sub.push_back(random_poly(rng, nvars, 2, 4));
  for (auto _ : state) benchmark::DoNotOptimize(p.compose(sub));
}
BENCHMARK(BM_Compose)->Arg(2)->Arg(4);

void BM_LieBracket(benchmark::State& state) {
  std::mt19937 rng(3);
  const int nvars = static_cast<int>(state.range(0));
  PolyVec v = random_field(rng, nvars, 2, 6);
  PolyVec s = random_field(rng, nvars, 3, 10);
  for (auto _ : state) benchmark::DoNotOptimize(lie_bracket(v, s));
}
BENCHMARK(BM_LieBracket)->Arg(2)->Arg(4);

void BM_SeriesSolve(benchmark::State& state) {
  const std::vector<std::string> x = {"x1", "x2"};
  const std::vector<std::string> w = {"w"};
  NonlinearSylvesterProblem prob{
      PolyVec({parse_poly("-x1 - x1^2/2 + x1*x2 + 2*x2 - x2^2", x),
               parse_poly("x2 - x2^2/2", x)}),
      PolyMatrix::from_rows({{parse_poly("1", x)}, {parse_poly("1", x)}}),
      PolyVec({parse_poly("-2*w", w)}), PolyVec({parse_poly("-w - w^2/2", w)})};
  const int degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_nonlinear_sylvester_series(prob, degree));
}
BENCHMARK(BM_SeriesSolve)->Arg(3)->Arg(6)->Arg(9);

void BM_Rk4(benchmark::State& state) {
  const std::vector<std::string> x = {"x1", "x2"};
  PolyVec field = PolyVec({parse_poly("-x1 - x1^2/2 + x1*x2 - x2^2", x),
                           parse_poly("-x2 - x2^2/2", x)});
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate(field, {1.0, 1.0}, 1.0, 1e-3));
}
BENCHMARK(BM_Rk4);

}  // namespace

BENCHMARK_MAIN();
