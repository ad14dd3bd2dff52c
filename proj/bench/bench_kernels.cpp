#include <benchmark/benchmark.h>

#include "schreier/cbindex.hpp"
#include "schreier/dichotomy.hpp"
#include "schreier/policy.hpp"
#include "schreier/spreadmap.hpp"

using namespace schreier;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_Enumerate(benchmark::State& st) {
  EnumerateOptions opts;
  opts.exec = exec_of(st);
  const Ordinal a = parse_ordinal("w");
  for (auto _ : st) {
    benchmark::DoNotOptimize(enumerate(a, 18, opts).size());
  }
}
BENCHMARK(BM_Enumerate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_VerifyStrategy(benchmark::State& st) {
  const auto fam = schreier_oracle(Ordinal::nat(1));
  const auto pol = games::min_last_policy(1);
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        games::verify_strategy(TupleSpec::parse("1,1"), *pol, fam, 14, exec_of(st)).plays);
  }
}
BENCHMARK(BM_VerifyStrategy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SpreadmapVerify(benchmark::State& st) {
  const games::GameSpec g{TupleSpec::parse("w"), games::constant_policy(3)};
  const auto f = spreadmap::build(g, 14);
  for (auto _ : st) {
    benchmark::DoNotOptimize(spreadmap::verify(f, g, 14, exec_of(st)).plays);
  }
}
BENCHMARK(BM_SpreadmapVerify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_InclusionSearch(benchmark::State& st) {
  const auto fam = FamilyOracle::explicit_family(dichotomy::random_hereditary_family(16, 11));
  for (auto _ : st) {
    benchmark::DoNotOptimize(dichotomy::inclusion_search(fam, TupleSpec::parse("1"),
                                                         SeqView::identity(16), 8, 5'000'000,
                                                         exec_of(st))
                                 .nodes);
  }
}
BENCHMARK(BM_InclusionSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BarLift(benchmark::State& st) {
  const auto gens = cb::small_generator_families(6, 2, 3);
  for (auto _ : st) {
    benchmark::DoNotOptimize(cb::bar_lift_batch(gens, 7, exec_of(st)).checks);
  }
}
BENCHMARK(BM_BarLift)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
