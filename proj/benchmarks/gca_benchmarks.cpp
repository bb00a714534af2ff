#include <random>
#include <string>

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "gca/dcpf.hpp"
#include "gca/graph.hpp"
#include "gca/network.hpp"
#include "gca/oracle.hpp"
#include "gca/screening.hpp"

namespace {

const gca::Network& case200() {
  static const gca::Network net = gca::load_case(std::string(GCA_DATA_DIR) + "/case_ACTIVSg200.m");
  return net;
}

const gca::Network& case500() {
  static const gca::Network net = gca::load_case(std::string(GCA_DATA_DIR) + "/case_ACTIVSg500.m");
  return net;
}

void BM_Lodf200(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gca::compute_lodf(case200()));
}
BENCHMARK(BM_Lodf200)->Unit(benchmark::kMillisecond);

void BM_Lodf500(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gca::compute_lodf(case500()));
}
BENCHMARK(BM_Lodf500)->Unit(benchmark::kMillisecond);

void BM_EdgeBetweenness200(benchmark::State& state) {
  const gca::Multigraph g = gca::Multigraph::from_network(case200());
  for (auto _ : state) benchmark::DoNotOptimize(gca::edge_betweenness_all(g));
}
BENCHMARK(BM_EdgeBetweenness200)->Unit(benchmark::kMicrosecond);

// Screening without the shared LODF preparation; args are x and level.
void BM_ScreenPrepared(benchmark::State& state) {
  const gca::ScreeningInputs inputs = gca::prepare_screening(case200());
  gca::ScreeningConfig cfg;
  cfg.x = static_cast<std::size_t>(state.range(0));
  cfg.search_level = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gca::screen(case200(), inputs, cfg));
}
BENCHMARK(BM_ScreenPrepared)
    ->ArgsProduct({{1, 2, 4, 8}, {1, 3, 5, 8}})
    ->Unit(benchmark::kMicrosecond);

void BM_ScreenFull(benchmark::State& state) {
  gca::ScreeningConfig cfg;
  cfg.x = 2;
  cfg.search_level = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gca::screen(case200(), cfg));
}
BENCHMARK(BM_ScreenFull)->DenseRange(1, 8)->Unit(benchmark::kMillisecond);

void BM_BruteForceN1(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gca::bruteforce_nx(case200(), 1));
}
BENCHMARK(BM_BruteForceN1)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
