#include <benchmark/benchmark.h>

#include <random>

#include "sgchurn/backup_table.hpp"
#include "sgchurn/dbg.hpp"
#include "sgchurn/engine.hpp"
#include "sgchurn/sw_dbg.hpp"

using namespace sgchurn;

namespace {

void BM_DbgUpdate(benchmark::State& state) {
  Dbg d(static_cast<unsigned>(state.range(0)));
  std::mt19937_64 rng(1);
  std::bernoulli_distribution on(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(d.update(on(rng)));
}
BENCHMARK(BM_DbgUpdate)->Arg(1)->Arg(4)->Arg(8);

void BM_StateWindowUpdate(benchmark::State& state) {
  StateWindow w;
  std::mt19937_64 rng(2);
  std::bernoulli_distribution flip(0.2);
  bool status = true;
  for (auto _ : state) {
    if (flip(rng)) status = !status;
    benchmark::DoNotOptimize(w.update(status));
  }
}
BENCHMARK(BM_StateWindowUpdate);

void BM_SolveStationary(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = u(rng);
    p.row(i) /= p.row(i).sum();
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_stationary(p));
}
BENCHMARK(BM_SolveStationary)->Arg(4)->Arg(32)->Arg(256);

void BM_BackupUpdate(benchmark::State& state) {
  const auto snap = generate_topology(1024, 4);
  BackupTable table(snap.nodes[0], 10, static_cast<std::size_t>(state.range(0)));
  LookupTable lookup(10);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> sop(0.0, 1.0);
  for (auto _ : state) {
    const auto& n = snap.nodes[1 + rng() % (snap.nodes.size() - 1)];
    const PiggybackEntry e{n.address, n.numId, n.nameId, sop(rng)};
    table.update(lookup, std::span<const PiggybackEntry>(&e, 1));
  }
}
BENCHMARK(BM_BackupUpdate)->Arg(10)->Arg(40);

void BM_Search(benchmark::State& state) {
  SimConfig c;
  c.capacity = static_cast<std::size_t>(state.range(0));
  c.churn.kind = ChurnKind::Uniform;
  c.churn.uniformQ = 0.2;
  c.searchCap = 0;
  Simulation sim(c, generate_topology(c.capacity, 6), 6);
  sim.run_slot();
  const auto& on = sim.online();
  std::mt19937_64 rng(7);
  for (auto _ : state) {
    const NodeAddress from = on.at(rng() % on.size());
    const NumId target = sim.topology().node(on.at(rng() % on.size())).numId;
    benchmark::DoNotOptimize(sim.run_search(from, target));
  }
}
BENCHMARK(BM_Search)->Arg(256)->Arg(1024);

}  // namespace

// The packaged benchmark_main archive is LTO bytecode from another gcc.
BENCHMARK_MAIN();
