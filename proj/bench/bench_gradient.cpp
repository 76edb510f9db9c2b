// Copyright 2026 The pulseqnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Loss-and-gradient throughput: block-exponential reference, spectral kernel
// run serially, and the same kernel with OpenMP over samples.
// Arguments: segments K, samples N, qubits n (circular model; n = 1 is the
// single-qubit model).

#include <benchmark/benchmark.h>

#include <random>

#include "pqnn/simulator.hpp"

namespace {

using namespace pqnn;

struct Fixture {
  PulseModel model = build_single_qubit_model();
  PulseSchedule schedule = PulseSchedule::zeros(1.0, 1, 2);
  TrainingSet data;
  Observable obs{pauli_embed(PauliAxis::Z, 1, 1)};

  Fixture(int k, int n, int qubits)
      : model(qubits == 1 ? build_single_qubit_model() : build_circular_model(qubits)),
        obs(pauli_embed(PauliAxis::Z, 1, qubits)) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::MatrixXd v(k, model.n_controls());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = 0.3 * u(rng);
    schedule = PulseSchedule(0.01 * k, v);
    for (int i = 0; i < n; ++i) {
      data.inputs.push_back({-1.0 + 2.0 * i / std::max(1, n - 1)});
      data.targets.push_back(u(rng));
    }
  }
};

void set_counters(benchmark::State& state) {
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
  state.counters["segment_samples"] = static_cast<double>(state.range(0) * state.range(1));
}

void BM_Reference(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                  static_cast<int>(state.range(2)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::loss_and_gradient(f.model, f.schedule, f.data, f.obs));
  }
  set_counters(state);
}

void BM_Serial(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                  static_cast<int>(state.range(2)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        loss_and_gradient(f.model, f.schedule, f.data, f.obs, Execution::kSerial));
  }
  set_counters(state);
}

void BM_Parallel(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                  static_cast<int>(state.range(2)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        loss_and_gradient(f.model, f.schedule, f.data, f.obs, Execution::kParallel));
  }
  set_counters(state);
}

void shapes(benchmark::internal::Benchmark* b) {
  b->Args({100, 50, 1})->Args({1000, 200, 1})->Args({200, 50, 2})->Args({200, 50, 3});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

BENCHMARK(BM_Reference)->Apply(shapes);
BENCHMARK(BM_Serial)->Apply(shapes);
BENCHMARK(BM_Parallel)->Apply(shapes);

}  // namespace

BENCHMARK_MAIN();
