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

// Experiment harness: target functions, datasets, and the fit / sweep /
// comparison drivers behind the `pqnn` command line tool. Every driver
// writes CSV files (header row, 17 significant digits) into the configured
// output directory and returns the same numbers in memory.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqnn/controllability.hpp"
#include "pqnn/model.hpp"
#include "pqnn/simulator.hpp"
#include "pqnn/trainer.hpp"

namespace pqnn {

inline constexpr int kSchemaVersion = 1;
inline constexpr long kMaxAmplitudeCount = 1'000'000;  // K * p guard
inline constexpr int kMaxWidthQubits = 4;

/// Named scalar target on R^m. Names: "sigmoid10", "poly8_fixed",
/// "himmelblau_like", "poly8_random:<seed>".
class TargetFunction {
 public:
  static TargetFunction parse(const std::string& name);
  static TargetFunction poly8_random(std::uint64_t seed);

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }
  double operator()(std::span<const double> x) const;

 private:
  TargetFunction(std::string name, int arity,
                 std::function<double(std::span<const double>)> f);

  std::string name_;
  int arity_;
  std::function<double(std::span<const double>)> f_;
};

double target_function(const std::string& name, std::span<const double> x);

/// Coefficients a_1..a_8, uniform in [-30, 30].
std::vector<double> poly8_random_coefficients(std::uint64_t seed);

struct Dataset {
  std::vector<std::vector<double>> inputs;  // in [-1, 1]^m
  std::vector<double> raw_targets;
  std::vector<double> normalized_targets;  // a * raw + b
  double a = 1.0;
  double b = 0.0;

  std::size_t size() const { return inputs.size(); }
  /// Inputs with normalized targets.
  TrainingSet training_set() const;
  double denormalize(double normalized) const { return (normalized - b) / a; }
};

/// Evenly spaced grid on [-R, R]^m including endpoints, stored rescaled to
/// [-1, 1]^m. The first input axis varies slowest. Targets are left
/// unnormalized (identity map).
Dataset sample_grid(const TargetFunction& f, const std::vector<int>& counts,
                    double radius = 1.0);

/// Identity if every raw target already lies in [lambda_min, lambda_max],
/// otherwise the min-max affine map onto that interval.
Dataset normalize_targets(Dataset data, double lambda_min, double lambda_max);

/// Everything a driver needs; unknown keys are ignored, missing keys take
/// the defaults below.
struct ExperimentConfig {
  std::string experiment = "fit";
  nlohmann::json model = "single_qubit";
  std::string observable = "Z1";
  std::string function = "sigmoid10";
  std::vector<int> samples{200};
  double radius = 1.0;

  double duration = 10.0;
  int segments = 1000;
  std::vector<double> durations;  // sweep grids
  std::vector<double> dts;
  int seeds = 3;                  // seeds per sweep cell
  int count = 20;                 // polynomial family size
  std::vector<int> qubits{1, 2, 3};
  std::vector<int> blocks{5, 10, 15};

  TrainConfig train;
  TrainConfig gate_train;

  // Gate-vs-pulse comparison.
  bool physical_units = false;
  int gate_restarts = 5;  // gate baseline = median-loss run of these seeds
  double theta_max = kPhysicalAmplitudeCap;  // rad/ns
  double dt_step = 0.1;                      // in units of 1/theta_max
  double dt_max = 5.0;
  double fine_dt = 0.05;
  double shrink = 0.9;
  int max_shrink_steps = 10;

  int degree_cutoff = kDefaultDegreeCutoff;

  std::uint64_t seed = 1;
  bool full_scale = false;
  std::filesystem::path out = "out";
  nlohmann::json source;  // config as read, echoed into result.json

  /// Applies the optional "full_scale" object as a JSON merge patch first
  /// when `full_scale` is set.
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    bool full_scale = false);
  static ExperimentConfig load(const std::filesystem::path& path,
                               bool full_scale = false);

  void validate() const;
};

struct FitResult {
  double final_loss = 0.0;
  double wall_time = 0.0;
  std::vector<double> loss_history;
  std::vector<double> predictions;
  Dataset dataset;
  PulseSchedule schedule = PulseSchedule::zeros(1.0, 1, 1);
};

struct SweepRow {
  double duration = 0.0;
  double dt = 0.0;
  int segments = 0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;
};

struct QuantileSummary {
  double duration = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double mean = 0.0;
};

struct WidthRow {
  int n_qubits = 0;
  double duration = 0.0;
  double final_loss = 0.0;
};

struct CompareRow {
  int blocks = 0;
  double gate_loss = 0.0;
  double gate_time = 0.0;  // T_G, ns
  int pulse_segments = 0;
  double pulse_loss = 0.0;
  double pulse_time = 0.0;  // T_P, ns
  std::string variant;      // "matched" or "unconstrained"

  double ratio() const { return pulse_time / gate_time; }
};

/// Linear-interpolation quantile (q in [0, 1]) of unsorted values.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

/// Segment count for duration T at period dt; throws unless T / dt is an
/// integer within 1e-9.
int segments_for(double duration, double dt);

FitResult run_fit(const ExperimentConfig& cfg);
std::vector<SweepRow> run_duration_sweep(const ExperimentConfig& cfg);
std::vector<QuantileSummary> run_poly_family(const ExperimentConfig& cfg);
std::vector<WidthRow> run_width_sweep(const ExperimentConfig& cfg);
std::vector<CompareRow> run_gate_vs_pulse(const ExperimentConfig& cfg);

/// Writes controllability.json; returns 0 when the ensemble check is full
/// and 2 when it is deficient.
int run_controllability(const ExperimentConfig& cfg);

/// Median final loss per (T, dt) cell of a duration sweep.
std::vector<SweepRow> summarize_sweep(const std::vector<SweepRow>& rows);

}  // namespace pqnn
