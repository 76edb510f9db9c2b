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

#include "pqnn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>

#include "pqnn/random.hpp"

namespace pqnn {

namespace fs = std::filesystem;

namespace {

// Stream identifiers for derive_seed; never renumber.
enum Stream : std::uint64_t {
  kFitStream = 1,
  kSweepStream = 2,
  kPolyCoefficientStream = 3,
  kPolyTrainStream = 4,
  kWidthStream = 5,
  kGateStream = 6,
  kPulseStream = 7,
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed");
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json result_header(const ExperimentConfig& cfg) {
  return {{"schema_version", kSchemaVersion},
          {"experiment", cfg.experiment},
          {"seed", cfg.seed},
          {"full_scale", cfg.full_scale},
          {"config", cfg.source}};
}

TrainConfig parse_train(const nlohmann::json& j, TrainConfig base) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw Error("training settings must be a JSON object");
  base.iterations = j.value("iterations", base.iterations);
  base.learning_rate = j.value("learning_rate", base.learning_rate);
  base.beta1 = j.value("beta1", base.beta1);
  base.beta2 = j.value("beta2", base.beta2);
  base.eps = j.value("eps", base.eps);
  base.init_scale = j.value("init_scale", base.init_scale);
  if (j.contains("amplitude_cap")) {
    const auto& cap = j.at("amplitude_cap");
    base.amplitude_cap = cap.is_null() ? std::nullopt : std::optional<double>(cap.get<double>());
  }
  if (j.contains("parallel")) {
    base.exec = j.at("parallel").get<bool>() ? Execution::kParallel : Execution::kSerial;
  }
  return base;
}

TrainConfig with_seed(TrainConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  return cfg;
}

Dataset make_dataset(const ExperimentConfig& cfg, const TargetFunction& f,
                     const Observable& m) {
  return normalize_targets(sample_grid(f, cfg.samples, cfg.radius), m.lambda_min(),
                           m.lambda_max());
}

void ensure_out(const ExperimentConfig& cfg) { fs::create_directories(cfg.out); }

void check_amplitude_count(long segments, int controls) {
  if (segments * controls > kMaxAmplitudeCount) {
    throw Error("K * p = " + std::to_string(segments * controls) +
                " exceeds the limit of " + std::to_string(kMaxAmplitudeCount));
  }
}

}  // namespace

TargetFunction::TargetFunction(std::string name, int arity,
                               std::function<double(std::span<const double>)> f)
    : name_(std::move(name)), arity_(arity), f_(std::move(f)) {}

TargetFunction TargetFunction::parse(const std::string& name) {
  if (name == "sigmoid10") {
    return {name, 1, [](std::span<const double> x) {
              const double e = std::exp(-10.0 * x[0]);
              return (1.0 - e) / (1.0 + e);
            }};
  }
  if (name == "poly8_fixed") {
    return {name, 1, [](std::span<const double> x) {
              const double t = x[0];
              const double t2 = t * t;
              return 10.0 * t2 - 14.0 * t2 * t2 - 3.0 * t2 * t2 * t2 +
                     7.0 * t2 * t2 * t2 * t2 - std::cos(t);
            }};
  }
  if (name == "himmelblau_like") {
    return {name, 2, [](std::span<const double> x) {
              const double u = x[0] * x[0] + x[1] - 1.5 * std::numbers::pi;
              const double v = x[0] + x[1] * x[1] - std::numbers::pi;
              return u * u + v * v;
            }};
  }
  const std::string prefix = "poly8_random:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string digits = name.substr(prefix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw Error("poly8_random needs a numeric seed: " + name);
    }
    return poly8_random(std::stoull(digits));
  }
  throw Error("unknown target function: " + name);
}

TargetFunction TargetFunction::poly8_random(std::uint64_t seed) {
  const auto coeffs = poly8_random_coefficients(seed);
  return {"poly8_random:" + std::to_string(seed), 1,
          [coeffs](std::span<const double> x) {
            // Horner on sum_{j=1}^{8} a_j x^j.
            double acc = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc + *it) * x[0];
            return acc;
          }};
}

double TargetFunction::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != arity_) {
    throw Error(name_ + " expects " + std::to_string(arity_) + " inputs");
  }
  return f_(x);
}

double target_function(const std::string& name, std::span<const double> x) {
  return TargetFunction::parse(name)(x);
}

std::vector<double> poly8_random_coefficients(std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> out(8);
  for (auto& c : out) c = rng.uniform(-30.0, 30.0);
  return out;
}

TrainingSet Dataset::training_set() const { return {inputs, normalized_targets}; }

Dataset sample_grid(const TargetFunction& f, const std::vector<int>& counts,
                    double radius) {
  if (static_cast<int>(counts.size()) != f.arity()) {
    throw Error(f.name() + " needs " + std::to_string(f.arity()) + " sample counts");
  }
  if (!(radius > 0.0)) throw Error("domain radius must be positive");
  for (int c : counts) {
    if (c < 2) throw Error("need at least 2 samples per axis");
  }
  Dataset out;
  const int m = f.arity();
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> unit(static_cast<std::size_t>(m));
  std::vector<double> raw(static_cast<std::size_t>(m));
  while (true) {
    for (int a = 0; a < m; ++a) {
      const auto i = static_cast<std::size_t>(a);
      unit[i] = -1.0 + 2.0 * idx[i] / (counts[i] - 1);
      raw[i] = radius * unit[i];
    }
    out.inputs.push_back(unit);
    out.raw_targets.push_back(f(raw));
    int a = m - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == counts[static_cast<std::size_t>(a)]) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  out.normalized_targets = out.raw_targets;
  return out;
}

Dataset normalize_targets(Dataset data, double lambda_min, double lambda_max) {
  if (data.raw_targets.empty()) throw Error("empty dataset");
  if (!(lambda_min < lambda_max)) throw Error("observable range is degenerate");
  const auto [lo, hi] = std::minmax_element(data.raw_targets.begin(), data.raw_targets.end());
  if (*lo == *hi) throw Error("constant targets cannot be normalized");
  if (*lo >= lambda_min && *hi <= lambda_max) {
    data.a = 1.0;
    data.b = 0.0;
  } else {
    data.a = (lambda_max - lambda_min) / (*hi - *lo);
    data.b = lambda_min - data.a * *lo;
  }
  data.normalized_targets.resize(data.raw_targets.size());
  for (std::size_t k = 0; k < data.raw_targets.size(); ++k) {
    const double v = data.a * data.raw_targets[k] + data.b;
    data.normalized_targets[k] = std::clamp(v, lambda_min, lambda_max);
  }
  return data;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& input,
                                             bool full_scale) {
  if (!input.is_object()) throw Error("experiment config must be a JSON object");
  nlohmann::json j = input;
  if (full_scale && j.contains("full_scale")) {
    const nlohmann::json patch = j.at("full_scale");
    j.merge_patch(patch);
  }
  ExperimentConfig cfg;
  cfg.source = j;
  cfg.full_scale = full_scale;
  cfg.experiment = j.value("experiment", cfg.experiment);
  if (j.contains("model")) cfg.model = j.at("model");
  cfg.observable = j.value("observable", cfg.observable);
  cfg.function = j.value("function", cfg.function);
  cfg.samples = j.value("samples", cfg.samples);
  cfg.radius = j.value("radius", cfg.radius);
  cfg.duration = j.value("duration", cfg.duration);
  cfg.segments = j.value("segments", cfg.segments);
  cfg.durations = j.value("durations", cfg.durations);
  cfg.dts = j.value("dts", cfg.dts);
  cfg.seeds = j.value("seeds", cfg.seeds);
  cfg.count = j.value("count", cfg.count);
  cfg.qubits = j.value("qubits", cfg.qubits);
  cfg.blocks = j.value("blocks", cfg.blocks);
  cfg.train = parse_train(j.value("train", nlohmann::json()), cfg.train);
  cfg.gate_train = parse_train(j.value("gate_train", nlohmann::json()), cfg.gate_train);
  cfg.physical_units = j.value("physical_units", cfg.physical_units);
  cfg.gate_restarts = j.value("gate_restarts", cfg.gate_restarts);
  cfg.theta_max = j.value("theta_max", cfg.theta_max);
  cfg.dt_step = j.value("dt_step", cfg.dt_step);
  cfg.dt_max = j.value("dt_max", cfg.dt_max);
  cfg.fine_dt = j.value("fine_dt", cfg.fine_dt);
  cfg.shrink = j.value("shrink", cfg.shrink);
  cfg.max_shrink_steps = j.value("max_shrink_steps", cfg.max_shrink_steps);
  cfg.degree_cutoff = j.value("degree_cutoff", cfg.degree_cutoff);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path, bool full_scale) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("malformed config " + path.string() + ": " + e.what());
  }
  return from_json(j, full_scale);
}

void ExperimentConfig::validate() const {
  train.validate();
  gate_train.validate();
  if (!(radius > 0.0)) throw Error("radius must be positive");
  if (!(duration > 0.0)) throw Error("duration must be positive");
  if (segments < 1) throw Error("segments must be positive");
  if (seeds < 1) throw Error("seeds must be positive");
  if (count < 1) throw Error("count must be positive");
  if (degree_cutoff < 1) throw Error("degree_cutoff must be at least 1");
  if (gate_restarts < 1) throw Error("gate_restarts must be positive");
  if (!(theta_max > 0.0)) throw Error("theta_max must be positive");
  if (!(dt_step > 0.0 && dt_max >= dt_step)) throw Error("invalid dt search range");
  if (!(fine_dt > 0.0)) throw Error("fine_dt must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw Error("shrink must lie in (0, 1)");
  for (double t : durations) {
    if (!(t > 0.0)) throw Error("sweep durations must be positive");
  }
  for (double dt : dts) {
    if (!(dt > 0.0)) throw Error("sweep periods must be positive");
  }
  for (int n : qubits) {
    if (n < 1 || n > kMaxWidthQubits) {
      throw Error("width sweep supports 1 to " + std::to_string(kMaxWidthQubits) + " qubits");
    }
  }
  for (int b : blocks) {
    if (b < 1) throw Error("block counts must be positive");
  }
  TargetFunction::parse(function);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw Error("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

int segments_for(double duration, double dt) {
  const double ratio = duration / dt;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * std::max(1.0, k)) {
    throw Error("duration " + fmt(duration) + " is not a multiple of dt " + fmt(dt));
  }
  return static_cast<int>(k);
}

FitResult run_fit(const ExperimentConfig& cfg) {
  cfg.validate();
  const PulseModel model = model_from_json(cfg.model);
  const Observable m = observable_from_spec(cfg.observable, model.n_qubits());
  const TargetFunction f = TargetFunction::parse(cfg.function);
  if (f.arity() != model.n_inputs()) {
    throw Error(cfg.function + " has arity " + std::to_string(f.arity()) +
                " but the model takes " + std::to_string(model.n_inputs()) + " inputs");
  }
  check_amplitude_count(cfg.segments, model.n_controls());
  ensure_out(cfg);

  FitResult out;
  out.dataset = make_dataset(cfg, f, m);
  const TrainingSet data = out.dataset.training_set();
  const auto train_seed = derive_seed(cfg.seed, {kFitStream});
  const auto trained = train_pulse(model, data, cfg.duration, cfg.segments, m,
                                   with_seed(cfg.train, train_seed));
  out.final_loss = trained.final_loss();
  out.wall_time = trained.wall_time;
  out.loss_history = trained.loss_history;
  out.schedule = trained.final_params;
  for (const auto& p : predict_batch(model, out.schedule, data.inputs, m, cfg.train.exec)) {
    out.predictions.push_back(p.value);
  }

  {
    CsvFile csv(cfg.out / "loss_curve.csv", {"iter", "mse"});
    for (std::size_t i = 0; i < out.loss_history.size(); ++i) {
      csv.row({std::to_string(i), fmt(out.loss_history[i])});
    }
  }
  {
    std::vector<std::string> header;
    const int arity = f.arity();
    for (int a = 0; a < arity; ++a) header.push_back(arity == 1 ? "x" : "x" + std::to_string(a + 1));
    for (const char* h : {"y_true_normalized", "y_pred", "y_true_raw", "y_pred_raw"}) {
      header.emplace_back(h);
    }
    CsvFile csv(cfg.out / "fit.csv", header);
    const auto& ds = out.dataset;
    for (std::size_t k = 0; k < ds.size(); ++k) {
      std::vector<std::string> row;
      for (double v : ds.inputs[k]) row.push_back(fmt(v));
      row.push_back(fmt(ds.normalized_targets[k]));
      row.push_back(fmt(out.predictions[k]));
      row.push_back(fmt(ds.raw_targets[k]));
      row.push_back(fmt(ds.denormalize(out.predictions[k])));
      csv.row(row);
    }
  }
  {
    std::vector<std::string> header{"segment", "t_start"};
    for (const auto& label : model.control_labels()) header.push_back("theta_" + label);
    CsvFile csv(cfg.out / "pulses.csv", header);
    const auto& values = out.schedule.values();
    for (int j = 0; j < out.schedule.segments(); ++j) {
      std::vector<std::string> row{std::to_string(j), fmt(j * out.schedule.dt())};
      for (int k = 0; k < out.schedule.n_controls(); ++k) row.push_back(fmt(values(j, k)));
      csv.row(row);
    }
  }
  nlohmann::json result = result_header(cfg);
  result["final_loss"] = out.final_loss;
  result["initial_loss"] = out.loss_history.front();
  result["wall_time"] = out.wall_time;
  result["train_seed"] = train_seed;
  result["n_samples"] = out.dataset.size();
  result["norm_map"] = {{"a", out.dataset.a}, {"b", out.dataset.b}};
  write_json(cfg.out / "result.json", result);
  return out;
}

std::vector<SweepRow> summarize_sweep(const std::vector<SweepRow>& rows) {
  std::map<std::pair<double, double>, std::vector<const SweepRow*>> cells;
  for (const auto& r : rows) cells[{r.duration, r.dt}].push_back(&r);
  std::vector<SweepRow> out;
  for (const auto& [key, members] : cells) {
    std::vector<double> losses;
    for (const auto* r : members) losses.push_back(r->final_loss);
    SweepRow s = *members.front();
    s.final_loss = median(losses);
    s.seed = 0;
    out.push_back(s);
  }
  return out;
}

std::vector<SweepRow> run_duration_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.durations.empty() || cfg.dts.empty()) throw Error("sweep lists must be nonempty");
  const PulseModel model = model_from_json(cfg.model);
  const Observable m = observable_from_spec(cfg.observable, model.n_qubits());
  const TargetFunction f = TargetFunction::parse(cfg.function);
  const TrainingSet data = make_dataset(cfg, f, m).training_set();
  for (double t : cfg.durations) {
    for (double dt : cfg.dts) check_amplitude_count(segments_for(t, dt), model.n_controls());
  }
  ensure_out(cfg);

  // Common random numbers across sampling periods: each seed draws its
  // initial pulse on the coarsest grid and every finer grid starts from the
  // exact refinement of it, so cells of one seed differ only in dt.
  const double coarse_dt = *std::max_element(cfg.dts.begin(), cfg.dts.end());
  std::vector<SweepRow> rows;
  for (double dt : cfg.dts) {
    for (double t : cfg.durations) {
      const int k = segments_for(t, dt);
      const int k_coarse = segments_for(t, coarse_dt);
      if (k % k_coarse != 0) {
        throw Error("dt " + fmt(dt) + " does not refine the coarsest dt " + fmt(coarse_dt));
      }
      for (int s = 0; s < cfg.seeds; ++s) {
        const auto seed = derive_seed(cfg.seed, {kSweepStream, static_cast<std::uint64_t>(s)});
        const TrainConfig tcfg = with_seed(cfg.train, seed);
        const PulseSchedule init =
            random_schedule(t, k_coarse, model.n_controls(), tcfg).refined(k / k_coarse);
        const auto trained = train_pulse_from(model, data, init, m, tcfg);
        rows.push_back({t, dt, k, trained.final_loss(), seed});
      }
    }
  }

  {
    CsvFile csv(cfg.out / "sweep.csv", {"T", "dt", "K", "final_loss", "seed"});
    for (const auto& r : rows) {
      csv.row({fmt(r.duration), fmt(r.dt), std::to_string(r.segments), fmt(r.final_loss),
               std::to_string(r.seed)});
    }
  }
  const auto summary = summarize_sweep(rows);
  {
    CsvFile csv(cfg.out / "sweep_summary.csv", {"T", "dt", "K", "median_loss"});
    for (const auto& r : summary) {
      csv.row({fmt(r.duration), fmt(r.dt), std::to_string(r.segments), fmt(r.final_loss)});
    }
  }
  nlohmann::json result = result_header(cfg);
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& r : rows) {
    cells.push_back({{"T", r.duration}, {"dt", r.dt}, {"K", r.segments},
                     {"final_loss", r.final_loss}, {"seed", r.seed}});
  }
  result["cells"] = cells;
  write_json(cfg.out / "result.json", result);
  return rows;
}

std::vector<QuantileSummary> run_poly_family(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.durations.empty() || cfg.dts.size() != 1) {
    throw Error("poly-family needs a duration list and exactly one dt");
  }
  const PulseModel model = model_from_json(cfg.model);
  if (model.n_inputs() != 1) throw Error("poly-family needs a single-input model");
  const Observable m = observable_from_spec(cfg.observable, model.n_qubits());
  const double dt = cfg.dts.front();
  for (double t : cfg.durations) check_amplitude_count(segments_for(t, dt), model.n_controls());
  ensure_out(cfg);

  std::map<double, std::vector<double>> losses;
  nlohmann::json cells = nlohmann::json::array();
  {
    CsvFile csv(cfg.out / "stats.csv", {"T", "seed", "final_loss"});
    for (int i = 0; i < cfg.count; ++i) {
      const auto poly_seed =
          derive_seed(cfg.seed, {kPolyCoefficientStream, static_cast<std::uint64_t>(i)});
      const TargetFunction f = TargetFunction::poly8_random(poly_seed);
      const TrainingSet data = make_dataset(cfg, f, m).training_set();
      const auto train_seed =
          derive_seed(cfg.seed, {kPolyTrainStream, static_cast<std::uint64_t>(i)});
      for (double t : cfg.durations) {
        const auto trained = train_pulse(model, data, t, segments_for(t, dt), m,
                                         with_seed(cfg.train, train_seed));
        losses[t].push_back(trained.final_loss());
        csv.row({fmt(t), std::to_string(poly_seed), fmt(trained.final_loss())});
        cells.push_back({{"T", t}, {"seed", poly_seed}, {"final_loss", trained.final_loss()}});
      }
    }
  }
  std::vector<QuantileSummary> summary;
  for (const auto& [t, v] : losses) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    summary.push_back({t, median(v), quantile(v, 0.25), quantile(v, 0.75), mean});
  }
  {
    CsvFile csv(cfg.out / "stats_summary.csv", {"T", "median", "q25", "q75", "mean"});
    for (const auto& s : summary) {
      csv.row({fmt(s.duration), fmt(s.median), fmt(s.q25), fmt(s.q75), fmt(s.mean)});
    }
  }
  nlohmann::json result = result_header(cfg);
  result["cells"] = cells;
  write_json(cfg.out / "result.json", result);
  return summary;
}

std::vector<WidthRow> run_width_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.durations.empty() || cfg.qubits.empty()) throw Error("width sweep lists must be nonempty");
  const double dt = cfg.dts.empty() ? 0.01 : cfg.dts.front();
  const TargetFunction f = TargetFunction::parse(cfg.function);
  if (f.arity() != 1) throw Error("width sweep needs a univariate target");
  ensure_out(cfg);

  std::vector<WidthRow> rows;
  for (int n : cfg.qubits) {
    const PulseModel model = build_circular_model(n);
    const Observable m = observable_from_spec(cfg.observable, n);
    const TrainingSet data = make_dataset(cfg, f, m).training_set();
    const auto seed = derive_seed(cfg.seed, {kWidthStream, static_cast<std::uint64_t>(n)});
    for (double t : cfg.durations) {
      const int k = segments_for(t, dt);
      check_amplitude_count(k, model.n_controls());
      const auto trained = train_pulse(model, data, t, k, m, with_seed(cfg.train, seed));
      rows.push_back({n, t, trained.final_loss()});
    }
  }
  {
    CsvFile csv(cfg.out / "width.csv", {"n", "T", "final_loss"});
    for (const auto& r : rows) csv.row({std::to_string(r.n_qubits), fmt(r.duration), fmt(r.final_loss)});
  }
  nlohmann::json result = result_header(cfg);
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& r : rows) cells.push_back({{"n", r.n_qubits}, {"T", r.duration}, {"final_loss", r.final_loss}});
  result["cells"] = cells;
  write_json(cfg.out / "result.json", result);
  return rows;
}

std::vector<CompareRow> run_gate_vs_pulse(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.physical_units) {
    throw Error("compare-gate-pulse requires \"physical_units\": true");
  }
  const PulseModel model = model_from_json(cfg.model);
  if (model.n_inputs() != 1) throw Error("comparison needs a single-input pulse model");
  const Observable m = observable_from_spec(cfg.observable, model.n_qubits());
  const TargetFunction f = TargetFunction::parse(cfg.function);
  const TrainingSet data = make_dataset(cfg, f, m).training_set();
  ensure_out(cfg);

  // Pulse runs are trained in units where theta_max = 1: amplitudes are
  // capped at 1, and a dimensionless duration T maps to T / theta_max ns.
  TrainConfig pulse_cfg = cfg.train;
  pulse_cfg.amplitude_cap = 1.0;

  std::vector<CompareRow> rows;
  for (int b : cfg.blocks) {
    // Gate training outcomes vary widely between initial angles; the
    // baseline is the median-loss run over several restarts.
    std::vector<GateTrainResult> runs;
    for (int r = 0; r < cfg.gate_restarts; ++r) {
      const auto gate_seed = derive_seed(
          cfg.seed, {kGateStream, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(r)});
      runs.push_back(train_gate(b, data, with_seed(cfg.gate_train, gate_seed)));
    }
    std::sort(runs.begin(), runs.end(), [](const auto& x, const auto& y) {
      return x.final_loss() < y.final_loss();
    });
    const GateTrainResult& gate = runs[(runs.size() - 1) / 2];
    const double gate_loss = gate.final_loss();
    const double gate_time = gate_time_lower_bound(gate.final_params, cfg.theta_max);
    const TrainConfig pcfg = with_seed(
        pulse_cfg, derive_seed(cfg.seed, {kPulseStream, static_cast<std::uint64_t>(b)}));

    // Matched parameters: K = b, grow dt until the gate loss is reached.
    CompareRow matched{b, gate_loss, gate_time, b, 0.0, 0.0, "matched"};
    const int steps = static_cast<int>(std::floor(cfg.dt_max / cfg.dt_step + 1e-9));
    for (int s = 1; s <= steps; ++s) {
      const double t = b * s * cfg.dt_step;
      const auto trained = train_pulse(model, data, t, b, m, pcfg);
      matched.pulse_loss = trained.final_loss();
      matched.pulse_time = t / cfg.theta_max;
      if (trained.final_loss() <= gate_loss) break;
    }
    rows.push_back(matched);

    // Unconstrained: fine sampling period, shrink T while the gate loss is
    // still reached. Falls back to the matched result.
    CompareRow free = matched;
    free.variant = "unconstrained";
    if (matched.pulse_loss <= gate_loss) {
      double t = matched.pulse_time * cfg.theta_max;
      for (int s = 0; s < cfg.max_shrink_steps; ++s) {
        t *= cfg.shrink;
        const int k = std::max(1, static_cast<int>(std::lround(t / cfg.fine_dt)));
        const double t_grid = k * cfg.fine_dt;
        check_amplitude_count(k, model.n_controls());
        const auto trained = train_pulse(model, data, t_grid, k, m, pcfg);
        if (trained.final_loss() > gate_loss) break;
        free.pulse_segments = k;
        free.pulse_loss = trained.final_loss();
        free.pulse_time = t_grid / cfg.theta_max;
      }
    }
    rows.push_back(free);
  }
  {
    CsvFile csv(cfg.out / "compare.csv", {"blocks", "gate_loss", "T_G", "K_pulse", "pulse_loss",
                                          "T_P", "T_P_over_T_G", "variant"});
    for (const auto& r : rows) {
      csv.row({std::to_string(r.blocks), fmt(r.gate_loss), fmt(r.gate_time),
               std::to_string(r.pulse_segments), fmt(r.pulse_loss), fmt(r.pulse_time),
               fmt(r.ratio()), r.variant});
    }
  }
  nlohmann::json result = result_header(cfg);
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& r : rows) {
    cells.push_back({{"blocks", r.blocks}, {"gate_loss", r.gate_loss}, {"T_G", r.gate_time},
                     {"K_pulse", r.pulse_segments}, {"pulse_loss", r.pulse_loss},
                     {"T_P", r.pulse_time}, {"variant", r.variant}});
  }
  result["cells"] = cells;
  write_json(cfg.out / "result.json", result);
  return rows;
}

int run_controllability(const ExperimentConfig& cfg) {
  if (cfg.degree_cutoff < 1) throw Error("degree cutoff must be at least 1");
  const PulseModel model = model_from_json(cfg.model);
  const ModelCheck check = check_model(model, cfg.degree_cutoff);
  nlohmann::json report = to_json(check);
  report["schema_version"] = kSchemaVersion;
  report["model"] = cfg.model;
  ensure_out(cfg);
  write_json(cfg.out / "controllability.json", report);
  return check.ensemble.full() ? 0 : 2;
}

}  // namespace pqnn
