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

// pqnn: command line front end for the experiment drivers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pqnn/experiments.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool full_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config, "Experiment JSON file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out, "Output directory (overrides the config)");
  cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)");
  cmd->add_flag("--full-scale", flags.full_scale,
                "Apply the config's full_scale overrides");
}

pqnn::ExperimentConfig resolve(const CommonFlags& flags) {
  pqnn::ExperimentConfig cfg =
      flags.config.empty() ? pqnn::ExperimentConfig::from_json(nlohmann::json::object(),
                                                               flags.full_scale)
                           : pqnn::ExperimentConfig::load(flags.config, flags.full_scale);
  if (!flags.out.empty()) cfg.out = flags.out;
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.source["seed"] = *flags.seed;
  }
  return cfg;
}

// A model argument is either a preset name or a path to a JSON description.
nlohmann::json model_argument(const std::string& text) {
  if (fs::is_regular_file(text)) {
    std::ifstream in(text);
    nlohmann::json j;
    in >> j;
    return j;
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-based quantum neural network simulator and trainer"};
  app.require_subcommand(1);

  CommonFlags fit_flags, sweep_flags, family_flags, width_flags, compare_flags, ctrl_flags;
  auto* fit = app.add_subcommand("fit", "Fit one target function");
  add_common(fit, fit_flags, true);
  auto* sweep = app.add_subcommand("sweep-duration", "Final loss versus T for several dt");
  add_common(sweep, sweep_flags, true);
  auto* family = app.add_subcommand("poly-family", "Loss statistics over random polynomials");
  add_common(family, family_flags, true);
  auto* width = app.add_subcommand("sweep-width", "Final loss versus T for circular models");
  add_common(width, width_flags, true);
  auto* compare = app.add_subcommand("compare-gate-pulse", "Gate versus pulse operation time");
  add_common(compare, compare_flags, true);

  auto* ctrl = app.add_subcommand("controllability", "Lie-algebra rank checks for a model");
  add_common(ctrl, ctrl_flags, false);
  std::string model_text;
  std::optional<int> dcut;
  ctrl->add_option("--model", model_text, "Preset name or model JSON file");
  ctrl->add_option("--dcut", dcut, "Degree cutoff of the ensemble check")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      const auto r = pqnn::run_fit(resolve(fit_flags));
      std::printf("final_loss %.17g  wall_time %.3f s\n", r.final_loss, r.wall_time);
    } else if (*sweep) {
      for (const auto& r : pqnn::summarize_sweep(pqnn::run_duration_sweep(resolve(sweep_flags)))) {
        std::printf("T %-6g dt %-6g median_loss %.6g\n", r.duration, r.dt, r.final_loss);
      }
    } else if (*family) {
      for (const auto& s : pqnn::run_poly_family(resolve(family_flags))) {
        std::printf("T %-6g median %.6g  q25 %.6g  q75 %.6g  mean %.6g\n", s.duration, s.median,
                    s.q25, s.q75, s.mean);
      }
    } else if (*width) {
      for (const auto& r : pqnn::run_width_sweep(resolve(width_flags))) {
        std::printf("n %d  T %-6g final_loss %.6g\n", r.n_qubits, r.duration, r.final_loss);
      }
    } else if (*compare) {
      for (const auto& r : pqnn::run_gate_vs_pulse(resolve(compare_flags))) {
        std::printf("blocks %-3d %-13s gate_loss %.3g  T_G %.2f ns  pulse_loss %.3g  "
                    "T_P %.2f ns  ratio %.3f\n",
                    r.blocks, r.variant.c_str(), r.gate_loss, r.gate_time, r.pulse_loss,
                    r.pulse_time, r.ratio());
      }
    } else if (*ctrl) {
      auto cfg = resolve(ctrl_flags);
      if (!model_text.empty()) cfg.model = model_argument(model_text);
      if (dcut) cfg.degree_cutoff = *dcut;
      const int code = pqnn::run_controllability(cfg);
      std::ifstream in(cfg.out / "controllability.json");
      std::cout << in.rdbuf();
      return code;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pqnn: %s\n", e.what());
    return 1;
  }
  return 0;
}
