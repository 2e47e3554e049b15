// Copyright 2026 The dpamimo Authors
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

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dpamimo/harness.hpp"
#include "dpamimo/precoding.hpp"
#include "dpamimo/recovery.hpp"
#include "dpamimo/sounding.hpp"

namespace fs = std::filesystem;
using namespace dpamimo;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out;
  int workers = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* opt = cmd->add_option("--config", f.config, "experiment spec (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--seed", f.seed, "master seed (overrides the spec)");
  cmd->add_option("--trials", f.trials, "trials per sweep point (overrides the spec)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output path");
  cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
}

harness::ExperimentSpec resolve_spec(const CommonFlags& f) {
  harness::ExperimentSpec spec;
  if (!f.config.empty()) spec = harness::load_spec(f.config);
  if (f.seed) spec.base.seed = *f.seed;
  if (f.trials) spec.trials = *f.trials;
  if (!f.out.empty()) spec.output_path = f.out;
  return spec;
}

int run_sweep(const CommonFlags& f, bool se) {
  const harness::ExperimentSpec spec = resolve_spec(f);
  if (spec.output_path.empty()) throw ConfigError("no output path (use --out or output_path)");
  const harness::SweepResult res = se ? harness::run_se_sweep(spec, f.workers)
                                      : harness::run_nmse_sweep(spec, f.workers);
  for (const auto& e : res.errors)
    std::cerr << "warning: point " << e.sweep_value << ": " << e.message << '\n';
  if (res.rows.empty()) throw ConfigError("every sweep point failed");

  const fs::path csv = spec.output_path;
  harness::emit_csv(res.rows, csv);
  fs::path script = csv;
  script.replace_extension(".gp");
  harness::emit_plot_script(res.rows, script, csv, harness::to_string(spec.sweep_axis));
  std::cout << "wrote " << csv.string() << " (" << res.rows.size() << " rows), " << script.string() << '\n';
  return res.errors.empty() ? 0 : 3;
}

int design_pilots(const CommonFlags& f) {
  const harness::ExperimentSpec spec = resolve_spec(f);
  const model::SystemConfig& cfg = spec.base;
  cfg.validate();
  const sounding::PilotPlan plan = sounding::design_pilot_plan(cfg);
  std::printf("measurements %lld\ncolumns %lld\ntotal_coherence %.10g\n",
              static_cast<long long>(plan.phi.rows()), static_cast<long long>(plan.phi.cols()),
              sounding::total_coherence(plan.phi));
  if (!f.out.empty()) {
    sounding::export_pilot_plan(plan, cfg, f.out);
    std::printf("wrote %s\n", f.out.c_str());
  }
  return 0;
}

int single_run(const CommonFlags& f, int trial) {
  harness::ExperimentSpec spec = resolve_spec(f);
  const model::SystemConfig& cfg = spec.base;
  cfg.validate();
  const harness::TrialRunner runner(cfg, spec.sbl_prune_tol);
  const auto draw = runner.draw(cfg.seed, trial);
  std::printf("seed %llu trial %d\n", static_cast<unsigned long long>(cfg.seed), trial);
  std::printf("common_support");
  for (Index b : draw.channel.supports.common) std::printf(" %lld", static_cast<long long>(b));
  std::printf("\nchannel_energy %.6g\n", draw.channel.h.squaredNorm());

  const std::vector<harness::Estimator> all = {harness::Estimator::kOmp, harness::Estimator::kJomp,
                                               harness::Estimator::kSbl, harness::Estimator::kJsblL2,
                                               harness::Estimator::kPerfectCsi};
  const auto& ests = spec.estimators.empty() ? all : spec.estimators;
  std::printf("%-12s %10s %6s %8s %9s %10s %10s\n", "estimator", "nmse_db", "iters", "support",
              "seconds", "se_sic", "se_digital");
  cmat jsbl_hat;
  for (harness::Estimator e : ests) {
    const harness::TrialEstimate est = runner.estimate(e, draw);
    if (e == harness::Estimator::kJsblL2) jsbl_hat = est.h_hat;
    const auto hd = precoding::group_sic(est.h_hat, cfg.m_t, cfg.m_r, cfg.n_s, cfg.data_power, cfg.noise_var);
    const auto od = precoding::optimal_digital(est.h_hat, cfg.n_s, cfg.data_power, cfg.noise_var);
    std::printf("%-12s %10.4f %6d %8lld %9.4f %10.4f %10.4f\n", harness::to_string(e).c_str(),
                recovery::nmse_db(draw.channel.h, est.h_hat), est.iterations,
                static_cast<long long>(est.support_size), est.seconds,
                precoding::spectral_efficiency(draw.channel.h, hd.f_t, hd.w_t, cfg.data_power, cfg.noise_var, cfg.n_s),
                precoding::spectral_efficiency(draw.channel.h, od.f, od.w, cfg.data_power, cfg.noise_var, cfg.n_s));
  }
  if (!f.out.empty()) {
    sounding::export_channel(draw.channel.h, jsbl_hat, cfg, f.out);
    std::printf("wrote %s\n", f.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DPA-MIMO channel estimation and hybrid precoding simulator"};
  app.require_subcommand(1);
  CommonFlags flags;
  int trial = 0;
  auto* nmse = app.add_subcommand("nmse-sweep", "Monte Carlo NMSE sweep to CSV");
  auto* se = app.add_subcommand("se-sweep", "Monte Carlo spectral-efficiency sweep to CSV");
  auto* pilots = app.add_subcommand("design-pilots", "design and export the pilot plan");
  auto* single = app.add_subcommand("single-run", "one trial with per-estimator diagnostics");
  add_common(nmse, flags, true);
  add_common(se, flags, true);
  add_common(pilots, flags, false);
  add_common(single, flags, false);
  single->add_option("--trial", trial, "trial index")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*nmse) return run_sweep(flags, false);
    if (*se) return run_sweep(flags, true);
    if (*pilots) return design_pilots(flags);
    return single_run(flags, trial);
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
  }
  return 1;
}
