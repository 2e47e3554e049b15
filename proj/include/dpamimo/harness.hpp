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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dpamimo/common.hpp"
#include "dpamimo/linalg.hpp"
#include "dpamimo/model.hpp"
#include "dpamimo/sounding.hpp"

namespace dpamimo::harness {

using model::SystemConfig;

enum class SweepAxis { kPnrDb, kDnrDb, kLCommon, kNBeam, kNSub };
enum class Estimator { kOmp, kSbl, kJomp, kJsblL2, kPerfectCsi };
enum class Precoder { kGroupSic, kOptimalDigital };

std::string to_string(SweepAxis axis);
std::string to_string(Estimator est);
std::string to_string(Precoder p);
SweepAxis parse_axis(const std::string& name);
Estimator parse_estimator(const std::string& name);
Precoder parse_precoder(const std::string& name);

struct ExperimentSpec {
  SystemConfig base;
  SweepAxis sweep_axis = SweepAxis::kPnrDb;
  std::vector<double> sweep_values;
  std::vector<Estimator> estimators;
  Precoder precoder = Precoder::kGroupSic;
  int trials = 200;
  std::string output_path;
  /// Exact water-filling in the Group-SIC digital precoder (equal power otherwise).
  bool water_filling = false;
  /// Relative pruning threshold for the Bayesian estimators (0 = off).
  double sbl_prune_tol = 0.0;

  /// Throws ConfigError; point-level config checks happen per sweep value.
  void validate() const;
};

/// base with the sweep axis set to `value`. PNR/DNR are relative to base.noise_var.
SystemConfig apply_sweep(const SystemConfig& base, SweepAxis axis, double value);

struct ResultRow {
  double sweep_value = 0.0;
  std::string estimator;
  std::string metric;  // "nmse_db" or "se_bps_hz"
  double value = 0.0;
  int trials = 0;
  double std_err = 0.0;

  bool operator==(const ResultRow&) const = default;
};

struct PointError {
  double sweep_value = 0.0;
  std::string message;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<PointError> errors;
  /// Per-trial samples keyed by (point, estimator) in row order: linear NMSE
  /// ratios for NMSE sweeps, bits/s/Hz for SE sweeps.
  std::vector<std::vector<double>> samples;
};

/// Channel estimate for one trial and estimator, plus solver diagnostics.
struct TrialEstimate {
  cmat h_hat;
  int iterations = 0;
  Index support_size = 0;
  double seconds = 0.0;
};

/// Everything shared by the trials of one sweep point: designed pilots and
/// the power-scaled sensing matrix. Read-only after construction.
class TrialRunner {
 public:
  explicit TrialRunner(const SystemConfig& cfg, double prune_tol = 0.0);

  struct Draw {
    model::ChannelRealization channel;
    cvec y;
  };

  /// Channel from the trial's channel stream, noise from its noise stream.
  Draw draw(std::uint64_t seed, int trial) const;
  TrialEstimate estimate(Estimator est, const Draw& draw) const;

  const SystemConfig& config() const { return cfg_; }
  const sounding::PilotPlan& plan() const { return plan_; }

 private:
  SystemConfig cfg_;
  double prune_tol_;
  sounding::PilotPlan plan_;
  SensingMatrix phi_eff_;
};

/// Monte Carlo NMSE sweep; deterministic in (spec, seed) for any worker count.
SweepResult run_nmse_sweep(const ExperimentSpec& spec, int workers = 1);

/// Monte Carlo SE sweep: beamformers designed on the estimate, SE on the true channel.
SweepResult run_se_sweep(const ExperimentSpec& spec, int workers = 1);

/// Loads an ExperimentSpec from JSON with the same field names ("base" holds
/// SystemConfig fields).
ExperimentSpec load_spec(const std::filesystem::path& path);
ExperimentSpec parse_spec(const std::string& json_text);

/// Header sweep_value,estimator,metric,value,trials,stderr; rows sorted by
/// (sweep_value, estimator); reals with 6 significant digits.
void emit_csv(std::vector<ResultRow> rows, std::ostream& out);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> parse_csv(std::istream& in);
std::vector<ResultRow> parse_csv(const std::filesystem::path& path);

/// gnuplot script drawing one series per estimator from `csv_path`, which is
/// referenced relative to the script's directory.
void emit_plot_script(const std::vector<ResultRow>& rows, const std::filesystem::path& script_path,
                      const std::filesystem::path& csv_path, const std::string& x_label = "");

}  // namespace dpamimo::harness
