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

#include "dpamimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <cmath>
#include <thread>

#include "dpamimo/precoding.hpp"
#include "dpamimo/recovery.hpp"
#include "dpamimo/rng.hpp"

namespace dpamimo::harness {

namespace {

template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::clamp(workers, 1, std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct Moments {
  double mean = 0.0;
  double std_err = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  const double n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std_err = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

// Bayesian estimators need lambda > 0; noiseless runs get a tiny floor.
double solver_lambda(const SystemConfig& cfg, const cvec& y) {
  if (cfg.noise_var > 0.0) return cfg.noise_var;
  const double energy = y.size() > 0 ? y.squaredNorm() / static_cast<double>(y.size()) : 0.0;
  return energy > 0.0 ? 1e-10 * energy : 1e-12;
}

using PointFn = std::function<std::vector<double>(const TrialRunner&, int)>;

// Runs every trial of every sweep point and collects one sample per estimator.
SweepResult run_sweep(const ExperimentSpec& spec, int workers, const std::string& metric,
                      const PointFn& trial_fn, bool log_mean) {
  spec.validate();
  SweepResult result;
  for (double value : spec.sweep_values) {
    std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(spec.trials));
    std::vector<std::string> failures(static_cast<std::size_t>(spec.trials));
    try {
      const SystemConfig cfg = apply_sweep(spec.base, spec.sweep_axis, value);
      const TrialRunner runner(cfg, spec.sbl_prune_tol);
      parallel_for(spec.trials, workers, [&](int t) {
        try {
          per_trial[t] = trial_fn(runner, t);
        } catch (const Error& e) {
          failures[t] = std::string(e.kind()) + ": " + e.what();
        }
      });
    } catch (const Error& e) {
      result.errors.push_back({value, std::string(e.kind()) + ": " + e.what()});
      continue;
    }
    const auto failed = std::find_if(failures.begin(), failures.end(),
                                     [](const std::string& s) { return !s.empty(); });
    if (failed != failures.end()) {
      result.errors.push_back({value, "trial " + std::to_string(failed - failures.begin()) + ": " + *failed});
      continue;
    }
    for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
      std::vector<double> samples;
      for (const auto& row : per_trial) samples.push_back(row[e]);
      const Moments m = moments(samples);
      ResultRow row;
      row.sweep_value = value;
      row.estimator = to_string(spec.estimators[e]);
      row.metric = metric;
      row.trials = spec.trials;
      if (log_mean) {
        row.value = recovery::to_db(m.mean);
        row.std_err = m.mean > 0.0 ? 10.0 / std::log(10.0) * m.std_err / m.mean : 0.0;
      } else {
        row.value = m.mean;
        row.std_err = m.std_err;
      }
      result.rows.push_back(row);
      result.samples.push_back(std::move(samples));
    }
  }
  return result;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (sweep_values.empty()) throw ConfigError("sweep_values must be nonempty");
  for (std::size_t i = 1; i < sweep_values.size(); ++i)
    if (!(sweep_values[i] > sweep_values[i - 1]))
      throw ConfigError("sweep_values must be strictly increasing");
  const bool integral = sweep_axis == SweepAxis::kLCommon || sweep_axis == SweepAxis::kNBeam ||
                        sweep_axis == SweepAxis::kNSub;
  if (integral)
    for (double v : sweep_values)
      if (v != std::round(v) || v < 0.0)
        throw ConfigError("sweep axis " + to_string(sweep_axis) + " needs nonnegative integer values");
  if (estimators.empty()) throw ConfigError("estimators must be nonempty");
  for (std::size_t i = 0; i < estimators.size(); ++i)
    for (std::size_t j = i + 1; j < estimators.size(); ++j)
      if (estimators[i] == estimators[j]) throw ConfigError("duplicate estimator " + to_string(estimators[i]));
  if (sbl_prune_tol < 0.0 || sbl_prune_tol >= 1.0) throw ConfigError("sbl_prune_tol must be in [0, 1)");
}

SystemConfig apply_sweep(const SystemConfig& base, SweepAxis axis, double value) {
  SystemConfig cfg = base;
  const auto count = static_cast<Index>(std::llround(value));
  switch (axis) {
    case SweepAxis::kPnrDb:
      cfg.pilot_power = base.noise_var * std::pow(10.0, value / 10.0);
      break;
    case SweepAxis::kDnrDb:
      cfg.data_power = base.noise_var * std::pow(10.0, value / 10.0);
      break;
    case SweepAxis::kLCommon:
      cfg.l_common = count;
      break;
    case SweepAxis::kNBeam:
      cfg.n_t_beam = cfg.n_r_beam = count;
      break;
    case SweepAxis::kNSub:
      cfg.n_t_sub = cfg.n_r_sub = count;
      break;
  }
  cfg.validate();
  return cfg;
}

TrialRunner::TrialRunner(const SystemConfig& cfg, double prune_tol)
    : cfg_(cfg),
      prune_tol_(prune_tol),
      plan_(sounding::design_pilot_plan(cfg)),
      phi_eff_(sounding::sensing_matrix(plan_, cfg).scaled(std::sqrt(cfg.pilot_power))) {}

TrialRunner::Draw TrialRunner::draw(std::uint64_t seed, int trial) const {
  Rng channel_rng = make_stream(seed, static_cast<std::uint64_t>(trial), Stream::kChannel);
  Rng noise_rng = make_stream(seed, static_cast<std::uint64_t>(trial), Stream::kNoise);
  Draw d;
  const model::SupportSet supports = model::draw_supports(cfg_, channel_rng);
  d.channel = model::draw_channel(cfg_, supports, channel_rng);
  d.y = sounding::sound_channel(d.channel.h, plan_, cfg_, noise_rng).y;
  return d;
}

TrialEstimate TrialRunner::estimate(Estimator est, const Draw& draw) const {
  const auto start = std::chrono::steady_clock::now();
  TrialEstimate out;
  if (est == Estimator::kPerfectCsi) {
    out.h_hat = draw.channel.h;
    out.support_size = static_cast<Index>(draw.channel.x_true.size());
    return out;
  }
  const double n_meas = static_cast<double>(cfg_.measurement_count());
  const Index k = cfg_.pair_count();
  const double lambda = solver_lambda(cfg_, draw.y);
  recovery::SparseEstimate se;
  switch (est) {
    case Estimator::kOmp:
      se = recovery::omp(phi_eff_.dense(), draw.y, static_cast<int>(k * cfg_.l_indiv),
                         n_meas * cfg_.noise_var);
      break;
    case Estimator::kJomp: {
      recovery::JompOptions opt;
      opt.t1 = static_cast<int>(std::max<Index>(1, cfg_.l_common - 1));
      opt.t2 = static_cast<int>((cfg_.l_indiv + 1 - opt.t1) * k);
      opt.delta1 = n_meas * cfg_.noise_var;
      opt.delta2 = 0.1 * n_meas * cfg_.noise_var;
      se = recovery::jomp(phi_eff_.dense(), draw.y, cfg_.block_size(), opt);
      break;
    }
    case Estimator::kSbl: {
      recovery::SblOptions opt;
      opt.lambda = lambda;
      opt.prune_tol = prune_tol_;
      se = recovery::sbl(phi_eff_, draw.y, opt);
      break;
    }
    case Estimator::kJsblL2: {
      recovery::JsblOptions opt;
      opt.lambda = lambda;
      opt.prune_tol = prune_tol_;
      se = recovery::jsbl_l2(phi_eff_, draw.y, cfg_.block_size(), opt);
      break;
    }
    case Estimator::kPerfectCsi:
      break;
  }
  recovery::attach_channel(se, cfg_);
  out.h_hat = std::move(se.h_hat);
  out.iterations = se.iterations;
  out.support_size = static_cast<Index>(se.support_full_est.size());
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

SweepResult run_nmse_sweep(const ExperimentSpec& spec, int workers) {
  const PointFn fn = [&](const TrialRunner& runner, int t) {
    const TrialRunner::Draw d = runner.draw(runner.config().seed, t);
    std::vector<double> out;
    for (Estimator e : spec.estimators)
      out.push_back(recovery::nmse_linear(d.channel.h, runner.estimate(e, d).h_hat));
    return out;
  };
  return run_sweep(spec, workers, "nmse_db", fn, true);
}

SweepResult run_se_sweep(const ExperimentSpec& spec, int workers) {
  const PointFn fn = [&](const TrialRunner& runner, int t) {
    const SystemConfig& cfg = runner.config();
    const TrialRunner::Draw d = runner.draw(cfg.seed, t);
    std::vector<double> out;
    for (Estimator e : spec.estimators) {
      const cmat h_design = runner.estimate(e, d).h_hat;
      cmat f_t, w_t;
      if (spec.precoder == Precoder::kOptimalDigital) {
        precoding::DigitalSolution sol = precoding::optimal_digital(h_design, cfg.n_s, cfg.data_power, cfg.noise_var);
        f_t = std::move(sol.f);
        w_t = std::move(sol.w);
      } else {
        precoding::HybridDesign hd = precoding::group_sic(
            h_design, cfg.m_t, cfg.m_r, cfg.n_s, cfg.data_power, cfg.noise_var,
            spec.water_filling ? precoding::PowerAllocation::kWaterFilling : precoding::PowerAllocation::kEqual);
        f_t = std::move(hd.f_t);
        w_t = std::move(hd.w_t);
      }
      // A design on a low-rank estimate can leave W_t rank deficient; the
      // receiver then works in span(W_t).
      const cmat w_span = precoding::range_basis(w_t);
      out.push_back(w_span.cols() == 0 ? 0.0
                                       : precoding::spectral_efficiency(d.channel.h, f_t, w_span, cfg.data_power,
                                                                        cfg.noise_var, cfg.n_s));
    }
    return out;
  };
  return run_sweep(spec, workers, "se_bps_hz", fn, false);
}

}  // namespace dpamimo::harness
