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

#include "dpamimo/sounding.hpp"

#include <cmath>
#include <sstream>

#include "dpamimo/matrix_file.hpp"

namespace dpamimo::sounding {

namespace {

void check_side(Index subarrays, Index n_sub, Index n_beam) {
  if (subarrays < 1 || n_sub < 1 || n_beam < 1) throw DimensionError("pilots: empty dimension");
  if (n_beam % n_sub != 0)
    throw DimensionError("pilots: beam count must be a multiple of the block count");
  if (n_beam / n_sub > subarrays)
    throw DimensionError("pilots: beams per block exceed the subarray count");
}

// RF matrix with n_sub sub-blocks; sub-block p holds one column per subarray.
// rf_beam(i, p) is the n_sub-vector used by subarray i in sub-block p.
template <class BeamFn>
cmat assemble_rf(Index subarrays, Index n_sub, BeamFn rf_beam) {
  const Index tot = subarrays * n_sub;
  cmat rf = cmat::Zero(tot, tot);
  for (Index p = 0; p < n_sub; ++p)
    for (Index i = 0; i < subarrays; ++i)
      rf.block(i * n_sub, p * subarrays + i, n_sub, 1) = rf_beam(i, p);
  return rf;
}

cmat assemble_baseband(const std::vector<cmat>& blocks, Index subarrays) {
  const auto n_block = static_cast<Index>(blocks.size());
  const Index per = blocks.front().cols();
  cmat bb = cmat::Zero(n_block * subarrays, n_block * per);
  for (Index p = 0; p < n_block; ++p)
    bb.block(p * subarrays, p * per, subarrays, per) = blocks[static_cast<std::size_t>(p)];
  return bb;
}

SidePilots design_side(Index subarrays, Index n_sub, Index n_beam) {
  check_side(subarrays, n_sub, n_beam);
  const cmat dft = unitary_dft(n_sub);
  std::vector<cmat> shifted;
  for (Index i = 0; i < subarrays; ++i) shifted.push_back(circshift_columns(dft, i));
  SidePilots s;
  s.rf = assemble_rf(subarrays, n_sub, [&](Index i, Index p) -> cvec {
    return shifted[static_cast<std::size_t>(i)].col(p);
  });

  // U [I; 0] V^H with unitary DFT U (m x m) and V (r x r).
  const Index per = n_beam / n_sub;
  const cmat block = unitary_dft(subarrays).leftCols(per) * unitary_dft(per).adjoint();
  s.baseband = assemble_baseband(std::vector<cmat>(static_cast<std::size_t>(n_sub), block),
                                 subarrays);
  s.composite = s.rf * s.baseband;
  return s;
}

}  // namespace

SidePilots design_tx_pilots(const SystemConfig& cfg) {
  return design_side(cfg.m_t, cfg.n_t_sub, cfg.n_t_beam);
}

SidePilots design_rx_pilots(const SystemConfig& cfg) {
  return design_side(cfg.m_r, cfg.n_r_sub, cfg.n_r_beam);
}

SidePilots random_side_pilots(Index subarrays, Index n_sub, Index n_beam, Rng& rng) {
  check_side(subarrays, n_sub, n_beam);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n_sub));
  SidePilots s;
  s.rf = assemble_rf(subarrays, n_sub, [&](Index, Index) -> cvec {
    cvec v(n_sub);
    for (Index a = 0; a < n_sub; ++a) v[a] = std::polar(amp, phase(rng));
    return v;
  });
  const Index per = n_beam / n_sub;
  std::vector<cmat> blocks;
  for (Index p = 0; p < n_sub; ++p) blocks.push_back(complex_normal_matrix(rng, subarrays, per, 1.0));
  s.baseband = assemble_baseband(blocks, subarrays);
  s.composite = s.rf * s.baseband;
  for (Index j = 0; j < s.composite.cols(); ++j) {
    const double nrm = s.composite.col(j).norm();
    s.composite.col(j) /= nrm;
    s.baseband.col(j) /= nrm;
  }
  return s;
}

namespace {

cmat tx_factor(const PilotPlan& plan, const SystemConfig& cfg) {
  return (model::tx_transform(cfg).adjoint() * plan.f).transpose();
}

cmat rx_factor(const PilotPlan& plan, const SystemConfig& cfg) {
  return plan.w.adjoint() * model::rx_transform(cfg);
}

}  // namespace

cmat kronecker_measurement(const PilotPlan& plan, const SystemConfig& cfg) {
  return kron(tx_factor(plan, cfg), rx_factor(plan, cfg));
}

cmat measurement_matrix(const PilotPlan& plan, const SystemConfig& cfg) {
  const cmat q = kronecker_measurement(plan, cfg);
  const Index total = cfg.block_size() * cfg.pair_count();
  if (q.cols() != total) throw DimensionError("measurement_matrix: pilot/config mismatch");
  cmat phi(q.rows(), total);
  for (Index i = 0; i < total; ++i) phi.col(i) = q.col(model::block_to_vec_index(i, cfg));
  return phi;
}

PilotPlan assemble_plan(const SidePilots& tx, const SidePilots& rx, const SystemConfig& cfg) {
  if (tx.composite.rows() != cfg.n_t_tot() || rx.composite.rows() != cfg.n_r_tot())
    throw DimensionError("assemble_plan: pilot dimensions do not match config");
  PilotPlan plan;
  plan.f_rf = tx.rf;
  plan.f_bb = tx.baseband;
  plan.f = tx.composite;
  plan.w_rf = rx.rf;
  plan.w_bb = rx.baseband;
  plan.w = rx.composite;
  const Index total = cfg.block_size() * cfg.pair_count();
  plan.column_map.resize(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i)
    plan.column_map[static_cast<std::size_t>(i)] = model::block_to_vec_index(i, cfg);
  plan.phi = measurement_matrix(plan, cfg);
  return plan;
}

PilotPlan design_pilot_plan(const SystemConfig& cfg) {
  return assemble_plan(design_tx_pilots(cfg), design_rx_pilots(cfg), cfg);
}

PilotPlan random_pilot_plan(const SystemConfig& cfg, Rng& rng) {
  const SidePilots tx = random_side_pilots(cfg.m_t, cfg.n_t_sub, cfg.n_t_beam, rng);
  const SidePilots rx = random_side_pilots(cfg.m_r, cfg.n_r_sub, cfg.n_r_beam, rng);
  return assemble_plan(tx, rx, cfg);
}

SensingMatrix sensing_matrix(const PilotPlan& plan, const SystemConfig& cfg) {
  KroneckerLayout layout;
  layout.tx_factor = tx_factor(plan, cfg);
  layout.rx_factor = rx_factor(plan, cfg);
  const Index nrt = cfg.n_r_tot();
  for (Index v : plan.column_map) {
    layout.tx_col.push_back(v / nrt);
    layout.rx_col.push_back(v % nrt);
  }
  return SensingMatrix(plan.phi, std::move(layout));
}

double total_coherence(const cmat& m) {
  if (m.size() == 0) throw DimensionError("total_coherence: empty matrix");
  // ||M^H M||_F^2 = ||M M^H||_F^2; use whichever Gram is smaller.
  const cmat gram = m.rows() < m.cols() ? cmat(m * m.adjoint()) : cmat(m.adjoint() * m);
  const double col4 = m.colwise().squaredNorm().array().square().sum();
  return std::max(0.0, gram.squaredNorm() - col4);
}

SoundingObservation sound_channel(const cmat& h, const PilotPlan& plan, const SystemConfig& cfg,
                                  Rng& rng) {
  if (h.rows() != plan.w.rows() || h.cols() != plan.f.rows())
    throw DimensionError("sound_channel: channel shape does not match pilots");
  const Index ntb = plan.f.cols();
  const Index nrb = plan.w.cols();
  const Index snap = cfg.m_r;  // beams combined simultaneously
  if (nrb % snap != 0) throw DimensionError("sound_channel: n_r_beam must be a multiple of m_r");

  const cmat clean = std::sqrt(cfg.pilot_power) * (plan.w.adjoint() * h * plan.f);
  cmat y = clean;
  if (cfg.noise_var > 0.0) {
    for (Index p = 0; p < ntb; ++p)
      for (Index q = 0; q < nrb / snap; ++q) {
        const cvec z = complex_normal_matrix(rng, h.rows(), 1, cfg.noise_var);
        y.block(q * snap, p, snap, 1) += plan.w.middleCols(q * snap, snap).adjoint() * z;
      }
  }
  SoundingObservation obs;
  obs.y = vec(y);
  obs.noise_var_effective = cfg.noise_var * plan.w.colwise().squaredNorm().mean();
  return obs;
}

std::map<std::string, std::string> config_params(const SystemConfig& cfg) {
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  return {{"m_t", std::to_string(cfg.m_t)},
          {"m_r", std::to_string(cfg.m_r)},
          {"n_t_sub", std::to_string(cfg.n_t_sub)},
          {"n_r_sub", std::to_string(cfg.n_r_sub)},
          {"n_t_beam", std::to_string(cfg.n_t_beam)},
          {"n_r_beam", std::to_string(cfg.n_r_beam)},
          {"n_s", std::to_string(cfg.n_s)},
          {"l_indiv", std::to_string(cfg.l_indiv)},
          {"l_common", std::to_string(cfg.l_common)},
          {"var_los", num(cfg.var_los)},
          {"var_nlos", num(cfg.var_nlos)},
          {"pilot_power", num(cfg.pilot_power)},
          {"data_power", num(cfg.data_power)},
          {"noise_var", num(cfg.noise_var)},
          {"seed", std::to_string(cfg.seed)}};
}

SystemConfig config_from_params(const std::map<std::string, std::string>& params) {
  SystemConfig cfg;
  auto get = [&](const char* name) -> const std::string& {
    auto it = params.find(name);
    if (it == params.end()) throw IoError(std::string("missing config field '") + name + "'");
    return it->second;
  };
  try {
    cfg.m_t = std::stol(get("m_t"));
    cfg.m_r = std::stol(get("m_r"));
    cfg.n_t_sub = std::stol(get("n_t_sub"));
    cfg.n_r_sub = std::stol(get("n_r_sub"));
    cfg.n_t_beam = std::stol(get("n_t_beam"));
    cfg.n_r_beam = std::stol(get("n_r_beam"));
    cfg.n_s = std::stol(get("n_s"));
    cfg.l_indiv = std::stol(get("l_indiv"));
    cfg.l_common = std::stol(get("l_common"));
    cfg.var_los = std::stod(get("var_los"));
    cfg.var_nlos = std::stod(get("var_nlos"));
    cfg.pilot_power = std::stod(get("pilot_power"));
    cfg.data_power = std::stod(get("data_power"));
    cfg.noise_var = std::stod(get("noise_var"));
    cfg.seed = std::stoull(get("seed"));
  } catch (const std::logic_error& e) {
    throw IoError(std::string("malformed config field: ") + e.what());
  }
  return cfg;
}

void export_pilot_plan(const PilotPlan& plan, const SystemConfig& cfg,
                       const std::filesystem::path& path) {
  io::MatrixFile file;
  file.kind = "pilot-plan";
  file.params = config_params(cfg);
  file.matrices = {{"f_rf", plan.f_rf}, {"f_bb", plan.f_bb}, {"f", plan.f},
                   {"w_rf", plan.w_rf}, {"w_bb", plan.w_bb}, {"w", plan.w},
                   {"phi", plan.phi}};
  io::write_matrix_file(file, path);
}

void export_channel(const cmat& h, const cmat& h_hat, const SystemConfig& cfg,
                    const std::filesystem::path& path) {
  io::MatrixFile file;
  file.kind = "channel";
  file.params = config_params(cfg);
  file.matrices = {{"h", h}};
  if (h_hat.size() > 0) file.matrices.emplace("h_hat", h_hat);
  io::write_matrix_file(file, path);
}

ImportedPlan import_pilot_plan(const std::filesystem::path& path) {
  const io::MatrixFile file = io::read_matrix_file(path);
  if (file.kind != "pilot-plan") throw IoError("'" + path.string() + "' is not a pilot plan");
  ImportedPlan out;
  out.cfg = config_from_params(file.params);
  out.plan.f_rf = file.matrix("f_rf");
  out.plan.f_bb = file.matrix("f_bb");
  out.plan.f = file.matrix("f");
  out.plan.w_rf = file.matrix("w_rf");
  out.plan.w_bb = file.matrix("w_bb");
  out.plan.w = file.matrix("w");
  out.plan.phi = file.matrix("phi");
  const Index total = out.cfg.block_size() * out.cfg.pair_count();
  if (out.plan.phi.cols() != total) throw IoError("pilot plan: phi does not match config");
  for (Index i = 0; i < total; ++i)
    out.plan.column_map.push_back(model::block_to_vec_index(i, out.cfg));
  return out;
}

}  // namespace dpamimo::sounding
