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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dpamimo/harness.hpp"

namespace dpamimo::harness {

namespace {

template <typename E, std::size_t N>
E lookup(const std::pair<E, const char*> (&table)[N], const std::string& name, const char* what) {
  for (const auto& [e, s] : table)
    if (name == s) return e;
  throw ConfigError(std::string("unknown ") + what + " '" + name + "'");
}

template <typename E, std::size_t N>
std::string name_of(const std::pair<E, const char*> (&table)[N], E e) {
  for (const auto& [v, s] : table)
    if (v == e) return s;
  return "?";
}

constexpr std::pair<SweepAxis, const char*> kAxes[] = {
    {SweepAxis::kPnrDb, "pnr_db"}, {SweepAxis::kDnrDb, "dnr_db"}, {SweepAxis::kLCommon, "l_common"},
    {SweepAxis::kNBeam, "n_beam"}, {SweepAxis::kNSub, "n_sub"}};
constexpr std::pair<Estimator, const char*> kEstimators[] = {
    {Estimator::kOmp, "omp"}, {Estimator::kSbl, "sbl"}, {Estimator::kJomp, "jomp"},
    {Estimator::kJsblL2, "jsbl_l2"}, {Estimator::kPerfectCsi, "perfect_csi"}};
constexpr std::pair<Precoder, const char*> kPrecoders[] = {
    {Precoder::kGroupSic, "group_sic"}, {Precoder::kOptimalDigital, "optimal_digital"}};

const char* kCsvHeader = "sweep_value,estimator,metric,value,trials,stderr";

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void read_config(const nlohmann::json& j, SystemConfig& cfg) {
  for (const auto& [key, val] : j.items()) {
    Index* ints[] = {&cfg.m_t, &cfg.m_r, &cfg.n_t_sub, &cfg.n_r_sub, &cfg.n_t_beam,
                     &cfg.n_r_beam, &cfg.n_s, &cfg.l_indiv, &cfg.l_common};
    const char* int_names[] = {"m_t", "m_r", "n_t_sub", "n_r_sub", "n_t_beam",
                               "n_r_beam", "n_s", "l_indiv", "l_common"};
    double* reals[] = {&cfg.var_los, &cfg.var_nlos, &cfg.pilot_power, &cfg.data_power, &cfg.noise_var};
    const char* real_names[] = {"var_los", "var_nlos", "pilot_power", "data_power", "noise_var"};
    bool found = false;
    for (std::size_t i = 0; i < std::size(ints) && !found; ++i)
      if (key == int_names[i]) *ints[i] = val.get<Index>(), found = true;
    for (std::size_t i = 0; i < std::size(reals) && !found; ++i)
      if (key == real_names[i]) *reals[i] = val.get<double>(), found = true;
    if (key == "seed") cfg.seed = val.get<std::uint64_t>(), found = true;
    if (!found) throw ConfigError("unknown base field '" + key + "'");
  }
}

}  // namespace

std::string to_string(SweepAxis axis) { return name_of(kAxes, axis); }
std::string to_string(Estimator est) { return name_of(kEstimators, est); }
std::string to_string(Precoder p) { return name_of(kPrecoders, p); }
SweepAxis parse_axis(const std::string& name) { return lookup(kAxes, name, "sweep axis"); }
Estimator parse_estimator(const std::string& name) { return lookup(kEstimators, name, "estimator"); }
Precoder parse_precoder(const std::string& name) { return lookup(kPrecoders, name, "precoder"); }

ExperimentSpec parse_spec(const std::string& json_text) {
  ExperimentSpec spec;
  try {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (!j.is_object()) throw ConfigError("experiment spec must be a JSON object");
    for (const auto& [key, val] : j.items()) {
      if (key == "base") read_config(val, spec.base);
      else if (key == "sweep_axis") spec.sweep_axis = parse_axis(val.get<std::string>());
      else if (key == "sweep_values") spec.sweep_values = val.get<std::vector<double>>();
      else if (key == "estimators") {
        spec.estimators.clear();
        for (const auto& e : val) spec.estimators.push_back(parse_estimator(e.get<std::string>()));
      } else if (key == "precoder") spec.precoder = parse_precoder(val.get<std::string>());
      else if (key == "trials") spec.trials = val.get<int>();
      else if (key == "output_path") spec.output_path = val.get<std::string>();
      else if (key == "water_filling") spec.water_filling = val.get<bool>();
      else if (key == "sbl_prune_tol") spec.sbl_prune_tol = val.get<double>();
      else throw ConfigError("unknown spec field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed spec: ") + e.what());
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

void emit_csv(std::vector<ResultRow> rows, std::ostream& out) {
  if (rows.empty()) throw ConfigError("emit_csv: no rows");
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.sweep_value, a.estimator, a.metric) < std::tie(b.sweep_value, b.estimator, b.metric);
  });
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows)
    out << fmt6(r.sweep_value) << ',' << r.estimator << ',' << r.metric << ',' << fmt6(r.value) << ','
        << r.trials << ',' << fmt6(r.std_err) << '\n';
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  emit_csv(rows, out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<ResultRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError("csv: missing or unexpected header");
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw IoError("csv line " + std::to_string(line_no) + ": expected 6 fields");
    try {
      rows.push_back({std::stod(f[0]), f[1], f[2], std::stod(f[3]), std::stoi(f[4]), std::stod(f[5])});
    } catch (const std::logic_error&) {
      throw IoError("csv line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return rows;
}

std::vector<ResultRow> parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return parse_csv(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void emit_plot_script(const std::vector<ResultRow>& rows, const std::filesystem::path& script_path,
                      const std::filesystem::path& csv_path, const std::string& x_label) {
  std::set<std::string> estimators;
  for (const ResultRow& r : rows) estimators.insert(r.estimator);
  if (estimators.empty()) throw ConfigError("emit_plot_script: no estimators to plot");

  namespace fs = std::filesystem;
  const fs::path dir = fs::absolute(script_path).parent_path();
  const std::string csv = fs::absolute(csv_path).lexically_relative(dir).generic_string();
  const std::string png = script_path.stem().string() + ".png";

  std::ofstream out(script_path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + script_path.string() + "'");
  out << "# gnuplot " << script_path.filename().string() << "\n"
      << "set terminal pngcairo size 800,600\n"
      << "set output '" << png << "'\n"
      << "set datafile separator ','\n"
      << "set grid\n"
      << "set key top right\n"
      << "set xlabel '" << x_label << "'\n"
      << "set ylabel '" << rows.front().metric << "'\n"
      << "plot \\\n";
  std::size_t i = 0;
  for (const std::string& e : estimators) {
    out << "  '" << csv << "' every ::1 using 1:(strcol(2) eq '" << e
        << "' ? $4 : 1/0) with linespoints title '" << e << "'"
        << (++i < estimators.size() ? ", \\\n" : "\n");
  }
  if (!out) throw IoError("write failed for '" + script_path.string() + "'");
}

}  // namespace dpamimo::harness
