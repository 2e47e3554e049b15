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

#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "dpamimo/matrix_file.hpp"
#include "dpamimo/precoding.hpp"
#include "dpamimo/sounding.hpp"
#include "helpers.hpp"

using namespace dpamimo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dpamimo_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("matrix file round trip is exact") {
  Rng rng(1);
  io::MatrixFile f;
  f.kind = "test";
  f.params = {{"alpha", "1.5"}, {"name", "x"}};
  f.matrices = {{"a", test::random_matrix(rng, 3, 4)}, {"empty", cmat(0, 2)}, {"tiny", cmat::Constant(1, 1, cplx(1e-300, -3.0))}};
  std::stringstream ss;
  io::write_matrix_file(f, ss);
  const io::MatrixFile g = io::read_matrix_file(ss);
  CHECK(g.kind == "test");
  CHECK(g.params == f.params);
  CHECK(g.matrix("a") == f.matrix("a"));
  CHECK(g.matrix("empty").rows() == 0);
  CHECK(g.matrix("empty").cols() == 2);
  CHECK(g.matrix("tiny") == f.matrix("tiny"));
  CHECK(g.param("alpha") == "1.5");
  CHECK_THROWS_AS(g.matrix("missing"), IoError);
  CHECK_THROWS_AS(g.param("missing"), IoError);
}

TEST_CASE("malformed matrix files") {
  auto parse = [](const std::string& text) {
    std::stringstream ss(text);
    return io::read_matrix_file(ss);
  };
  CHECK_THROWS_AS(parse("not-a-header\n"), IoError);
  CHECK_THROWS_AS(parse("dpamimo-matrix-file 1\nkind x\nmatrix a 1 2\n1 0\nend\n"), IoError);
  CHECK_THROWS_AS(parse("dpamimo-matrix-file 1\nkind x\nbogus\nend\n"), IoError);
  CHECK_THROWS_AS(parse("dpamimo-matrix-file 1\nkind x\n"), IoError);
  CHECK_THROWS_AS(io::read_matrix_file(fs::path("/nonexistent/file.txt")), IoError);
}

TEST_CASE("pilot plan export and import") {
  model::SystemConfig cfg = test::small_config();
  cfg.seed = 12345678901234ULL;
  cfg.var_nlos = 0.1 + 1e-17;
  const sounding::PilotPlan plan = sounding::design_pilot_plan(cfg);
  const fs::path path = scratch("plan.txt");
  sounding::export_pilot_plan(plan, cfg, path);
  const sounding::ImportedPlan in = sounding::import_pilot_plan(path);
  CHECK(in.plan.phi == plan.phi);
  CHECK(in.plan.f == plan.f);
  CHECK(in.plan.w_rf == plan.w_rf);
  CHECK(in.plan.column_map == plan.column_map);
  CHECK(in.cfg.seed == cfg.seed);
  CHECK(in.cfg.var_nlos == cfg.var_nlos);
  CHECK(in.cfg.n_t_beam == cfg.n_t_beam);
  CHECK(sounding::config_params(in.cfg) == sounding::config_params(cfg));
}

TEST_CASE("channel export feeds standalone precoding") {
  model::SystemConfig cfg;
  Rng rng(2);
  const model::ChannelRealization ch = model::draw_channel(cfg, model::draw_supports(cfg, rng), rng);
  const fs::path path = scratch("channel.txt");
  sounding::export_channel(ch.h, cmat(), cfg, path);
  const cmat h = precoding::import_channel(path);
  CHECK(h == ch.h);
  CHECK_THROWS_AS(precoding::import_channel(path, "h_hat"), IoError);
  CHECK_THROWS_AS(sounding::import_pilot_plan(path), IoError);
  const precoding::HybridDesign hd = precoding::group_sic(h, cfg.m_t, cfg.m_r, 2, 10.0, 1.0);
  CHECK(precoding::spectral_efficiency(h, hd.f_t, hd.w_t, 10.0, 1.0, 2) > 0.0);
}

}  // TEST_SUITE
