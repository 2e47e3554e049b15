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

#include <algorithm>

#include "dpamimo/common.hpp"
#include "dpamimo/model.hpp"
#include "dpamimo/rng.hpp"

namespace dpamimo::test {

inline model::SystemConfig small_config() {
  model::SystemConfig cfg;
  cfg.m_t = cfg.m_r = 2;
  cfg.n_t_sub = cfg.n_r_sub = 4;
  cfg.n_t_beam = cfg.n_r_beam = 8;
  cfg.l_indiv = 2;
  cfg.l_common = 1;
  cfg.n_s = 1;
  return cfg;
}

inline cmat random_matrix(Rng& rng, Index rows, Index cols) { return complex_normal_matrix(rng, rows, cols, 1.0); }

inline bool contains(const IndexSet& set, Index v) { return std::binary_search(set.begin(), set.end(), v); }

}  // namespace dpamimo::test
