/*
Copyright (c) 2026 The bbpgraph Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Library-facing helpers: build an on-disk graph from an in-memory edge list.

#ifndef BBP_TESTS_FIXTURES_HPP
#define BBP_TESTS_FIXTURES_HPP

#include <optional>
#include <string>

#include "bbp/bbp.hpp"
#include "oracles.hpp"

namespace fixture {

struct GraphSpec {
  std::uint64_t memory = 1u << 20;
  std::uint64_t threads = 1;
  std::uint64_t phi = 8;
  std::optional<std::uint64_t> v_count;
  bbp::LayoutMode mode = bbp::LayoutMode::Bbp;
  bool symmetrize = false;
};

inline bbp::CostParams cost_params(const GraphSpec& spec) {
  bbp::CostParams p;
  p.phi = spec.phi;
  p.threads = spec.threads;
  p.memory = spec.memory;
  return p;
}

/// Writes `edges` as a binary edge list under `dir` and preprocesses it into
/// `dir/name`.
inline bbp::PreprocessReport build(const oracle::TempDir& dir, const std::string& name, const oracle::EdgeList& edges,
                                   const GraphSpec& spec = {}) {
  const auto input = dir / (name + ".bin");
  oracle::write_binary_edges(input, edges);
  bbp::IngestOptions opt;
  opt.format = bbp::InputFormat::Binary;
  opt.v_count = spec.v_count;
  opt.mode = spec.mode;
  opt.symmetrize = spec.symmetrize;
  return bbp::preprocess(input, opt, cost_params(spec), dir / name);
}

}  // namespace fixture

#endif  // BBP_TESTS_FIXTURES_HPP
