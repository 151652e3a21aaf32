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

#ifndef BBP_PROGRAMS_HPP
#define BBP_PROGRAMS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>

#include "bbp/io.hpp"
#include "bbp/program.hpp"
#include "bbp/storage.hpp"

namespace bbp {

/// Unnormalized PageRank: v = (1 - d) + d * sum(u / deg(u)). Dangling
/// vertices contribute nothing.
struct PageRank {
  using value_type = double;

  double damping = 0.85;

  bool needs_degrees() const { return true; }
  double initial_value(VertexId) const { return 1.0; }
  double neutral() const { return 0.0; }
  double initialize(VertexId, double) const { return 0.0; }
  double scatter(VertexId, double value, std::uint64_t degree) const {
    return degree == 0 ? 0.0 : value / static_cast<double>(degree);
  }
  void process(double& acc, double contribution, EdgeData) const { acc += contribution; }
  double gather(double a, double b) const { return a + b; }
  double apply(VertexId, double acc) const { return (1.0 - damping) + damping * acc; }
};

/// Min-label propagation. On a symmetrized graph the fixed point labels
/// each vertex with the smallest id in its component.
template <class Label = std::uint32_t>
struct Wcc {
  using value_type = Label;
  static_assert(std::is_unsigned_v<Label>);

  Label initial_value(VertexId v) const { return static_cast<Label>(v); }
  Label neutral() const { return std::numeric_limits<Label>::max(); }
  Label initialize(VertexId, Label previous) const { return previous; }
  void process(Label& acc, Label label, EdgeData) const { acc = std::min(acc, label); }
  Label gather(Label a, Label b) const { return std::min(a, b); }
};

/// y[v] = sum over edges (u, v) of w(u, v) * x[u]; w = 1 when unweighted.
/// Weights are stored as 4-byte float or 8-byte double payloads.
struct Spmv {
  using value_type = double;

  bool weighted = false;
  unsigned weight_bytes = 8;

  bool uses_edge_data() const { return weighted; }
  double neutral() const { return 0.0; }
  double initialize(VertexId, double) const { return 0.0; }
  void process(double& acc, double x, EdgeData data) const {
    if (!weighted) {
      acc += x;
    } else if (weight_bytes == 8) {
      acc += load_le<double>(data.data()) * x;
    } else {
      acc += static_cast<double>(load_le<float>(data.data())) * x;
    }
  }
  double gather(double a, double b) const { return a + b; }
};

/// SpMV bound to a graph's payload width.
inline Spmv make_spmv(const GraphManifest& m, bool weighted) {
  if (weighted) {
    const auto payload = m.payload_bytes();
    require(payload != 0, ErrorKind::Config, "weighted SpMV needs a graph with edge weights");
    require(payload == 4 || payload == 8, ErrorKind::Config, "edge weights must be 4-byte float or 8-byte double");
    return Spmv{true, static_cast<unsigned>(payload)};
  }
  return Spmv{};
}

}  // namespace bbp

#endif  // BBP_PROGRAMS_HPP
