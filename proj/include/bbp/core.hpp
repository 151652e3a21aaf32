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

#ifndef BBP_CORE_HPP
#define BBP_CORE_HPP

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "bbp/error.hpp"

namespace bbp {

using VertexId = std::uint64_t;
using EdgeCount = std::uint64_t;

/// A contiguous range of vertex ids. Intervals are numbered 0..beta-1 and
/// all of them except the trailing ones share the length ceil(|V| / beta).
struct Interval {
  std::uint64_t index = 0;
  VertexId start = 0;
  std::uint64_t length = 0;

  VertexId end() const { return start + length; }
  bool contains(VertexId v) const { return v >= start && v < start + length; }
  bool empty() const { return length == 0; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Block G(p, q): edges from interval p into interval q.
struct BlockId {
  std::uint64_t p = 0;
  std::uint64_t q = 0;

  friend auto operator<=>(const BlockId&, const BlockId&) = default;
};

enum class BlockKind : std::uint8_t { Dense, Sparse };

inline std::string_view to_string(BlockKind kind) {
  return kind == BlockKind::Dense ? "dense" : "sparse";
}

struct BlockInfo {
  BlockId block;
  EdgeCount edge_count = 0;
  BlockKind kind = BlockKind::Sparse;

  friend bool operator==(const BlockInfo&, const BlockInfo&) = default;
};

/// Byte sizes and budget that drive partitioning and the I/O cost model.
struct CostParams {
  std::uint64_t phi = 8;            // bytes per vertex value
  std::uint64_t psi = 8;            // bytes per serialized edge
  std::uint64_t threads = 1;
  std::uint64_t memory = 1ull << 30;
  std::uint64_t disk_block = 4096;  // transfer unit of the cost model

  void validate() const {
    require(phi > 0 && psi > 0 && threads > 0 && memory > 0 && disk_block > 0,
            ErrorKind::Usage, "cost parameters must be strictly positive");
    // Checked in wide arithmetic; phi * (threads + 1) cannot wrap in 128 bits.
    const unsigned __int128 floor =
        static_cast<unsigned __int128>(phi) * (static_cast<unsigned __int128>(threads) + 1);
    if (static_cast<unsigned __int128>(memory) < floor) {
      fail(ErrorKind::Usage, "memory budget " + std::to_string(memory) +
                                 " is below phi*(threads+1) = one vertex per buffer");
    }
  }
};

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return a / b + (a % b != 0 ? 1 : 0);
}

/// Number of vertex intervals: ceil(phi * (T + 1) * |V| / M), at least 1.
inline std::uint64_t compute_beta(std::uint64_t v_count, const CostParams& params) {
  require(v_count >= 1, ErrorKind::Usage, "compute_beta needs at least one vertex");
  params.validate();
  std::uint64_t per_vertex = 0;
  std::uint64_t product = 0;
  if (__builtin_mul_overflow(params.phi, params.threads + 1, &per_vertex) ||
      __builtin_mul_overflow(per_vertex, v_count, &product)) {
    const int bits = std::bit_width(params.phi) + std::bit_width(params.threads + 1) +
                     std::bit_width(v_count);
    fail(ErrorKind::Usage, "phi*(threads+1)*|V| overflows 64-bit arithmetic; it needs up to " +
                               std::to_string(bits) + " bits");
  }
  const std::uint64_t beta = ceil_div(product, params.memory);
  return beta == 0 ? 1 : beta;
}

/// Length shared by every full interval.
inline std::uint64_t interval_length(std::uint64_t v_count, std::uint64_t beta) {
  require(beta >= 1, ErrorKind::Usage, "beta must be at least 1");
  return ceil_div(v_count, beta);
}

inline Interval interval_at(std::uint64_t index, std::uint64_t v_count, std::uint64_t beta) {
  require(index < beta, ErrorKind::Usage, "interval index out of range");
  const std::uint64_t width = interval_length(v_count, beta);
  Interval iv;
  iv.index = index;
  iv.start = std::min(index * width, v_count);
  iv.length = std::min(width, v_count - iv.start);
  return iv;
}

inline std::uint64_t interval_of(VertexId v, std::uint64_t v_count, std::uint64_t beta) {
  if (v >= v_count) {
    fail(ErrorKind::Usage, "vertex " + std::to_string(v) + " out of range for |V| = " +
                               std::to_string(v_count));
  }
  return v / interval_length(v_count, beta);
}

/// SPP/DBP cost ratio of one block:
///   1/beta + (2 * xi / theta) * (1 + psi / phi)
/// theta is the source interval length. Deciding on ratio < 1 is the same as
/// comparing the per-block SPP and DBP byte costs directly.
inline double spp_dbp_ratio(double xi, double theta, double phi, double psi, double beta) {
  require(theta > 0 && beta >= 1 && phi > 0 && psi > 0 && xi >= 0, ErrorKind::Usage,
          "spp_dbp_ratio needs theta > 0, beta >= 1 and positive byte sizes");
  return 1.0 / beta + (2.0 * xi / theta) * (1.0 + psi / phi);
}

inline BlockKind classify_block(double xi, double theta, double phi, double psi, double beta) {
  return spp_dbp_ratio(xi, theta, phi, psi, beta) < 1.0 ? BlockKind::Sparse : BlockKind::Dense;
}

/// Classification of block (p, q) for a concrete graph. An empty source
/// interval carries no edges and is recorded as sparse.
inline BlockKind classify_block(EdgeCount xi, const Interval& source, const CostParams& params,
                                std::uint64_t beta) {
  if (source.empty()) return BlockKind::Sparse;
  return classify_block(static_cast<double>(xi), static_cast<double>(source.length),
                        static_cast<double>(params.phi), static_cast<double>(params.psi),
                        static_cast<double>(beta));
}

enum class LayoutMode : std::uint8_t { Bbp, Dense, Sparse };

inline std::string_view to_string(LayoutMode mode) {
  switch (mode) {
    case LayoutMode::Bbp: return "bbp";
    case LayoutMode::Dense: return "dense";
    case LayoutMode::Sparse: return "sparse";
  }
  return "bbp";
}

inline LayoutMode parse_layout_mode(std::string_view text) {
  if (text == "bbp") return LayoutMode::Bbp;
  if (text == "dense") return LayoutMode::Dense;
  if (text == "sparse") return LayoutMode::Sparse;
  fail(ErrorKind::Usage, "unknown mode '" + std::string(text) + "' (expected dense, sparse or bbp)");
}

inline BlockKind classify_for_mode(LayoutMode mode, EdgeCount xi, const Interval& source,
                                   const CostParams& params, std::uint64_t beta) {
  switch (mode) {
    case LayoutMode::Dense: return BlockKind::Dense;
    case LayoutMode::Sparse: return BlockKind::Sparse;
    case LayoutMode::Bbp: break;
  }
  return classify_block(xi, source, params, beta);
}

}  // namespace bbp

#endif  // BBP_CORE_HPP
