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

#ifndef BBP_COST_MODEL_HPP
#define BBP_COST_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bbp/core.hpp"
#include "bbp/storage.hpp"

namespace bbp {

/// Vertex and edge counts of a graph, real or hypothetical.
struct GraphSummary {
  std::string name;
  std::uint64_t v_count = 0;
  std::uint64_t e_count = 0;
};

inline const std::vector<GraphSummary>& preset_graphs() {
  static const std::vector<GraphSummary> presets = {
      {"livejournal", 4'847'571, 68'993'773},
      {"twitter", 41'652'230, 1'468'365'182},
      {"yahooweb", 1'413'511'391, 6'636'600'779},
  };
  return presets;
}

inline std::optional<GraphSummary> find_preset(std::string_view name) {
  for (const auto& g : preset_graphs()) {
    if (g.name == name) return g;
  }
  return std::nullopt;
}

/// Graph with the given vertex count and average out-degree k.
inline GraphSummary density_summary(std::uint64_t v_count, double k) {
  return {"k=" + std::to_string(k), v_count, static_cast<std::uint64_t>(std::llround(k * static_cast<double>(v_count)))};
}

/// Bytes moved per full pass under each strategy. Seeks are counted apart
/// from bytes; divide bytes by B for disk blocks.
struct CostBreakdown {
  std::uint64_t beta = 1;
  double dbp_bytes = 0;
  double spp_bytes = 0;
  double bbp_bytes = 0;
  double shuffle_bytes = 0;  // |E-hat| = |E| (phi + psi)
  double dbp_seeks = 0;
  double spp_seeks = 0;
  double bbp_seeks = 0;
  std::uint64_t dense_blocks = 0;
  std::uint64_t sparse_blocks = 0;

  double blocks(double bytes, const CostParams& params) const { return bytes / static_cast<double>(params.disk_block); }
};

/// Share of one block in the dense and streaming totals. Summed over all
/// beta^2 blocks these reproduce the whole-graph formulas exactly.
struct BlockCost {
  double dbp = 0;
  double spp = 0;
};

inline BlockCost block_cost(double xi, double theta_p, double theta_q, const CostParams& params, double beta) {
  const double phi = static_cast<double>(params.phi);
  const double psi = static_cast<double>(params.psi);
  BlockCost c;
  c.dbp = theta_p * phi + theta_q * phi / beta + xi * psi;
  c.spp = (theta_p + theta_q) * phi / beta + 2.0 * xi * (phi + psi) + xi * psi;
  return c;
}

/// (beta + 1)|V|phi + |E|psi bytes and beta^2 seeks.
inline CostBreakdown dbp_cost(const GraphSummary& g, const CostParams& params,
                              std::optional<std::uint64_t> beta = std::nullopt) {
  CostBreakdown c;
  c.beta = beta.value_or(g.v_count == 0 ? 1 : compute_beta(g.v_count, params));
  const double b = static_cast<double>(c.beta);
  c.dbp_bytes = (b + 1.0) * static_cast<double>(g.v_count) * static_cast<double>(params.phi) +
                static_cast<double>(g.e_count) * static_cast<double>(params.psi);
  c.dbp_seeks = b * b;
  return c;
}

/// 2|V|phi + |E|psi + 2|E-hat| bytes and beta seeks.
inline CostBreakdown spp_cost(const GraphSummary& g, const CostParams& params,
                              std::optional<std::uint64_t> beta = std::nullopt) {
  CostBreakdown c;
  c.beta = beta.value_or(g.v_count == 0 ? 1 : compute_beta(g.v_count, params));
  const double e = static_cast<double>(g.e_count);
  c.shuffle_bytes = e * static_cast<double>(params.phi + params.psi);
  c.spp_bytes = 2.0 * static_cast<double>(g.v_count) * static_cast<double>(params.phi) +
                e * static_cast<double>(params.psi) + 2.0 * c.shuffle_bytes;
  c.spp_seeks = static_cast<double>(c.beta);
  return c;
}

/// Per-block minimum over a concrete block table.
inline CostBreakdown bbp_cost(const GraphManifest& m, const CostParams& params) {
  const GraphSummary g{"", m.v_count, m.e_count};
  CostBreakdown c = dbp_cost(g, params, m.beta);
  const CostBreakdown s = spp_cost(g, params, m.beta);
  c.spp_bytes = s.spp_bytes;
  c.spp_seeks = s.spp_seeks;
  c.shuffle_bytes = s.shuffle_bytes;
  const double beta = static_cast<double>(m.beta);
  for (std::uint64_t p = 0; p < m.beta; ++p) {
    for (std::uint64_t q = 0; q < m.beta; ++q) {
      const BlockCost bc = block_cost(static_cast<double>(m.block(p, q).edge_count),
                                      static_cast<double>(m.interval(p).length),
                                      static_cast<double>(m.interval(q).length), params, beta);
      if (bc.spp < bc.dbp) {
        c.bbp_bytes += bc.spp;
        c.bbp_seeks += 1.0 / beta;
        ++c.sparse_blocks;
      } else {
        c.bbp_bytes += bc.dbp;
        c.bbp_seeks += 1.0;
        ++c.dense_blocks;
      }
    }
  }
  return c;
}

/// All three strategies on a graph whose edges spread evenly over the
/// blocks: xi = |E| / beta^2 and theta = |V| / beta for every block.
inline CostBreakdown uniform_cost(const GraphSummary& g, const CostParams& params,
                                  std::optional<std::uint64_t> beta = std::nullopt) {
  CostBreakdown c = dbp_cost(g, params, beta);
  const CostBreakdown s = spp_cost(g, params, c.beta);
  c.spp_bytes = s.spp_bytes;
  c.spp_seeks = s.spp_seeks;
  c.shuffle_bytes = s.shuffle_bytes;
  const double b = static_cast<double>(c.beta);
  const double blocks = b * b;
  const double xi = static_cast<double>(g.e_count) / blocks;
  const double theta = static_cast<double>(g.v_count) / b;
  const bool sparse = theta > 0 && classify_block(xi, theta, static_cast<double>(params.phi),
                                                  static_cast<double>(params.psi), b) == BlockKind::Sparse;
  c.bbp_bytes = sparse ? c.spp_bytes : c.dbp_bytes;
  c.bbp_seeks = sparse ? b : blocks;
  (sparse ? c.sparse_blocks : c.dense_blocks) = c.beta * c.beta;
  return c;
}

/// One unit reads and writes every vertex once and reads every edge once.
inline std::uint64_t t_cost(std::uint64_t v_count, std::uint64_t e_count) { return 2 * v_count + e_count; }

struct SweepRow {
  std::uint64_t memory = 0;
  CostBreakdown cost;

  /// Strategy BBP picks for the uniform block at this budget.
  BlockKind selection() const { return cost.sparse_blocks > 0 ? BlockKind::Sparse : BlockKind::Dense; }
};

/// Budgets from lo to hi (inclusive), spaced evenly in log scale with
/// `per_doubling` samples per factor of two.
inline std::vector<std::uint64_t> log_spaced_memories(std::uint64_t lo, std::uint64_t hi, unsigned per_doubling) {
  require(lo > 0 && lo <= hi, ErrorKind::Usage, "memory range must be positive and ascending");
  require(per_doubling >= 1, ErrorKind::Usage, "need at least one sample per doubling");
  const double octaves = std::log2(static_cast<double>(hi) / static_cast<double>(lo));
  const auto steps = static_cast<std::uint64_t>(std::llround(octaves * per_doubling));
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i <= steps; ++i) {
    const double m = static_cast<double>(lo) * std::exp2(static_cast<double>(i) / per_doubling);
    out.push_back(std::min<std::uint64_t>(hi, static_cast<std::uint64_t>(std::llround(m))));
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

/// Uniform-density costs at every budget; beta follows each budget.
inline std::vector<SweepRow> sweep(const GraphSummary& g, CostParams params, const std::vector<std::uint64_t>& memories) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < memories.size(); ++i) {
    require(memories[i] > 0 && (i == 0 || memories[i] > memories[i - 1]), ErrorKind::Usage,
            "memory range must be positive and ascending");
    params.memory = memories[i];
    rows.push_back({memories[i], uniform_cost(g, params)});
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "memory_bytes,beta,dbp_bytes,spp_bytes,bbp_bytes,dbp_seeks,spp_seeks\n";
  for (const auto& r : rows) {
    out << r.memory << ',' << r.cost.beta << ',' << r.cost.dbp_bytes << ',' << r.cost.spp_bytes << ','
        << r.cost.bbp_bytes << ',' << r.cost.dbp_seeks << ',' << r.cost.spp_seeks << '\n';
  }
  return out.str();
}

}  // namespace bbp

#endif  // BBP_COST_MODEL_HPP
