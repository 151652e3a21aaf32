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

#ifndef BBP_WCC_HPP
#define BBP_WCC_HPP

#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "bbp/engine.hpp"
#include "bbp/programs.hpp"
#include "bbp/storage.hpp"

namespace bbp {

/// Disjoint sets over 0..n-1 with union by rank and full path compression.
/// `steps` counts parent-pointer traversals, for complexity checks.
class DisjointSet {
 public:
  explicit DisjointSet(std::uint64_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::uint64_t size() const { return parent_.size(); }
  std::uint64_t steps() const { return steps_; }

  std::uint64_t find(std::uint64_t v) {
    std::uint64_t root = v;
    while (parent_[root] != root) {
      root = parent_[root];
      ++steps_;
    }
    while (parent_[v] != root) {
      const std::uint64_t up = parent_[v];
      parent_[v] = root;
      v = up;
      ++steps_;
    }
    return root;
  }

  bool unite(std::uint64_t a, std::uint64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

  /// Relabels every set by its minimum member; afterwards parent(v) is that
  /// label for all v.
  void canonicalize() {
    std::vector<std::uint64_t> label(parent_.size(), kNone);
    for (std::uint64_t v = 0; v < parent_.size(); ++v) {
      const std::uint64_t r = find(v);
      if (label[r] == kNone) label[r] = v;
    }
    // Every vertex now points straight at its root.
    for (std::uint64_t v = 0; v < parent_.size(); ++v) parent_[v] = label[parent_[v]];
    std::fill(rank_.begin(), rank_.end(), 0);
  }

  std::uint64_t parent(std::uint64_t v) const { return parent_[v]; }

 private:
  static constexpr std::uint64_t kNone = ~std::uint64_t{0};
  std::vector<std::uint64_t> parent_;
  std::vector<std::uint8_t> rank_;
  std::uint64_t steps_ = 0;
};

/// Bytes of resident state union-find needs: one id and one rank per vertex.
inline std::uint64_t union_find_bytes(const GraphManifest& m) { return (m.id_bytes + 1ull) * m.v_count; }

struct WccResult {
  VertexVector labels;
  std::uint64_t passes = 0;
  std::vector<std::uint64_t> changes;  // labels changed per pass
  IoSnapshot io;
};

/// Single streaming pass over every edge file; edge direction is ignored.
/// Labels (min id per component) go to vectors/<output>.vec at id width.
inline WccResult wcc_union_find(const fs::path& graph_dir, std::optional<std::uint64_t> memory = std::nullopt,
                                std::string output = "wcc", std::size_t buffer_bytes = kDefaultBufferBytes) {
  IoCounters io;
  const GraphLayout layout(graph_dir);
  const GraphManifest m = load_manifest(layout.manifest(), io);
  const std::uint64_t budget = memory.value_or(m.memory);
  if (union_find_bytes(m) > budget) {
    fail(ErrorKind::Resource, "union-find needs " + std::to_string(union_find_bytes(m)) + " bytes for " +
                                  std::to_string(m.v_count) + " vertices, over the " + std::to_string(budget) +
                                  "-byte budget; use the iterative method (--wcc-method iterative)");
  }
  DisjointSet sets(m.v_count);
  const EdgeCodec codec = codec_for(m);
  auto absorb = [&](const fs::path& path) {
    EdgeStream stream(path, codec.record_bytes(), io, buffer_bytes);
    for (auto chunk = stream.next_chunk(); !chunk.empty(); chunk = stream.next_chunk()) {
      for (std::size_t off = 0; off < chunk.size(); off += codec.record_bytes()) {
        const VertexId u = load_id(chunk.data() + off, m.id_bytes);
        const VertexId v = load_id(chunk.data() + off + m.id_bytes, m.id_bytes);
        if (u >= m.v_count || v >= m.v_count) {
          fail(ErrorKind::Corruption, "'" + path.string() + "' holds vertex beyond |V|");
        }
        sets.unite(u, v);
      }
    }
  };
  for (std::uint64_t p = 0; p < m.beta; ++p) {
    if (m.partition_sparse_edges(p) > 0) absorb(layout.partition(p));
    for (std::uint64_t q = 0; q < m.beta; ++q) {
      const BlockInfo& b = m.block(p, q);
      if (b.kind == BlockKind::Dense && b.edge_count > 0) absorb(layout.dense_block(p, q));
    }
  }
  sets.canonicalize();

  auto labels = VertexVector::create(layout.vector(output), m.id_bytes, m.v_count);
  {
    OutputFile out(labels.path(), io, OutputFile::Mode::Update, 64 * 1024);
    std::vector<std::byte> raw(m.id_bytes);
    for (std::uint64_t v = 0; v < m.v_count; ++v) {
      store_id(raw.data(), sets.parent(v), m.id_bytes);
      out.write(raw);
    }
    out.close();
  }
  return {labels, 1, {}, io.snapshot()};
}

namespace detail {

/// Counts positions where two equally shaped vectors differ.
inline std::uint64_t count_differences(const VertexVector& a, const VertexVector& b, IoCounters& io) {
  require(a.length() == b.length() && a.width() == b.width(), ErrorKind::Usage, "vectors differ in shape");
  InputFile fa(a.path(), io, 64 * 1024);
  InputFile fb(b.path(), io, 64 * 1024);
  std::vector<std::byte> ra(64 * 1024 / a.width() * a.width()), rb(ra.size());
  std::uint64_t remaining = a.length() * a.width();
  std::uint64_t changed = 0;
  while (remaining > 0) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, ra.size()));
    fa.read_exact(std::span<std::byte>(ra.data(), n));
    fb.read_exact(std::span<std::byte>(rb.data(), n));
    for (std::size_t off = 0; off < n; off += a.width()) {
      changed += std::memcmp(ra.data() + off, rb.data() + off, a.width()) != 0 ? 1 : 0;
    }
    remaining -= n;
  }
  return changed;
}

template <class Label>
WccResult wcc_iterative_as(const fs::path& graph_dir, EngineOptions options, std::uint64_t max_passes) {
  const GraphLayout layout(graph_dir);
  const std::string output = options.output;
  const fs::path current = layout.vector(output);
  WccResult result;
  IoCounters io;

  const GraphManifest m = load_manifest(layout.manifest(), io);
  // Pass 0 input: every vertex labelled by itself.
  {
    VertexVector::create(current, sizeof(Label), m.v_count);
    OutputFile out(current, io, OutputFile::Mode::Update, 64 * 1024);
    std::byte raw[sizeof(Label)];
    for (std::uint64_t v = 0; v < m.v_count; ++v) {
      store_le<Label>(raw, static_cast<Label>(v));
      out.write(raw);
    }
    out.close();
  }

  options.iterations = 1;
  options.output = output + ".next";
  options.initial_values = current;
  for (;;) {
    const EngineResult pass = run(graph_dir, Wcc<Label>{}, options);
    result.io = result.io + pass.stats.total();
    const std::uint64_t changed = count_differences(VertexVector::open(current, sizeof(Label), pass.values.length()),
                                                    pass.values, io);
    fs::rename(pass.values.path(), current);
    ++result.passes;
    result.changes.push_back(changed);
    if (changed == 0) break;
    if (result.passes >= max_passes) {
      fail(ErrorKind::Resource, "label propagation did not converge within " + std::to_string(max_passes) +
                                    " passes");
    }
  }
  result.io = result.io + io.snapshot();
  result.labels = VertexVector::open(current, sizeof(Label), m.v_count);
  return result;
}

}  // namespace detail

/// Label propagation until a pass changes nothing. Labels use the graph's
/// id width. On a graph that was not symmetrized the result is the minimum
/// id that reaches each vertex, not its weak component.
inline WccResult wcc_iterative(const fs::path& graph_dir, EngineOptions options = {},
                               std::uint64_t max_passes = ~std::uint64_t{0}) {
  if (options.output == "result") options.output = "wcc";
  const GraphManifest m = load_manifest(GraphLayout(graph_dir).manifest());
  return m.id_bytes == 4 ? detail::wcc_iterative_as<std::uint32_t>(graph_dir, options, max_passes)
                         : detail::wcc_iterative_as<std::uint64_t>(graph_dir, options, max_passes);
}

}  // namespace bbp

#endif  // BBP_WCC_HPP
