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

#ifndef BBP_PREPROCESS_HPP
#define BBP_PREPROCESS_HPP

#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bbp/core.hpp"
#include "bbp/io.hpp"
#include "bbp/storage.hpp"

namespace bbp {

enum class InputFormat { Text, Binary };

inline InputFormat parse_input_format(std::string_view text) {
  if (text == "text") return InputFormat::Text;
  if (text == "binary") return InputFormat::Binary;
  fail(ErrorKind::Usage, "unknown input format '" + std::string(text) + "' (expected text or binary)");
}

struct IngestOptions {
  InputFormat format = InputFormat::Text;
  bool one_based_ids = false;
  bool symmetrize = false;       // emit (v, u) next to every (u, v)
  bool drop_self_loops = false;
  std::optional<std::uint64_t> v_count;  // declared |V|; otherwise max id + 1
  unsigned input_id_bytes = 4;   // id width of binary input records
  unsigned weight_bytes = 0;     // 0, 4 (float) or 8 (double) per edge
  std::optional<unsigned> id_bytes;  // on-disk id width; default from |V|
  LayoutMode mode = LayoutMode::Bbp;
  std::size_t buffer_bytes = kDefaultBufferBytes;

  void validate() const {
    require(input_id_bytes == 4 || input_id_bytes == 8, ErrorKind::Usage, "binary input ids must be 4 or 8 bytes");
    require(weight_bytes == 0 || weight_bytes == 4 || weight_bytes == 8, ErrorKind::Usage,
            "edge weights must be 0, 4 or 8 bytes");
    require(!id_bytes || *id_bytes == 4 || *id_bytes == 8, ErrorKind::Usage, "id width must be 4 or 8");
  }
};

struct PreprocessReport {
  GraphManifest manifest;
  IoSnapshot io;                  // every byte moved, input reads included
  std::uint64_t input_edges = 0;  // records read from the input, before symmetrizing
  std::uint64_t dense_blocks = 0;
  std::uint64_t sparse_blocks = 0;
  std::uint64_t peak_buffer_bytes = 0;
  bool degrees_in_memory = false;
};

namespace detail {

/// Streams (u, v, payload) from a text or binary edge list. Ids are
/// converted to 0-based before the callback sees them.
class EdgeListReader {
 public:
  EdgeListReader(const fs::path& path, const IngestOptions& options, IoCounters& io, std::size_t chunk_bytes,
                 MemoryTracker* memory)
      : options_(options), path_(path), io_(&io), chunk_bytes_(chunk_bytes), memory_(memory) {}

  template <class Fn>
  std::uint64_t for_each(Fn&& fn) {
    return options_.format == InputFormat::Text ? for_each_text(fn) : for_each_binary(fn);
  }

 private:
  VertexId normalize(std::uint64_t id, std::uint64_t line) const {
    if (!options_.one_based_ids) return id;
    if (id == 0) fail(ErrorKind::Format, where(line) + "vertex id 0 in one-based input");
    return id - 1;
  }

  std::string where(std::uint64_t line) const {
    return options_.format == InputFormat::Text ? path_.string() + ":" + std::to_string(line) + ": "
                                                : path_.string() + ": record " + std::to_string(line) + ": ";
  }

  template <class Fn>
  std::uint64_t for_each_binary(Fn& fn) {
    const std::uint64_t w = options_.input_id_bytes;
    const std::uint64_t record = 2 * w + options_.weight_bytes;
    EdgeStream stream(path_, record, *io_, chunk_bytes_, memory_);
    std::uint64_t n = 0;
    for (auto chunk = stream.next_chunk(); !chunk.empty(); chunk = stream.next_chunk()) {
      for (std::size_t off = 0; off < chunk.size(); off += record) {
        const std::byte* r = chunk.data() + off;
        ++n;
        fn(normalize(load_id(r, static_cast<unsigned>(w)), n), normalize(load_id(r + w, static_cast<unsigned>(w)), n),
           std::span<const std::byte>(r + 2 * w, options_.weight_bytes), n);
      }
    }
    return n;
  }

  template <class Fn>
  std::uint64_t for_each_text(Fn& fn) {
    InputFile in(path_, *io_, 4096);
    TrackedBuffer<char> chunk(std::max<std::size_t>(chunk_bytes_, 256), memory_);
    std::string carry;
    std::uint64_t line_no = 0;
    std::uint64_t n = 0;
    std::array<std::byte, 8> payload{};
    auto handle_line = [&](std::string_view line) {
      ++line_no;
      if (parse_line(line, line_no, payload, fn)) ++n;
    };
    for (;;) {
      const std::size_t got = in.read_some({reinterpret_cast<std::byte*>(chunk.data()), chunk.size()});
      if (got == 0) break;
      std::string_view view(chunk.data(), got);
      for (;;) {
        const auto nl = view.find('\n');
        if (nl == std::string_view::npos) {
          carry.append(view);
          break;
        }
        if (carry.empty()) {
          handle_line(view.substr(0, nl));
        } else {
          carry.append(view.substr(0, nl));
          handle_line(carry);
          carry.clear();
        }
        view.remove_prefix(nl + 1);
      }
    }
    if (!carry.empty()) handle_line(carry);
    return n;
  }

  template <class Fn>
  bool parse_line(std::string_view line, std::uint64_t line_no, std::array<std::byte, 8>& payload, Fn& fn) {
    auto skip_ws = [&] {
      while (!line.empty() && (line.front() == ' ' || line.front() == '\t' || line.front() == '\r')) {
        line.remove_prefix(1);
      }
    };
    skip_ws();
    if (line.empty() || line.front() == '#' || line.front() == '%') return false;
    auto parse_id = [&](const char* what) {
      std::uint64_t value = 0;
      auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
      if (ec != std::errc{} || (ptr != line.data() + line.size() && *ptr != ' ' && *ptr != '\t' && *ptr != '\r')) {
        fail(ErrorKind::Format, where(line_no) + "cannot parse " + what + " vertex id");
      }
      line.remove_prefix(static_cast<std::size_t>(ptr - line.data()));
      skip_ws();
      return value;
    };
    const std::uint64_t u = parse_id("source");
    if (line.empty()) fail(ErrorKind::Format, where(line_no) + "missing destination vertex id");
    const std::uint64_t v = parse_id("destination");
    if (options_.weight_bytes != 0) {
      double weight = 0.0;
      auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), weight);
      if (line.empty() || ec != std::errc{}) fail(ErrorKind::Format, where(line_no) + "missing or malformed edge weight");
      if (options_.weight_bytes == 8) {
        store_le<double>(payload.data(), weight);
      } else {
        store_le<float>(payload.data(), static_cast<float>(weight));
      }
    }
    fn(normalize(u, line_no), normalize(v, line_no), std::span<const std::byte>(payload.data(), options_.weight_bytes),
       line_no);
    return true;
  }

  IngestOptions options_;
  fs::path path_;
  IoCounters* io_;
  std::size_t chunk_bytes_;
  MemoryTracker* memory_;
};

/// Smallest beta at or above compute_beta whose full intervals keep
/// phi * (T + 1) * ceil(|V| / beta) inside the budget.
inline std::uint64_t plan_beta(std::uint64_t v_count, const CostParams& params) {
  if (v_count == 0) return 1;
  std::uint64_t beta = compute_beta(v_count, params);
  const unsigned __int128 per_vertex = static_cast<unsigned __int128>(params.phi) * (params.threads + 1);
  while (beta < v_count && per_vertex * interval_length(v_count, beta) > params.memory) ++beta;
  return beta;
}

}  // namespace detail

/// Out-degree of every vertex, streamed one source interval at a time.
inline VertexVector compute_out_degrees(const fs::path& graph_dir, IoCounters& io = default_io(),
                                        std::size_t buffer_bytes = kDefaultBufferBytes,
                                        MemoryTracker* memory = nullptr) {
  const GraphLayout layout(graph_dir);
  const GraphManifest m = load_manifest(layout.manifest(), io);
  const EdgeCodec codec = codec_for(m);
  auto degrees = VertexVector::create(layout.degrees(), m.id_bytes, m.v_count);
  for (std::uint64_t p = 0; p < m.beta; ++p) {
    const Interval iv = m.interval(p);
    if (iv.empty()) continue;
    TrackedBuffer<std::uint64_t> counts(iv.length, memory, 0);
    auto count_file = [&](const fs::path& path) {
      EdgeStream stream(path, codec.record_bytes(), io, buffer_bytes, memory);
      for (auto chunk = stream.next_chunk(); !chunk.empty(); chunk = stream.next_chunk()) {
        for (std::size_t off = 0; off < chunk.size(); off += codec.record_bytes()) {
          const VertexId u = load_id(chunk.data() + off, codec.id_bytes);
          if (!iv.contains(u)) {
            fail(ErrorKind::Corruption, "'" + path.string() + "' holds source " + std::to_string(u) +
                                            " outside interval " + std::to_string(p));
          }
          ++counts[u - iv.start];
        }
      }
    };
    if (fs::exists(layout.partition(p))) count_file(layout.partition(p));
    for (std::uint64_t q = 0; q < m.beta; ++q) {
      if (m.block(p, q).kind == BlockKind::Dense && m.block(p, q).edge_count > 0) count_file(layout.dense_block(p, q));
    }
    std::vector<std::byte> raw(iv.length * m.id_bytes);
    for (std::uint64_t i = 0; i < iv.length; ++i) store_id(raw.data() + i * m.id_bytes, counts[i], m.id_bytes);
    degrees.write_interval(iv, raw, io);
  }
  return degrees;
}

/// Partitions an edge list into the on-disk block layout.
///
/// Passes over the input: an optional scan for max id (skipped when |V| is
/// declared), a counting pass that fills the beta x beta edge table and the
/// out-degrees, and a placement pass that appends every edge to its dense
/// block file or to the sparse remainder of its source-partition. Edges are
/// never sorted; each output file keeps input order.
inline PreprocessReport preprocess(const fs::path& input, const IngestOptions& options, CostParams params,
                                   const fs::path& out_dir) {
  options.validate();
  if (!fs::exists(input)) fail(ErrorKind::Usage, "input '" + input.string() + "' does not exist");
  IoCounters io;
  MemoryTracker memory;
  const std::uint64_t budget = params.memory;
  const std::size_t reader_bytes = static_cast<std::size_t>(
      std::clamp<std::uint64_t>(budget / 8, 4096, std::max<std::size_t>(options.buffer_bytes, 4096)));

  PreprocessReport report;
  GraphManifest& m = report.manifest;

  // |V|
  if (options.v_count) {
    m.v_count = *options.v_count;
  } else {
    std::uint64_t max_id = 0;
    bool any = false;
    detail::EdgeListReader scan(input, options, io, reader_bytes, &memory);
    scan.for_each([&](VertexId u, VertexId v, std::span<const std::byte>, std::uint64_t) {
      max_id = std::max({max_id, u, v});
      any = true;
    });
    m.v_count = any ? max_id + 1 : 0;
  }

  m.id_bytes = options.id_bytes.value_or(m.v_count <= (1ull << 32) ? 4u : 8u);
  m.edge_bytes = 2ull * m.id_bytes + options.weight_bytes;
  params.psi = m.edge_bytes;
  params.validate();
  m.vertex_bytes = params.phi;
  m.threads = params.threads;
  m.memory = params.memory;
  m.mode = options.mode;
  m.symmetrized = options.symmetrize;
  m.beta = detail::plan_beta(m.v_count, params);
  const std::uint64_t beta = m.beta;
  const std::uint64_t width = m.v_count == 0 ? 1 : interval_length(m.v_count, beta);

  auto for_each_edge = [&](auto&& emit) {
    detail::EdgeListReader reader(input, options, io, reader_bytes, &memory);
    return reader.for_each([&](VertexId u, VertexId v, std::span<const std::byte> payload, std::uint64_t where) {
      if (u >= m.v_count || v >= m.v_count) {
        fail(ErrorKind::Format, input.string() + ": edge " + std::to_string(where) + " references vertex " +
                                    std::to_string(std::max(u, v)) + " but |V| = " + std::to_string(m.v_count));
      }
      if (u == v && options.drop_self_loops) return;
      emit(u, v, payload);
      if (options.symmetrize && u != v) emit(v, u, payload);
    });
  };

  // counting pass
  TrackedBuffer<EdgeCount> table(beta * beta, &memory, 0);
  const std::uint64_t degree_bytes = m.v_count * m.id_bytes;
  report.degrees_in_memory = degree_bytes + table.bytes() <= budget / 2;
  TrackedBuffer<std::uint64_t> degrees;
  if (report.degrees_in_memory) {
    degrees = TrackedBuffer<std::uint64_t>(m.v_count, nullptr, 0);
    memory.acquire(degree_bytes);  // charged at on-disk width
  }
  report.input_edges = for_each_edge([&](VertexId u, VertexId v, std::span<const std::byte>) {
    ++table[(u / width) * beta + v / width];
    if (report.degrees_in_memory) ++degrees[u];
    ++m.e_count;
  });

  // classification
  m.blocks.resize(beta * beta);
  for (std::uint64_t p = 0; p < beta; ++p) {
    const Interval source = m.interval(p);
    for (std::uint64_t q = 0; q < beta; ++q) {
      BlockInfo& b = m.block(p, q);
      b.block = {p, q};
      b.edge_count = table[p * beta + q];
      b.kind = classify_for_mode(m.mode, b.edge_count, source, params, beta);
      (b.kind == BlockKind::Dense ? report.dense_blocks : report.sparse_blocks) += 1;
    }
  }

  // placement pass
  const GraphLayout layout(out_dir);
  layout.create_directories();
  for (const auto& entry : fs::directory_iterator(out_dir / "dense")) fs::remove(entry.path());
  for (const auto& entry : fs::directory_iterator(out_dir / "partitions")) fs::remove(entry.path());
  const EdgeCodec codec = codec_for(m);
  std::uint64_t files = beta;
  for (const auto& b : m.blocks) files += (b.kind == BlockKind::Dense && b.edge_count > 0) ? 1 : 0;
  const std::size_t writer_bytes = static_cast<std::size_t>(
      std::clamp<std::uint64_t>(budget / 4 / files, 512, std::max<std::size_t>(options.buffer_bytes, 512)));
  {
    std::vector<std::optional<EdgeWriter>> partitions(beta);
    std::vector<std::optional<EdgeWriter>> dense(beta * beta);
    for (std::uint64_t p = 0; p < beta; ++p) {
      partitions[p].emplace(layout.partition(p), codec, io, writer_bytes, &memory);
      for (std::uint64_t q = 0; q < beta; ++q) {
        if (m.block(p, q).kind == BlockKind::Dense && m.block(p, q).edge_count > 0) {
          dense[p * beta + q].emplace(layout.dense_block(p, q), codec, io, writer_bytes, &memory);
        }
      }
    }
    for_each_edge([&](VertexId u, VertexId v, std::span<const std::byte> payload) {
      const std::uint64_t p = u / width;
      const std::uint64_t q = v / width;
      auto& target = dense[p * beta + q];
      if (target) {
        target->write(u, v, payload);
      } else {
        partitions[p]->write(u, v, payload);
      }
    });
    for (auto& w : partitions) w->close();
    for (auto& w : dense) {
      if (w) w->close();
    }
  }
  table.reset();

  save_manifest(m, layout.manifest(), io);

  if (report.degrees_in_memory) {
    auto vec = VertexVector::create(layout.degrees(), m.id_bytes, m.v_count);
    std::vector<std::byte> raw(std::min<std::uint64_t>(m.v_count, 1u << 16) * m.id_bytes);
    OutputFile out(layout.degrees(), io, OutputFile::Mode::Update, 64 * 1024);
    for (std::uint64_t start = 0; start < m.v_count;) {
      const std::uint64_t n = std::min<std::uint64_t>(m.v_count - start, raw.size() / m.id_bytes);
      for (std::uint64_t i = 0; i < n; ++i) store_id(raw.data() + i * m.id_bytes, degrees[start + i], m.id_bytes);
      out.write(std::span<const std::byte>(raw.data(), n * m.id_bytes));
      start += n;
    }
    out.close();
    degrees.reset();
    memory.release(degree_bytes);
  } else {
    compute_out_degrees(out_dir, io, options.buffer_bytes, &memory);
  }

  report.io = io.snapshot();
  report.peak_buffer_bytes = memory.peak();
  return report;
}

}  // namespace bbp

#endif  // BBP_PREPROCESS_HPP
