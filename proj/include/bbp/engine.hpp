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

#ifndef BBP_ENGINE_HPP
#define BBP_ENGINE_HPP

#include <bit>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bbp/core.hpp"
#include "bbp/io.hpp"
#include "bbp/program.hpp"
#include "bbp/storage.hpp"

namespace bbp {

/// Per-column processing order. Column q visits its dense blocks with p
/// ascending when q is even and descending when q is odd, so the source
/// interval that ends one column starts the next.
struct ExecutionPlan {
  std::uint64_t beta = 1;
  std::vector<std::vector<BlockId>> dense;  // dense[q], non-empty dense blocks in visiting order
  std::vector<bool> sparse_sources;         // sp_p holds at least one edge
  std::vector<bool> sparse_columns;         // dp_q receives at least one record

  static ExecutionPlan build(const GraphManifest& m) {
    ExecutionPlan plan;
    plan.beta = m.beta;
    plan.dense.resize(m.beta);
    plan.sparse_sources.assign(m.beta, false);
    plan.sparse_columns.assign(m.beta, false);
    for (std::uint64_t q = 0; q < m.beta; ++q) {
      for (std::uint64_t i = 0; i < m.beta; ++i) {
        const std::uint64_t p = q % 2 == 0 ? i : m.beta - 1 - i;
        const BlockInfo& b = m.block(p, q);
        if (b.edge_count == 0) continue;
        if (b.kind == BlockKind::Dense) {
          plan.dense[q].push_back(b.block);
        } else {
          plan.sparse_sources[p] = true;
          plan.sparse_columns[q] = true;
        }
      }
    }
    return plan;
  }

  bool any_sparse() const {
    return std::find(sparse_sources.begin(), sparse_sources.end(), true) != sparse_sources.end();
  }
};

struct EngineEvent {
  std::string kind;  // shuffle, bucket, block, column, iteration
  std::uint64_t iteration = 0;
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  std::uint64_t edges = 0;
  IoSnapshot io;  // cumulative over the run

  std::string format() const {
    std::ostringstream out;
    out << "event=" << kind << " iteration=" << iteration << " p=" << p << " q=" << q << " edges=" << edges
        << " bytes_read=" << io.bytes_read << " bytes_written=" << io.bytes_written << " seeks=" << io.seeks;
    return out.str();
  }
};

struct EngineStats {
  IoSnapshot destination;  // prev values of I(q) loaded once per column
  IoSnapshot source;       // prev values of I(p) loaded as carriers
  IoSnapshot edges;        // dense blocks and source-partitions
  IoSnapshot buckets;      // shuffle files, written and read back
  IoSnapshot vectors;      // initial and finalized vertex values
  IoSnapshot degrees;
  std::uint64_t iterations = 0;
  std::uint64_t source_loads = 0;
  std::uint64_t dense_blocks = 0;
  std::uint64_t buckets_processed = 0;
  std::uint64_t peak_vertex_bytes = 0;
  std::uint64_t peak_buffer_bytes = 0;

  IoSnapshot total() const { return destination + source + edges + buckets + vectors + degrees; }
};

struct EngineOptions {
  std::uint64_t iterations = 1;
  std::optional<std::uint64_t> threads;  // defaults to the manifest value
  std::optional<std::uint64_t> memory;   // defaults to the manifest value
  std::size_t edge_buffer_bytes = 1u << 20;
  std::optional<fs::path> initial_values;
  std::string output = "result";
  std::function<void(const EngineEvent&)> on_event;
};

struct EngineResult {
  VertexVector values;
  EngineStats stats;
};

namespace detail {

/// Runs fn(0..workers-1), fn(0) on the calling thread. The first exception
/// thrown by any worker is rethrown after all of them finish.
template <class Fn>
void parallel_for(std::uint64_t workers, Fn&& fn) {
  if (workers <= 1) {
    fn(std::uint64_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::uint64_t t = 1; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          fn(t);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    try {
      fn(std::uint64_t{0});
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// [begin, end) of worker t when n items are split into contiguous chunks.
inline std::pair<std::uint64_t, std::uint64_t> chunk_range(std::uint64_t n, std::uint64_t workers, std::uint64_t t) {
  const std::uint64_t base = n / workers;
  const std::uint64_t extra = n % workers;
  const std::uint64_t begin = t * base + std::min(t, extra);
  return {begin, begin + base + (t < extra ? 1 : 0)};
}

template <class V>
void load_values(const VertexVector& vec, const Interval& iv, std::span<V> out, IoCounters& io) {
  if (iv.empty()) return;
  vec.read_interval(iv, std::as_writable_bytes(out.first(iv.length)), io);
  if constexpr (std::endian::native != std::endian::little) {
    for (auto& x : out.first(iv.length)) x = load_le<V>(reinterpret_cast<const std::byte*>(&x));
  }
}

template <class V>
void store_values(const VertexVector& vec, const Interval& iv, std::span<V> values, IoCounters& io) {
  if (iv.empty()) return;
  if constexpr (std::endian::native != std::endian::little) {
    for (auto& x : values.first(iv.length)) store_le<V>(reinterpret_cast<std::byte*>(&x), x);
  }
  vec.write_interval(iv, std::as_bytes(values.first(iv.length)), io);
}

}  // namespace detail

/// Bimodal block execution of a vertex program over a preprocessed graph.
///
/// Every pass reads the previous vector and writes a fresh one. Sparse
/// source-partitions are shuffled into destination buckets first, then
/// each destination interval is finalized from its bucket and its dense
/// blocks.
template <VertexProgram P>
class Engine {
 public:
  using value_type = typename P::value_type;

  Engine(fs::path graph_dir, P program, EngineOptions options = {})
      : layout_(std::move(graph_dir)),
        program_(std::move(program)),
        options_(std::move(options)),
        manifest_(load_manifest(layout_.manifest(), vector_io_)),
        plan_(ExecutionPlan::build(manifest_)),
        codec_(codec_for(manifest_)) {
    threads_ = options_.threads.value_or(manifest_.threads);
    memory_ = options_.memory.value_or(manifest_.memory);
    require(threads_ >= 1, ErrorKind::Usage, "engine needs at least one thread");
    if (sizeof(value_type) > manifest_.vertex_bytes) {
      fail(ErrorKind::Config, "program values take " + std::to_string(sizeof(value_type)) +
                                  " bytes but the graph was partitioned for " +
                                  std::to_string(manifest_.vertex_bytes) + "-byte vertices");
    }
    if (program_hooks::needs_degrees(program_)) {
      if (!fs::exists(layout_.degrees())) fail(ErrorKind::Config, "program needs out-degrees but the graph has none");
      degree_vec_ = VertexVector::open(layout_.degrees(), manifest_.id_bytes, manifest_.v_count);
    }
    if (program_hooks::uses_edge_data(program_)) {
      require(manifest_.payload_bytes() > 0, ErrorKind::Config, "program reads edge data but edges carry no payload");
      require(!plan_.any_sparse(), ErrorKind::Config,
              "program reads edge data, which shuffled sparse edges do not carry; use --force-mode dense");
    }
    theta_ = manifest_.max_interval_length();
    const unsigned __int128 vertex_bytes =
        static_cast<unsigned __int128>(threads_ + 1) * theta_ * sizeof(value_type);
    if (vertex_bytes > memory_) {
      fail(ErrorKind::Resource, "vertex buffers need " + std::to_string(static_cast<std::uint64_t>(vertex_bytes)) +
                                    " bytes with " + std::to_string(threads_) + " threads, over the " +
                                    std::to_string(memory_) + "-byte budget");
    }
  }

  const GraphManifest& manifest() const { return manifest_; }
  const ExecutionPlan& plan() const { return plan_; }

  EngineResult run() {
    layout_.create_directories();
    const std::uint64_t n = manifest_.v_count;
    const std::size_t width = sizeof(value_type);
    const fs::path buf[2] = {layout_.vector(options_.output + ".0"), layout_.vector(options_.output + ".1")};

    acc_.clear();
    for (std::uint64_t t = 0; t < threads_; ++t) acc_.emplace_back(theta_, &vertex_mem_, program_.neutral());
    source_ = TrackedBuffer<value_type>(theta_, &vertex_mem_);

    VertexVector prev;
    if (options_.initial_values) {
      prev = VertexVector::open(*options_.initial_values, width, n);
    } else {
      prev = write_initial(buf[1]);
    }

    for (std::uint64_t it = 0; it < options_.iterations; ++it) {
      const VertexVector next = VertexVector::create(buf[it % 2], width, n);
      pass(it, prev, next);
      prev = next;
      ++stats_.iterations;
      emit("iteration", it, 0, 0, 0);
    }

    const fs::path result = layout_.vector(options_.output);
    if (options_.iterations == 0) {
      copy_vector(prev, result);
    } else {
      fs::rename(prev.path(), result);
    }
    for (const auto& p : buf) fs::remove(p);
    if (plan_.any_sparse()) {
      for (std::uint64_t q = 0; q < manifest_.beta; ++q) fs::remove(layout_.bucket(q));
    }

    acc_.clear();
    source_.reset();
    finish_stats();
    return {VertexVector::open(result, width, n), stats_};
  }

 private:
  VertexVector write_initial(const fs::path& path) {
    const std::uint64_t n = manifest_.v_count;
    auto vec = VertexVector::create(path, sizeof(value_type), n);
    for (std::uint64_t p = 0; p < manifest_.beta; ++p) {
      const Interval iv = manifest_.interval(p);
      for (std::uint64_t i = 0; i < iv.length; ++i) source_[i] = program_hooks::initial_value(program_, iv.start + i);
      detail::store_values<value_type>(vec, iv, source_.span(), vector_io_);
    }
    return vec;
  }

  void copy_vector(const VertexVector& from, const fs::path& to) {
    auto vec = VertexVector::create(to, sizeof(value_type), manifest_.v_count);
    for (std::uint64_t p = 0; p < manifest_.beta; ++p) {
      const Interval iv = manifest_.interval(p);
      detail::load_values<value_type>(from, iv, source_.span(), vector_io_);
      detail::store_values<value_type>(vec, iv, source_.span(), vector_io_);
    }
  }

  void pass(std::uint64_t it, const VertexVector& prev, const VertexVector& next) {
    loaded_source_.reset();
    if (plan_.any_sparse()) shuffle(it, prev);
    for (std::uint64_t q = 0; q < manifest_.beta; ++q) {
      const Interval iq = manifest_.interval(q);
      if (iq.empty()) continue;

      detail::load_values<value_type>(prev, iq, acc_[0].span(), destination_io_);
      for (std::uint64_t i = 0; i < iq.length; ++i) acc_[0][i] = program_.initialize(iq.start + i, acc_[0][i]);
      for (std::uint64_t t = 1; t < threads_; ++t) std::fill_n(acc_[t].data(), iq.length, program_.neutral());

      if (plan_.sparse_columns[q]) apply_bucket(it, iq);
      for (const BlockId& b : plan_.dense[q]) dense_block(it, b, prev, iq);

      gather_apply(iq);
      detail::store_values<value_type>(next, iq, acc_[0].span(), vector_io_);
      emit("column", it, 0, q, 0);
    }
  }

  /// Loads scatter(u, prev[u], deg(u)) for every u in I(p) into source_.
  void load_source(const VertexVector& prev, std::uint64_t p) {
    if (loaded_source_ == p) return;
    const Interval ip = manifest_.interval(p);
    detail::load_values<value_type>(prev, ip, source_.span(), source_io_);
    ++stats_.source_loads;
    if (program_hooks::needs_degrees(program_)) {
      constexpr std::uint64_t kChunk = 1u << 14;
      const unsigned w = manifest_.id_bytes;
      TrackedBuffer<std::byte> raw(std::min<std::uint64_t>(kChunk, std::max<std::uint64_t>(ip.length, 1)) * w,
                                   &buffer_mem_);
      InputFile in(degree_vec_.path(), degree_io_, 64 * 1024, &buffer_mem_);
      if (ip.start != 0) in.seek(ip.start * w);
      for (std::uint64_t off = 0; off < ip.length; off += kChunk) {
        const std::uint64_t count = std::min(kChunk, ip.length - off);
        in.read_exact(std::span<std::byte>(raw.data(), count * w));
        for (std::uint64_t i = 0; i < count; ++i) {
          const VertexId u = ip.start + off + i;
          source_[off + i] = program_hooks::scatter(program_, u, source_[off + i], load_id(raw.data() + i * w, w));
        }
      }
    } else {
      for (std::uint64_t i = 0; i < ip.length; ++i) {
        source_[i] = program_hooks::scatter(program_, ip.start + i, source_[i], 0);
      }
    }
    loaded_source_ = p;
  }

  /// SPP first step: every sparse edge (u, v) becomes a record
  /// (v, carrier(u)) in the bucket of v's interval. Buckets keep partition
  /// order.
  void shuffle(std::uint64_t it, const VertexVector& prev) {
    const std::uint64_t beta = manifest_.beta;
    const unsigned w = manifest_.id_bytes;
    const std::size_t record = w + sizeof(value_type);
    const std::size_t per_bucket =
        std::clamp<std::size_t>(options_.edge_buffer_bytes / beta, 4096, std::max<std::size_t>(options_.edge_buffer_bytes, 4096));
    std::vector<std::optional<OutputFile>> buckets(beta);
    for (std::uint64_t q = 0; q < beta; ++q) {
      buckets[q].emplace(layout_.bucket(q), bucket_io_, OutputFile::Mode::Truncate, per_bucket, &buffer_mem_);
    }
    const std::uint64_t width = manifest_.max_interval_length();
    std::vector<std::byte> scratch(record);
    for (std::uint64_t p = 0; p < beta; ++p) {
      if (!plan_.sparse_sources[p]) continue;
      load_source(prev, p);
      const Interval ip = manifest_.interval(p);
      const fs::path path = layout_.partition(p);
      EdgeStream stream(path, codec_.record_bytes(), edge_io_, options_.edge_buffer_bytes, &buffer_mem_);
      expect_records(path, stream.record_count(), manifest_.partition_sparse_edges(p));
      for (auto chunk = stream.next_chunk(); !chunk.empty(); chunk = stream.next_chunk()) {
        for (std::size_t off = 0; off < chunk.size(); off += codec_.record_bytes()) {
          const VertexId u = load_id(chunk.data() + off, w);
          const VertexId v = load_id(chunk.data() + off + w, w);
          if (!ip.contains(u) || v >= manifest_.v_count) corrupt(path, u, v);
          store_id(scratch.data(), v, w);
          store_le<value_type>(scratch.data() + w, source_[u - ip.start]);
          buckets[v / width]->write(scratch);
        }
      }
      emit("shuffle", it, p, 0, stream.record_count());
    }
    for (auto& b : buckets) b->close();
  }

  /// SPP second step for column q.
  void apply_bucket(std::uint64_t it, const Interval& iq) {
    const unsigned w = manifest_.id_bytes;
    const std::size_t record = w + sizeof(value_type);
    const fs::path path = layout_.bucket(iq.index);
    EdgeStream stream(path, record, bucket_io_, options_.edge_buffer_bytes, &buffer_mem_);
    for (auto chunk = stream.next_chunk(); !chunk.empty(); chunk = stream.next_chunk()) {
      const std::uint64_t n = chunk.size() / record;
      detail::parallel_for(threads_, [&](std::uint64_t t) {
        auto [begin, end] = detail::chunk_range(n, threads_, t);
        value_type* acc = acc_[t].data();
        for (std::uint64_t i = begin; i < end; ++i) {
          const std::byte* r = chunk.data() + i * record;
          const VertexId v = load_id(r, w);
          if (!iq.contains(v)) {
            fail(ErrorKind::Corruption, "'" + path.string() + "' holds destination " + std::to_string(v) +
                                            " outside interval " + std::to_string(iq.index));
          }
          program_.process(acc[v - iq.start], load_le<value_type>(r + w), EdgeData{});
        }
      });
    }
    ++stats_.buckets_processed;
    emit("bucket", it, 0, iq.index, stream.record_count());
  }

  /// DBP over one dense block.
  void dense_block(std::uint64_t it, const BlockId& b, const VertexVector& prev, const Interval& iq) {
    load_source(prev, b.p);
    const Interval ip = manifest_.interval(b.p);
    const unsigned w = manifest_.id_bytes;
    const std::uint64_t rb = codec_.record_bytes();
    const std::uint64_t payload = codec_.payload_bytes;
    const fs::path path = layout_.dense_block(b.p, b.q);
    EdgeStream stream(path, rb, edge_io_, options_.edge_buffer_bytes, &buffer_mem_);
    expect_records(path, stream.record_count(), manifest_.block(b.p, b.q).edge_count);
    for (auto chunk = stream.next_chunk(); !chunk.empty(); chunk = stream.next_chunk()) {
      const std::uint64_t n = chunk.size() / rb;
      detail::parallel_for(threads_, [&](std::uint64_t t) {
        auto [begin, end] = detail::chunk_range(n, threads_, t);
        value_type* acc = acc_[t].data();
        for (std::uint64_t i = begin; i < end; ++i) {
          const std::byte* r = chunk.data() + i * rb;
          const VertexId u = load_id(r, w);
          const VertexId v = load_id(r + w, w);
          if (!ip.contains(u) || !iq.contains(v)) corrupt(path, u, v);
          program_.process(acc[v - iq.start], source_[u - ip.start], EdgeData(r + 2 * w, payload));
        }
      });
    }
    ++stats_.dense_blocks;
    emit("block", it, b.p, b.q, stream.record_count());
  }

  /// Pairwise tree reduction of the thread buffers into acc_[0], then apply.
  void gather_apply(const Interval& iq) {
    const std::uint64_t len = iq.length;
    detail::parallel_for(threads_, [&](std::uint64_t t) {
      auto [begin, end] = detail::chunk_range(len, threads_, t);
      for (std::uint64_t stride = 1; stride < threads_; stride *= 2) {
        for (std::uint64_t a = 0; a + stride < threads_; a += 2 * stride) {
          value_type* x = acc_[a].data();
          const value_type* y = acc_[a + stride].data();
          for (std::uint64_t i = begin; i < end; ++i) x[i] = program_.gather(x[i], y[i]);
        }
      }
      value_type* out = acc_[0].data();
      for (std::uint64_t i = begin; i < end; ++i) out[i] = program_hooks::apply(program_, iq.start + i, out[i]);
    });
  }

  [[noreturn]] void corrupt(const fs::path& path, VertexId u, VertexId v) const {
    fail(ErrorKind::Corruption, "'" + path.string() + "' holds edge (" + std::to_string(u) + ", " +
                                    std::to_string(v) + ") outside its block");
  }

  void expect_records(const fs::path& path, std::uint64_t found, std::uint64_t expected) const {
    if (found != expected) {
      fail(ErrorKind::Corruption, "'" + path.string() + "' holds " + std::to_string(found) +
                                      " edges, manifest says " + std::to_string(expected));
    }
  }

  void finish_stats() {
    stats_.destination = destination_io_.snapshot();
    stats_.source = source_io_.snapshot();
    stats_.edges = edge_io_.snapshot();
    stats_.buckets = bucket_io_.snapshot();
    stats_.vectors = vector_io_.snapshot();
    stats_.degrees = degree_io_.snapshot();
    stats_.peak_vertex_bytes = vertex_mem_.peak();
    stats_.peak_buffer_bytes = buffer_mem_.peak();
  }

  void emit(const char* kind, std::uint64_t it, std::uint64_t p, std::uint64_t q, std::uint64_t edges) {
    if (!options_.on_event) return;
    finish_stats();
    options_.on_event(EngineEvent{kind, it, p, q, edges, stats_.total()});
  }

  GraphLayout layout_;
  P program_;
  EngineOptions options_;
  IoCounters destination_io_, source_io_, edge_io_, bucket_io_, vector_io_, degree_io_;
  MemoryTracker vertex_mem_, buffer_mem_;
  GraphManifest manifest_;
  ExecutionPlan plan_;
  EdgeCodec codec_;
  VertexVector degree_vec_;
  std::uint64_t threads_ = 1;
  std::uint64_t memory_ = 0;
  std::uint64_t theta_ = 0;
  std::vector<TrackedBuffer<value_type>> acc_;
  TrackedBuffer<value_type> source_;
  std::optional<std::uint64_t> loaded_source_;
  EngineStats stats_;
};

/// Runs `options.iterations` passes of `program`; the result lands in
/// vectors/<options.output>.vec.
template <VertexProgram P>
EngineResult run(const fs::path& graph_dir, P program, EngineOptions options = {}) {
  Engine<P> engine(graph_dir, std::move(program), std::move(options));
  return engine.run();
}

}  // namespace bbp

#endif  // BBP_ENGINE_HPP
