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

#ifndef BBP_STORAGE_HPP
#define BBP_STORAGE_HPP

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bbp/core.hpp"
#include "bbp/io.hpp"

namespace bbp {

// ---------------------------------------------------------------------------
// directory layout

/// Paths of every artifact under a preprocessed graph directory.
class GraphLayout {
 public:
  explicit GraphLayout(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const { return root_; }
  fs::path manifest() const { return root_ / "manifest"; }
  fs::path partition(std::uint64_t p) const {
    return root_ / "partitions" / ("sp_" + std::to_string(p) + ".edges");
  }
  fs::path dense_block(std::uint64_t p, std::uint64_t q) const {
    return root_ / "dense" / ("b_" + std::to_string(p) + "_" + std::to_string(q) + ".edges");
  }
  fs::path bucket(std::uint64_t q) const {
    return root_ / "spp" / ("dp_" + std::to_string(q) + ".tmp");
  }
  fs::path vector(std::string_view name) const {
    return root_ / "vectors" / (std::string(name) + ".vec");
  }
  fs::path degrees() const { return vector("degree"); }

  void create_directories() const {
    for (const char* sub : {"partitions", "dense", "spp", "vectors"}) fs::create_directories(root_ / sub);
  }

 private:
  fs::path root_;
};

// ---------------------------------------------------------------------------
// manifest

inline constexpr std::uint64_t kManifestVersion = 1;

struct GraphManifest {
  std::uint64_t version = kManifestVersion;
  std::uint64_t v_count = 0;
  std::uint64_t e_count = 0;
  std::uint64_t beta = 1;
  unsigned id_bytes = 4;
  std::uint64_t vertex_bytes = 8;  // phi used for partitioning and classification
  std::uint64_t edge_bytes = 8;    // psi = 2 * id_bytes + payload
  std::uint64_t threads = 1;
  std::uint64_t memory = 0;
  LayoutMode mode = LayoutMode::Bbp;
  bool symmetrized = false;
  std::vector<BlockInfo> blocks;  // row-major: index p * beta + q

  std::uint64_t payload_bytes() const { return edge_bytes - 2ull * id_bytes; }

  Interval interval(std::uint64_t index) const { return interval_at(index, v_count, beta); }
  std::uint64_t max_interval_length() const { return v_count == 0 ? 0 : interval_length(v_count, beta); }
  std::uint64_t interval_of(VertexId v) const { return bbp::interval_of(v, v_count, beta); }

  const BlockInfo& block(std::uint64_t p, std::uint64_t q) const { return blocks[p * beta + q]; }
  BlockInfo& block(std::uint64_t p, std::uint64_t q) { return blocks[p * beta + q]; }

  CostParams cost_params() const {
    CostParams params;
    params.phi = vertex_bytes;
    params.psi = edge_bytes;
    params.threads = threads;
    params.memory = memory;
    return params;
  }

  EdgeCount partition_sparse_edges(std::uint64_t p) const {
    EdgeCount n = 0;
    for (std::uint64_t q = 0; q < beta; ++q) {
      if (block(p, q).kind == BlockKind::Sparse) n += block(p, q).edge_count;
    }
    return n;
  }

  void validate() const {
    require(version == kManifestVersion, ErrorKind::Format, "unsupported manifest version");
    require(beta >= 1, ErrorKind::Format, "manifest beta must be at least 1");
    require(id_bytes == 4 || id_bytes == 8, ErrorKind::Format, "id_bytes must be 4 or 8");
    require(id_bytes == 8 || v_count <= (1ull << 32), ErrorKind::Format,
            "4-byte ids cannot address more than 2^32 vertices");
    require(edge_bytes >= 2ull * id_bytes, ErrorKind::Format, "edge_bytes smaller than two ids");
    require(vertex_bytes > 0, ErrorKind::Format, "vertex_bytes must be positive");
    if (blocks.size() != beta * beta) {
      fail(ErrorKind::Format, "manifest with beta=" + std::to_string(beta) + " needs " +
                                  std::to_string(beta * beta) + " block lines, found " +
                                  std::to_string(blocks.size()));
    }
    EdgeCount total = 0;
    for (std::uint64_t i = 0; i < blocks.size(); ++i) {
      const BlockId expected{i / beta, i % beta};
      require(blocks[i].block == expected, ErrorKind::Format, "manifest block table out of order");
      total += blocks[i].edge_count;
    }
    require(total == e_count, ErrorKind::Format, "block edge counts do not sum to e_count");
  }

  friend bool operator==(const GraphManifest&, const GraphManifest&) = default;
};

inline std::string format_manifest(const GraphManifest& m) {
  std::ostringstream out;
  out << "version=" << m.version << '\n'
      << "v_count=" << m.v_count << '\n'
      << "e_count=" << m.e_count << '\n'
      << "beta=" << m.beta << '\n'
      << "id_bytes=" << m.id_bytes << '\n'
      << "vertex_bytes=" << m.vertex_bytes << '\n'
      << "edge_bytes=" << m.edge_bytes << '\n'
      << "threads=" << m.threads << '\n'
      << "memory=" << m.memory << '\n'
      << "mode=" << to_string(m.mode) << '\n'
      << "symmetrized=" << (m.symmetrized ? 1 : 0) << '\n'
      << "blocks\n";
  for (const auto& b : m.blocks) {
    out << b.block.p << ' ' << b.block.q << ' ' << b.edge_count << ' ' << to_string(b.kind) << '\n';
  }
  return out.str();
}

namespace detail {

inline std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    fail(ErrorKind::Format, "manifest: bad value '" + std::string(text) + "' for " + std::string(what));
  }
  return value;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

}  // namespace detail

inline GraphManifest parse_manifest(std::string_view text) {
  std::map<std::string, std::string, std::less<>> keys;
  std::vector<BlockInfo> blocks;
  bool in_blocks = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = detail::trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!in_blocks) {
      if (line == "blocks") {
        in_blocks = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        fail(ErrorKind::Format, "manifest line " + std::to_string(line_no) + ": expected key=value");
      }
      std::string key(detail::trim(line.substr(0, eq)));
      if (!keys.emplace(key, std::string(detail::trim(line.substr(eq + 1)))).second) {
        fail(ErrorKind::Format, "manifest: duplicate key '" + key + "'");
      }
      continue;
    }
    std::istringstream fields{std::string(line)};
    std::string p, q, n, kind, extra;
    if (!(fields >> p >> q >> n >> kind) || (fields >> extra)) {
      fail(ErrorKind::Format, "manifest line " + std::to_string(line_no) + ": expected 'p q edge_count kind'");
    }
    BlockInfo info;
    info.block = {detail::parse_u64(p, "block p"), detail::parse_u64(q, "block q")};
    info.edge_count = detail::parse_u64(n, "edge_count");
    if (kind == "dense") {
      info.kind = BlockKind::Dense;
    } else if (kind == "sparse") {
      info.kind = BlockKind::Sparse;
    } else {
      fail(ErrorKind::Format, "manifest line " + std::to_string(line_no) + ": unknown block kind '" + kind + "'");
    }
    blocks.push_back(info);
  }
  require(in_blocks, ErrorKind::Format, "manifest: missing 'blocks' section");

  auto take = [&](const char* key) -> std::string {
    auto it = keys.find(key);
    if (it == keys.end()) fail(ErrorKind::Format, std::string("manifest: missing key '") + key + "'");
    std::string value = std::move(it->second);
    keys.erase(it);
    return value;
  };
  GraphManifest m;
  m.version = detail::parse_u64(take("version"), "version");
  if (m.version != kManifestVersion) {
    fail(ErrorKind::Format, "manifest version " + std::to_string(m.version) + " is not supported (expected " +
                                std::to_string(kManifestVersion) + ")");
  }
  m.v_count = detail::parse_u64(take("v_count"), "v_count");
  m.e_count = detail::parse_u64(take("e_count"), "e_count");
  m.beta = detail::parse_u64(take("beta"), "beta");
  m.id_bytes = static_cast<unsigned>(detail::parse_u64(take("id_bytes"), "id_bytes"));
  m.vertex_bytes = detail::parse_u64(take("vertex_bytes"), "vertex_bytes");
  m.edge_bytes = detail::parse_u64(take("edge_bytes"), "edge_bytes");
  m.threads = detail::parse_u64(take("threads"), "threads");
  m.memory = detail::parse_u64(take("memory"), "memory");
  try {
    m.mode = parse_layout_mode(take("mode"));
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("manifest: ") + e.what());
  }
  const auto sym = detail::parse_u64(take("symmetrized"), "symmetrized");
  require(sym <= 1, ErrorKind::Format, "manifest: symmetrized must be 0 or 1");
  m.symmetrized = sym == 1;
  if (!keys.empty()) fail(ErrorKind::Format, "manifest: unknown key '" + keys.begin()->first + "'");
  m.blocks = std::move(blocks);
  m.validate();
  return m;
}

inline void save_manifest(const GraphManifest& m, const fs::path& path, IoCounters& io = default_io()) {
  m.validate();
  write_text_file(path, format_manifest(m), io);
}

inline GraphManifest load_manifest(const fs::path& path, IoCounters& io = default_io()) {
  if (!fs::exists(path)) fail(ErrorKind::Format, "no manifest at '" + path.string() + "'");
  return parse_manifest(read_text_file(path, io));
}

// ---------------------------------------------------------------------------
// vertex vectors

/// Disk-resident array of |V| fixed-width little-endian values; element i
/// lives at byte offset width * i.
class VertexVector {
 public:
  VertexVector() = default;
  VertexVector(fs::path path, std::uint64_t width, std::uint64_t length)
      : path_(std::move(path)), width_(width), length_(length) {}

  /// Creates (or truncates) a zero-filled vector file.
  static VertexVector create(const fs::path& path, std::uint64_t width, std::uint64_t length) {
    require(width > 0, ErrorKind::Usage, "vertex vector width must be positive");
    { OutputFile touch(path, default_io(), OutputFile::Mode::Truncate, 512); touch.close(); }
    fs::resize_file(path, width * length);
    return VertexVector(path, width, length);
  }

  /// Opens an existing vector and checks its size against `length`.
  static VertexVector open(const fs::path& path, std::uint64_t width, std::uint64_t length) {
    std::error_code ec;
    const auto size = fs::file_size(path, ec);
    if (ec) fail(ErrorKind::Io, "cannot open vertex vector '" + path.string() + "': " + ec.message());
    if (size != width * length) {
      fail(ErrorKind::Format, "vertex vector '" + path.string() + "' has " + std::to_string(size) +
                                  " bytes, expected " + std::to_string(width * length));
    }
    return VertexVector(path, width, length);
  }

  const fs::path& path() const { return path_; }
  std::uint64_t width() const { return width_; }
  std::uint64_t length() const { return length_; }

  void read_interval(const Interval& iv, std::span<std::byte> out, IoCounters& io = default_io(),
                     std::size_t buffer_bytes = 64 * 1024) const {
    check(iv, out.size());
    if (iv.empty()) return;
    InputFile in(path_, io, buffer_bytes);
    if (iv.start != 0) in.seek(iv.start * width_);
    in.read_exact(out);
  }

  std::vector<std::byte> read_interval(const Interval& iv, IoCounters& io = default_io()) const {
    std::vector<std::byte> out(iv.length * width_);
    read_interval(iv, out, io);
    return out;
  }

  void write_interval(const Interval& iv, std::span<const std::byte> values, IoCounters& io = default_io(),
                      std::size_t buffer_bytes = 64 * 1024) const {
    check(iv, values.size());
    if (iv.empty()) return;
    OutputFile out(path_, io, OutputFile::Mode::Update, buffer_bytes);
    if (iv.start != 0) out.seek(iv.start * width_);
    out.write(values);
    out.close();
  }

  template <class T>
  void read_values(const Interval& iv, std::span<T> out, IoCounters& io = default_io()) const {
    require(sizeof(T) == width_, ErrorKind::Config, "value type width differs from vector width");
    std::vector<std::byte> raw(iv.length * width_);
    read_interval(iv, raw, io);
    for (std::uint64_t i = 0; i < iv.length; ++i) out[i] = load_le<T>(raw.data() + i * width_);
  }

  template <class T>
  void write_values(const Interval& iv, std::span<const T> values, IoCounters& io = default_io()) const {
    require(sizeof(T) == width_, ErrorKind::Config, "value type width differs from vector width");
    std::vector<std::byte> raw(iv.length * width_);
    for (std::uint64_t i = 0; i < iv.length; ++i) store_le<T>(raw.data() + i * width_, values[i]);
    write_interval(iv, raw, io);
  }

  Interval whole() const { return Interval{0, 0, length_}; }

 private:
  void check(const Interval& iv, std::size_t bytes) const {
    if (iv.end() > length_) {
      fail(ErrorKind::Usage, "interval [" + std::to_string(iv.start) + ", " + std::to_string(iv.end()) +
                                 ") exceeds vertex vector of length " + std::to_string(length_));
    }
    if (bytes != iv.length * width_) {
      fail(ErrorKind::Usage, "buffer of " + std::to_string(bytes) + " bytes does not match interval of " +
                                 std::to_string(iv.length) + " x " + std::to_string(width_) + " bytes");
    }
  }

  fs::path path_;
  std::uint64_t width_ = 0;
  std::uint64_t length_ = 0;
};

template <class T>
std::vector<T> read_vector(const VertexVector& vec, IoCounters& io = default_io()) {
  std::vector<T> out(vec.length());
  vec.read_values<T>(vec.whole(), std::span<T>(out), io);
  return out;
}

template <class T>
VertexVector write_vector(const fs::path& path, std::span<const T> values, IoCounters& io = default_io()) {
  VertexVector vec = VertexVector::create(path, sizeof(T), values.size());
  vec.write_values<T>(vec.whole(), values, io);
  return vec;
}

// ---------------------------------------------------------------------------
// edges

/// One serialized edge; payload points into the buffer it was decoded from.
struct EdgeRecord {
  VertexId source = 0;
  VertexId destination = 0;
  std::span<const std::byte> payload;
};

/// Fixed-width edge serialization: source, destination, payload.
struct EdgeCodec {
  unsigned id_bytes = 4;
  std::uint64_t payload_bytes = 0;

  std::uint64_t record_bytes() const { return 2ull * id_bytes + payload_bytes; }

  void encode(std::byte* dst, VertexId src, VertexId dst_id, std::span<const std::byte> payload = {}) const {
    store_id(dst, src, id_bytes);
    store_id(dst + id_bytes, dst_id, id_bytes);
    if (payload_bytes != 0) {
      std::memset(dst + 2 * id_bytes, 0, payload_bytes);
      std::memcpy(dst + 2 * id_bytes, payload.data(), std::min<std::size_t>(payload.size(), payload_bytes));
    }
  }

  EdgeRecord decode(const std::byte* src) const {
    return {load_id(src, id_bytes), load_id(src + id_bytes, id_bytes),
            std::span<const std::byte>(src + 2 * id_bytes, payload_bytes)};
  }
};

inline EdgeCodec codec_for(const GraphManifest& m) { return {m.id_bytes, m.payload_bytes()}; }

/// Reads fixed-width records of a file in file order, one buffer at a time.
class EdgeStream {
 public:
  EdgeStream(const fs::path& path, std::uint64_t record_bytes, IoCounters& io = default_io(),
             std::size_t buffer_bytes = kDefaultBufferBytes, MemoryTracker* memory = nullptr)
      : record_bytes_(record_bytes),
        file_(path, io, 4096),
        chunk_(chunk_bytes(buffer_bytes, record_bytes, file_.size()), memory) {
    require(record_bytes_ > 0, ErrorKind::Usage, "record width must be positive");
    const auto size = file_.size();
    if (size % record_bytes_ != 0) {
      fail(ErrorKind::Format, "'" + path.string() + "' has " + std::to_string(size) +
                                  " bytes, not a multiple of the " + std::to_string(record_bytes_) +
                                  "-byte record size");
    }
    remaining_ = size;
    total_records_ = size / record_bytes_;
  }

  std::uint64_t record_bytes() const { return record_bytes_; }
  std::uint64_t record_count() const { return total_records_; }

  /// Next run of whole records; empty once the file is exhausted.
  std::span<const std::byte> next_chunk() {
    if (remaining_ == 0) return {};
    const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(remaining_, chunk_.size()));
    file_.read_exact(std::span<std::byte>(chunk_.data(), want));
    remaining_ -= want;
    return {chunk_.data(), want};
  }

 private:
  static std::size_t chunk_bytes(std::size_t buffer_bytes, std::uint64_t record_bytes, std::uint64_t file_size) {
    const std::uint64_t records = std::max<std::uint64_t>(1, buffer_bytes / std::max<std::uint64_t>(1, record_bytes));
    const std::uint64_t bytes = std::min<std::uint64_t>(records * record_bytes, file_size);
    return static_cast<std::size_t>(std::max<std::uint64_t>(bytes, record_bytes));
  }

  std::uint64_t record_bytes_;
  InputFile file_;
  TrackedBuffer<std::byte> chunk_;
  std::uint64_t remaining_ = 0;
  std::uint64_t total_records_ = 0;
};

/// Decoded edges of a file in file order (test and tooling convenience).
inline std::vector<std::pair<VertexId, VertexId>> read_edge_pairs(const fs::path& path, const EdgeCodec& codec,
                                                                  IoCounters& io = default_io()) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  EdgeStream stream(path, codec.record_bytes(), io);
  for (auto chunk = stream.next_chunk(); !chunk.empty(); chunk = stream.next_chunk()) {
    for (std::size_t off = 0; off < chunk.size(); off += codec.record_bytes()) {
      const auto e = codec.decode(chunk.data() + off);
      edges.emplace_back(e.source, e.destination);
    }
  }
  return edges;
}

/// Buffered appender of encoded edges.
class EdgeWriter {
 public:
  EdgeWriter(const fs::path& path, const EdgeCodec& codec, IoCounters& io = default_io(),
             std::size_t buffer_bytes = kDefaultBufferBytes, MemoryTracker* memory = nullptr,
             OutputFile::Mode mode = OutputFile::Mode::Truncate)
      : codec_(codec), file_(path, io, mode, buffer_bytes, memory), scratch_(codec.record_bytes()) {}

  void write(VertexId src, VertexId dst, std::span<const std::byte> payload = {}) {
    codec_.encode(scratch_.data(), src, dst, payload);
    file_.write(scratch_);
    ++count_;
  }

  std::uint64_t count() const { return count_; }
  void close() { file_.close(); }

 private:
  EdgeCodec codec_;
  OutputFile file_;
  std::vector<std::byte> scratch_;
  std::uint64_t count_ = 0;
};

}  // namespace bbp

#endif  // BBP_STORAGE_HPP
