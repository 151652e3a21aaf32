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

#ifndef BBP_IO_HPP
#define BBP_IO_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <cerrno>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "bbp/error.hpp"

namespace bbp {

namespace fs = std::filesystem;

inline constexpr std::size_t kDefaultBufferBytes = 4u << 20;

// ---------------------------------------------------------------------------
// little-endian encoding

template <class T>
  requires std::is_arithmetic_v<T>
inline void store_le(std::byte* dst, T value) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
  static_assert(sizeof(U) == sizeof(T));
  U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    dst[i] = static_cast<std::byte>(bits & 0xffu);
    if constexpr (sizeof(U) > 1) bits >>= 8;
  }
}

template <class T>
  requires std::is_arithmetic_v<T>
inline T load_le(const std::byte* src) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
  if constexpr (std::endian::native == std::endian::little) {
    U bits;
    std::memcpy(&bits, src, sizeof(U));
    return std::bit_cast<T>(bits);
  } else {
    U bits = 0;
    for (std::size_t i = sizeof(U); i-- > 0;) bits = static_cast<U>((bits << 8) | std::to_integer<U>(src[i]));
    return std::bit_cast<T>(bits);
  }
}

/// Unsigned id stored in `width` (4 or 8) little-endian bytes.
inline void store_id(std::byte* dst, std::uint64_t id, unsigned width) {
  if (width == 4) {
    store_le<std::uint32_t>(dst, static_cast<std::uint32_t>(id));
  } else {
    store_le<std::uint64_t>(dst, id);
  }
}

inline std::uint64_t load_id(const std::byte* src, unsigned width) {
  return width == 4 ? load_le<std::uint32_t>(src) : load_le<std::uint64_t>(src);
}

// ---------------------------------------------------------------------------
// instrumentation

struct IoSnapshot {
  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  std::uint64_t seeks = 0;

  std::uint64_t bytes() const { return bytes_read + bytes_written; }

  friend IoSnapshot operator+(IoSnapshot a, const IoSnapshot& b) {
    a.bytes_read += b.bytes_read;
    a.bytes_written += b.bytes_written;
    a.seeks += b.seeks;
    return a;
  }
  friend IoSnapshot operator-(IoSnapshot a, const IoSnapshot& b) {
    a.bytes_read -= b.bytes_read;
    a.bytes_written -= b.bytes_written;
    a.seeks -= b.seeks;
    return a;
  }
  friend bool operator==(const IoSnapshot&, const IoSnapshot&) = default;
};

/// Shared, monotonically growing I/O tallies.
class IoCounters {
 public:
  void add_read(std::uint64_t n) { bytes_read_.fetch_add(n, std::memory_order_relaxed); }
  void add_write(std::uint64_t n) { bytes_written_.fetch_add(n, std::memory_order_relaxed); }
  void add_seek() { seeks_.fetch_add(1, std::memory_order_relaxed); }

  IoSnapshot snapshot() const {
    return {bytes_read_.load(std::memory_order_relaxed),
            bytes_written_.load(std::memory_order_relaxed), seeks_.load(std::memory_order_relaxed)};
  }

 private:
  std::atomic<std::uint64_t> bytes_read_{0};
  std::atomic<std::uint64_t> bytes_written_{0};
  std::atomic<std::uint64_t> seeks_{0};
};

/// Sink used when a caller does not care about counting.
inline IoCounters& default_io() {
  static IoCounters counters;
  return counters;
}

/// Current and peak bytes of buffers registered against a budget.
class MemoryTracker {
 public:
  void acquire(std::uint64_t n) {
    const std::uint64_t now = current_.fetch_add(n, std::memory_order_relaxed) + n;
    std::uint64_t seen = peak_.load(std::memory_order_relaxed);
    while (now > seen && !peak_.compare_exchange_weak(seen, now, std::memory_order_relaxed)) {
    }
  }
  void release(std::uint64_t n) { current_.fetch_sub(n, std::memory_order_relaxed); }

  std::uint64_t current() const { return current_.load(std::memory_order_relaxed); }
  std::uint64_t peak() const { return peak_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> current_{0};
  std::atomic<std::uint64_t> peak_{0};
};

/// Heap array whose size is charged to a MemoryTracker while it lives.
template <class T>
class TrackedBuffer {
 public:
  TrackedBuffer() = default;
  TrackedBuffer(std::size_t count, MemoryTracker* tracker, const T& fill = T{})
      : data_(count, fill), tracker_(tracker) {
    if (tracker_ != nullptr) tracker_->acquire(bytes());
  }
  TrackedBuffer(TrackedBuffer&& other) noexcept
      : data_(std::move(other.data_)), tracker_(std::exchange(other.tracker_, nullptr)) {}
  TrackedBuffer& operator=(TrackedBuffer&& other) noexcept {
    if (this != &other) {
      reset();
      data_ = std::move(other.data_);
      tracker_ = std::exchange(other.tracker_, nullptr);
    }
    return *this;
  }
  TrackedBuffer(const TrackedBuffer&) = delete;
  TrackedBuffer& operator=(const TrackedBuffer&) = delete;
  ~TrackedBuffer() { reset(); }

  void reset() {
    if (tracker_ != nullptr) tracker_->release(bytes());
    tracker_ = nullptr;
    data_.clear();
    data_.shrink_to_fit();
  }

  std::size_t size() const { return data_.size(); }
  std::uint64_t bytes() const { return data_.size() * sizeof(T); }
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }

 private:
  std::vector<T> data_;
  MemoryTracker* tracker_ = nullptr;
};

// ---------------------------------------------------------------------------
// files

namespace detail {
struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] inline void io_fail(const std::string& what, const fs::path& path) {
  fail(ErrorKind::Io, what + " '" + path.string() + "': " + std::strerror(errno));
}
}  // namespace detail

/// Sequential or positioned reader. Opening counts one seek; so does every
/// explicit reposition.
class InputFile {
 public:
  InputFile(const fs::path& path, IoCounters& io, std::size_t buffer_bytes = kDefaultBufferBytes,
            MemoryTracker* memory = nullptr)
      : path_(path), io_(&io), buffer_(std::max<std::size_t>(buffer_bytes, 512), memory) {
    file_.reset(std::fopen(path.c_str(), "rb"));
    if (!file_) detail::io_fail("cannot open", path);
    std::setvbuf(file_.get(), reinterpret_cast<char*>(buffer_.data()), _IOFBF, buffer_.size());
    io_->add_seek();
  }

  InputFile(InputFile&&) noexcept = default;
  InputFile& operator=(InputFile&&) = delete;

  const fs::path& path() const { return path_; }

  std::uint64_t size() const {
    std::error_code ec;
    const auto n = fs::file_size(path_, ec);
    if (ec) fail(ErrorKind::Io, "cannot stat '" + path_.string() + "': " + ec.message());
    return n;
  }

  void seek(std::uint64_t offset) {
    if (::fseeko(file_.get(), static_cast<off_t>(offset), SEEK_SET) != 0) {
      detail::io_fail("cannot seek in", path_);
    }
    io_->add_seek();
  }

  /// Reads up to out.size() bytes; returns the count (0 at end of file).
  std::size_t read_some(std::span<std::byte> out) {
    const std::size_t n = std::fread(out.data(), 1, out.size(), file_.get());
    if (n < out.size() && std::ferror(file_.get())) detail::io_fail("read failed on", path_);
    io_->add_read(n);
    return n;
  }

  void read_exact(std::span<std::byte> out) {
    if (read_some(out) != out.size()) {
      fail(ErrorKind::Format, "unexpected end of file in '" + path_.string() + "'");
    }
  }

 private:
  fs::path path_;
  IoCounters* io_;
  TrackedBuffer<std::byte> buffer_;
  detail::FilePtr file_;
};

class OutputFile {
 public:
  enum class Mode { Truncate, Append, Update };

  OutputFile(const fs::path& path, IoCounters& io, Mode mode = Mode::Truncate,
             std::size_t buffer_bytes = kDefaultBufferBytes, MemoryTracker* memory = nullptr)
      : path_(path), io_(&io), buffer_(std::max<std::size_t>(buffer_bytes, 512), memory) {
    const char* flags = mode == Mode::Truncate ? "wb" : mode == Mode::Append ? "ab" : "r+b";
    file_.reset(std::fopen(path.c_str(), flags));
    if (!file_) detail::io_fail("cannot open", path);
    std::setvbuf(file_.get(), reinterpret_cast<char*>(buffer_.data()), _IOFBF, buffer_.size());
    io_->add_seek();
  }

  OutputFile(OutputFile&&) noexcept = default;
  OutputFile& operator=(OutputFile&&) = delete;

  ~OutputFile() {
    if (file_) std::fflush(file_.get());
  }

  const fs::path& path() const { return path_; }

  void seek(std::uint64_t offset) {
    if (::fseeko(file_.get(), static_cast<off_t>(offset), SEEK_SET) != 0) {
      detail::io_fail("cannot seek in", path_);
    }
    io_->add_seek();
  }

  void write(std::span<const std::byte> bytes) {
    if (bytes.empty()) return;
    if (std::fwrite(bytes.data(), 1, bytes.size(), file_.get()) != bytes.size()) {
      detail::io_fail("short write on", path_);
    }
    io_->add_write(bytes.size());
  }

  void flush() {
    if (std::fflush(file_.get()) != 0) detail::io_fail("flush failed on", path_);
  }

  /// Flushes and closes; errors surface here instead of in the destructor.
  void close() {
    if (!file_) return;
    flush();
    if (std::fclose(file_.release()) != 0) detail::io_fail("close failed on", path_);
  }

 private:
  fs::path path_;
  IoCounters* io_;
  // Declared before file_ so the stdio buffer outlives the stream.
  TrackedBuffer<std::byte> buffer_;
  detail::FilePtr file_;
};

inline std::span<const std::byte> as_bytes(std::string_view text) {
  return {reinterpret_cast<const std::byte*>(text.data()), text.size()};
}

inline std::string read_text_file(const fs::path& path, IoCounters& io) {
  InputFile in(path, io, 64 * 1024);
  std::string text(in.size(), '\0');
  in.read_exact({reinterpret_cast<std::byte*>(text.data()), text.size()});
  return text;
}

inline void write_text_file(const fs::path& path, std::string_view text, IoCounters& io) {
  OutputFile out(path, io, OutputFile::Mode::Truncate, 64 * 1024);
  out.write(as_bytes(text));
  out.close();
}

}  // namespace bbp

#endif  // BBP_IO_HPP
