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

#ifndef BBP_OOC_VECTOR_HPP
#define BBP_OOC_VECTOR_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bbp/rmat.hpp"
#include "bbp/storage.hpp"

namespace bbp {

// BLAS-1 over disk-resident vectors of doubles. Every routine streams its
// operands in chunks of `chunk` elements; reductions add per-chunk partial
// sums in chunk order, so results do not depend on anything but the data.

inline constexpr std::size_t kOocChunk = 1u << 16;

namespace detail {

class DoubleReader {
 public:
  DoubleReader(const VertexVector& vec, IoCounters& io, std::size_t chunk)
      : in_(vec.path(), io, 4096), remaining_(vec.length()), buffer_(std::min<std::uint64_t>(chunk, vec.length())) {
    require(vec.width() == sizeof(double), ErrorKind::Usage, "out-of-core vectors hold 8-byte doubles");
  }

  std::span<double> next() {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining_, buffer_.size()));
    in_.read_exact(std::as_writable_bytes(std::span<double>(buffer_.data(), n)));
    if constexpr (std::endian::native != std::endian::little) {
      for (std::size_t i = 0; i < n; ++i) buffer_[i] = load_le<double>(reinterpret_cast<std::byte*>(&buffer_[i]));
    }
    remaining_ -= n;
    return {buffer_.data(), n};
  }

  bool done() const { return remaining_ == 0; }

 private:
  InputFile in_;
  std::uint64_t remaining_;
  std::vector<double> buffer_;
};

inline void write_doubles(OutputFile& out, std::span<double> values, const fs::path& path) {
  for (double& x : values) {
    if (!std::isfinite(x)) fail(ErrorKind::Format, "non-finite value written to '" + path.string() + "'");
    if constexpr (std::endian::native != std::endian::little) store_le<double>(reinterpret_cast<std::byte*>(&x), x);
  }
  out.write(std::as_bytes(values));
}

inline void same_shape(const VertexVector& x, const VertexVector& y) {
  if (x.length() != y.length()) {
    fail(ErrorKind::Usage, "vector length mismatch: " + std::to_string(x.length()) + " vs " +
                               std::to_string(y.length()));
  }
}

inline double checked(double value, const char* what) {
  if (!std::isfinite(value)) fail(ErrorKind::Format, std::string(what) + " produced a non-finite value");
  return value;
}

}  // namespace detail

inline double ooc_dot(const VertexVector& x, const VertexVector& y, IoCounters& io = default_io(),
                      std::size_t chunk = kOocChunk) {
  detail::same_shape(x, y);
  detail::DoubleReader rx(x, io, chunk), ry(y, io, chunk);
  double total = 0.0;
  while (!rx.done()) {
    auto a = rx.next();
    auto b = ry.next();
    double partial = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) partial += a[i] * b[i];
    total += partial;
  }
  return detail::checked(total, "dot product");
}

inline double ooc_norm(const VertexVector& x, IoCounters& io = default_io(), std::size_t chunk = kOocChunk) {
  detail::DoubleReader rx(x, io, chunk);
  double total = 0.0;
  while (!rx.done()) {
    double partial = 0.0;
    for (double v : rx.next()) partial += v * v;
    total += partial;
  }
  return detail::checked(std::sqrt(total), "norm");
}

/// ||y - a x||
inline double ooc_diff_norm(double a, const VertexVector& x, const VertexVector& y, IoCounters& io = default_io(),
                            std::size_t chunk = kOocChunk) {
  detail::same_shape(x, y);
  detail::DoubleReader rx(x, io, chunk), ry(y, io, chunk);
  double total = 0.0;
  while (!rx.done()) {
    auto xs = rx.next();
    auto ys = ry.next();
    double partial = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = ys[i] - a * xs[i];
      partial += d * d;
    }
    total += partial;
  }
  return detail::checked(std::sqrt(total), "residual norm");
}

/// y <- a x + y, in place.
inline void ooc_axpy(double a, const VertexVector& x, const VertexVector& y, IoCounters& io = default_io(),
                     std::size_t chunk = kOocChunk) {
  detail::same_shape(x, y);
  detail::DoubleReader rx(x, io, chunk), ry(y, io, chunk);
  OutputFile out(y.path(), io, OutputFile::Mode::Update, 4096);
  while (!rx.done()) {
    auto xs = rx.next();
    auto ys = ry.next();
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] += a * xs[i];
    detail::write_doubles(out, ys, y.path());
  }
  out.close();
}

/// x <- a x, in place.
inline void ooc_scale(double a, const VertexVector& x, IoCounters& io = default_io(), std::size_t chunk = kOocChunk) {
  detail::DoubleReader rx(x, io, chunk);
  OutputFile out(x.path(), io, OutputFile::Mode::Update, 4096);
  while (!rx.done()) {
    auto xs = rx.next();
    for (double& v : xs) v *= a;
    detail::write_doubles(out, xs, x.path());
  }
  out.close();
}

inline VertexVector ooc_copy(const VertexVector& x, const fs::path& to, IoCounters& io = default_io(),
                             std::size_t chunk = kOocChunk) {
  auto y = VertexVector::create(to, sizeof(double), x.length());
  detail::DoubleReader rx(x, io, chunk);
  OutputFile out(to, io, OutputFile::Mode::Update, 4096);
  while (!rx.done()) detail::write_doubles(out, rx.next(), to);
  out.close();
  return y;
}

inline VertexVector ooc_zeros(const fs::path& path, std::uint64_t n) {
  return VertexVector::create(path, sizeof(double), n);
}

/// Entries uniform in [-0.5, 0.5) from a seeded generator.
inline VertexVector ooc_random(const fs::path& path, std::uint64_t n, std::uint64_t seed,
                               IoCounters& io = default_io(), std::size_t chunk = kOocChunk) {
  auto x = VertexVector::create(path, sizeof(double), n);
  std::mt19937_64 rng(seed);
  OutputFile out(path, io, OutputFile::Mode::Update, 4096);
  std::vector<double> buffer(std::min<std::uint64_t>(chunk, std::max<std::uint64_t>(n, 1)));
  for (std::uint64_t done = 0; done < n;) {
    const std::size_t m = static_cast<std::size_t>(std::min<std::uint64_t>(n - done, buffer.size()));
    for (std::size_t i = 0; i < m; ++i) buffer[i] = unit_uniform(rng) - 0.5;
    detail::write_doubles(out, std::span<double>(buffer.data(), m), path);
    done += m;
  }
  out.close();
  return x;
}

inline std::vector<double> ooc_load(const VertexVector& x, IoCounters& io = default_io()) {
  return read_vector<double>(x, io);
}

}  // namespace bbp

#endif  // BBP_OOC_VECTOR_HPP
