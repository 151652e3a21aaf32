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

#ifndef BBP_PROGRAM_HPP
#define BBP_PROGRAM_HPP

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>

#include "bbp/core.hpp"

namespace bbp {

/// Edge payload bytes handed to process(); empty for payload-less graphs and
/// for edges that reach the accumulator through a shuffle bucket.
using EdgeData = std::span<const std::byte>;

/// A vertex program. Per pass and per vertex v the engine evaluates
///
///   acc  = initialize(v, prev[v])
///   acc  = process(acc, scatter(u, prev[u], deg(u)), data)   for every edge (u, v)
///   next = apply(v, gather over the per-thread accumulators)
///
/// Thread buffers other than the first start at neutral(), so gather must be
/// associative and commutative with neutral() as its identity.
///
/// Optional members:
///   value_type initial_value(VertexId) const          values before the first pass
///   value_type scatter(VertexId, value_type, std::uint64_t degree) const
///   value_type apply(VertexId, value_type) const
///   bool needs_degrees() const
///   bool uses_edge_data() const
template <class P>
concept VertexProgram = requires(const P& program, typename P::value_type value, typename P::value_type& acc,
                                 VertexId v, EdgeData data) {
  typename P::value_type;
  requires std::is_arithmetic_v<typename P::value_type>;
  { program.neutral() } -> std::convertible_to<typename P::value_type>;
  { program.initialize(v, value) } -> std::convertible_to<typename P::value_type>;
  program.process(acc, value, data);
  { program.gather(value, value) } -> std::convertible_to<typename P::value_type>;
};

namespace program_hooks {

template <VertexProgram P>
bool needs_degrees(const P& program) {
  if constexpr (requires { { program.needs_degrees() } -> std::convertible_to<bool>; }) {
    return program.needs_degrees();
  } else {
    return false;
  }
}

template <VertexProgram P>
bool uses_edge_data(const P& program) {
  if constexpr (requires { { program.uses_edge_data() } -> std::convertible_to<bool>; }) {
    return program.uses_edge_data();
  } else {
    return false;
  }
}

template <VertexProgram P>
constexpr bool has_initial_value() {
  return requires(const P& program, VertexId v) {
    { program.initial_value(v) } -> std::convertible_to<typename P::value_type>;
  };
}

template <VertexProgram P>
typename P::value_type initial_value(const P& program, VertexId v) {
  if constexpr (has_initial_value<P>()) {
    return program.initial_value(v);
  } else {
    return typename P::value_type{};
  }
}

template <VertexProgram P>
typename P::value_type scatter(const P& program, VertexId u, typename P::value_type value, std::uint64_t degree) {
  if constexpr (requires { { program.scatter(u, value, degree) } -> std::convertible_to<typename P::value_type>; }) {
    return program.scatter(u, value, degree);
  } else {
    return value;
  }
}

template <VertexProgram P>
typename P::value_type apply(const P& program, VertexId v, typename P::value_type acc) {
  if constexpr (requires { { program.apply(v, acc) } -> std::convertible_to<typename P::value_type>; }) {
    return program.apply(v, acc);
  } else {
    return acc;
  }
}

}  // namespace program_hooks

}  // namespace bbp

#endif  // BBP_PROGRAM_HPP
