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

#ifndef BBP_RMAT_HPP
#define BBP_RMAT_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

#include "bbp/storage.hpp"

namespace bbp {

struct RmatProbabilities {
  double a = 0.57, b = 0.19, c = 0.19, d = 0.05;

  void validate() const {
    for (double x : {a, b, c, d}) {
      require(std::isfinite(x) && x >= 0.0, ErrorKind::Usage, "R-MAT probabilities must be non-negative");
    }
    require(std::abs(a + b + c + d - 1.0) <= 1e-9, ErrorKind::Usage, "R-MAT probabilities must sum to 1");
  }
};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Writes e_count R-MAT edges as packed binary records with `id_bytes` ids.
/// Output depends only on the arguments.
inline void generate_rmat(std::uint64_t v_count, std::uint64_t e_count, std::uint64_t seed,
                          const RmatProbabilities& probs, const fs::path& output, unsigned id_bytes = 4,
                          IoCounters& io = default_io()) {
  require(v_count >= 1 && std::has_single_bit(v_count), ErrorKind::Usage,
          "R-MAT vertex count must be a power of two");
  require(id_bytes == 4 || id_bytes == 8, ErrorKind::Usage, "id width must be 4 or 8");
  require(id_bytes == 8 || v_count <= (1ull << 32), ErrorKind::Usage, "4-byte ids cannot address this many vertices");
  probs.validate();

  const int levels = std::countr_zero(v_count);
  const double ab = probs.a + probs.b;
  const double abc = ab + probs.c;
  std::mt19937_64 rng(seed);
  EdgeWriter out(output, EdgeCodec{id_bytes, 0}, io);
  for (std::uint64_t e = 0; e < e_count; ++e) {
    std::uint64_t src = 0, dst = 0;
    for (int level = 0; level < levels; ++level) {
      const double r = unit_uniform(rng);
      src <<= 1;
      dst <<= 1;
      if (r < probs.a) {
      } else if (r < ab) {
        dst |= 1;
      } else if (r < abc) {
        src |= 1;
      } else {
        src |= 1;
        dst |= 1;
      }
    }
    out.write(src, dst);
  }
  out.close();
}

}  // namespace bbp

#endif  // BBP_RMAT_HPP
