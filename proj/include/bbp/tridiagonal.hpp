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

#ifndef BBP_TRIDIAGONAL_HPP
#define BBP_TRIDIAGONAL_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "bbp/error.hpp"

namespace bbp {

/// Eigen-decomposition of a symmetric tridiagonal matrix.
/// values ascend; rows[r][i] is component `row_ids[r]` of eigenvector i.
struct TridiagonalEigen {
  std::vector<double> values;
  std::vector<std::size_t> row_ids;
  std::vector<std::vector<double>> rows;

  /// Full column i; valid only when every row was requested.
  std::vector<double> vector(std::size_t i) const {
    std::vector<double> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r][i];
    return out;
  }
};

/// Implicit QL with Wilkinson shifts (the EISPACK tql2 scheme). `alpha` is
/// the diagonal, `beta[i]` couples i and i+1. Only the eigenvector rows in
/// `row_ids` are accumulated, which costs O(n) per rotation and row.
inline TridiagonalEigen tridiagonal_eigen(std::span<const double> alpha, std::span<const double> beta,
                                          std::span<const std::size_t> row_ids) {
  const std::size_t n = alpha.size();
  require(beta.size() + 1 == n || (n == 0 && beta.empty()), ErrorKind::Usage,
          "tridiagonal matrix needs n-1 off-diagonal entries");
  TridiagonalEigen out;
  out.values.assign(alpha.begin(), alpha.end());
  out.row_ids.assign(row_ids.begin(), row_ids.end());
  out.rows.assign(row_ids.size(), std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < row_ids.size(); ++r) {
    require(row_ids[r] < n, ErrorKind::Usage, "eigenvector row out of range");
    out.rows[r][row_ids[r]] = 1.0;
  }
  if (n == 0) return out;

  std::vector<double>& d = out.values;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = beta[i];

  const double eps = std::numeric_limits<double>::epsilon();
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 64) fail(ErrorKind::Resource, "tridiagonal QL did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (auto& row : out.rows) {
            const double t = row[i + 1];
            row[i + 1] = s * row[i] + c * t;
            row[i] = c * row[i] - s * t;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d[j] < d[k]) k = j;
    }
    if (k != i) {
      std::swap(d[i], d[k]);
      for (auto& row : out.rows) std::swap(row[i], row[k]);
    }
  }
  return out;
}

inline TridiagonalEigen tridiagonal_eigen_full(std::span<const double> alpha, std::span<const double> beta) {
  std::vector<std::size_t> ids(alpha.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return tridiagonal_eigen(alpha, beta, ids);
}

}  // namespace bbp

#endif  // BBP_TRIDIAGONAL_HPP
