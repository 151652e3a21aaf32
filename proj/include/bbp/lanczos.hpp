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

#ifndef BBP_LANCZOS_HPP
#define BBP_LANCZOS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bbp/engine.hpp"
#include "bbp/ooc_vector.hpp"
#include "bbp/programs.hpp"
#include "bbp/tridiagonal.hpp"

namespace bbp {

struct LanczosOptions {
  std::uint64_t k = 5;
  std::uint64_t max_steps = 300;
  double tol = 1e-6;  // residual bound relative to the norm estimate; at least sqrt(eps) unless fully reorthogonalized
  std::uint64_t seed = 1;
  std::uint64_t max_restarts = 16;
  bool full_reorthogonalization = false;
  bool weighted = false;
  bool keep_basis = false;
  std::string prefix = "lanczos";
  std::string eigvec_prefix = "eigvec";
  EngineOptions engine;
};

struct LanczosResult {
  std::vector<double> eigenvalues;  // non-increasing
  std::vector<double> residuals;    // ||A y - lambda y||, one SpMV each
  std::vector<VertexVector> eigenvectors;
  std::vector<double> alphas;
  std::vector<double> betas;        // betas[i] couples steps i and i+1; 0 marks a restart
  std::vector<VertexVector> basis;  // kept only with keep_basis
  std::uint64_t steps = 0;
  std::uint64_t restarts = 0;
  std::uint64_t spmv_count = 0;
  std::uint64_t good_ritz_vectors = 0;
  double norm_estimate = 0.0;
  double tol = 0.0;  // tolerance actually enforced
  IoSnapshot io;
};

/// Top-k eigenpairs (by algebraic value) of the adjacency matrix of a
/// symmetrized graph. Lanczos basis vectors live on disk. Orthogonality is
/// maintained selectively: once a Ritz pair's error bound
/// beta_j * |s_ji| drops under sqrt(eps) * ||T||, its Ritz vector is formed
/// and every later Lanczos vector is purged of it.
inline LanczosResult lanczos_so(const fs::path& graph_dir, const LanczosOptions& opt) {
  const GraphLayout layout(graph_dir);
  IoCounters io;
  const GraphManifest m = load_manifest(layout.manifest(), io);
  require(m.symmetrized, ErrorKind::Config, "Lanczos needs a symmetric operator; preprocess with --symmetrize");
  require(m.v_count >= 1, ErrorKind::Config, "Lanczos needs at least one vertex");
  require(opt.k >= 1, ErrorKind::Usage, "k must be at least 1");
  require(opt.k <= opt.max_steps, ErrorKind::Usage, "k must not exceed the step limit");
  require(opt.tol > 0, ErrorKind::Usage, "tolerance must be positive");

  const std::uint64_t n = m.v_count;
  const std::uint64_t step_limit = std::min(opt.max_steps, n);
  const Spmv program = make_spmv(m, opt.weighted);
  const double eps = std::numeric_limits<double>::epsilon();
  const double so_threshold = std::sqrt(eps);
  LanczosResult result;
  // Purged Ritz vectors stop improving once good, so selective
  // orthogonalization cannot certify residuals much below sqrt(eps).
  result.tol = opt.full_reorthogonalization ? opt.tol : std::max(opt.tol, so_threshold);
  const double tol = result.tol;

  auto spmv = [&](const VertexVector& x, const std::string& name) {
    EngineOptions eo = opt.engine;
    eo.iterations = 1;
    eo.initial_values = x.path();
    eo.output = name;
    EngineResult r = run(graph_dir, program, eo);
    result.io = result.io + r.stats.total();
    ++result.spmv_count;
    return r.values;
  };
  auto basis_path = [&](std::uint64_t j) { return layout.vector(opt.prefix + "_q" + std::to_string(j)); };
  auto orthogonalize = [&](const VertexVector& w, const std::vector<VertexVector>& against) {
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (const auto& q : against) ooc_axpy(-ooc_dot(q, w, io), q, w, io);
    }
  };
  auto ritz_vector = [&](const std::vector<VertexVector>& basis, const std::vector<double>& s, const fs::path& path) {
    auto y = ooc_zeros(path, n);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (s[i] != 0.0) ooc_axpy(s[i], basis[i], y, io);
    }
    const double norm = ooc_norm(y, io);
    if (norm > 0) ooc_scale(1.0 / norm, y, io);
    return y;
  };

  struct GoodRitz {
    double theta;
    VertexVector vec;
  };
  std::vector<GoodRitz> good;
  std::vector<VertexVector> basis;
  std::vector<double>& alpha = result.alphas;
  std::vector<double>& beta = result.betas;

  // Top-k Ritz pairs of the current T with residuals from one SpMV each.
  auto extract = [&] {
    const TridiagonalEigen te = tridiagonal_eigen_full(alpha, beta);
    result.norm_estimate = 0.0;
    for (double theta : te.values) result.norm_estimate = std::max(result.norm_estimate, std::abs(theta));
    result.eigenvalues.clear();
    result.residuals.clear();
    result.eigenvectors.clear();
    const std::size_t count = std::min<std::size_t>(opt.k, te.values.size());
    for (std::size_t r = 0; r < count; ++r) {
      const std::size_t i = te.values.size() - 1 - r;
      const fs::path path = layout.vector(opt.eigvec_prefix + "_" + std::to_string(r));
      VertexVector y = ritz_vector(basis, te.vector(i), path);
      VertexVector ay = spmv(y, opt.prefix + "_ay");
      result.eigenvalues.push_back(te.values[i]);
      result.residuals.push_back(ooc_diff_norm(te.values[i], y, ay, io));
      result.eigenvectors.push_back(y);
      fs::remove(ay.path());
    }
  };
  std::uint64_t next_check = 0;

  auto start = ooc_random(basis_path(0), n, opt.seed, io);
  ooc_scale(1.0 / ooc_norm(start, io), start, io);
  basis.push_back(start);

  for (std::uint64_t j = 0;; ++j) {
    VertexVector w = spmv(basis[j], opt.prefix + "_w");
    const double a = ooc_dot(basis[j], w, io);
    ooc_axpy(-a, basis[j], w, io);
    if (j > 0 && beta.back() != 0.0) ooc_axpy(-beta.back(), basis[j - 1], w, io);
    alpha.push_back(a);
    if (opt.full_reorthogonalization) orthogonalize(w, basis);
    double b = ooc_norm(w, io);

    const std::size_t last = j;
    TridiagonalEigen te = tridiagonal_eigen(alpha, beta, std::span<const std::size_t>(&last, 1));
    double tnorm = 0.0;
    for (double theta : te.values) tnorm = std::max(tnorm, std::abs(theta));

    if (!opt.full_reorthogonalization) {
      std::optional<TridiagonalEigen> full;
      for (std::size_t i = 0; i < te.values.size(); ++i) {
        if (b * std::abs(te.rows[0][i]) > so_threshold * tnorm) continue;
        const double theta = te.values[i];
        auto cached = std::find_if(good.begin(), good.end(), [&](const GoodRitz& g) {
          return std::abs(g.theta - theta) <= so_threshold * std::max(tnorm, 1.0);
        });
        if (cached != good.end()) {
          cached->theta = theta;
          continue;
        }
        if (!full) full = tridiagonal_eigen_full(alpha, beta);
        const fs::path path = layout.vector(opt.prefix + "_ritz" + std::to_string(good.size()));
        good.push_back({theta, ritz_vector(basis, full->vector(i), path)});
        ++result.good_ritz_vectors;
      }
      if (!good.empty()) {
        for (const auto& g : good) ooc_axpy(-ooc_dot(g.vec, w, io), g.vec, w, io);
        b = ooc_norm(w, io);
      }
    }

    const std::uint64_t steps = j + 1;
    const std::size_t top = std::min<std::size_t>(opt.k, te.values.size());
    bool converged = steps >= opt.k && steps >= next_check;
    for (std::size_t r = 0; converged && r < top; ++r) {
      converged = b * std::abs(te.rows[0][te.values.size() - 1 - r]) <= tol * tnorm;
    }
    if (converged) {
      // The bound ignores purged components; confirm with explicit residuals.
      extract();
      const double limit = tol * result.norm_estimate;
      if (std::all_of(result.residuals.begin(), result.residuals.end(), [&](double r) { return r <= limit; })) break;
      next_check = steps + std::max<std::uint64_t>(opt.k, 10);
    }
    if (steps >= step_limit) {
      if (!converged) extract();
      break;
    }

    if (b <= 1e-10 * std::max(tnorm, 1.0)) {
      // Invariant subspace: continue from a fresh direction orthogonal to it.
      if (result.restarts >= opt.max_restarts) {
        fail(ErrorKind::Resource, "Lanczos broke down " + std::to_string(result.restarts) +
                                      " times before k pairs converged");
      }
      ++result.restarts;
      auto q = ooc_random(basis_path(j + 1), n, opt.seed + result.restarts, io);
      orthogonalize(q, basis);
      const double norm = ooc_norm(q, io);
      require(norm > 1e-8, ErrorKind::Resource, "Lanczos restart vector vanished after orthogonalization");
      ooc_scale(1.0 / norm, q, io);
      beta.push_back(0.0);
      basis.push_back(q);
    } else {
      fs::rename(w.path(), basis_path(j + 1));
      VertexVector q(basis_path(j + 1), sizeof(double), n);
      ooc_scale(1.0 / b, q, io);
      beta.push_back(b);
      basis.push_back(q);
    }
  }

  result.steps = alpha.size();
  fs::remove(layout.vector(opt.prefix + "_w"));
  for (const auto& g : good) fs::remove(g.vec.path());
  if (opt.keep_basis) {
    result.basis = basis;
  } else {
    for (const auto& q : basis) fs::remove(q.path());
  }
  result.io = result.io + io.snapshot();
  return result;
}

}  // namespace bbp

#endif  // BBP_LANCZOS_HPP
