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


#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "bbp/lanczos.hpp"
#include "bbp/ooc_vector.hpp"
#include "bbp/tridiagonal.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using oracle::EdgeList;
using oracle::TempDir;
namespace fs = std::filesystem;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> real(-1, 1);
  std::vector<double> x(n);
  for (auto& v : x) v = real(rng);
  return x;
}

// Eigenvalues of the symmetric adjacency matrix, descending.
std::vector<double> dense_eigenvalues(std::uint64_t n, const EdgeList& edges) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& [u, v] : edges) a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) += 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::reverse(out.begin(), out.end());
  return out;
}

bbp::LanczosResult solve(const fs::path& graph, std::uint64_t k, bbp::LanczosOptions opt = {}) {
  opt.k = k;
  return bbp::lanczos_so(graph, opt);
}

TEST(OocVector, DotOfOrthogonalUnitVectors) {
  TempDir dir;
  const auto x = bbp::write_vector<double>(dir / "x.vec", std::vector<double>{1, 0});
  const auto y = bbp::write_vector<double>(dir / "y.vec", std::vector<double>{0, 1});
  EXPECT_EQ(bbp::ooc_dot(x, y), 0.0);
}

TEST(OocVector, NormOfThreeFour) {
  TempDir dir;
  EXPECT_EQ(bbp::ooc_norm(bbp::write_vector<double>(dir / "x.vec", std::vector<double>{3, 4})), 5.0);
}

TEST(OocVector, BlasOneMatchesInMemoryReference) {
  TempDir dir;
  const std::size_t n = 10000;
  const auto xs = random_values(n, 1), ys = random_values(n, 2);
  for (std::size_t chunk : {std::size_t{7}, std::size_t{1000}, bbp::kOocChunk}) {
    const auto x = bbp::write_vector<double>(dir / "x.vec", xs);
    const auto y = bbp::write_vector<double>(dir / "y.vec", ys);
    double dot = 0, norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += xs[i] * ys[i];
      norm += xs[i] * xs[i];
    }
    EXPECT_NEAR(bbp::ooc_dot(x, y, bbp::default_io(), chunk), dot, 1e-12 * n);
    EXPECT_NEAR(bbp::ooc_norm(x, bbp::default_io(), chunk), std::sqrt(norm), 1e-12 * n);

    bbp::ooc_axpy(2.0, x, y, bbp::default_io(), chunk);
    std::vector<double> want(n);
    for (std::size_t i = 0; i < n; ++i) want[i] = ys[i] + 2.0 * xs[i];
    EXPECT_LE(oracle::max_relative_error(bbp::ooc_load(y), want), 1e-12);

    double diff = 0;
    for (std::size_t i = 0; i < n; ++i) diff += (want[i] - 0.5 * xs[i]) * (want[i] - 0.5 * xs[i]);
    EXPECT_NEAR(bbp::ooc_diff_norm(0.5, x, y, bbp::default_io(), chunk), std::sqrt(diff), 1e-10);

    bbp::ooc_scale(-3.0, x, bbp::default_io(), chunk);
    for (std::size_t i = 0; i < n; ++i) want[i] = -3.0 * xs[i];
    EXPECT_LE(oracle::max_relative_error(bbp::ooc_load(x), want), 1e-15);
    EXPECT_EQ(bbp::ooc_load(bbp::ooc_copy(x, dir / "c.vec")), bbp::ooc_load(x));
  }
}

TEST(OocVector, ReductionsAreDeterministic) {
  TempDir dir;
  const auto x = bbp::write_vector<double>(dir / "x.vec", random_values(50000, 3));
  const auto y = bbp::write_vector<double>(dir / "y.vec", random_values(50000, 4));
  const double first = bbp::ooc_dot(x, y);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(bbp::ooc_dot(x, y), first);
}

TEST(OocVector, LengthMismatchIsAnError) {
  TempDir dir;
  const auto x = bbp::write_vector<double>(dir / "x.vec", std::vector<double>{1, 2});
  const auto y = bbp::write_vector<double>(dir / "y.vec", std::vector<double>{1, 2, 3});
  EXPECT_THROW(bbp::ooc_dot(x, y), bbp::Error);
  EXPECT_THROW(bbp::ooc_axpy(1.0, x, y), bbp::Error);
}

TEST(OocVector, RandomVectorDependsOnlyOnSeed) {
  TempDir dir;
  const auto a = bbp::ooc_load(bbp::ooc_random(dir / "a.vec", 1000, 9));
  const auto b = bbp::ooc_load(bbp::ooc_random(dir / "b.vec", 1000, 9));
  const auto c = bbp::ooc_load(bbp::ooc_random(dir / "c.vec", 1000, 10));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (double v : a) {
    EXPECT_GE(v, -0.5);
    EXPECT_LT(v, 0.5);
  }
}

TEST(OocVector, NonFiniteResultsRejected) {
  TempDir dir;
  const auto x = bbp::write_vector<double>(dir / "x.vec", std::vector<double>{1e308, 1});
  EXPECT_THROW(bbp::ooc_scale(1e10, x), bbp::Error);
}

TEST(Tridiagonal, MatchesDenseSolver) {
  std::mt19937_64 rng(5);
  for (std::size_t n : {1u, 2u, 5u, 40u, 200u}) {
    const auto alpha = random_values(n, rng());
    auto beta = random_values(n > 0 ? n - 1 : 0, rng());
    if (n > 10) beta[n / 2] = 0.0;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
      t(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(t);
    const auto full = bbp::tridiagonal_eigen_full(alpha, beta);
    const std::size_t last = n - 1;
    const auto partial = bbp::tridiagonal_eigen(alpha, beta, std::span<const std::size_t>(&last, 1));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(full.values[i], ref.eigenvalues()(static_cast<Eigen::Index>(i)), 1e-12);
      EXPECT_EQ(partial.values[i], full.values[i]);
      EXPECT_EQ(partial.rows[0][i], full.rows[last][i]);
      // T s = theta s for the returned vector.
      const auto s = full.vector(i);
      Eigen::VectorXd sv = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(n));
      EXPECT_NEAR(sv.norm(), 1.0, 1e-12);
      EXPECT_LE((t * sv - full.values[i] * sv).norm(), 1e-11);
    }
  }
}

TEST(Lanczos, PathOfTwo) {
  TempDir dir;
  fixture::GraphSpec spec;
  spec.symmetrize = true;
  fixture::build(dir, "g", {{0, 1}}, spec);
  const auto r = solve(dir / "g", 2);
  ASSERT_EQ(r.eigenvalues.size(), 2u);
  EXPECT_NEAR(r.eigenvalues[0], 1.0, 1e-10);
  EXPECT_NEAR(r.eigenvalues[1], -1.0, 1e-10);
}

TEST(Lanczos, TriangleNeedsARestartForTheRepeatedEigenvalue) {
  TempDir dir;
  fixture::GraphSpec spec;
  spec.symmetrize = true;
  fixture::build(dir, "g", {{0, 1}, {1, 2}, {2, 0}}, spec);
  const auto r = solve(dir / "g", 3);
  ASSERT_EQ(r.eigenvalues.size(), 3u);
  EXPECT_NEAR(r.eigenvalues[0], 2.0, 1e-10);
  EXPECT_NEAR(r.eigenvalues[1], -1.0, 1e-10);
  EXPECT_NEAR(r.eigenvalues[2], -1.0, 1e-10);
  EXPECT_GE(r.restarts, 1u);
  for (double res : r.residuals) EXPECT_LE(res, 1e-10);
}

TEST(Lanczos, UnsymmetrizedGraphIsConfigError) {
  TempDir dir;
  fixture::build(dir, "g", {{0, 1}, {1, 0}});
  try {
    solve(dir / "g", 1);
    FAIL();
  } catch (const bbp::Error& e) {
    EXPECT_EQ(e.kind(), bbp::ErrorKind::Config);
  }
}

class LanczosRandom : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    edges_ = oracle::symmetrize(oracle::random_edges(kN, 6000, 17));
    fixture::GraphSpec spec;
    spec.memory = 2 * 8 * kN / 4;
    spec.v_count = kN;
    spec.symmetrize = false;
    fixture::build(*dir_, "g", edges_, spec);
    // Mark the already symmetric list as such.
    bbp::GraphLayout layout(*dir_ / "g");
    auto m = bbp::load_manifest(layout.manifest());
    m.symmetrized = true;
    bbp::save_manifest(m, layout.manifest());
    want_ = dense_eigenvalues(kN, edges_);
  }
  static void TearDownTestSuite() { delete dir_; }

  static constexpr std::uint64_t kN = 2000;
  static inline TempDir* dir_ = nullptr;
  static inline EdgeList edges_;
  static inline std::vector<double> want_;
};

TEST_F(LanczosRandom, TopFiveMatchDenseSolver) {
  bbp::LanczosOptions opt;
  opt.tol = 1e-10;
  const auto r = solve(*dir_ / "g", 5, opt);
  ASSERT_EQ(r.eigenvalues.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_LE(std::abs(r.eigenvalues[i] - want_[i]) / std::abs(want_[i]), 1e-6) << "i=" << i;
  }
  for (std::size_t i = 0; i + 1 < 5; ++i) EXPECT_GE(r.eigenvalues[i], r.eigenvalues[i + 1]);
  EXPECT_EQ(r.tol, std::sqrt(std::numeric_limits<double>::epsilon()));
  for (double res : r.residuals) EXPECT_LE(res, r.tol * r.norm_estimate);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_TRUE(fs::exists(*dir_ / "g" / "vectors" / ("eigvec_" + std::to_string(i) + ".vec")));
    EXPECT_NEAR(bbp::ooc_norm(r.eigenvectors[i]), 1.0, 1e-10);
  }
}

TEST_F(LanczosRandom, ResidualsAgreeWithExplicitProduct) {
  const auto r = solve(*dir_ / "g", 3);
  const auto a = oracle::dense_adjacency(kN, edges_);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto y = bbp::ooc_load(r.eigenvectors[i]);
    double res = 0;
    for (std::uint64_t u = 0; u < kN; ++u) {
      double ay = 0;
      for (std::uint64_t v = 0; v < kN; ++v) ay += a[u][v] * y[v];
      res += (ay - r.eigenvalues[i] * y[u]) * (ay - r.eigenvalues[i] * y[u]);
    }
    EXPECT_NEAR(std::sqrt(res), r.residuals[i], 1e-9);
    EXPECT_LE(r.residuals[i], r.tol * r.norm_estimate);
  }
}

TEST_F(LanczosRandom, DefaultToleranceContractHolds) {
  const auto r = solve(*dir_ / "g", 5);
  EXPECT_EQ(r.tol, 1e-6);
  for (double res : r.residuals) EXPECT_LE(res, 1e-6 * r.norm_estimate);
}

TEST_F(LanczosRandom, FullReorthogonalizationReachesTightTolerance) {
  bbp::LanczosOptions opt;
  opt.full_reorthogonalization = true;
  opt.tol = 1e-12;
  const auto r = solve(*dir_ / "g", 5, opt);
  EXPECT_EQ(r.tol, 1e-12);
  EXPECT_LT(r.steps, 300u);
  for (double res : r.residuals) EXPECT_LE(res, 1e-12 * r.norm_estimate);
}

TEST_F(LanczosRandom, FullReorthogonalizationKeepsBasisOrthonormal) {
  bbp::LanczosOptions opt;
  opt.full_reorthogonalization = true;
  opt.keep_basis = true;
  opt.max_steps = 60;
  opt.tol = 1e-14;
  opt.prefix = "full";
  const auto r = solve(*dir_ / "g", 2, opt);
  ASSERT_GE(r.basis.size(), 30u);
  std::vector<std::vector<double>> q;
  for (const auto& v : r.basis) q.push_back(bbp::ooc_load(v));
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double d = 0;
      for (std::uint64_t k = 0; k < kN; ++k) d += q[i][k] * q[j][k];
      EXPECT_NEAR(d, i == j ? 1.0 : 0.0, 1e-8) << i << "," << j;
    }
  }
  for (const auto& v : r.basis) fs::remove(v.path());
}

TEST_F(LanczosRandom, FixedSeedIsDeterministic) {
  bbp::LanczosOptions opt;
  opt.max_steps = 40;
  opt.tol = 1e-14;
  const auto a = solve(*dir_ / "g", 3, opt);
  const auto b = solve(*dir_ / "g", 3, opt);
  ASSERT_EQ(a.alphas.size(), b.alphas.size());
  for (std::size_t i = 0; i < a.alphas.size(); ++i) EXPECT_NEAR(a.alphas[i], b.alphas[i], 1e-12);
  for (std::size_t i = 0; i < a.betas.size(); ++i) EXPECT_NEAR(a.betas[i], b.betas[i], 1e-12);
  opt.seed = 2;
  EXPECT_NE(solve(*dir_ / "g", 3, opt).alphas, a.alphas);
}

TEST_F(LanczosRandom, RitzValuesInterlaceAsStepsGrow) {
  bbp::LanczosOptions opt;
  opt.max_steps = 30;
  opt.tol = 1e-14;
  const auto r = solve(*dir_ / "g", 1, opt);
  for (std::size_t m = 2; m < r.alphas.size(); ++m) {
    const auto small = bbp::tridiagonal_eigen_full(std::span(r.alphas).first(m), std::span(r.betas).first(m - 1));
    const auto big = bbp::tridiagonal_eigen_full(std::span(r.alphas).first(m + 1), std::span(r.betas).first(m));
    for (std::size_t i = 0; i < m; ++i) {
      EXPECT_LE(big.values[i], small.values[i] + 1e-9);
      EXPECT_GE(big.values[i + 1], small.values[i] - 1e-9);
    }
  }
}

TEST_F(LanczosRandom, SelectiveOrthogonalizationTriggersOnLongRuns) {
  bbp::LanczosOptions opt;
  opt.max_steps = 150;
  const auto r = solve(*dir_ / "g", 20, opt);
  EXPECT_GT(r.steps, 40u);
  EXPECT_GT(r.good_ritz_vectors, 0u);
  // Without purging, copies of the top eigenvalue would appear in T.
  const auto t = bbp::tridiagonal_eigen_full(r.alphas, r.betas);
  const double top = want_[0];
  std::size_t copies = 0;
  for (double theta : t.values) copies += std::abs(theta - top) < 1e-6 * top ? 1 : 0;
  EXPECT_EQ(copies, 1u);
}

}  // namespace
