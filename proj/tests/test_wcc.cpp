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

#include <random>

#include "bbp/wcc.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using oracle::EdgeList;
using oracle::TempDir;
namespace fs = std::filesystem;

std::vector<std::uint64_t> labels_of(const bbp::WccResult& r) {
  return oracle::read_uint_array(r.labels.path(), static_cast<unsigned>(r.labels.width()));
}

TEST(DisjointSet, UnionAndCanonicalLabels) {
  bbp::DisjointSet s(6);
  EXPECT_TRUE(s.unite(4, 5));
  EXPECT_TRUE(s.unite(5, 2));
  EXPECT_FALSE(s.unite(2, 4));
  EXPECT_TRUE(s.unite(1, 0));
  EXPECT_EQ(s.find(4), s.find(2));
  EXPECT_NE(s.find(0), s.find(2));
  s.canonicalize();
  const std::vector<std::uint64_t> want{0, 0, 2, 3, 2, 2};
  for (std::uint64_t v = 0; v < 6; ++v) EXPECT_EQ(s.parent(v), want[v]);
}

TEST(DisjointSet, StepsStayNearLinear) {
  std::mt19937_64 rng(4);
  for (std::uint64_t n : {1000u, 100000u}) {
    bbp::DisjointSet s(n);
    const std::uint64_t m = 3 * n;
    for (std::uint64_t i = 0; i < m; ++i) s.unite(rng() % n, rng() % n);
    s.canonicalize();
    EXPECT_LE(s.steps(), 8 * (m + n));
  }
}

TEST(WccUnionFind, TwoDisjointEdges) {
  TempDir dir;
  fixture::build(dir, "g", {{0, 1}, {2, 3}});
  EXPECT_EQ(labels_of(bbp::wcc_union_find(dir / "g")), (std::vector<std::uint64_t>{0, 0, 2, 2}));
}

TEST(WccUnionFind, DirectionIgnored) {
  TempDir dir;
  fixture::build(dir, "g", {{0, 1}, {1, 2}});
  EXPECT_EQ(labels_of(bbp::wcc_union_find(dir / "g")), (std::vector<std::uint64_t>{0, 0, 0}));
  fixture::build(dir, "h", {{2, 1}, {1, 0}, {4, 3}});
  EXPECT_EQ(labels_of(bbp::wcc_union_find(dir / "h")), (std::vector<std::uint64_t>{0, 0, 0, 3, 3}));
}

TEST(WccUnionFind, RandomGraphMatchesBfs) {
  TempDir dir;
  const std::uint64_t n = 60000;
  const auto edges = oracle::random_edges(n, 40000, 8);
  fixture::GraphSpec spec;
  spec.memory = 2 * 8 * n / 6;
  spec.v_count = n;
  fixture::build(dir, "g", edges, spec);
  EXPECT_EQ(labels_of(bbp::wcc_union_find(dir / "g", std::uint64_t{1} << 20)), oracle::bfs_components(n, edges));
}

TEST(WccUnionFind, EdgeOrderDoesNotMatter) {
  TempDir dir;
  auto edges = oracle::random_edges(3000, 2500, 2);
  fixture::build(dir, "a", edges);
  std::mt19937_64 rng(3);
  std::shuffle(edges.begin(), edges.end(), rng);
  for (auto& e : edges) {
    if (rng() % 2) std::swap(e.first, e.second);
  }
  fixture::build(dir, "b", edges);
  EXPECT_EQ(labels_of(bbp::wcc_union_find(dir / "a")), labels_of(bbp::wcc_union_find(dir / "b")));
}

TEST(WccUnionFind, OverBudgetIsResourceErrorNamingFallback) {
  TempDir dir;
  fixture::GraphSpec spec;
  spec.v_count = 1000;
  fixture::build(dir, "g", oracle::random_edges(1000, 10, 1), spec);
  try {
    bbp::wcc_union_find(dir / "g", std::uint64_t{4999});
    FAIL();
  } catch (const bbp::Error& e) {
    EXPECT_EQ(e.kind(), bbp::ErrorKind::Resource);
    EXPECT_NE(std::string(e.what()).find("iterative"), std::string::npos);
  }
  EXPECT_NO_THROW(bbp::wcc_union_find(dir / "g", std::uint64_t{5000}));
}

TEST(WccIterative, ConvergesToBfsLabels) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    TempDir dir;
    const std::uint64_t n = 5000;
    const auto edges = oracle::symmetrize(oracle::mixed_density_edges(n, 3000, 2500, 300, seed));
    fixture::GraphSpec spec;
    spec.memory = 2 * 8 * n / (2 + seed);
    spec.v_count = n;
    fixture::build(dir, "g", edges, spec);
    const auto r = bbp::wcc_iterative(dir / "g");
    EXPECT_EQ(labels_of(r), oracle::bfs_components(n, edges));
    EXPECT_EQ(r.changes.back(), 0u);
    EXPECT_EQ(r.changes.size(), r.passes);
    EXPECT_EQ(labels_of(r), labels_of(bbp::wcc_union_find(dir / "g", std::uint64_t{1} << 20)));
  }
}

TEST(WccIterative, PathReachesFixedPointInTwoPasses) {
  TempDir dir;
  fixture::GraphSpec spec;
  spec.symmetrize = true;
  fixture::build(dir, "g", {{0, 1}, {1, 2}}, spec);
  const auto r = bbp::wcc_iterative(dir / "g");
  EXPECT_EQ(labels_of(r), (std::vector<std::uint64_t>{0, 0, 0}));
  EXPECT_LE(r.passes - 1, 2u);
  EXPECT_EQ(r.changes, (std::vector<std::uint64_t>{2, 1, 0}));
}

TEST(WccIterative, PassLimitIsResourceError) {
  TempDir dir;
  fixture::GraphSpec spec;
  spec.symmetrize = true;
  EdgeList path;
  for (std::uint64_t v = 0; v + 1 < 50; ++v) path.emplace_back(v, v + 1);
  fixture::build(dir, "g", path, spec);
  EXPECT_THROW(bbp::wcc_iterative(dir / "g", {}, 3), bbp::Error);
}

TEST(WccIterative, LeavesOnlyTheLabelVector) {
  TempDir dir;
  fixture::GraphSpec spec;
  spec.symmetrize = true;
  fixture::build(dir, "g", {{0, 1}, {2, 3}}, spec);
  bbp::wcc_iterative(dir / "g");
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir / "g" / "vectors")) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"degree.vec", "wcc.vec"}));
}

}  // namespace
