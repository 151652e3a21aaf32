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

#include <cstdlib>
#include <sstream>

#include "bbp/cli.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using oracle::TempDir;
namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = bbp::cli::main(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(ParseSize, SuffixesArePowersOf1024) {
  EXPECT_EQ(bbp::cli::parse_size("1048576"), 1u << 20);
  EXPECT_EQ(bbp::cli::parse_size("64M"), 64u << 20);
  EXPECT_EQ(bbp::cli::parse_size("512KiB"), 512u << 10);
  EXPECT_EQ(bbp::cli::parse_size("2g"), 2ull << 30);
  EXPECT_EQ(bbp::cli::parse_size("1T"), 1ull << 40);
  EXPECT_THROW(bbp::cli::parse_size("M"), bbp::Error);
  EXPECT_THROW(bbp::cli::parse_size("12Q"), bbp::Error);
  EXPECT_THROW(bbp::cli::parse_size("99999999999T"), bbp::Error);
  EXPECT_THROW(bbp::cli::parse_budget("512K"), bbp::Error);
}

TEST(Cli, PreprocessTinyGraphUsesComputedBeta) {
  TempDir dir;
  oracle::write_text_edges(dir / "g.txt", oracle::random_edges(300000, 1000, 1));
  const auto r = cli({"preprocess", "--input", (dir / "g.txt").string(), "--output", (dir / "g").string(),
                      "--memory", "1M", "--threads", "2", "--vertices", "300000"});
  ASSERT_EQ(r.code, 0) << r.err;
  bbp::CostParams p;
  p.phi = 8;
  p.threads = 2;
  p.memory = 1u << 20;
  const auto m = bbp::load_manifest(dir / "g" / "manifest");
  EXPECT_EQ(m.beta, bbp::compute_beta(300000, p));
  EXPECT_NE(r.out.find("beta=" + std::to_string(m.beta)), std::string::npos);
}

TEST(Cli, MissingInputFailsWithUsageCode) {
  TempDir dir;
  const auto r = cli({"preprocess", "--input", (dir / "nope.txt").string(), "--output", (dir / "g").string()});
  EXPECT_EQ(r.code, bbp::cli::kUsage);
  EXPECT_NE(r.err.find("does not exist"), std::string::npos);
}

TEST(Cli, SymmetrizeDoublesLoopFreeEdgeCount) {
  TempDir dir;
  oracle::write_text_edges(dir / "g.txt", {{0, 1}, {1, 2}, {3, 0}});
  ASSERT_EQ(cli({"preprocess", "--input", (dir / "g.txt").string(), "--output", (dir / "a").string()}).code, 0);
  ASSERT_EQ(cli({"preprocess", "--input", (dir / "g.txt").string(), "--output", (dir / "b").string(),
                 "--symmetrize"})
                .code,
            0);
  EXPECT_EQ(bbp::load_manifest(dir / "a" / "manifest").e_count, 3u);
  EXPECT_EQ(bbp::load_manifest(dir / "b" / "manifest").e_count, 6u);
}

TEST(Cli, PagerankReproducesOracle) {
  TempDir dir;
  const std::uint64_t n = 2000;
  const auto edges = oracle::mixed_density_edges(n, 6000, 6000, 100, 2);
  oracle::write_text_edges(dir / "g.txt", edges);
  ASSERT_EQ(cli({"preprocess", "--input", (dir / "g.txt").string(), "--output", (dir / "g").string(), "--memory",
                 "1M", "--vertices", std::to_string(n)})
                .code,
            0);
  const auto r = cli({"run", "pagerank", (dir / "g").string(), "--iterations", "10", "--output",
                      (dir / "pr.bin").string(), "--io-stats"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("algorithm=pagerank iterations=10"), std::string::npos);
  EXPECT_NE(r.out.find("destination bytes_read=" + std::to_string(10 * 8 * n)), std::string::npos) << r.out;
  EXPECT_LE(oracle::max_relative_error(oracle::read_array<double>(dir / "pr.bin"), oracle::pagerank(n, edges, 10)),
            1e-9);
}

TEST(Cli, WccAutoSelectsByBudget) {
  TempDir dir;
  const std::uint64_t n = 400000;
  oracle::write_text_edges(dir / "g.txt", oracle::random_edges(n, 1000, 3));
  ASSERT_EQ(cli({"preprocess", "--input", (dir / "g.txt").string(), "--output", (dir / "g").string(), "--memory",
                 "1M", "--vertices", std::to_string(n), "--symmetrize"})
                .code,
            0);
  const auto small = cli({"run", "wcc", (dir / "g").string()});
  ASSERT_EQ(small.code, 0) << small.err;
  EXPECT_NE(small.out.find("method=iterative"), std::string::npos);
  const auto labels_iterative = oracle::read_bytes(dir / "g" / "vectors" / "wcc.vec");
  const auto big = cli({"run", "wcc", (dir / "g").string(), "--memory", "2M"});
  ASSERT_EQ(big.code, 0) << big.err;
  EXPECT_NE(big.out.find("method=union-find"), std::string::npos);
  EXPECT_EQ(oracle::read_bytes(dir / "g" / "vectors" / "wcc.vec"), labels_iterative);
  const auto forced = cli({"run", "wcc", (dir / "g").string(), "--wcc-method", "union-find"});
  EXPECT_EQ(forced.code, bbp::cli::kResource);
  EXPECT_NE(forced.err.find("iterative"), std::string::npos);
}

TEST(Cli, EigenEmitsOneRowPerPair) {
  TempDir dir;
  oracle::write_text_edges(dir / "g.txt", oracle::random_edges(300, 1500, 4));
  ASSERT_EQ(cli({"preprocess", "--input", (dir / "g.txt").string(), "--output", (dir / "g").string(),
                 "--symmetrize", "--vertices", "300"})
                .code,
            0);
  const auto r = cli({"run", "eigen", (dir / "g").string(), "--k", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_GE(rows.size(), 5u);
  EXPECT_EQ(rows[0], "index,lambda,residual");
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(rows[i].substr(0, 2), std::to_string(i - 1) + ",");
  EXPECT_EQ(rows[5].substr(0, 6), "steps=");
  EXPECT_TRUE(fs::exists(dir / "g" / "vectors" / "eigvec_3.vec"));
}

TEST(Cli, EigenOnDirectedGraphIsConfigError) {
  TempDir dir;
  oracle::write_text_edges(dir / "g.txt", {{0, 1}});
  ASSERT_EQ(cli({"preprocess", "--input", (dir / "g.txt").string(), "--output", (dir / "g").string()}).code, 0);
  EXPECT_EQ(cli({"run", "eigen", (dir / "g").string()}).code, bbp::cli::kUsage);
}

TEST(Cli, SpmvDefaultsToOnesVector) {
  TempDir dir;
  oracle::write_text_edges(dir / "g.txt", {{0, 1}, {2, 1}, {1, 0}});
  ASSERT_EQ(cli({"preprocess", "--input", (dir / "g.txt").string(), "--output", (dir / "g").string()}).code, 0);
  ASSERT_EQ(cli({"run", "spmv", (dir / "g").string(), "--output", (dir / "y.bin").string()}).code, 0);
  EXPECT_EQ(oracle::read_array<double>(dir / "y.bin"), (std::vector<double>{1, 2, 0}));
}

TEST(Cli, UnknownAlgorithmAndBadFlagsAreUsageErrors) {
  TempDir dir;
  oracle::write_text_edges(dir / "g.txt", {{0, 1}});
  ASSERT_EQ(cli({"preprocess", "--input", (dir / "g.txt").string(), "--output", (dir / "g").string()}).code, 0);
  EXPECT_EQ(cli({"run", "bfs", (dir / "g").string()}).code, bbp::cli::kUsage);
  EXPECT_EQ(cli({"run", "pagerank", (dir / "g").string(), "--memory", "lots"}).code, bbp::cli::kUsage);
  EXPECT_EQ(cli({"preprocess", "--input", "x", "--output", "y", "--force-mode", "hybrid"}).code, bbp::cli::kUsage);
  EXPECT_EQ(cli({}).code, bbp::cli::kUsage);
  EXPECT_EQ(cli({"--help"}).code, bbp::cli::kOk);
}

TEST(Cli, MalformedInputAndCorruptGraphUseDataCode) {
  TempDir dir;
  {
    std::ofstream(dir / "bad.txt") << "0 1\nzero one\n";
  }
  const auto r = cli({"preprocess", "--input", (dir / "bad.txt").string(), "--output", (dir / "g").string()});
  EXPECT_EQ(r.code, bbp::cli::kData);
  EXPECT_NE(r.err.find(":2:"), std::string::npos);
  fs::create_directories(dir / "empty");
  EXPECT_EQ(cli({"run", "pagerank", (dir / "empty").string()}).code, bbp::cli::kData);
}

TEST(Cli, CostSimCsvShape) {
  const auto r = cli({"cost-sim", "--graph", "twitter"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 26u);
  EXPECT_EQ(rows[0], "memory_bytes,beta,dbp_bytes,spp_bytes,bbp_bytes,dbp_seeks,spp_seeks");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::count(rows[i].begin(), rows[i].end(), ','), 6);
    std::istringstream fields(rows[i]);
    std::string m, beta, dbp, spp, bbp_bytes;
    std::getline(fields, m, ',');
    std::getline(fields, beta, ',');
    std::getline(fields, dbp, ',');
    std::getline(fields, spp, ',');
    std::getline(fields, bbp_bytes, ',');
    EXPECT_LE(std::stod(bbp_bytes), std::min(std::stod(dbp), std::stod(spp)));
  }
  EXPECT_EQ(rows[1].substr(0, rows[1].find(',')), std::to_string(256u << 20));
}

TEST(Cli, CostSimDensityAndRangeErrors) {
  const auto k3 = cli({"cost-sim", "--vertices", "1000000000", "--density", "3", "--memory-min", "1G",
                       "--memory-max", "4G", "--samples-per-doubling", "1"});
  ASSERT_EQ(k3.code, 0);
  EXPECT_EQ(lines(k3.out).size(), 4u);
  EXPECT_EQ(cli({"cost-sim", "--graph", "twitter", "--memory-min", "4G", "--memory-max", "1G"}).code,
            bbp::cli::kUsage);
  EXPECT_EQ(cli({"cost-sim", "--graph", "orkut"}).code, bbp::cli::kUsage);
  EXPECT_EQ(cli({"cost-sim"}).code, bbp::cli::kUsage);
}

TEST(Cli, GenerateThenInspect) {
  TempDir dir;
  ASSERT_EQ(cli({"generate", "--vertices", "1024", "--edges", "5000", "--seed", "3", "--output",
                 (dir / "r.bin").string()})
                .code,
            0);
  EXPECT_EQ(fs::file_size(dir / "r.bin"), 40000u);
  ASSERT_EQ(cli({"preprocess", "--input", (dir / "r.bin").string(), "--format", "binary", "--output",
                 (dir / "g").string(), "--memory", "1M"})
                .code,
            0);
  const auto r = cli({"inspect", (dir / "g").string(), "--blocks"});
  ASSERT_EQ(r.code, 0);
  const auto rows = lines(r.out);
  const auto m = bbp::load_manifest(dir / "g" / "manifest");
  EXPECT_EQ(rows.size(), 1 + m.beta * m.beta);
  EXPECT_NE(rows[0].find("edges=5000"), std::string::npos);
  EXPECT_EQ(cli({"generate", "--vertices", "1000", "--output", (dir / "x.bin").string()}).code, bbp::cli::kUsage);
}

TEST(Cli, InstalledBinaryRuns) {
  TempDir dir;
  const std::string csv = (dir / "sweep.csv").string();
  const std::string cmd = std::string(BBP_CLI_PATH) + " cost-sim --graph livejournal --output " + csv;
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  const auto bytes = oracle::read_bytes(csv);
  EXPECT_EQ(lines(std::string(bytes.begin(), bytes.end())).size(), 26u);
  const std::string bad = std::string(BBP_CLI_PATH) + " run pagerank " + (dir / "missing").string() + " 2>/dev/null";
  const int status = std::system(bad.c_str());
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), bbp::cli::kData);
}

}  // namespace
