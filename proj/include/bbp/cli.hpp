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

#ifndef BBP_CLI_HPP
#define BBP_CLI_HPP

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bbp/cost_model.hpp"
#include "bbp/engine.hpp"
#include "bbp/lanczos.hpp"
#include "bbp/preprocess.hpp"
#include "bbp/programs.hpp"
#include "bbp/rmat.hpp"
#include "bbp/wcc.hpp"

namespace bbp::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kResource = 3 };

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Config: return kUsage;
    case ErrorKind::Format:
    case ErrorKind::Corruption:
    case ErrorKind::Io: return kData;
    case ErrorKind::Resource: return kResource;
  }
  return kUsage;
}

/// "64M", "1G", "512KiB", "1048576". Suffixes are powers of 1024.
inline std::uint64_t parse_size(std::string text) {
  std::string digits;
  std::size_t i = 0;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') digits += text[i++];
  std::string suffix = text.substr(i);
  for (auto& c : suffix) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (digits.empty()) fail(ErrorKind::Usage, "malformed size '" + text + "'");
  std::uint64_t shift = 0;
  if (suffix.empty() || suffix == "B") {
    shift = 0;
  } else if (suffix == "K" || suffix == "KB" || suffix == "KIB") {
    shift = 10;
  } else if (suffix == "M" || suffix == "MB" || suffix == "MIB") {
    shift = 20;
  } else if (suffix == "G" || suffix == "GB" || suffix == "GIB") {
    shift = 30;
  } else if (suffix == "T" || suffix == "TB" || suffix == "TIB") {
    shift = 40;
  } else {
    fail(ErrorKind::Usage, "unknown size suffix in '" + text + "' (use K, M, G or T)");
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || (shift > 0 && (value >> (64 - shift)) != 0)) {
    fail(ErrorKind::Usage, "size '" + text + "' is out of range");
  }
  return value << shift;
}

inline std::uint64_t parse_budget(const std::string& text) {
  const std::uint64_t bytes = parse_size(text);
  require(bytes >= (1u << 20), ErrorKind::Usage, "memory budget must be at least 1 MiB");
  return bytes;
}

inline void print_io(std::ostream& out, const char* label, const IoSnapshot& io) {
  out << label << " bytes_read=" << io.bytes_read << " bytes_written=" << io.bytes_written << " seeks=" << io.seeks
      << '\n';
}

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
  std::string input, format = "text", output, memory = "1G", mode = "bbp";
  std::uint64_t threads = 1, vertex_bytes = 8;
  std::optional<std::uint64_t> vertices;
  unsigned input_id_bytes = 4, weight_bytes = 0;
  std::optional<unsigned> id_bytes;
  bool symmetrize = false, one_based = false, drop_self_loops = false, io_stats = false;
};

inline int cmd_preprocess(const PreprocessArgs& a, Streams s) {
  IngestOptions opt;
  opt.format = parse_input_format(a.format);
  opt.one_based_ids = a.one_based;
  opt.symmetrize = a.symmetrize;
  opt.drop_self_loops = a.drop_self_loops;
  opt.v_count = a.vertices;
  opt.input_id_bytes = a.input_id_bytes;
  opt.weight_bytes = a.weight_bytes;
  opt.id_bytes = a.id_bytes;
  opt.mode = parse_layout_mode(a.mode);
  CostParams params;
  params.phi = a.vertex_bytes;
  params.threads = a.threads;
  params.memory = parse_budget(a.memory);
  const PreprocessReport r = preprocess(a.input, opt, params, a.output);
  const GraphManifest& m = r.manifest;
  s.out << "vertices=" << m.v_count << " edges=" << m.e_count << " beta=" << m.beta << " blocks=" << m.beta * m.beta
        << " dense=" << r.dense_blocks << " sparse=" << r.sparse_blocks << " mode=" << to_string(m.mode) << '\n';
  s.out << "preprocess_bytes=" << r.io.bytes() << '\n';
  if (a.io_stats) {
    print_io(s.out, "io", r.io);
    s.out << "peak_buffer_bytes=" << r.peak_buffer_bytes << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  std::string algorithm, graph, memory, output, input, wcc_method = "auto";
  std::optional<std::uint64_t> threads;
  std::uint64_t iterations = 10, k = 5, max_steps = 300, seed = 1;
  double damping = 0.85, tol = 1e-6;
  bool weighted = false, io_stats = false, log_events = false;
};

inline EngineOptions engine_options(const RunArgs& a, Streams s) {
  EngineOptions eo;
  eo.threads = a.threads;
  if (!a.memory.empty()) eo.memory = parse_budget(a.memory);
  if (a.log_events) eo.on_event = [&err = s.err](const EngineEvent& e) { err << e.format() << '\n'; };
  return eo;
}

inline void export_vector(const VertexVector& vec, const std::string& output) {
  if (output.empty()) return;
  fs::copy_file(vec.path(), output, fs::copy_options::overwrite_existing);
}

inline void print_summary(Streams s, const std::string& algorithm, std::uint64_t iterations, const IoSnapshot& io,
                          std::chrono::steady_clock::time_point started, const fs::path& result) {
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  s.out << "algorithm=" << algorithm << " iterations=" << iterations << " bytes_read=" << io.bytes_read
        << " bytes_written=" << io.bytes_written << " seeks=" << io.seeks << " wall_seconds=" << std::fixed
        << std::setprecision(3) << seconds << " result=" << result.string() << '\n';
  s.out.unsetf(std::ios::floatfield);
}

inline int cmd_run(const RunArgs& a, Streams s) {
  const auto started = std::chrono::steady_clock::now();
  const GraphLayout layout(a.graph);
  const GraphManifest m = load_manifest(layout.manifest());
  EngineOptions eo = engine_options(a, s);

  if (a.algorithm == "pagerank") {
    require(a.damping > 0 && a.damping < 1, ErrorKind::Usage, "damping must lie in (0, 1)");
    eo.iterations = a.iterations;
    eo.output = "pagerank";
    const EngineResult r = run(a.graph, PageRank{a.damping}, eo);
    export_vector(r.values, a.output);
    if (a.io_stats) {
      print_io(s.out, "destination", r.stats.destination);
      print_io(s.out, "source", r.stats.source);
      print_io(s.out, "edges", r.stats.edges);
      print_io(s.out, "buckets", r.stats.buckets);
      print_io(s.out, "vectors", r.stats.vectors);
      print_io(s.out, "degrees", r.stats.degrees);
      s.out << "peak_vertex_bytes=" << r.stats.peak_vertex_bytes << " peak_buffer_bytes=" << r.stats.peak_buffer_bytes
            << '\n';
    }
    print_summary(s, a.algorithm, r.stats.iterations, r.stats.total(), started, r.values.path());
    return kOk;
  }

  if (a.algorithm == "wcc") {
    const std::uint64_t budget = eo.memory.value_or(m.memory);
    std::string method = a.wcc_method;
    if (method == "auto") method = union_find_bytes(m) <= budget ? "union-find" : "iterative";
    WccResult r;
    if (method == "union-find") {
      r = wcc_union_find(a.graph, budget);
    } else if (method == "iterative") {
      if (!m.symmetrized) {
        s.err << "warning: graph is not symmetrized; labels follow edge direction, not weak components\n";
      }
      eo.output = "wcc";
      r = wcc_iterative(a.graph, eo);
    } else {
      fail(ErrorKind::Usage, "unknown --wcc-method '" + a.wcc_method + "' (auto, union-find or iterative)");
    }
    export_vector(r.labels, a.output);
    s.out << "method=" << method << " passes=" << r.passes << '\n';
    print_summary(s, a.algorithm, r.passes, r.io, started, r.labels.path());
    return kOk;
  }

  if (a.algorithm == "spmv") {
    const Spmv program = make_spmv(m, a.weighted);
    fs::path x = layout.vector("spmv_x");
    if (a.input.empty()) {
      std::vector<double> ones(m.v_count, 1.0);
      write_vector<double>(x, ones);
    } else {
      VertexVector::open(a.input, sizeof(double), m.v_count);
      x = a.input;
    }
    eo.iterations = 1;
    eo.initial_values = x;
    eo.output = "spmv";
    const EngineResult r = run(a.graph, program, eo);
    export_vector(r.values, a.output);
    print_summary(s, a.algorithm, 1, r.stats.total(), started, r.values.path());
    return kOk;
  }

  if (a.algorithm == "eigen") {
    LanczosOptions lo;
    lo.k = a.k;
    lo.max_steps = a.max_steps;
    lo.tol = a.tol;
    lo.seed = a.seed;
    lo.weighted = a.weighted;
    lo.engine = eo;
    const LanczosResult r = lanczos_so(a.graph, lo);
    std::ostringstream csv;
    csv.precision(17);
    csv << "index,lambda,residual\n";
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
      csv << i << ',' << r.eigenvalues[i] << ',' << r.residuals[i] << '\n';
    }
    if (a.output.empty()) {
      s.out << csv.str();
    } else {
      write_text_file(a.output, csv.str(), default_io());
    }
    s.out << "steps=" << r.steps << " restarts=" << r.restarts << " spmv=" << r.spmv_count
          << " norm_estimate=" << r.norm_estimate << '\n';
    print_summary(s, a.algorithm, r.steps, r.io, started, layout.vector(lo.eigvec_prefix + "_0"));
    return kOk;
  }

  fail(ErrorKind::Usage, "unknown algorithm '" + a.algorithm + "' (pagerank, wcc, spmv or eigen)");
}

// ---------------------------------------------------------------------------
// cost-sim

struct CostSimArgs {
  std::string graph, memory_min = "256M", memory_max = "16G", output;
  std::optional<std::uint64_t> vertices, edges;
  std::optional<double> density;
  unsigned samples_per_doubling = 4;
  std::uint64_t vertex_bytes = 8, edge_bytes = 8, threads = 4, disk_block = 4096;
  bool t_cost_units = false;
};

inline int cmd_cost_sim(const CostSimArgs& a, Streams s) {
  GraphSummary g;
  if (!a.graph.empty()) {
    auto preset = find_preset(a.graph);
    if (!preset) fail(ErrorKind::Usage, "unknown graph preset '" + a.graph + "' (livejournal, twitter, yahooweb)");
    g = *preset;
  } else if (a.vertices && a.density) {
    g = density_summary(*a.vertices, *a.density);
  } else if (a.vertices && a.edges) {
    g = {"custom", *a.vertices, *a.edges};
  } else {
    fail(ErrorKind::Usage, "cost-sim needs --graph, or --vertices with --edges or --density");
  }
  require(g.v_count >= 1, ErrorKind::Usage, "cost-sim needs at least one vertex");
  CostParams params;
  params.phi = a.vertex_bytes;
  params.psi = a.edge_bytes;
  params.threads = a.threads;
  params.disk_block = a.disk_block;
  const auto memories = log_spaced_memories(parse_size(a.memory_min), parse_size(a.memory_max), a.samples_per_doubling);
  auto rows = sweep(g, params, memories);
  if (a.t_cost_units) {
    const double unit = static_cast<double>(t_cost(g.v_count, g.e_count));
    for (auto& r : rows) {
      r.cost.dbp_bytes /= unit;
      r.cost.spp_bytes /= unit;
      r.cost.bbp_bytes /= unit;
    }
  }
  const std::string csv = sweep_csv(rows);
  if (a.output.empty()) {
    s.out << csv;
  } else {
    write_text_file(a.output, csv, default_io());
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// inspect and generate

inline int cmd_inspect(const std::string& graph, bool blocks, Streams s) {
  const GraphManifest m = load_manifest(GraphLayout(graph).manifest());
  std::uint64_t dense = 0;
  for (const auto& b : m.blocks) dense += b.kind == BlockKind::Dense ? 1 : 0;
  s.out << "vertices=" << m.v_count << " edges=" << m.e_count << " beta=" << m.beta << " id_bytes=" << m.id_bytes
        << " vertex_bytes=" << m.vertex_bytes << " edge_bytes=" << m.edge_bytes << " threads=" << m.threads
        << " memory=" << m.memory << " mode=" << to_string(m.mode) << " symmetrized=" << (m.symmetrized ? 1 : 0)
        << " dense=" << dense << " sparse=" << m.blocks.size() - dense << '\n';
  if (blocks) {
    for (const auto& b : m.blocks) {
      s.out << b.block.p << ' ' << b.block.q << ' ' << b.edge_count << ' ' << to_string(b.kind) << '\n';
    }
  }
  return kOk;
}

struct GenerateArgs {
  std::uint64_t vertices = 1024, edges = 8192, seed = 1;
  unsigned id_bytes = 4;
  std::vector<double> probabilities{0.57, 0.19, 0.19, 0.05};
  std::string output;
};

inline int cmd_generate(const GenerateArgs& a, Streams s) {
  require(a.probabilities.size() == 4, ErrorKind::Usage, "--probabilities takes four values a,b,c,d");
  const RmatProbabilities probs{a.probabilities[0], a.probabilities[1], a.probabilities[2], a.probabilities[3]};
  generate_rmat(a.vertices, a.edges, a.seed, probs, a.output, a.id_bytes);
  s.out << "wrote " << a.edges << " edges over " << a.vertices << " vertices to " << a.output << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// entry point

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Streams s{out, err};
  CLI::App app{"Out-of-core graph computation with bimodal block processing", "bbpgraph"};
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Partition an edge list into a block layout");
  c_pre->add_option("--input", pre.input, "Edge list")->required();
  c_pre->add_option("--format", pre.format, "text or binary")->check(CLI::IsMember({"text", "binary"}));
  c_pre->add_option("--output", pre.output, "Graph directory to create")->required();
  c_pre->add_option("--memory", pre.memory, "Memory budget (K/M/G suffixes)");
  c_pre->add_option("--threads", pre.threads, "Worker threads the layout is planned for")->check(CLI::PositiveNumber);
  c_pre->add_option("--vertex-bytes", pre.vertex_bytes, "Bytes per vertex value")->check(CLI::PositiveNumber);
  c_pre->add_option("--vertices", pre.vertices, "Declared vertex count");
  c_pre->add_option("--input-id-bytes", pre.input_id_bytes, "Id width of binary input")->check(CLI::IsMember({4, 8}));
  c_pre->add_option("--weight-bytes", pre.weight_bytes, "Edge weight width: 0, 4 or 8")
      ->check(CLI::IsMember({0, 4, 8}));
  c_pre->add_option("--id-bytes", pre.id_bytes, "On-disk id width")->check(CLI::IsMember({4, 8}));
  c_pre->add_option("--force-mode", pre.mode, "dense, sparse or bbp")->check(CLI::IsMember({"dense", "sparse", "bbp"}));
  c_pre->add_flag("--symmetrize", pre.symmetrize, "Store both directions of every edge");
  c_pre->add_flag("--one-based", pre.one_based, "Input ids start at 1");
  c_pre->add_flag("--drop-self-loops", pre.drop_self_loops, "Discard edges (v, v)");
  c_pre->add_flag("--io-stats", pre.io_stats, "Print I/O counters");

  RunArgs run_args;
  auto* c_run = app.add_subcommand("run", "Run an algorithm on a preprocessed graph");
  c_run->add_option("algorithm", run_args.algorithm, "pagerank, wcc, spmv or eigen")->required();
  c_run->add_option("graph", run_args.graph, "Graph directory")->required();
  c_run->add_option("--memory", run_args.memory, "Memory budget (defaults to the layout's)");
  c_run->add_option("--threads", run_args.threads, "Worker threads")->check(CLI::PositiveNumber);
  c_run->add_option("--iterations", run_args.iterations, "PageRank passes");
  c_run->add_option("--output", run_args.output, "Copy of the result vector, or eigenvalue CSV for eigen");
  c_run->add_option("--input", run_args.input, "SpMV input vector (8-byte values); all ones when absent");
  c_run->add_option("--damping", run_args.damping, "PageRank damping");
  c_run->add_option("--wcc-method", run_args.wcc_method, "auto, union-find or iterative");
  c_run->add_option("--k", run_args.k, "Eigenpairs to compute")->check(CLI::PositiveNumber);
  c_run->add_option("--max-steps", run_args.max_steps, "Lanczos step limit")->check(CLI::PositiveNumber);
  c_run->add_option("--tol", run_args.tol, "Lanczos residual tolerance");
  c_run->add_option("--seed", run_args.seed, "Lanczos start vector seed");
  c_run->add_flag("--weighted", run_args.weighted, "Use edge weights (SpMV and eigen)");
  c_run->add_flag("--io-stats", run_args.io_stats, "Print per-channel I/O counters");
  c_run->add_flag("--log-events", run_args.log_events, "Structured progress lines on stderr");

  CostSimArgs sim;
  auto* c_sim = app.add_subcommand("cost-sim", "Analytic I/O cost sweep over memory budgets");
  c_sim->add_option("--graph", sim.graph, "Preset: livejournal, twitter or yahooweb");
  c_sim->add_option("--vertices", sim.vertices, "Vertex count");
  c_sim->add_option("--edges", sim.edges, "Edge count");
  c_sim->add_option("--density", sim.density, "Average degree k (with --vertices)");
  c_sim->add_option("--memory-min", sim.memory_min, "Smallest budget");
  c_sim->add_option("--memory-max", sim.memory_max, "Largest budget");
  c_sim->add_option("--samples-per-doubling", sim.samples_per_doubling)->check(CLI::PositiveNumber);
  c_sim->add_option("--vertex-bytes", sim.vertex_bytes)->check(CLI::PositiveNumber);
  c_sim->add_option("--edge-bytes", sim.edge_bytes)->check(CLI::PositiveNumber);
  c_sim->add_option("--threads", sim.threads)->check(CLI::PositiveNumber);
  c_sim->add_option("--disk-block", sim.disk_block)->check(CLI::PositiveNumber);
  c_sim->add_flag("--t-cost", sim.t_cost_units, "Report bytes in t-cost units");
  c_sim->add_option("--output", sim.output, "CSV file (stdout when absent)");

  std::string inspect_graph;
  bool inspect_blocks = false;
  auto* c_inspect = app.add_subcommand("inspect", "Summarize a graph directory");
  c_inspect->add_option("graph", inspect_graph, "Graph directory")->required();
  c_inspect->add_flag("--blocks", inspect_blocks, "List every block");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Write a synthetic R-MAT edge list (packed binary)");
  c_gen->add_option("--vertices", gen.vertices, "Vertex count, a power of two");
  c_gen->add_option("--edges", gen.edges, "Edge count");
  c_gen->add_option("--seed", gen.seed, "Generator seed");
  c_gen->add_option("--id-bytes", gen.id_bytes)->check(CLI::IsMember({4, 8}));
  c_gen->add_option("--probabilities", gen.probabilities, "a b c d")->delimiter(',')->expected(4);
  c_gen->add_option("--output", gen.output, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_pre) return cmd_preprocess(pre, s);
    if (*c_run) return cmd_run(run_args, s);
    if (*c_sim) return cmd_cost_sim(sim, s);
    if (*c_inspect) return cmd_inspect(inspect_graph, inspect_blocks, s);
    if (*c_gen) return cmd_generate(gen, s);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << '\n';
    return kData;
  } catch (const std::bad_alloc&) {
    err << "error (resource): out of memory\n";
    return kResource;
  }
  return kUsage;
}

/// Convenience overload for tests: argv without the program name.
inline int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"bbpgraph"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bbp::cli

#endif  // BBP_CLI_HPP
