// Command-line front end: gram, check, robustness, bench.
//
// Exit codes: 0 success / check passed, 1 check failed, 2 usage or data error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wwl/wwl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct GramArgs {
  std::string data;
  std::string name;
  std::string scheme = "categorical";
  int iterations = 3;
  std::vector<double> lambdas{1.0};
  std::string solver = "exact";
  double gamma = 0.0;
  bool standardize = false;
  bool degree_features = false;
  bool allow_missing_class_labels = false;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out = "wwl_out";
};

struct CheckArgs {
  std::string matrix;
  std::string mode = "auto";
  double tol = 1e-8;
  bool report_only = false;
  std::string out;
};

struct RobustnessArgs {
  wwl::RobustnessOptions opt;
  std::string out = "robustness.tsv";
};

struct BenchArgs {
  wwl::BenchOptions opt;
  std::string out = "bench.tsv";
};

std::string lambda_tag(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", lambda);
  return buf;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw wwl::IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json timings_json(const wwl::StageTimings& t) {
  return {{"embedding", t.embedding},
          {"ground_distance", t.ground_distance},
          {"transport", t.transport},
          {"total", t.total}};
}

int run_gram(const GramArgs& a) {
  const fs::path dir(a.data);
  std::string name = a.name;
  if (name.empty()) name = fs::path(dir).filename().string();
  if (name.empty()) name = fs::path(dir).parent_path().filename().string();

  wwl::KernelConfig cfg;
  cfg.scheme = wwl::parse_scheme(a.scheme);
  cfg.iterations = a.iterations;
  cfg.solver = wwl::parse_solver(a.solver);
  cfg.gamma = a.gamma;
  cfg.lambdas = a.lambdas;
  cfg.standardize = a.standardize;
  cfg.threads = wwl::resolve_threads(a.threads);
  wwl::validate(cfg);

  wwl::TuOptions tu;
  tu.require_graph_labels = !a.allow_missing_class_labels;
  wwl::Dataset ds = wwl::parse_tu(dir, name, tu);
  if (a.degree_features) {
    for (auto& g : ds.graphs) g = wwl::degree_as_attribute(g);
  }

  const auto start = std::chrono::steady_clock::now();
  wwl::StageTimings timings;
  const wwl::MatrixArtifact distance = wwl::gwd_matrix(ds, cfg, &timings);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  wwl::write_matrix(distance, out / "distance.txt");
  json kernels = json::array();
  for (double lambda : cfg.lambdas) {
    const auto path = out / ("kernel_lambda_" + lambda_tag(lambda) + ".txt");
    wwl::write_matrix(wwl::wwl_kernel(distance, lambda), path);
    kernels.push_back(path.filename().string());
  }
  timings.total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest = {
      {"command", "gram"},
      {"dataset", {{"path", a.data}, {"name", name}, {"graphs", ds.graphs.size()}}},
      {"config",
       {{"scheme", wwl::to_string(cfg.scheme)},
        {"h", cfg.iterations},
        {"ground_distance", wwl::to_string(cfg.ground())},
        {"solver", wwl::to_string(cfg.solver)},
        {"gamma", cfg.solver == wwl::Solver::sinkhorn ? json(cfg.gamma) : json(nullptr)},
        {"lambda", cfg.lambdas},
        {"standardize", cfg.standardize},
        {"degree_features", a.degree_features},
        {"threads", cfg.threads}}},
      {"seed", a.seed},
      {"output", {{"directory", a.out}, {"distance", "distance.txt"}, {"kernels", kernels}}},
      {"timings", timings_json(timings)},
      {"version", wwl::kVersion}};
  write_json(out / "manifest.json", manifest);

  std::cout << "wrote " << ds.graphs.size() << "x" << ds.graphs.size() << " distance matrix and "
            << cfg.lambdas.size() << " kernel(s) to " << a.out << " in " << timings.total
            << " s\n";
  return 0;
}

int run_check(const CheckArgs& a) {
  const wwl::MatrixArtifact m = wwl::read_matrix(a.matrix);
  std::string mode = a.mode;
  if (mode == "auto") mode = m.kind == wwl::MatrixKind::kernel ? "psd" : "cnd";
  wwl::SpectralReport rep;
  if (mode == "psd") {
    rep = wwl::psd_check(m, a.tol);
  } else if (mode == "cnd") {
    rep = wwl::cnd_check(m, a.tol);
  } else {
    throw wwl::Error("unknown check mode '" + mode + "'");
  }

  std::cout << mode << " check: lambda_min=" << rep.min_eigenvalue
            << " lambda_max=" << rep.max_eigenvalue << " tol=" << rep.tolerance << " -> "
            << (rep.passed ? "PASS" : "FAIL") << '\n';
  if (!a.out.empty()) {
    write_json(a.out, {{"command", "check"},
                       {"matrix", a.matrix},
                       {"mode", mode},
                       {"kind", wwl::to_string(m.kind)},
                       {"lambda_min", rep.min_eigenvalue},
                       {"lambda_max", rep.max_eigenvalue},
                       {"tolerance", rep.tolerance},
                       {"passed", rep.passed},
                       {"version", wwl::kVersion}});
  }
  return rep.passed || a.report_only ? 0 : kExitCheckFailed;
}

int run_robustness(const RobustnessArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = wwl::run_robustness(a.opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw wwl::IoError("cannot write " + a.out);
    wwl::write_robustness_table(out, rows);
  }
  write_json(a.out + ".manifest.json",
             {{"command", "robustness"},
              {"config",
               {{"n", a.opt.nodes},
                {"p", a.opt.edge_probability},
                {"noise", a.opt.noise},
                {"trials", a.opt.trials},
                {"h", a.opt.iterations},
                {"wwl_distance", "continuous scheme on node degrees, euclidean ground distance, exact"},
                {"wl_distance", "categorical scheme on degree labels, hamming ground distance, exact"}}},
              {"seed", a.opt.seed},
              {"output", a.out},
              {"timings", {{"total", secs}}},
              {"version", wwl::kVersion}});
  wwl::write_robustness_table(std::cout, rows);
  return 0;
}

int run_bench(const BenchArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = wwl::run_bench(a.opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw wwl::IoError("cannot write " + a.out);
    wwl::write_bench_table(out, rows);
  }
  write_json(a.out + ".manifest.json",
             {{"command", "bench"},
              {"config",
               {{"graphs", a.opt.graphs},
                {"avg_nodes", a.opt.avg_nodes},
                {"node_sd_fraction", a.opt.node_sd_fraction},
                {"dim", a.opt.dim},
                {"gamma", a.opt.gamma},
                {"sinkhorn_tol", a.opt.sinkhorn.tol},
                {"sinkhorn_max_iter", a.opt.sinkhorn.max_iter}}},
              {"seed", a.opt.seed},
              {"output", a.out},
              {"timings", {{"total", secs}}},
              {"version", wwl::kVersion}});
  wwl::write_bench_table(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein Weisfeiler-Lehman graph kernels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wwl::kVersion);

  GramArgs gram;
  auto* gram_cmd = app.add_subcommand("gram", "Compute GWD and WWL kernel matrices for a TU dataset");
  gram_cmd->add_option("--data", gram.data, "Dataset directory (TU layout)")->required();
  gram_cmd->add_option("--name", gram.name, "Dataset prefix (default: directory name)");
  gram_cmd->add_option("--scheme", gram.scheme, "Embedding scheme")
      ->check(CLI::IsMember({"categorical", "continuous"}));
  gram_cmd->add_option("-H,--iterations", gram.iterations, "WL iterations")->check(CLI::NonNegativeNumber);
  gram_cmd->add_option("--lambda", gram.lambdas, "Kernel parameter (repeatable)")->take_all();
  gram_cmd->add_option("--solver", gram.solver, "Transport solver")
      ->check(CLI::IsMember({"exact", "sinkhorn"}));
  gram_cmd->add_option("--gamma", gram.gamma, "Entropic regularisation (sinkhorn)");
  gram_cmd->add_flag("--standardize", gram.standardize, "Z-score node attributes dataset-wide");
  gram_cmd->add_flag("--degree-features", gram.degree_features, "Use node degrees as attributes");
  gram_cmd->add_flag("--allow-missing-class-labels", gram.allow_missing_class_labels,
                     "Accept datasets without DS_graph_labels.txt");
  gram_cmd->add_option("--seed", gram.seed, "Recorded in the manifest");
  gram_cmd->add_option("--threads", gram.threads, "Worker threads (default: WWL_THREADS or all cores)");
  gram_cmd->add_option("--out", gram.out, "Output directory");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Spectral definiteness check of a matrix artifact");
  check_cmd->add_option("--matrix", check.matrix, "Matrix file (with .meta.json sidecar)")->required();
  check_cmd->add_option("--mode", check.mode, "psd, cnd or auto (by kind)")
      ->check(CLI::IsMember({"auto", "psd", "cnd"}));
  check_cmd->add_option("--tol", check.tol, "Relative eigenvalue tolerance");
  check_cmd->add_flag("--report-only", check.report_only, "Exit 0 even if the check fails");
  check_cmd->add_option("--out", check.out, "Write a JSON report here");

  RobustnessArgs rob;
  auto* rob_cmd = app.add_subcommand("robustness", "Edge-removal robustness on Erdos-Renyi graphs");
  rob_cmd->add_option("--n", rob.opt.nodes, "Nodes per graph");
  rob_cmd->add_option("--p", rob.opt.edge_probability, "Edge probability");
  rob_cmd->add_option("--noise", rob.opt.noise, "Noise levels (comma separated)")->delimiter(',');
  rob_cmd->add_option("--trials", rob.opt.trials, "Trials per noise level");
  rob_cmd->add_option("-H,--iterations", rob.opt.iterations, "WL iterations");
  rob_cmd->add_option("--seed", rob.opt.seed, "Random seed");
  rob_cmd->add_option("--out", rob.out, "Output table (TSV)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Exact versus Sinkhorn runtime on random embeddings");
  bench_cmd->add_option("--graphs", bench.opt.graphs, "Graphs per size");
  bench_cmd->add_option("--avg-nodes", bench.opt.avg_nodes, "Average node counts (comma separated)")
      ->delimiter(',');
  bench_cmd->add_option("--dim", bench.opt.dim, "Embedding dimension");
  bench_cmd->add_option("--gamma", bench.opt.gamma, "Sinkhorn regularisation");
  bench_cmd->add_option("--tol", bench.opt.sinkhorn.tol, "Sinkhorn marginal tolerance");
  bench_cmd->add_option("--max-iter", bench.opt.sinkhorn.max_iter, "Sinkhorn iteration cap");
  bench_cmd->add_option("--seed", bench.opt.seed, "Random seed");
  bench_cmd->add_option("--out", bench.out, "Output table (TSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gram_cmd) return run_gram(gram);
    if (*check_cmd) return run_check(check);
    if (*rob_cmd) return run_robustness(rob);
    if (*bench_cmd) return run_bench(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
