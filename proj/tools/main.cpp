// cdmafs: multi-view unsupervised feature selection via cross-diffusion
// graph fusion and kernel alignment. Subcommands: synth, fuse, select,
// evaluate. All randomness flows from the explicit --seed / config seed;
// outputs are byte-identical across reruns with the same inputs.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "cdmafs/errors.hpp"
#include "cdmafs/evaluation.hpp"
#include "cdmafs/pipeline.hpp"
#include "cdmafs/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace cdmafs;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitSolverWarning = 4;

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for digest: " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  return hex.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  out << text;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ViewFormat parse_format(const std::string& name) {
  if (name == "dense-csv") return ViewFormat::DenseCsv;
  if (name == "sparse-coo") return ViewFormat::SparseCoo;
  throw ConfigError("unknown view format: " + name);
}

Weighting parse_weighting(const std::string& name) {
  if (name == "gaussian") return Weighting::Gaussian;
  if (name == "dot-product") return Weighting::DotProduct;
  if (name == "zero-one-knn") return Weighting::ZeroOneKnn;
  throw ConfigError("unknown weighting: " + name);
}

struct RunConfig {
  std::vector<std::string> view_paths;
  std::vector<ViewFormat> view_formats;
  std::string label_path;
  bool skip_header = false;
  std::string fused_graph_path;  // optional pre-fused G for `select`
  PipelineConfig pipeline;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  json snapshot;
};

RunConfig parse_run_config(const std::string& path) {
  const json j = load_json(path);
  RunConfig cfg;
  cfg.snapshot = j;

  if (!j.contains("dataset") || !j["dataset"].contains("views"))
    throw ConfigError("config needs dataset.views");
  for (const json& vj : j["dataset"]["views"]) {
    cfg.view_paths.push_back(vj.at("path"));
    cfg.view_formats.push_back(
        parse_format(vj.value("format", std::string("dense-csv"))));
  }
  cfg.label_path = j["dataset"].value("labels", std::string());
  cfg.skip_header = j["dataset"].value("skip_header", false);
  cfg.pipeline.normalize = j["dataset"].value("normalize", true);

  if (j.contains("affinity")) {
    const json& a = j["affinity"];
    cfg.pipeline.affinity.weighting =
        parse_weighting(a.value("weighting", std::string("zero-one-knn")));
    cfg.pipeline.affinity.k = a.value("k", 5);
    cfg.pipeline.affinity.sigma_sq = a.value("sigma_sq", 1.0);
  }
  if (j.contains("diffusion")) {
    const json& d = j["diffusion"];
    cfg.pipeline.diffusion.alpha = d.value("alpha", 0.01);
    cfg.pipeline.diffusion.max_iters = d.value("max_iters", 20);
    cfg.pipeline.diffusion.tol = d.value("tol", 1e-8);
    cfg.pipeline.diffusion.k_fuse = d.value("k_fuse", 5);
  }
  if (j.contains("kernel"))
    cfg.pipeline.kernel_sigma_sq = j["kernel"].value("sigma_sq", 1.0);
  if (j.contains("selection")) {
    const json& s = j["selection"];
    cfg.pipeline.request.target_d =
        s.value("target_d", std::vector<int>());
    cfg.pipeline.request.slack = s.value("slack", 10);
    cfg.pipeline.request.lambda_lo = s.value("lambda_lo", 1e-3);
    cfg.pipeline.request.lambda_hi = s.value("lambda_hi", 10.0);
    cfg.pipeline.request.rounding_threshold =
        s.value("rounding_threshold", 0.999);
    cfg.pipeline.request.max_bisections = s.value("max_bisections", 25);
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    cfg.pipeline.solver.lbfgs_memory = s.value("lbfgs_memory", 10);
    cfg.pipeline.solver.spg_max_iters = s.value("spg_max_iters", 10);
    cfg.pipeline.solver.outer_max_iters = s.value("outer_max_iters", 500);
    cfg.pipeline.solver.armijo_c1 = s.value("armijo_c1", 1e-4);
    cfg.pipeline.solver.grad_tol = s.value("grad_tol", 1e-6);
    cfg.pipeline.solver.bb_min = s.value("bb_min", 1e-10);
    cfg.pipeline.solver.bb_max = s.value("bb_max", 1e10);
  }
  cfg.fused_graph_path = j.value("fused_graph", std::string());
  cfg.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("output")) cfg.output_dir = j["output"].value("dir", ".");
  return cfg;
}

MultiViewDataset load_from_config(const RunConfig& cfg) {
  return load_dataset(cfg.view_paths, cfg.view_formats, cfg.label_path,
                      cfg.skip_header);
}

std::vector<Matrix> build_transitions(const MultiViewDataset& dataset,
                                      const RunConfig& cfg) {
  std::vector<Matrix> transitions;
  for (const ViewMatrix& view : dataset.views)
    transitions.push_back(
        row_normalize(build_similarity(view.data, cfg.pipeline.affinity)).p);
  return transitions;
}

// manifest: everything needed to reproduce the run bit for bit
void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs) {
  ordered_json m;
  m["tool"] = "cdmafs";
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = cfg.seed;
  m["config"] = cfg.snapshot;
  ordered_json inputs = ordered_json::array();
  for (const std::string& p : cfg.view_paths)
    inputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  if (!cfg.label_path.empty())
    inputs.push_back(
        {{"path", cfg.label_path}, {"sha256", sha256_file(cfg.label_path)}});
  m["inputs"] = inputs;
  ordered_json outs = ordered_json::array();
  for (const std::string& p : outputs)
    outs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  m["outputs"] = outs;
  write_text((fs::path(cfg.output_dir) / "manifest.json").string(),
             m.dump(2) + "\n");
}

int cmd_synth(int n, int clusters, int informative, int noise,
              double noise_scale, std::uint64_t seed,
              const std::string& out_dir) {
  const MultiViewDataset ds = generate_synthetic(
      n, clusters, informative, noise, noise_scale, seed);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  save_view(ds.views[0], (dir / "view_0.csv").string(), ViewFormat::DenseCsv);
  save_view(ds.views[1], (dir / "view_1.csv").string(), ViewFormat::DenseCsv);
  save_labels(ds.labels, (dir / "labels.txt").string());
  std::cout << "wrote view_0.csv, view_1.csv, labels.txt to " << out_dir
            << "\n";
  return kExitOk;
}

int cmd_fuse(const std::string& config_path) {
  const RunConfig cfg = parse_run_config(config_path);
  MultiViewDataset dataset = load_from_config(cfg);
  if (cfg.pipeline.normalize) normalize_unit_length(dataset);
  const FusedGraph fused =
      cross_diffuse(build_transitions(dataset, cfg), cfg.pipeline.diffusion);

  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_sparse_coo(fused.g, (dir / "G.coo").string());
  write_sparse_coo(fused.p_star, (dir / "P_star.coo").string());

  ComponentPurityReport purity;
  const bool have_labels = dataset.has_labels();
  if (have_labels) purity = component_purity(fused.g, dataset.labels);
  write_text((dir / "fuse_diagnostics.json").string(),
             diffusion_diagnostics_json(fused,
                                        have_labels ? &purity : nullptr));
  write_manifest(cfg, "fuse",
                 {(dir / "G.coo").string(), (dir / "P_star.coo").string(),
                  (dir / "fuse_diagnostics.json").string()});
  return kExitOk;
}

int cmd_select(const std::string& config_path) {
  const RunConfig cfg = parse_run_config(config_path);
  if (cfg.pipeline.request.target_d.empty())
    throw ConfigError("selection.target_d is required for select");
  const MultiViewDataset dataset = load_from_config(cfg);

  SelectionResult result;
  if (!cfg.fused_graph_path.empty()) {
    FusedGraph fused;
    fused.g = load_sparse_matrix(cfg.fused_graph_path);
    fused.p_star = fused.g;
    result = select_features(dataset, cfg.pipeline, fused);
  } else {
    result = select_features(dataset, cfg.pipeline);
  }

  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_text((dir / "selection.json").string(), to_json(result));
  write_manifest(cfg, "select", {(dir / "selection.json").string()});

  for (const ViewSelection& view : result.views)
    if (view.line_search_failed) {
      std::cerr << "warning: line search failed in view " << view.view_index
                << "; result written with best iterate\n";
      return kExitSolverWarning;
    }
  return kExitOk;
}

int cmd_evaluate(const std::string& selection_path,
                 const std::string& config_path, int k, int repeats,
                 std::uint64_t seed, const std::string& mode_name,
                 bool all_features, const std::string& csv_path,
                 const std::string& graph_path) {
  const RunConfig cfg = parse_run_config(config_path);
  const MultiViewDataset dataset = load_from_config(cfg);
  if (!dataset.has_labels())
    throw DataError("evaluate requires a labeled dataset");

  std::ifstream sel_in(selection_path);
  if (!sel_in) throw DataError("cannot open selection: " + selection_path);
  std::stringstream buf;
  buf << sel_in.rdbuf();
  const SelectionResult selection = selection_result_from_json(buf.str());

  if (k <= 0) {
    std::set<int> classes(dataset.labels.begin(), dataset.labels.end());
    k = static_cast<int>(classes.size());
  }
  const EvalMode mode =
      mode_name == "per-view" ? EvalMode::PerView : EvalMode::Concatenated;

  std::vector<std::vector<int>> selected;
  int total_features = 0;
  for (const ViewSelection& v : selection.views) {
    selected.push_back(v.selected);
    total_features += static_cast<int>(v.selected.size());
  }
  const MetricsReport report =
      evaluate_selection(dataset, selected, k, repeats, seed, mode);

  ordered_json out;
  out["k"] = k;
  out["mode"] = mode_name;
  out["selected"] = json::parse(to_json(report));
  std::string csv = metrics_csv_header() +
                    metrics_csv_row("cdmafs", total_features, report);

  if (all_features) {
    std::vector<std::vector<int>> all;
    int all_count = 0;
    for (const ViewMatrix& view : dataset.views) {
      std::vector<int> idx(static_cast<std::size_t>(view.cols()));
      for (int p = 0; p < view.cols(); ++p)
        idx[static_cast<std::size_t>(p)] = p;
      all_count += static_cast<int>(idx.size());
      all.push_back(std::move(idx));
    }
    const MetricsReport base =
        evaluate_selection(dataset, all, k, repeats, seed, mode);
    out["all_features"] = json::parse(to_json(base));
    csv += metrics_csv_row("all_features", all_count, base);
  }

  if (!graph_path.empty()) {
    // secondary evaluator: cluster the spectral embedding of the fused graph
    const Matrix g = load_sparse_matrix(graph_path);
    const Matrix embedding = spectral_embedding(g, k);
    MetricsReport spectral;
    spectral.repeats = repeats;
    for (int rep = 0; rep < repeats; ++rep) {
      const KMeansResult km =
          kmeans(embedding, k, 1, seed + static_cast<std::uint64_t>(rep));
      spectral.accuracy_runs.push_back(
          clustering_accuracy(km.best.ids, dataset.labels));
      spectral.nmi_runs.push_back(nmi(km.best.ids, dataset.labels));
    }
    double am = 0, nm = 0;
    for (double x : spectral.accuracy_runs) am += x;
    for (double x : spectral.nmi_runs) nm += x;
    spectral.accuracy_mean = am / repeats;
    spectral.nmi_mean = nm / repeats;
    out["spectral"] = json::parse(to_json(spectral));
    csv += metrics_csv_row("spectral_fused_graph", k, spectral);
  }

  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_text((dir / "metrics.json").string(), out.dump(2) + "\n");
  if (!csv_path.empty()) write_text(csv_path, csv);
  std::cout << "accuracy " << report.accuracy_mean << " +- "
            << report.accuracy_std << ", nmi " << report.nmi_mean << " +- "
            << report.nmi_std << " over " << repeats << " repeats\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-view unsupervised feature selection by cross-diffused "
               "matrix alignment"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (0 = library default)");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  int n = 150, clusters = 3, informative = 10, noise = 90;
  double noise_scale = 1.0;
  std::uint64_t seed = 1;
  std::string out_dir = "synth_out";
  synth->add_option("--n", n, "instances");
  synth->add_option("--clusters", clusters, "cluster count");
  synth->add_option("--informative", informative, "informative features");
  synth->add_option("--noise", noise, "noise features");
  synth->add_option("--noise-scale", noise_scale, "noise stddev");
  synth->add_option("--seed", seed, "rng seed");
  synth->add_option("--out-dir", out_dir, "output directory");

  auto* fuse = app.add_subcommand("fuse", "fuse views into a kNN graph");
  std::string fuse_config;
  fuse->add_option("--config", fuse_config, "run config JSON")->required();

  auto* select = app.add_subcommand("select", "select features per view");
  std::string select_config;
  select->add_option("--config", select_config, "run config JSON")
      ->required();

  auto* evaluate =
      app.add_subcommand("evaluate", "cluster and score selected features");
  std::string sel_path, eval_config, mode = "concatenated", csv_path,
              graph_path;
  int k = 0, repeats = 20;
  std::uint64_t eval_seed = 1;
  bool all_features = false;
  evaluate->add_option("--selection", sel_path, "selection.json from select")
      ->required();
  evaluate->add_option("--config", eval_config, "run config JSON")
      ->required();
  evaluate->add_option("--k", k, "clusters (default: #classes)");
  evaluate->add_option("--repeats", repeats, "kmeans repeats");
  evaluate->add_option("--seed", eval_seed, "rng seed");
  evaluate->add_option("--mode", mode, "concatenated | per-view");
  evaluate->add_flag("--all-features", all_features,
                     "also score the no-selection baseline");
  evaluate->add_option("--csv", csv_path, "write a CSV results table");
  evaluate->add_option("--graph", graph_path,
                       "fused graph COO for the spectral evaluator");

  try {
    app.parse(argc, argv);
    if (synth->parsed())
      return cmd_synth(n, clusters, informative, noise, noise_scale, seed,
                       out_dir);
    if (fuse->parsed()) return cmd_fuse(fuse_config);
    if (select->parsed()) return cmd_select(select_config);
    if (evaluate->parsed())
      return cmd_evaluate(sel_path, eval_config, k, repeats, eval_seed, mode,
                          all_features, csv_path, graph_path);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
