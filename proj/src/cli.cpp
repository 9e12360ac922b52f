#include "ikclust/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ikclust/datasets.hpp"
#include "ikclust/evaluation.hpp"
#include "ikclust/greedy_refine.hpp"
#include "ikclust/kernel_imm.hpp"
#include "ikclust/kernel_kmeans.hpp"

namespace ikclust {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

json metrics_record(const std::string& dataset, const std::string& kernel, double gamma,
                    const std::string& method, int leaves, double cost, double price,
                    double ari, bool have_ari, std::uint64_t seed, long long runtime_ms) {
  json rec;
  rec["dataset"] = dataset;
  rec["kernel"] = kernel;
  rec["gamma"] = gamma;
  rec["method"] = method;
  rec["leaves"] = leaves;
  rec["cost"] = cost;
  if (std::isinf(price)) {
    rec["price"] = nullptr;
    rec["price_infinite"] = true;
  } else {
    rec["price"] = price;
    rec["price_infinite"] = false;
  }
  if (have_ari) {
    rec["ari"] = ari;
  } else {
    rec["ari"] = nullptr;
  }
  rec["seed"] = seed;
  rec["runtime_ms"] = runtime_ms;
  return rec;
}

void write_metrics(const std::string& path, const std::vector<json>& records) {
  if (path.empty()) return;
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open metrics file " + path);
  for (const auto& rec : records) out << rec.dump() << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
}

void write_labels_csv(const std::string& path, const std::vector<int>& labels) {
  std::ostringstream out;
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << "," << labels[i] << "\n";
  write_text(path, out.str());
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<double> gamma_grid(double lo_exp, double hi_exp, int count) {
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    double e = lo_exp + (hi_exp - lo_exp) * (count == 1 ? 0.0 : double(i) / (count - 1));
    grid[i] = std::pow(2.0, e);
  }
  return grid;
}

struct DataArgs {
  std::string path;
  std::string label_col;
  bool normalize = false;
};

void add_data_options(CLI::App* cmd, DataArgs& args, bool normalize_default) {
  args.normalize = normalize_default;
  cmd->add_option("--data", args.path, "input dataset CSV")->required();
  cmd->add_option("--label-col", args.label_col,
                  "label column name or 0-based index (default: column named 'label')");
  cmd->add_flag("--normalize,!--no-normalize", args.normalize,
                "rescale each coordinate to zero-min unit-range before clustering");
}

Dataset load_data(const DataArgs& args) {
  std::optional<std::string> label;
  if (!args.label_col.empty()) label = args.label_col;
  Dataset data = load_csv(args.path, label);
  if (args.normalize) {
    Dataset scaled = normalize_unit_range(data);
    scaled.name = data.name;
    return scaled;
  }
  return data;
}

struct KernelArgs {
  std::string family = "gaussian";
  double gamma = 1.0;
  double epsilon = 1.0;
  double beta = 1.0;
};

void add_kernel_options(CLI::App* cmd, KernelArgs& args) {
  cmd->add_option("--kernel", args.family,
                  "kernel family: gaussian|laplace|linear|quadratic|epsilon|hellinger|hik|chi2");
  cmd->add_option("--gamma", args.gamma, "bandwidth for gaussian/laplace")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", args.epsilon, "radius for the epsilon-neighborhood kernel")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--beta", args.beta, "exponent for histogram intersection")
      ->check(CLI::PositiveNumber);
}

KernelSpec make_spec(const KernelArgs& args) {
  KernelSpec spec;
  spec.family = family_from_name(args.family);
  spec.gamma = args.gamma;
  spec.epsilon = args.epsilon;
  spec.beta = args.beta;
  spec.validate();
  return spec;
}

double ari_or_nan(const Dataset& data, const std::vector<int>& labels, bool& have) {
  if (!data.labels) {
    have = false;
    return 0.0;
  }
  have = true;
  return adjusted_rand_index(*data.labels, labels);
}

// ----------------------------------------------------------------------------
// benchmark machinery
// ----------------------------------------------------------------------------

struct BenchEntry {
  std::string name;
  std::string file;
  std::vector<KernelFamily> kernels;
  int k = 2;
  int m = 4;
};

struct GridPoint {
  KernelFamily kernel = KernelFamily::gaussian;
  double gamma = 1.0;
  double ari = -2.0;
  double cost = 0.0;
  ClusteringResult result;
};

void run_grid(const Dataset& data, std::vector<GridPoint>& jobs, int k, const InitConfig& init,
              int threads) {
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      GridPoint& job = jobs[idx];
      KernelSpec spec;
      spec.family = job.kernel;
      spec.gamma = job.gamma;
      GramMatrix gram = gram_matrix(spec, data.points);
      job.result = kernel_kmeans(gram, k, init);
      job.cost = job.result.cost;
      job.ari = data.labels ? adjusted_rand_index(*data.labels, job.result.labels) : -2.0;
    }
  };
  int pool = std::max(1, threads);
  std::vector<std::thread> team;
  team.reserve(pool);
  for (int t = 0; t < pool; ++t) team.emplace_back(worker);
  for (auto& t : team) t.join();
}

struct TableRow {
  std::string dataset, method, kernel;
  double gamma = 0.0;
  int leaves = 0;
  double cost = 0.0, price = 0.0, ari = 0.0;
  bool have_ari = false;
};

void print_table(const std::vector<TableRow>& rows) {
  std::cout << std::left << std::setw(14) << "dataset" << std::setw(15) << "method"
            << std::setw(10) << "kernel" << std::setw(10) << "gamma" << std::setw(8) << "leaves"
            << std::setw(14) << "cost" << std::setw(10) << "price" << std::setw(8) << "ari"
            << "\n";
  for (const auto& row : rows) {
    std::ostringstream price;
    if (std::isinf(row.price)) {
      price << "inf";
    } else {
      price << std::fixed << std::setprecision(5) << row.price;
    }
    std::ostringstream ari;
    if (row.have_ari) {
      ari << std::fixed << std::setprecision(3) << row.ari;
    } else {
      ari << "-";
    }
    std::cout << std::left << std::setw(14) << row.dataset << std::setw(15) << row.method
              << std::setw(10) << row.kernel << std::setw(10) << std::setprecision(4)
              << row.gamma << std::setw(8) << row.leaves << std::setw(14)
              << std::setprecision(6) << row.cost << std::setw(10) << price.str()
              << std::setw(8) << ari.str() << "\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"interpretable kernel clustering"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file (flags take precedence)");

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "base random seed")->capture_default_str();

  // ---- cluster ----------------------------------------------------------
  auto* cluster = app.add_subcommand("cluster", "kernel k-means on a dataset");
  cluster->fallthrough();
  DataArgs cluster_data;
  KernelArgs cluster_kernel;
  int cluster_k = 2, cluster_restarts = 5, cluster_maxiter = 300;
  std::string cluster_init = "kpp";
  std::string cluster_labels_out = "labels.csv", cluster_metrics_out;
  add_data_options(cluster, cluster_data, false);
  add_kernel_options(cluster, cluster_kernel);
  cluster->add_option("--k", cluster_k, "number of clusters")->required()->check(CLI::PositiveNumber);
  cluster->add_option("--restarts", cluster_restarts)->check(CLI::PositiveNumber);
  cluster->add_option("--max-iter", cluster_maxiter)->check(CLI::PositiveNumber);
  cluster->add_option("--init", cluster_init, "kpp | random");
  cluster->add_option("--labels-out", cluster_labels_out, "output labels CSV");
  cluster->add_option("--metrics-out", cluster_metrics_out, "append metrics JSONL here");

  // ---- explain ----------------------------------------------------------
  auto* explain = app.add_subcommand("explain", "kernel k-means plus an interval-cut tree");
  explain->fallthrough();
  DataArgs explain_data;
  KernelArgs explain_kernel;
  int explain_k = 2, explain_restarts = 5, explain_order = 5;
  std::string explain_features = "auto";
  std::string explain_tree_out = "tree.json", explain_dot_out = "tree.dot",
              explain_metrics_out;
  add_data_options(explain, explain_data, false);
  add_kernel_options(explain, explain_kernel);
  explain->add_option("--k", explain_k)->required()->check(CLI::PositiveNumber);
  explain->add_option("--restarts", explain_restarts)->check(CLI::PositiveNumber);
  explain->add_option("--features", explain_features, "taylor|distance|additive|raw|auto");
  explain->add_option("--order", explain_order, "taylor / chi2 feature order M")
      ->check(CLI::PositiveNumber);
  explain->add_option("--tree-out", explain_tree_out);
  explain->add_option("--dot-out", explain_dot_out);
  explain->add_option("--metrics-out", explain_metrics_out);

  // ---- refine -----------------------------------------------------------
  auto* refine_cmd = app.add_subcommand("refine", "grow a tree with greedy cost or purity splits");
  refine_cmd->fallthrough();
  DataArgs refine_data;
  KernelArgs refine_kernel;
  int refine_k = 2, refine_restarts = 5, refine_leaves = 4;
  bool refine_empty = false;
  std::string refine_tree_in, refine_objective = "exkmc", refine_cuts = "one_sided";
  std::string refine_tree_out = "refined.json", refine_metrics_out;
  add_data_options(refine_cmd, refine_data, false);
  add_kernel_options(refine_cmd, refine_kernel);
  refine_cmd->add_option("--k", refine_k, "reference cluster count")
      ->required()
      ->check(CLI::PositiveNumber);
  refine_cmd->add_option("--restarts", refine_restarts)->check(CLI::PositiveNumber);
  refine_cmd->add_option("--tree", refine_tree_in, "tree JSON to refine");
  refine_cmd->add_flag("--empty", refine_empty, "start from a single-leaf tree");
  refine_cmd->add_option("--leaves", refine_leaves, "target leaf count")
      ->required()
      ->check(CLI::PositiveNumber);
  refine_cmd->add_option("--objective", refine_objective, "exkmc | expand");
  refine_cmd->add_option("--cuts", refine_cuts, "one_sided | interval");
  refine_cmd->add_option("--tree-out", refine_tree_out);
  refine_cmd->add_option("--metrics-out", refine_metrics_out);

  // ---- evaluate ---------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "cost, price and ARI of a stored tree");
  evaluate->fallthrough();
  DataArgs eval_data;
  KernelArgs eval_kernel;
  int eval_k = 2, eval_restarts = 5;
  std::string eval_tree_in, eval_metrics_out;
  add_data_options(evaluate, eval_data, false);
  add_kernel_options(evaluate, eval_kernel);
  evaluate->add_option("--k", eval_k, "reference cluster count")->check(CLI::PositiveNumber);
  evaluate->add_option("--restarts", eval_restarts)->check(CLI::PositiveNumber);
  evaluate->add_option("--tree", eval_tree_in, "tree JSON")->required();
  evaluate->add_option("--metrics-out", eval_metrics_out);

  // ---- benchmark --------------------------------------------------------
  auto* bench = app.add_subcommand("benchmark", "gamma-grid search plus tree methods per dataset");
  bench->fallthrough();
  std::string bench_suite = "standard";
  std::string bench_data_dir = "data";
  std::vector<std::string> bench_datasets;
  std::string bench_metrics_out = "metrics.jsonl";
  int bench_threads = 4, bench_restarts = 5, bench_order = 5, bench_chi2_draws = 100;
  double bench_grid_lo = -6.0, bench_grid_hi = 6.0;
  int bench_grid_size = 16;
  bool bench_no_normalize = false;
  bench->add_option("--suite", bench_suite, "standard | chi2 | all");
  bench->add_option("--data-dir", bench_data_dir, "directory holding the benchmark CSVs");
  bench->add_option("--datasets", bench_datasets, "subset of the standard suite to run");
  bench->add_option("--metrics-out", bench_metrics_out);
  bench->add_option("--threads", bench_threads, "worker pool size for grid entries")
      ->check(CLI::PositiveNumber);
  bench->add_option("--restarts", bench_restarts)->check(CLI::PositiveNumber);
  bench->add_option("--order", bench_order)->check(CLI::PositiveNumber);
  bench->add_option("--chi2-draws", bench_chi2_draws)->check(CLI::PositiveNumber);
  bench->add_option("--grid-lo", bench_grid_lo, "log2 of the smallest gamma");
  bench->add_option("--grid-hi", bench_grid_hi, "log2 of the largest gamma");
  bench->add_option("--grid-size", bench_grid_size)->check(CLI::PositiveNumber);
  bench->add_flag("--no-normalize", bench_no_normalize);

  // ---- generate ---------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset to CSV");
  generate->fallthrough();
  std::string gen_name, gen_out = "dataset.csv";
  int gen_n = 200, gen_per_side = 10;
  double gen_noise = 0.05, gen_eps = 0.1;
  std::vector<std::string> gen_chi2_probs;
  generate
      ->add_option("--name", gen_name,
                   "halfmoons | exkmc | quadratic | epsilon | witness2d | witness1d | chi2")
      ->required();
  generate->add_option("--out", gen_out);
  generate->add_option("--n", gen_n)->check(CLI::PositiveNumber);
  generate->add_option("--noise", gen_noise)->check(CLI::NonNegativeNumber);
  generate->add_option("--eps", gen_eps)->check(CLI::PositiveNumber);
  generate->add_option("--per-side", gen_per_side)->check(CLI::PositiveNumber);
  generate->add_option("--chi2-probs", gen_chi2_probs,
                       "four comma-separated probability vectors overriding the defaults");

  std::vector<const char*> argv;
  argv.push_back("ikclust");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    InitConfig init;
    init.seed = seed;

    if (cluster->parsed()) {
      Timer timer;
      Dataset data = load_data(cluster_data);
      KernelSpec spec = make_spec(cluster_kernel);
      init.restarts = cluster_restarts;
      init.max_iterations = cluster_maxiter;
      init.method = cluster_init == "random" ? InitMethod::random_assignment
                                             : InitMethod::kpp_feature_space;
      GramMatrix gram = gram_matrix(spec, data.points);
      ClusteringResult result = kernel_kmeans(gram, cluster_k, init);
      write_labels_csv(cluster_labels_out, result.labels);
      bool have_ari = false;
      double ari = ari_or_nan(data, result.labels, have_ari);
      json rec = metrics_record(data.name, family_name(spec.family), spec.gamma,
                                "kernel_kmeans", cluster_k, result.cost, 1.0, ari, have_ari,
                                seed, timer.ms());
      rec["iterations"] = result.iterations;
      rec["converged"] = result.converged;
      std::cout << rec.dump() << "\n";
      write_metrics(cluster_metrics_out, {rec});
      return 0;
    }

    if (explain->parsed()) {
      Timer timer;
      Dataset data = load_data(explain_data);
      KernelSpec spec = make_spec(explain_kernel);
      init.restarts = explain_restarts;
      KernelImmResult result = kernel_imm(data, spec, explain_k,
                                          feature_mode_from_name(explain_features),
                                          explain_order, init);
      write_text(explain_tree_out, export_tree(result.tree, TreeFormat::json));
      write_text(explain_dot_out, export_tree(result.tree, TreeFormat::dot));
      auto induced = induced_partition(result.tree, data.points);
      double price = price_of_explainability(result.tree_cost_value, result.reference.cost);
      bool have_ari = false;
      double ari = ari_or_nan(data, induced, have_ari);
      json rec = metrics_record(data.name, family_name(spec.family), spec.gamma, "kernel_imm",
                                result.tree.k_leaves, result.tree_cost_value, price, ari,
                                have_ari, seed, timer.ms());
      rec["features"] = feature_mode_name(result.mode_used);
      rec["reference_cost"] = result.reference.cost;
      if (auto empties = empty_leaves(result.tree, data.points); !empties.empty()) {
        std::cerr << "warning: " << empties.size() << " empty leaves\n";
      }
      std::cout << rec.dump() << "\n";
      write_metrics(explain_metrics_out, {rec});
      return 0;
    }

    if (refine_cmd->parsed()) {
      Timer timer;
      Dataset data = load_data(refine_data);
      KernelSpec spec = make_spec(refine_kernel);
      init.restarts = refine_restarts;
      if (refine_tree_in.empty() == !refine_empty) {
        throw std::invalid_argument("refine: pass exactly one of --tree or --empty");
      }
      GramMatrix gram = gram_matrix(spec, data.points);
      ClusteringResult reference = kernel_kmeans(gram, refine_k, init);
      std::optional<InterpretableTree> start;
      if (!refine_tree_in.empty()) {
        std::ifstream in(refine_tree_in);
        if (!in) throw std::runtime_error("cannot open tree file " + refine_tree_in);
        std::stringstream buffer;
        buffer << in.rdbuf();
        start = import_tree(buffer.str());
      }
      RefineOptions options;
      options.objective =
          refine_objective == "expand" ? RefineObjective::expand : RefineObjective::exkmc;
      options.cut_mode = refine_cuts == "interval" ? CutMode::interval : CutMode::one_sided;
      RefineResult refined = refine(start, gram, data.points, reference.labels, refine_leaves,
                                    options);
      write_text(refine_tree_out, export_tree(refined.tree, TreeFormat::json));
      double cost = tree_cost(refined.tree, gram, data.points);
      double price = price_of_explainability(cost, reference.cost);
      auto induced = induced_partition(refined.tree, data.points);
      bool have_ari = false;
      double ari = ari_or_nan(data, induced, have_ari);
      json rec = metrics_record(data.name, family_name(spec.family), spec.gamma,
                                refine_objective == "expand" ? "kernel_expand" : "kernel_exkmc",
                                refined.tree.k_leaves, cost, price, ari, have_ari, seed,
                                timer.ms());
      rec["reached_target"] = refined.reached_target;
      rec["per_leaf_cost"] = tree_cost_per_leaf(refined.tree, gram, data.points);
      if (auto empties = empty_leaves(refined.tree, data.points); !empties.empty()) {
        std::cerr << "warning: " << empties.size() << " empty leaves\n";
      }
      std::cout << rec.dump() << "\n";
      write_metrics(refine_metrics_out, {rec});
      return 0;
    }

    if (evaluate->parsed()) {
      Timer timer;
      Dataset data = load_data(eval_data);
      KernelSpec spec = make_spec(eval_kernel);
      init.restarts = eval_restarts;
      std::ifstream in(eval_tree_in);
      if (!in) throw std::runtime_error("cannot open tree file " + eval_tree_in);
      std::stringstream buffer;
      buffer << in.rdbuf();
      InterpretableTree tree = import_tree(buffer.str());
      GramMatrix gram = gram_matrix(spec, data.points);
      ClusteringResult reference = kernel_kmeans(gram, eval_k, init);
      double cost = tree_cost(tree, gram, data.points);
      double price = price_of_explainability(cost, reference.cost);
      auto induced = induced_partition(tree, data.points);
      bool have_ari = false;
      double ari = ari_or_nan(data, induced, have_ari);
      json rec = metrics_record(data.name, family_name(spec.family), spec.gamma, "evaluate",
                                tree.k_leaves, cost, price, ari, have_ari, seed, timer.ms());
      rec["reference_cost"] = reference.cost;
      rec["per_leaf_cost"] = tree_cost_per_leaf(tree, gram, data.points);
      std::cout << rec.dump() << "\n";
      write_metrics(eval_metrics_out, {rec});
      return 0;
    }

    if (generate->parsed()) {
      Dataset data;
      if (gen_name == "halfmoons") {
        data = gen_halfmoons(gen_n, gen_noise, seed);
      } else if (gen_name == "exkmc") {
        data = gen_exkmc_counterexample(gen_eps, gen_per_side);
      } else if (gen_name == "quadratic") {
        data = gen_quadratic_counterexample();
      } else if (gen_name == "epsilon") {
        data = gen_epsilon_counterexample();
      } else if (gen_name == "witness2d") {
        data = gen_featuremap_witnesses().first;
      } else if (gen_name == "witness1d") {
        data = gen_featuremap_witnesses().second;
      } else if (gen_name == "chi2") {
        auto probs = kChi2MixtureProbs;
        if (!gen_chi2_probs.empty()) {
          if (gen_chi2_probs.size() != 4) {
            throw std::invalid_argument("--chi2-probs needs exactly four vectors");
          }
          for (int i = 0; i < 4; ++i) {
            std::stringstream ss(gen_chi2_probs[i]);
            std::string cell;
            for (int j = 0; j < 4; ++j) {
              if (!std::getline(ss, cell, ',')) {
                throw std::invalid_argument("--chi2-probs vectors need four entries");
              }
              probs[i][j] = std::stod(cell);
            }
          }
        }
        data = gen_chi2_mixture(seed, probs);
      } else {
        throw std::invalid_argument("unknown generator: " + gen_name);
      }
      save_csv(data, gen_out);
      std::cout << "wrote " << data.n() << " points, " << data.dim() << " dims to " << gen_out
                << "\n";
      return 0;
    }

    if (bench->parsed()) {
      std::vector<json> records;
      std::vector<TableRow> rows;
      init.restarts = bench_restarts;

      if (bench_suite == "standard" || bench_suite == "all") {
        std::vector<BenchEntry> suite = {
            {"pathbased", bench_data_dir + "/pathbased.csv",
             {KernelFamily::gaussian, KernelFamily::laplace}, 3, 6},
            {"aggregation", bench_data_dir + "/aggregation.csv",
             {KernelFamily::gaussian, KernelFamily::laplace}, 7, 10},
            {"flame", bench_data_dir + "/flame.csv",
             {KernelFamily::gaussian, KernelFamily::laplace}, 2, 4},
            {"iris", bench_data_dir + "/iris.csv",
             {KernelFamily::gaussian, KernelFamily::laplace}, 3, 6},
            {"cancer", bench_data_dir + "/cancer.csv",
             {KernelFamily::gaussian, KernelFamily::laplace}, 2, 4},
        };
        if (!bench_datasets.empty()) {
          std::vector<BenchEntry> filtered;
          for (const auto& entry : suite) {
            if (std::find(bench_datasets.begin(), bench_datasets.end(), entry.name) !=
                bench_datasets.end()) {
              filtered.push_back(entry);
            }
          }
          suite = filtered;
        }

        for (const auto& entry : suite) {
          Timer timer;
          DataArgs data_args;
          data_args.path = entry.file;
          data_args.normalize = !bench_no_normalize;
          Dataset data = load_data(data_args);
          if (!data.labels) {
            throw std::runtime_error("benchmark dataset " + entry.name + " has no labels");
          }

          // linear baseline: k-means plus mistake minimization on raw axes
          GramMatrix gram_linear = gram_matrix(KernelSpec::linear_spec(), data.points);
          ClusteringResult ref_linear = kernel_kmeans(gram_linear, entry.k, init);
          KernelImmResult imm_raw = kernel_imm_from_reference(
              data, KernelSpec::linear_spec(), gram_linear, ref_linear, FeatureMode::raw);
          {
            bool have = false;
            double ari = ari_or_nan(data, ref_linear.labels, have);
            records.push_back(metrics_record(entry.name, "linear", 0.0, "kmeans", entry.k,
                                             ref_linear.cost, 1.0, ari, have, seed, timer.ms()));
            rows.push_back({entry.name, "kmeans", "linear", 0.0, entry.k, ref_linear.cost, 1.0,
                            ari, have});
            auto induced = induced_partition(imm_raw.tree, data.points);
            double tree_ari = ari_or_nan(data, induced, have);
            double price =
                price_of_explainability(imm_raw.tree_cost_value, ref_linear.cost);
            records.push_back(metrics_record(entry.name, "linear", 0.0, "imm", entry.k,
                                             imm_raw.tree_cost_value, price, tree_ari, have,
                                             seed, timer.ms()));
            rows.push_back({entry.name, "imm", "linear", 0.0, entry.k,
                            imm_raw.tree_cost_value, price, tree_ari, have});
          }

          // gamma grid per kernel family, selected by agreement with the labels
          std::vector<GridPoint> jobs;
          for (KernelFamily kernel : entry.kernels) {
            for (double gamma : gamma_grid(bench_grid_lo, bench_grid_hi, bench_grid_size)) {
              GridPoint job;
              job.kernel = kernel;
              job.gamma = gamma;
              jobs.push_back(job);
            }
          }
          run_grid(data, jobs, entry.k, init, bench_threads);
          const GridPoint* best = nullptr;
          for (const auto& job : jobs) {
            if (!best || job.ari > best->ari ||
                (job.ari == best->ari && job.cost < best->cost)) {
              best = &job;
            }
          }

          KernelSpec spec;
          spec.family = best->kernel;
          spec.gamma = best->gamma;
          GramMatrix gram = gram_matrix(spec, data.points);
          const ClusteringResult& reference = best->result;
          {
            bool have = false;
            double ari = ari_or_nan(data, reference.labels, have);
            records.push_back(metrics_record(entry.name, family_name(spec.family), spec.gamma,
                                             "kernel_kmeans", entry.k, reference.cost, 1.0, ari,
                                             have, seed, timer.ms()));
            rows.push_back({entry.name, "kernel_kmeans", family_name(spec.family), spec.gamma,
                            entry.k, reference.cost, 1.0, ari, have});
          }

          KernelImmResult kimm = kernel_imm_from_reference(data, spec, gram, reference,
                                                           FeatureMode::auto_best, bench_order);
          {
            bool have = false;
            auto induced = induced_partition(kimm.tree, data.points);
            double ari = ari_or_nan(data, induced, have);
            double price = price_of_explainability(kimm.tree_cost_value, reference.cost);
            json rec = metrics_record(entry.name, family_name(spec.family), spec.gamma,
                                      "kernel_imm", kimm.tree.k_leaves, kimm.tree_cost_value,
                                      price, ari, have, seed, timer.ms());
            rec["features"] = feature_mode_name(kimm.mode_used);
            records.push_back(rec);
            rows.push_back({entry.name, "kernel_imm", family_name(spec.family), spec.gamma,
                            kimm.tree.k_leaves, kimm.tree_cost_value, price, ari, have});
          }

          for (RefineObjective objective : {RefineObjective::exkmc, RefineObjective::expand}) {
            RefineOptions options;
            options.objective = objective;
            options.cut_mode = CutMode::interval;
            RefineResult refined = refine(kimm.tree, gram, data.points, reference.labels,
                                          entry.m, options);
            double cost = tree_cost(refined.tree, gram, data.points);
            double price = price_of_explainability(cost, reference.cost);
            bool have = false;
            auto induced = induced_partition(refined.tree, data.points);
            double ari = ari_or_nan(data, induced, have);
            std::string method =
                objective == RefineObjective::exkmc ? "kernel_exkmc" : "kernel_expand";
            records.push_back(metrics_record(entry.name, family_name(spec.family), spec.gamma,
                                             method, refined.tree.k_leaves, cost, price, ari,
                                             have, seed, timer.ms()));
            rows.push_back({entry.name, method, family_name(spec.family), spec.gamma,
                            refined.tree.k_leaves, cost, price, ari, have});
          }
        }
      }

      if (bench_suite == "chi2" || bench_suite == "all") {
        Timer timer;
        std::vector<double> chi2_ari(bench_chi2_draws), linear_ari(bench_chi2_draws);
        std::atomic<int> next{0};
        auto worker = [&]() {
          while (true) {
            int idx = next.fetch_add(1);
            if (idx >= bench_chi2_draws) return;
            Dataset draw = gen_chi2_mixture(seed + static_cast<std::uint64_t>(idx));
            GramMatrix chi2 = gram_matrix(KernelSpec::chi2_spec(), draw.points);
            GramMatrix linear = gram_matrix(KernelSpec::linear_spec(), draw.points);
            chi2_ari[idx] =
                adjusted_rand_index(*draw.labels, kernel_kmeans(chi2, 4, init).labels);
            linear_ari[idx] =
                adjusted_rand_index(*draw.labels, kernel_kmeans(linear, 4, init).labels);
          }
        };
        std::vector<std::thread> team;
        for (int t = 0; t < std::max(1, bench_threads); ++t) team.emplace_back(worker);
        for (auto& t : team) t.join();

        double chi2_median = median(chi2_ari);
        double linear_median = median(linear_ari);
        json rec;
        rec["dataset"] = "chi2_mixture";
        rec["draws"] = bench_chi2_draws;
        rec["median_ari_chi2"] = chi2_median;
        rec["median_ari_kmeans"] = linear_median;
        rec["seed"] = seed;
        rec["runtime_ms"] = timer.ms();
        records.push_back(rec);
        std::cout << "chi2 mixture over " << bench_chi2_draws
                  << " draws: median ARI chi2=" << chi2_median
                  << " kmeans=" << linear_median << "\n";
      }

      print_table(rows);
      write_metrics(bench_metrics_out, records);
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ikclust
