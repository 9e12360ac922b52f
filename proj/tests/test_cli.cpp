#include <doctest.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "ikclust/cli.hpp"
#include "ikclust/datasets.hpp"
#include "ikclust/tree.hpp"

using namespace ikclust;

namespace {

struct CapturedRun {
  int status = 0;
  std::string out;
  std::string err;
};

CapturedRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  CapturedRun result;
  result.status = run_cli(args);
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string make_blobs_csv(const testing::TempDir& dir) {
  Rng rng(42);
  std::ostringstream csv;
  csv << "x0,x1,label\n";
  for (int i = 0; i < 30; ++i) {
    double cx = i < 15 ? 0.0 : 4.0;
    csv << cx + rng.normal(0, 0.3) << "," << rng.normal(0, 0.3) << "," << (i < 15 ? 0 : 1)
        << "\n";
  }
  auto path = dir.file("blobs.csv");
  testing::write_file(path, csv.str());
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("cluster writes labels and metrics deterministically") {
  testing::TempDir dir;
  auto data = make_blobs_csv(dir);
  auto labels1 = dir.file("labels1.csv");
  auto labels2 = dir.file("labels2.csv");
  std::vector<std::string> base{"cluster",      "--data",  data,     "--kernel",
                                "laplace",      "--gamma", "0.5",    "--k",
                                "2",            "--seed",  "1",      "--labels-out"};
  auto first = base;
  first.push_back(labels1);
  auto second = base;
  second.push_back(labels2);
  CapturedRun a = run(first);
  CapturedRun b = run(second);
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(testing::read_file(labels1) == testing::read_file(labels2));

  auto rec = nlohmann::json::parse(a.out);
  CHECK(rec["method"] == "kernel_kmeans");
  CHECK(rec["cost"].get<double>() > 0.0);
  CHECK(rec["ari"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("k must be positive") {
  testing::TempDir dir;
  auto data = make_blobs_csv(dir);
  CapturedRun bad = run({"cluster", "--data", data, "--k", "0"});
  CHECK(bad.status != 0);
}

TEST_CASE("chi2 kernel rejects out-of-domain data by coordinate") {
  testing::TempDir dir;
  auto path = dir.file("negative.csv");
  testing::write_file(path, "x0,x1\n0.5,0.5\n-0.25,0.5\n0.1,0.2\n");
  CapturedRun bad = run({"cluster", "--data", path, "--kernel", "chi2", "--k", "2",
                         "--labels-out", dir.file("l.csv")});
  CHECK(bad.status != 0);
  CHECK(bad.err.find("coordinate 0") != std::string::npos);
}

TEST_CASE("explain emits tree files and metrics") {
  testing::TempDir dir;
  auto data = make_blobs_csv(dir);
  auto tree_path = dir.file("tree.json");
  auto dot_path = dir.file("tree.dot");
  CapturedRun result =
      run({"explain", "--data", data, "--kernel", "gaussian", "--gamma", "2", "--k", "2",
           "--seed", "3", "--tree-out", tree_path, "--dot-out", dot_path});
  REQUIRE(result.status == 0);
  auto rec = nlohmann::json::parse(result.out);
  CHECK(rec["method"] == "kernel_imm");
  CHECK(rec["price"].get<double>() >= 0.0);
  CHECK(rec["leaves"] == 2);

  InterpretableTree tree = import_tree(testing::read_file(tree_path));
  CHECK(tree.k_leaves == 2);
  CHECK(testing::read_file(dot_path).find("digraph") == 0);
}

TEST_CASE("refine grows a stored tree and an empty tree") {
  testing::TempDir dir;
  auto data = make_blobs_csv(dir);
  auto tree_path = dir.file("tree.json");
  REQUIRE(run({"explain", "--data", data, "--kernel", "gaussian", "--gamma", "2", "--k", "2",
               "--tree-out", tree_path, "--dot-out", dir.file("t.dot")})
              .status == 0);

  auto refined_path = dir.file("refined.json");
  CapturedRun grown = run({"refine", "--data", data, "--kernel", "gaussian", "--gamma", "2",
                           "--k", "2", "--tree", tree_path, "--leaves", "4", "--objective",
                           "exkmc", "--cuts", "interval", "--tree-out", refined_path});
  REQUIRE(grown.status == 0);
  CHECK(import_tree(testing::read_file(refined_path)).k_leaves == 4);

  CapturedRun from_empty =
      run({"refine", "--data", data, "--kernel", "gaussian", "--gamma", "2", "--k", "2",
           "--empty", "--leaves", "3", "--objective", "expand", "--tree-out",
           dir.file("empty_refined.json")});
  REQUIRE(from_empty.status == 0);
  auto rec = nlohmann::json::parse(from_empty.out);
  CHECK(rec["method"] == "kernel_expand");
  CHECK(rec["leaves"] == 3);

  CapturedRun both = run({"refine", "--data", data, "--k", "2", "--leaves", "3"});
  CHECK(both.status != 0);
}

TEST_CASE("evaluate reports price for a stored tree") {
  testing::TempDir dir;
  auto data = make_blobs_csv(dir);
  auto tree_path = dir.file("tree.json");
  REQUIRE(run({"explain", "--data", data, "--kernel", "gaussian", "--gamma", "2", "--k", "2",
               "--tree-out", tree_path, "--dot-out", dir.file("t.dot")})
              .status == 0);
  CapturedRun result = run({"evaluate", "--data", data, "--kernel", "gaussian", "--gamma", "2",
                            "--k", "2", "--tree", tree_path});
  REQUIRE(result.status == 0);
  auto rec = nlohmann::json::parse(result.out);
  CHECK(rec["method"] == "evaluate");
  CHECK(rec["price"].get<double>() >= 0.9);
}

TEST_CASE("generate covers every synthetic dataset") {
  testing::TempDir dir;
  auto quad = dir.file("quad.csv");
  REQUIRE(run({"generate", "--name", "quadratic", "--out", quad}).status == 0);
  Dataset quad_data = load_csv(quad);
  CHECK(quad_data.n() == 4);

  auto moons1 = dir.file("m1.csv");
  auto moons2 = dir.file("m2.csv");
  REQUIRE(run({"generate", "--name", "halfmoons", "--n", "50", "--noise", "0.05", "--seed",
               "7", "--out", moons1})
              .status == 0);
  REQUIRE(run({"generate", "--name", "halfmoons", "--n", "50", "--noise", "0.05", "--seed",
               "7", "--out", moons2})
              .status == 0);
  CHECK(testing::read_file(moons1) == testing::read_file(moons2));

  auto exkmc = dir.file("exkmc.csv");
  REQUIRE(run({"generate", "--name", "exkmc", "--eps", "0.01", "--per-side", "5", "--out",
               exkmc})
              .status == 0);
  Dataset exkmc_data = load_csv(exkmc);
  CHECK(exkmc_data.dim() == 1);
  CHECK(exkmc_data.n() == 30);
  REQUIRE(exkmc_data.labels.has_value());

  for (std::string name : {"epsilon", "witness2d", "witness1d", "chi2"}) {
    REQUIRE(run({"generate", "--name", name, "--out", dir.file(name + ".csv")}).status == 0);
  }
  CHECK(run({"generate", "--name", "nonsense", "--out", dir.file("x.csv")}).status != 0);
}

TEST_CASE("benchmark runs the chi2 suite") {
  testing::TempDir dir;
  auto metrics = dir.file("metrics.jsonl");
  CapturedRun result = run({"benchmark", "--suite", "chi2", "--chi2-draws", "6", "--threads",
                            "2", "--restarts", "2", "--metrics-out", metrics});
  REQUIRE(result.status == 0);
  std::ifstream in(metrics);
  std::string line;
  REQUIRE(std::getline(in, line));
  auto rec = nlohmann::json::parse(line);
  CHECK(rec["dataset"] == "chi2_mixture");
  CHECK(rec["draws"] == 6);
  CHECK(rec["median_ari_chi2"].get<double>() >= -1.0);
}

}  // TEST_SUITE
