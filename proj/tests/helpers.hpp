#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "ikclust/kernels.hpp"
#include "ikclust/rng.hpp"

namespace ikclust::testing {

inline Matrix random_matrix(int n, int d, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  Matrix m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

inline std::vector<int> random_labels(int n, int k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = rng.uniform_int(k);
  // make every cluster nonempty
  for (int l = 0; l < k && l < n; ++l) labels[l] = l;
  return labels;
}

class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0;; ++attempt) {
      path_ = base / ("ikclust_test_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter_++) + "_" + std::to_string(attempt));
      std::error_code ec;
      if (std::filesystem::create_directory(path_, ec)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

}  // namespace ikclust::testing
