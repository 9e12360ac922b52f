#include "ikclust/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ikclust/rng.hpp"

namespace ikclust {
namespace {

bool parse_double(const std::string& cell, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(cell, &pos);
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    return pos == cell.size();
  } catch (...) {
    return false;
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    auto first = cell.find_first_not_of(" \t\r");
    auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double require_cost_identity(const Dataset& data, double expected, const char* what) {
  // k-means cost of the ground-truth partition, computed from cluster means
  const auto& labels = *data.labels;
  int k = *std::max_element(labels.begin(), labels.end()) + 1;
  double cost = 0.0;
  for (int l = 0; l < k; ++l) {
    Vector mean = Vector::Zero(data.dim());
    int count = 0;
    for (int i = 0; i < data.n(); ++i) {
      if (labels[i] == l) {
        mean += data.points.row(i).transpose();
        ++count;
      }
    }
    mean /= count;
    for (int i = 0; i < data.n(); ++i) {
      if (labels[i] == l) cost += (data.points.row(i).transpose() - mean).squaredNorm();
    }
  }
  if (std::abs(cost - expected) > 1e-9 * std::max(1.0, expected)) {
    throw std::logic_error(std::string(what) + ": construction self-check failed");
  }
  return cost;
}

}  // namespace

void Dataset::validate() const {
  if (n() < 1) throw std::invalid_argument("dataset " + name + ": empty");
  if (!points.allFinite()) throw std::invalid_argument("dataset " + name + ": non-finite values");
  if (labels && static_cast<int>(labels->size()) != n()) {
    throw std::invalid_argument("dataset " + name + ": label count does not match point count");
  }
}

Dataset load_csv(const std::string& path, const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw std::runtime_error("load_csv: " + path + " is empty");

  // header detection: any non-numeric cell in the first row
  auto first_cells = split_csv_line(lines[0]);
  bool has_header = false;
  for (const auto& cell : first_cells) {
    double v;
    if (!parse_double(cell, v)) {
      has_header = true;
      break;
    }
  }
  std::vector<std::string> header;
  std::size_t data_start = 0;
  if (has_header) {
    header = first_cells;
    data_start = 1;
  }

  int label_idx = -1;
  if (label_column) {
    double idx_value;
    if (parse_double(*label_column, idx_value)) {
      label_idx = static_cast<int>(idx_value);
    } else {
      auto it = std::find(header.begin(), header.end(), *label_column);
      if (it == header.end()) {
        throw std::runtime_error("load_csv: label column '" + *label_column + "' not found");
      }
      label_idx = static_cast<int>(it - header.begin());
    }
  } else if (has_header) {
    auto it = std::find(header.begin(), header.end(), "label");
    if (it != header.end()) label_idx = static_cast<int>(it - header.begin());
  }

  const int total_cols = static_cast<int>(first_cells.size());
  if (label_idx >= total_cols) throw std::runtime_error("load_csv: label column index out of range");
  const int d = total_cols - (label_idx >= 0 ? 1 : 0);
  if (d < 1) throw std::runtime_error("load_csv: no feature columns in " + path);

  const int n = static_cast<int>(lines.size() - data_start);
  if (n < 1) throw std::runtime_error("load_csv: no data rows in " + path);

  Dataset data;
  data.points = Matrix(n, d);
  std::vector<int> labels;
  for (int r = 0; r < n; ++r) {
    auto cells = split_csv_line(lines[data_start + r]);
    if (static_cast<int>(cells.size()) != total_cols) {
      throw std::runtime_error("load_csv: row " + std::to_string(r + 1 + data_start) +
                               " has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(total_cols));
    }
    int c_out = 0;
    for (int c = 0; c < total_cols; ++c) {
      double v;
      if (!parse_double(cells[c], v)) {
        throw std::runtime_error("load_csv: non-numeric cell at row " +
                                 std::to_string(r + 1 + data_start) + ", column " +
                                 std::to_string(c + 1));
      }
      if (c == label_idx) {
        labels.push_back(static_cast<int>(std::llround(v)));
      } else {
        data.points(r, c_out++) = v;
      }
    }
  }
  if (label_idx >= 0) data.labels = std::move(labels);
  auto slash = path.find_last_of('/');
  data.name = slash == std::string::npos ? path : path.substr(slash + 1);
  if (auto dot = data.name.find_last_of('.'); dot != std::string::npos) {
    data.name = data.name.substr(0, dot);
  }
  data.validate();
  return data;
}

void save_csv(const Dataset& data, const std::string& path, bool with_labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  out.precision(17);
  bool labels = with_labels && data.labels.has_value();
  for (int c = 0; c < data.dim(); ++c) out << "x" << c << ",";
  if (labels) {
    out << "label\n";
  } else {
    out.seekp(-1, std::ios_base::cur);
    out << "\n";
  }
  for (int r = 0; r < data.n(); ++r) {
    for (int c = 0; c < data.dim(); ++c) {
      out << data.points(r, c);
      if (c + 1 < data.dim() || labels) out << ",";
    }
    if (labels) out << (*data.labels)[r];
    out << "\n";
  }
}

Dataset normalize_unit_range(const Dataset& data) {
  Dataset out = data;
  for (int c = 0; c < data.dim(); ++c) {
    double lo = data.points.col(c).minCoeff();
    double hi = data.points.col(c).maxCoeff();
    double range = hi - lo;
    if (range > 0.0) {
      out.points.col(c) = (data.points.col(c).array() - lo) / range;
    } else {
      out.points.col(c).setZero();
    }
  }
  return out;
}

Dataset gen_halfmoons(int n, double noise_sd, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_halfmoons: n must be at least 2");
  if (noise_sd < 0.0) throw std::invalid_argument("gen_halfmoons: negative noise");
  Rng rng(seed);
  const int n_upper = n / 2 + n % 2;
  const int n_lower = n / 2;
  Dataset data;
  data.name = "halfmoons";
  data.points = Matrix(n, 2);
  std::vector<int> labels(n);
  for (int i = 0; i < n_upper; ++i) {
    double t = M_PI * i / std::max(1, n_upper - 1);
    data.points(i, 0) = std::cos(t);
    data.points(i, 1) = std::sin(t);
    labels[i] = 0;
  }
  for (int i = 0; i < n_lower; ++i) {
    double t = M_PI * i / std::max(1, n_lower - 1);
    data.points(n_upper + i, 0) = 1.0 - std::cos(t);
    data.points(n_upper + i, 1) = 0.5 - std::sin(t);
    labels[n_upper + i] = 1;
  }
  if (noise_sd > 0.0) {
    for (int i = 0; i < n; ++i) {
      data.points(i, 0) += rng.normal(0.0, noise_sd);
      data.points(i, 1) += rng.normal(0.0, noise_sd);
    }
  }
  data.labels = std::move(labels);
  return data;
}

Dataset gen_exkmc_counterexample(double eps, int per_side) {
  if (!(eps > 0.0 && eps < 0.25)) {
    throw std::invalid_argument("gen_exkmc_counterexample: eps must be in (0, 1/4)");
  }
  if (per_side < 1) throw std::invalid_argument("gen_exkmc_counterexample: per_side must be >= 1");
  const int n = 6 * per_side;
  Dataset data;
  data.name = "exkmc_counterexample";
  data.points = Matrix(n, 1);
  std::vector<int> labels(n);
  const double centers[3] = {-1.0, 0.0, 1.0};
  int row = 0;
  for (int c = 0; c < 3; ++c) {
    for (int s = 0; s < per_side; ++s) {
      data.points(row, 0) = centers[c] - eps;
      labels[row++] = c;
    }
    for (int s = 0; s < per_side; ++s) {
      data.points(row, 0) = centers[c] + eps;
      labels[row++] = c;
    }
  }
  data.labels = std::move(labels);
  require_cost_identity(data, n * eps * eps, "gen_exkmc_counterexample");
  return data;
}

Dataset gen_quadratic_counterexample() {
  Dataset data;
  data.name = "quadratic_counterexample";
  data.points = Matrix(4, 2);
  data.points << 0, 1,
                 0, -1,
                 1, 0,
                 -1, 0;
  data.labels = std::vector<int>{0, 0, 1, 1};
  GramMatrix gram = gram_matrix(KernelSpec::quadratic_spec(), data.points);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double expected = ((*data.labels)[i] == (*data.labels)[j]) ? 1.0 : 0.0;
      if (std::abs(gram.values(i, j) - expected) > 1e-12) {
        throw std::logic_error("gen_quadratic_counterexample: Gram self-check failed");
      }
    }
  }
  return data;
}

Dataset gen_epsilon_counterexample() {
  // all ways of marking two of four points
  std::vector<std::array<bool, 4>> assignments;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      std::array<bool, 4> mask{false, false, false, false};
      mask[a] = mask[b] = true;
      assignments.push_back(mask);
    }
  }
  const int d = 36;
  Dataset data;
  data.name = "epsilon_counterexample";
  data.points = Matrix::Zero(8, d);
  std::vector<int> labels(8);
  for (int p = 0; p < 4; ++p) labels[p] = 0;
  for (int q = 4; q < 8; ++q) labels[q] = 1;
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      int dim = a * 6 + b;
      for (int p = 0; p < 4; ++p) data.points(p, dim) = assignments[a][p] ? 1.0 : 0.0;
      for (int q = 0; q < 4; ++q) data.points(4 + q, dim) = assignments[b][q] ? -1.0 : 0.0;
    }
  }
  data.labels = std::move(labels);
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) {
      double sq = (data.points.row(i) - data.points.row(j)).squaredNorm();
      double expected = ((*data.labels)[i] == (*data.labels)[j]) ? 24.0 : 54.0;
      if (std::abs(sq - expected) > 1e-9) {
        throw std::logic_error("gen_epsilon_counterexample: distance self-check failed");
      }
    }
  }
  return data;
}

std::pair<Dataset, Dataset> gen_featuremap_witnesses() {
  Dataset planar;
  planar.name = "featuremap_witness_2d";
  planar.points = Matrix(3, 2);
  planar.points << 0, 0,
                   1, 0,
                   1, 1;
  GramMatrix gram2 = gram_matrix(KernelSpec::gaussian_spec(2.0), planar.points);
  if (!(gram2.values(0, 1) + gram2.values(1, 2) < 1.0)) {
    throw std::logic_error("gen_featuremap_witnesses: K12 + K23 < 1 self-check failed");
  }

  Dataset line;
  line.name = "featuremap_witness_1d";
  line.points = Matrix(3, 1);
  line.points << 0, 3, 6;
  GramMatrix gram1 = gram_matrix(KernelSpec::gaussian_spec(1.0), line.points);
  if (!(gram1.values(0, 1) + gram1.values(1, 2) < gram1.values(0, 2) + 1.0)) {
    throw std::logic_error("gen_featuremap_witnesses: K12 + K23 < K13 + 1 self-check failed");
  }
  return {planar, line};
}

Dataset gen_chi2_mixture(std::uint64_t seed,
                         const std::array<std::array<double, 4>, 4>& probs) {
  Rng rng(seed);
  const int instances = 5;
  const int samples = 100;
  Dataset data;
  data.name = "chi2_mixture";
  data.points = Matrix(4 * instances, 4);
  std::vector<int> labels(4 * instances);
  int row = 0;
  for (int dist = 0; dist < 4; ++dist) {
    std::vector<double> weights(probs[dist].begin(), probs[dist].end());
    for (int inst = 0; inst < instances; ++inst) {
      std::array<int, 4> counts{0, 0, 0, 0};
      for (int s = 0; s < samples; ++s) ++counts[rng.discrete(weights)];
      for (int bin = 0; bin < 4; ++bin) {
        data.points(row, bin) = static_cast<double>(counts[bin]) / samples;
      }
      // keep rows inside the chi2 kernel's open domain without changing the sum
      int largest = 0;
      for (int bin = 1; bin < 4; ++bin) {
        if (data.points(row, bin) > data.points(row, largest)) largest = bin;
      }
      for (int bin = 0; bin < 4; ++bin) {
        if (data.points(row, bin) == 0.0) {
          data.points(row, bin) = 1e-6;
          data.points(row, largest) -= 1e-6;
        }
      }
      labels[row] = dist;
      ++row;
    }
  }
  data.labels = std::move(labels);
  return data;
}

}  // namespace ikclust
