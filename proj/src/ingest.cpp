#include "swapreg/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "swapreg/rng.hpp"

namespace swapreg {

namespace {

// gzread handles both plain and gzip-compressed files.
std::string read_whole_file(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw std::runtime_error("cannot open " + path);
  std::string out;
  char buf[1 << 16];
  int got;
  while ((got = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(got));
  const bool failed = got < 0;
  gzclose(f);
  if (failed) throw std::runtime_error("read error on " + path);
  return out;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_cell(const std::string& cell, long row, long col) {
  std::size_t begin = cell.find_first_not_of(" \t\r");
  if (begin == std::string::npos) throw NonNumericCellError(row, col, cell);
  std::size_t end = cell.find_last_not_of(" \t\r") + 1;
  const std::string trimmed = cell.substr(begin, end - begin);
  double value = 0.0;
  const char* first = trimmed.data();
  const char* last = trimmed.data() + trimmed.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last)
    throw NonNumericCellError(row, col, cell);
  if (!std::isfinite(value)) throw NonNumericCellError(row, col, cell);
  return value;
}

}  // namespace

DesignMatrix load_matrix_csv(const MatrixFile& file) {
  const std::string content = read_whole_file(file.path);

  std::vector<std::vector<double>> rows;
  long expected_cols = -1;
  long line_no = 0;
  std::size_t start = 0;
  bool header_pending = file.has_header;
  while (start <= content.size()) {
    std::size_t pos = content.find('\n', start);
    if (pos == std::string::npos) pos = content.size();
    std::string line = content.substr(start, pos - start);
    start = pos + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (start > content.size()) break;
      continue;  // blank line (e.g. trailing newline)
    }
    ++line_no;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const std::vector<std::string> cells = split_line(line, file.delimiter);
    if (expected_cols < 0) expected_cols = static_cast<long>(cells.size());
    if (static_cast<long>(cells.size()) != expected_cols)
      throw RaggedRowsError(line_no, expected_cols, static_cast<long>(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      row[c] = parse_cell(cells[c], line_no, static_cast<long>(c) + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvParseError("file has no data rows", 0, 0);

  const int n = static_cast<int>(rows.size());
  const int p_all = static_cast<int>(rows.front().size());

  std::vector<int> cols(static_cast<std::size_t>(p_all));
  for (int j = 0; j < p_all; ++j) cols[static_cast<std::size_t>(j)] = j;
  if (file.p_max > 0 && file.p_max < p_all) {
    if (file.random_subset) {
      Rng rng(file.subset_seed);
      for (int j = 0; j < file.p_max; ++j) {
        const int r = j + rng.next_int(p_all - j);
        std::swap(cols[static_cast<std::size_t>(j)], cols[static_cast<std::size_t>(r)]);
      }
      cols.resize(static_cast<std::size_t>(file.p_max));
      std::sort(cols.begin(), cols.end());
    } else {
      cols.resize(static_cast<std::size_t>(file.p_max));
    }
  }

  Eigen::MatrixXd data(n, static_cast<int>(cols.size()));
  for (int i = 0; i < n; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      data(i, static_cast<Eigen::Index>(j)) =
          rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols[j])];
  return normalize_columns(make_design(std::move(data)));
}

double kmeans_objective(const DesignMatrix& X, const std::vector<int>& labels,
                        int n_clusters) {
  const int p = X.p();
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(X.n(), n_clusters);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_clusters);
  for (int j = 0; j < p; ++j) {
    centers.col(labels[static_cast<std::size_t>(j)]) += X.col(j);
    counts[labels[static_cast<std::size_t>(j)]] += 1.0;
  }
  for (int c = 0; c < n_clusters; ++c)
    if (counts[c] > 0.0) centers.col(c) /= counts[c];
  double obj = 0.0;
  for (int j = 0; j < p; ++j)
    obj += (X.col(j) - centers.col(labels[static_cast<std::size_t>(j)])).squaredNorm();
  return obj;
}

std::vector<int> kmeans_columns(const DesignMatrix& X, int n_clusters, std::uint64_t seed,
                                int max_iter) {
  const int p = X.p();
  const int n = X.n();
  if (n_clusters < 1 || n_clusters > p)
    throw std::invalid_argument("kmeans: cluster count must lie in [1, p]");

  Rng rng(seed);
  Eigen::MatrixXd centers(n, n_clusters);

  // Squared-distance-weighted seeding.
  centers.col(0) = X.col(rng.next_int(p));
  Eigen::VectorXd dist2(p);
  for (int j = 0; j < p; ++j) dist2[j] = (X.col(j) - centers.col(0)).squaredNorm();
  for (int c = 1; c < n_clusters; ++c) {
    const double total = dist2.sum();
    int pick = 0;
    if (total > 0.0) {
      const double target = rng.next_double() * total;
      double acc = 0.0;
      pick = p - 1;
      for (int j = 0; j < p; ++j) {
        acc += dist2[j];
        if (acc >= target) {
          pick = j;
          break;
        }
      }
    } else {
      pick = rng.next_int(p);
    }
    centers.col(c) = X.col(pick);
    for (int j = 0; j < p; ++j)
      dist2[j] = std::min(dist2[j], (X.col(j) - centers.col(c)).squaredNorm());
  }

  std::vector<int> labels(static_cast<std::size_t>(p), 0);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int j = 0; j < p; ++j) {
      int best = 0;
      double best_d = (X.col(j) - centers.col(0)).squaredNorm();
      for (int c = 1; c < n_clusters; ++c) {
        const double d = (X.col(j) - centers.col(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(j)] != best) {
        labels[static_cast<std::size_t>(j)] = best;
        changed = true;
      }
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, n_clusters);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_clusters);
    for (int j = 0; j < p; ++j) {
      sums.col(labels[static_cast<std::size_t>(j)]) += X.col(j);
      counts[labels[static_cast<std::size_t>(j)]] += 1.0;
    }
    for (int c = 0; c < n_clusters; ++c) {
      if (counts[c] > 0.0) {
        centers.col(c) = sums.col(c) / counts[c];
      } else {
        // Re-seed an empty cluster at the point farthest from its center.
        int far = 0;
        double far_d = -1.0;
        for (int j = 0; j < p; ++j) {
          const double d =
              (X.col(j) - centers.col(labels[static_cast<std::size_t>(j)])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = j;
          }
        }
        centers.col(c) = X.col(far);
        labels[static_cast<std::size_t>(far)] = c;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return labels;
}

SupportSet cluster_support(const std::vector<int>& labels, int clusters_to_pick,
                           int per_cluster, std::uint64_t seed, int extra) {
  if (clusters_to_pick < 1 || per_cluster < 1)
    throw std::invalid_argument("cluster_support: counts must be positive");
  if (extra < 0 || extra > clusters_to_pick)
    throw std::invalid_argument("cluster_support: extra must lie in [0, clusters_to_pick]");

  int n_clusters = 0;
  for (int l : labels) n_clusters = std::max(n_clusters, l + 1);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n_clusters));
  for (std::size_t j = 0; j < labels.size(); ++j)
    members[static_cast<std::size_t>(labels[j])].push_back(static_cast<int>(j));

  // A chosen cluster must be able to give per_cluster members, plus one more
  // for the clusters asked for the extra pick.
  std::vector<int> eligible;
  for (int c = 0; c < n_clusters; ++c)
    if (static_cast<int>(members[static_cast<std::size_t>(c)].size()) >= per_cluster + (extra > 0 ? 1 : 0))
      eligible.push_back(c);
  if (static_cast<int>(eligible.size()) < clusters_to_pick)
    throw InsufficientClusterSizesError(
        "only " + std::to_string(eligible.size()) + " clusters have >= " +
        std::to_string(per_cluster + (extra > 0 ? 1 : 0)) + " members, need " +
        std::to_string(clusters_to_pick));

  Rng rng(seed);
  for (int j = 0; j < clusters_to_pick; ++j) {
    const int r = j + rng.next_int(static_cast<int>(eligible.size()) - j);
    std::swap(eligible[static_cast<std::size_t>(j)], eligible[static_cast<std::size_t>(r)]);
  }
  eligible.resize(static_cast<std::size_t>(clusters_to_pick));

  std::vector<int> chosen;
  for (int t = 0; t < clusters_to_pick; ++t) {
    std::vector<int> pool = members[static_cast<std::size_t>(eligible[static_cast<std::size_t>(t)])];
    const int want = per_cluster + (t < extra ? 1 : 0);
    for (int j = 0; j < want; ++j) {
      const int r = j + rng.next_int(static_cast<int>(pool.size()) - j);
      std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(r)]);
      chosen.push_back(pool[static_cast<std::size_t>(j)]);
    }
  }
  return SupportSet::of(std::move(chosen));
}

}  // namespace swapreg
