#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swapreg/types.hpp"

namespace swapreg {

// A delimited numeric matrix on disk, samples by variables. Gzip-compressed
// files are read transparently.
struct MatrixFile {
  std::string path;
  char delimiter = ',';
  bool has_header = false;
  int p_max = 0;             // 0 keeps every column; otherwise a column subset
  bool random_subset = false;  // subset rule: first p_max columns, or a seeded draw
  std::uint64_t subset_seed = 0;
};

// Parses, optionally subsets columns, then normalizes. Throws CsvParseError /
// RaggedRowsError / NonNumericCellError on malformed input.
DesignMatrix load_matrix_csv(const MatrixFile& file);

// Lloyd iterations over the columns as points, seeded center choice by
// squared-distance weighting. Returns one label per column.
std::vector<int> kmeans_columns(const DesignMatrix& X, int n_clusters, std::uint64_t seed,
                                int max_iter = 100);

// Within-cluster sum of squares for a labeling; the Lloyd objective.
double kmeans_objective(const DesignMatrix& X, const std::vector<int>& labels, int n_clusters);

// Support built from a column clustering: clusters_to_pick clusters chosen
// uniformly among those with at least per_cluster (+1 when they take the
// extra) members, per_cluster members from each, plus `extra` additional
// members spread one per cluster over the first chosen clusters.
SupportSet cluster_support(const std::vector<int>& labels, int clusters_to_pick,
                           int per_cluster, std::uint64_t seed, int extra = 0);

}  // namespace swapreg
