#pragma once

#include <cstdint>
#include <vector>

#include "swapreg/types.hpp"

namespace swapreg {

struct LassoPath {
  std::vector<double> lambdas;     // strictly decreasing
  Eigen::MatrixXd coefficients;    // p x |lambdas|
  std::vector<SupportSet> supports;
};

// Cyclic coordinate descent on (1/2n)||y - X b||^2 + lambda ||b||_1, warm
// started along a decreasing grid. An empty lambda list requests the default
// grid: `grid` log-spaced values from lambda_max down to min_ratio*lambda_max.
LassoPath lasso_path(const Eigen::VectorXd& y, const DesignMatrix& X,
                     std::vector<double> lambdas = {}, int grid = 100,
                     double min_ratio = 1e-3, double tol = 1e-7);

struct LassoCvResult {
  double lambda_star = 0.0;
  int lambda_index = -1;
  CoefficientVector beta;  // full-data fit at lambda_star
};

// K-fold cross-validation over the default grid; folds are contiguous blocks
// of a seeded permutation, so the whole procedure is a function of the seed.
LassoCvResult lasso_cv(const Eigen::VectorXd& y, const DesignMatrix& X, int folds = 5,
                       int grid = 100, std::uint64_t seed = 0);

struct SelectionResult {
  SupportSet support;
  bool degenerate = false;  // fewer nonzeros than requested; filled by tie rule
};

// Cross-validated lasso followed by keeping the k largest |coefficients|.
SelectionResult tlasso(const Eigen::VectorXd& y, const DesignMatrix& X, int k,
                       int folds = 5, std::uint64_t seed = 0);

// Adaptive forward-backward greedy selection. A backward step removes the
// variable whose deletion raises the loss least whenever that rise is below
// nu times the preceding forward gain.
SupportSet foba(const Eigen::VectorXd& y, const DesignMatrix& X, int k, double nu = 0.5);

// Forward-only variant (nu = 0 admits no backward step).
SupportSet omp(const Eigen::VectorXd& y, const DesignMatrix& X, int k);

// Proxy / merge / prune iteration; stops on a repeated support or max_iter.
SupportSet cosamp(const Eigen::VectorXd& y, const DesignMatrix& X, int k, int max_iter = 100);

// Indices of the k largest |X_j^T y|, ties to the smaller index.
SupportSet marginal_regression(const Eigen::VectorXd& y, const DesignMatrix& X, int k);

// Uniform k-subset of {0..p-1} by seeded partial shuffle.
SupportSet random_support(int p, int k, std::uint64_t seed);

// Support of size k read off a lasso path: the largest lambda whose active
// set reaches k, pruned to the top-k |coefficients|. When no lambda reaches
// k the densest support is padded by marginal regression on its residual.
SelectionResult support_at_sparsity(const LassoPath& path, int k, const Eigen::VectorXd& y,
                                    const DesignMatrix& X);

}  // namespace swapreg
