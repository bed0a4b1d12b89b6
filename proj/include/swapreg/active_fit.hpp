#pragma once

#include <Eigen/Dense>
#include <limits>

#include "swapreg/types.hpp"

namespace swapreg {

// Cached thin QR factorization of X_S plus the least-squares loss
// ||y - X_S a||^2 minimized over a. Treated as immutable after construction:
// swap previews never mutate, commits return fresh values, so one fit can be
// shared across threads for read-only candidate evaluation.
struct ActiveFit {
  SupportSet support;             // sorted
  std::vector<int> column_order;  // design column held by each factor column
  Eigen::MatrixXd Q;              // n x s, orthonormal columns
  Eigen::MatrixXd R;              // s x s, upper triangular in column_order
  Eigen::VectorXd qty;            // Q^T y
  double loss = 0.0;              // ||y||^2 - ||qty||^2, maintained incrementally
  double y_norm_sq = 0.0;
  int swaps_since_rebuild = 0;

  int size() const { return static_cast<int>(column_order.size()); }
};

// Smallest admissible R diagonal is kRankTolFactor * sqrt(n).
inline constexpr double kRankTolFactor = 1e-10;

// Commits that would exceed this many incremental updates trigger a rebuild,
// as does a drift of ||Q^T Q - I||_max beyond kOrthDriftTol.
inline constexpr int kRebuildInterval = 64;
inline constexpr double kOrthDriftTol = 1e-8;

// Loss returned for candidates whose column is numerically inside the current
// span; such candidates are skipped by the search rather than raising.
inline constexpr double kInvalidLoss = std::numeric_limits<double>::infinity();

// Factorizes X_S (ascending column order). Throws RankDeficientError when a
// diagonal of R falls below tolerance or |S| > n.
ActiveFit fit_support(const Eigen::VectorXd& y, const DesignMatrix& X, const SupportSet& S);

// Loss of {S \ i} u {i_new} via downdate plus rank-one update; +inf when the
// swapped support is rank deficient. Does not mutate fit.
double swap_loss(const ActiveFit& fit, int i, int i_new, const Eigen::VectorXd& y,
                 const DesignMatrix& X);

// Commits the swap previewed by swap_loss. The returned loss is computed by
// the identical code path, so it matches swap_loss bit for bit.
ActiveFit apply_swap(const ActiveFit& fit, int i, int i_new, const Eigen::VectorXd& y,
                     const DesignMatrix& X);

// Constrained least-squares coefficients: solves on S, zero elsewhere.
CoefficientVector constrained_ls(const Eigen::VectorXd& y, const DesignMatrix& X,
                                 const SupportSet& S);
CoefficientVector constrained_ls(const ActiveFit& fit, const DesignMatrix& X);

// Building blocks. These operate on owned copies; the public swap ops above
// are thin compositions of them.
ActiveFit remove_column(const ActiveFit& fit, int i);
double candidate_loss(const ActiveFit& base, int i_new, const Eigen::VectorXd& y,
                      const DesignMatrix& X);
bool append_column(ActiveFit& fit, int i_new, const Eigen::VectorXd& y,
                   const DesignMatrix& X);  // false when rank deficient

double orthogonality_error(const ActiveFit& fit);
ActiveFit rebuild(const ActiveFit& fit, const Eigen::VectorXd& y, const DesignMatrix& X);

// Projection loss onto span(X_S) with dependent columns skipped instead of
// raising; used by enumeration code where near-singular supports are routine.
double support_loss_tolerant(const Eigen::VectorXd& y, const DesignMatrix& X,
                             const SupportSet& S);

}  // namespace swapreg
