#pragma once

#include <string>
#include <vector>

#include "swapreg/active_fit.hpp"

namespace swapreg {

struct SwapOptions {
  int max_iterations = 0;     // 0 resolves to p * |S_init|
  double epsilon_rel = 1e-12; // relative strict-decrease threshold
  int m = 1;                  // group swap size
  int candidate_limit = 0;    // 0 = consider every outside column per removal
};

enum class StopReason { NoImprovingSwap, MaxIterations };

struct SwapIterate {
  SupportSet support;
  double loss = 0.0;
  std::vector<int> swapped_out;  // empty on the initial iterate
  std::vector<int> swapped_in;
};

struct SwapTrace {
  std::vector<SwapIterate> iterates;
  bool converged = false;
  StopReason stop_reason = StopReason::NoImprovingSwap;

  const SupportSet& final_support() const { return iterates.back().support; }
  double final_loss() const { return iterates.back().loss; }
  int swap_count() const { return static_cast<int>(iterates.size()) - 1; }
};

// Greedy single-variable swapping: repeatedly replaces the pair (i out, i'
// in) with the smallest resulting loss, as long as that loss is strictly
// below the current one. Ties break on lexicographically smallest (i, i').
SwapTrace swap_run(const Eigen::VectorXd& y, const DesignMatrix& X, const SupportSet& S_init,
                   const SwapOptions& opts = {});

// Group generalization exchanging opts.m variables at a time; m = 1 delegates
// to swap_run. Guarded by C(s, m) * C(p - s, m) <= 1e7.
SwapTrace swap_m_run(const Eigen::VectorXd& y, const DesignMatrix& X, const SupportSet& S_init,
                     const SwapOptions& opts);

}  // namespace swapreg
