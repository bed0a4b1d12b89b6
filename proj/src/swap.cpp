#include "swapreg/swap.hpp"

#include <algorithm>
#include <cmath>

#include "swapreg/combinatorics.hpp"

namespace swapreg {

namespace {

int resolve_max_iterations(const SwapOptions& opts, int p, int s) {
  if (opts.max_iterations > 0) return opts.max_iterations;
  return std::max(1, p * std::max(1, s));
}

void validate_common(const DesignMatrix& X, const SupportSet& S_init, const SwapOptions& opts) {
  S_init.check_bound(X.p());
  if (S_init.size() > X.n())
    throw RankDeficientError("initial support larger than sample count");
  if (!X.normalized)
    throw std::invalid_argument("swap search expects a column-normalized design");
  if (opts.epsilon_rel < 0.0) throw std::invalid_argument("epsilon_rel must be >= 0");
  if (opts.m < 1) throw std::invalid_argument("group size m must be >= 1");
}

bool strict_decrease(double candidate, double current, double eps_rel) {
  return candidate < current - eps_rel * std::max(current, 1e-300);
}

ActiveFit maybe_rebuild(ActiveFit fit, const Eigen::VectorXd& y, const DesignMatrix& X) {
  if (fit.swaps_since_rebuild >= kRebuildInterval || orthogonality_error(fit) > kOrthDriftTol) {
    fit = rebuild(fit, y, X);
    fit.swaps_since_rebuild = 0;
  }
  return fit;
}

std::vector<int> complement_of(const SupportSet& S, int p) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(p - S.size()));
  for (int j = 0; j < p; ++j)
    if (!S.contains(j)) out.push_back(j);
  return out;
}

// Candidate columns for one removal, optionally truncated to the columns most
// correlated with the current residual (ranking |X_j^T r|, ties by index).
std::vector<int> ranked_candidates(const std::vector<int>& outside, const ActiveFit& fit,
                                   const Eigen::VectorXd& y, const DesignMatrix& X,
                                   int limit) {
  if (limit <= 0 || limit >= static_cast<int>(outside.size())) return outside;
  Eigen::VectorXd residual = y - fit.Q * fit.qty;
  std::vector<std::pair<double, int>> scored;
  scored.reserve(outside.size());
  for (int j : outside) scored.emplace_back(-std::abs(X.col(j).dot(residual)), j);
  std::sort(scored.begin(), scored.end());
  std::vector<int> kept;
  kept.reserve(static_cast<std::size_t>(limit));
  for (int t = 0; t < limit; ++t) kept.push_back(scored[static_cast<std::size_t>(t)].second);
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace

SwapTrace swap_run(const Eigen::VectorXd& y, const DesignMatrix& X, const SupportSet& S_init,
                   const SwapOptions& opts) {
  validate_common(X, S_init, opts);
  const int p = X.p();

  ActiveFit fit = fit_support(y, X, S_init);
  SwapTrace trace;
  trace.iterates.push_back({fit.support, fit.loss, {}, {}});

  const int max_iter = resolve_max_iterations(opts, p, S_init.size());
  for (int iter = 0; iter < max_iter; ++iter) {
    fit = maybe_rebuild(fit, y, X);
    const double current = fit.loss;

    double best_loss = kInvalidLoss;
    int best_out = -1;
    int best_in = -1;
    const std::vector<int> candidates =
        ranked_candidates(complement_of(fit.support, p), fit, y, X, opts.candidate_limit);
    // Scan order (i ascending, i' ascending) with strict "<" keeps the
    // lexicographically smallest minimizing pair; a parallel split over i
    // must merge with the same (loss, i, i') comparison.
    for (int i : fit.support) {
      ActiveFit down = remove_column(fit, i);
      for (int j : candidates) {
        const double cand = candidate_loss(down, j, y, X);
        if (cand < best_loss) {
          best_loss = cand;
          best_out = i;
          best_in = j;
        }
      }
    }

    if (best_out < 0 || !strict_decrease(best_loss, current, opts.epsilon_rel)) {
      trace.converged = true;
      trace.stop_reason = StopReason::NoImprovingSwap;
      return trace;
    }
    fit = apply_swap(fit, best_out, best_in, y, X);
    trace.iterates.push_back({fit.support, fit.loss, {best_out}, {best_in}});
  }
  trace.converged = false;
  trace.stop_reason = StopReason::MaxIterations;
  return trace;
}

SwapTrace swap_m_run(const Eigen::VectorXd& y, const DesignMatrix& X, const SupportSet& S_init,
                     const SwapOptions& opts) {
  if (opts.m == 1) return swap_run(y, X, S_init, opts);
  validate_common(X, S_init, opts);
  const int p = X.p();
  const int s = S_init.size();
  const int m = opts.m;
  if (m > s) throw std::invalid_argument("group size m exceeds the support size");
  const double pair_count = binomial(s, m) * binomial(p - s, m);
  if (!(pair_count <= 1e7))
    throw CombinatorialBlowupError("group swap neighborhood has " +
                                   std::to_string(pair_count) + " pairs (guard 1e7)");

  ActiveFit fit = fit_support(y, X, S_init);
  SwapTrace trace;
  trace.iterates.push_back({fit.support, fit.loss, {}, {}});

  const int max_iter = resolve_max_iterations(opts, p, s);
  for (int iter = 0; iter < max_iter; ++iter) {
    fit = maybe_rebuild(fit, y, X);
    const double current = fit.loss;

    double best_loss = kInvalidLoss;
    std::vector<int> best_out, best_in;
    const std::vector<int> inside = fit.support.indices();
    const std::vector<int> outside = complement_of(fit.support, p);

    for_each_combination(static_cast<int>(inside.size()), m, [&](const std::vector<int>& out_pos) {
      ActiveFit base = fit;
      std::vector<int> out_cols;
      out_cols.reserve(static_cast<std::size_t>(m));
      for (int pos : out_pos) out_cols.push_back(inside[static_cast<std::size_t>(pos)]);
      for (int c : out_cols) base = remove_column(base, c);

      for_each_combination(static_cast<int>(outside.size()), m, [&](const std::vector<int>& in_pos) {
        ActiveFit cand = base;
        bool ok = true;
        std::vector<int> in_cols;
        in_cols.reserve(static_cast<std::size_t>(m));
        for (int pos : in_pos) {
          const int c = outside[static_cast<std::size_t>(pos)];
          in_cols.push_back(c);
          if (!append_column(cand, c, y, X)) {
            ok = false;
            break;
          }
        }
        if (!ok) return;
        if (cand.loss < best_loss) {
          best_loss = cand.loss;
          best_out = out_cols;
          best_in = in_cols;
        }
      });
    });

    if (best_out.empty() || !strict_decrease(best_loss, current, opts.epsilon_rel)) {
      trace.converged = true;
      trace.stop_reason = StopReason::NoImprovingSwap;
      return trace;
    }
    ActiveFit next = fit;
    for (int c : best_out) next = remove_column(next, c);
    for (int c : best_in) append_column(next, c, y, X);
    next.swaps_since_rebuild = fit.swaps_since_rebuild + 1;
    fit = std::move(next);
    trace.iterates.push_back({fit.support, fit.loss, best_out, best_in});
  }
  trace.converged = false;
  trace.stop_reason = StopReason::MaxIterations;
  return trace;
}

}  // namespace swapreg
