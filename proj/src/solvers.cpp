#include "swapreg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "swapreg/active_fit.hpp"
#include "swapreg/rng.hpp"

namespace swapreg {

namespace {

constexpr int kMaxSweeps = 100000;

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double lambda_max_of(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  return (X.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

std::vector<double> default_grid(double lambda_max, int grid, double min_ratio) {
  std::vector<double> lambdas(static_cast<std::size_t>(grid));
  if (grid == 1) {
    lambdas[0] = lambda_max;
    return lambdas;
  }
  const double log_top = std::log(lambda_max);
  const double log_bot = std::log(lambda_max * min_ratio);
  for (int t = 0; t < grid; ++t)
    lambdas[static_cast<std::size_t>(t)] =
        std::exp(log_top + (log_bot - log_top) * t / static_cast<double>(grid - 1));
  return lambdas;
}

// Coordinate descent for one lambda; beta and residual are updated in place.
// gram_diag holds ||X_j||^2 / n, which is 1 for normalized designs but not
// for row-subset fits inside cross-validation.
void cd_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& gram_diag, double lambda,
              double tol, Eigen::VectorXd& beta, Eigen::VectorXd& residual) {
  const int p = static_cast<int>(X.cols());
  const double n = static_cast<double>(X.rows());
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double max_change = 0.0;
    for (int j = 0; j < p; ++j) {
      const double old = beta[j];
      const double z = gram_diag[j] * old + X.col(j).dot(residual) / n;
      const double updated = soft_threshold(z, lambda) / gram_diag[j];
      if (updated != old) {
        residual += X.col(j) * (old - updated);
        beta[j] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    if (max_change <= tol) return;
  }
}

LassoPath path_on(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                  std::vector<double> lambdas, int grid, double min_ratio, double tol) {
  if (!y.allFinite() || !X.allFinite()) throw NonFiniteError("lasso: non-finite input");
  const int p = static_cast<int>(X.cols());
  const double n = static_cast<double>(X.rows());
  if (lambdas.empty()) lambdas = default_grid(lambda_max_of(y, X), grid, min_ratio);
  for (std::size_t t = 1; t < lambdas.size(); ++t)
    if (!(lambdas[t] < lambdas[t - 1]))
      throw std::invalid_argument("lasso grid must be strictly decreasing");

  Eigen::VectorXd gram_diag(p);
  for (int j = 0; j < p; ++j) gram_diag[j] = X.col(j).squaredNorm() / n;

  LassoPath path;
  path.lambdas = lambdas;
  path.coefficients.resize(p, static_cast<Eigen::Index>(lambdas.size()));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = y;
  for (std::size_t t = 0; t < lambdas.size(); ++t) {
    cd_solve(X, gram_diag, lambdas[t], tol, beta, residual);
    path.coefficients.col(static_cast<Eigen::Index>(t)) = beta;
    std::vector<int> active;
    for (int j = 0; j < p; ++j)
      if (beta[j] != 0.0) active.push_back(j);
    path.supports.push_back(SupportSet::of(std::move(active)));
  }
  return path;
}

// k indices with the largest scores; ties resolve to the smaller index.
SupportSet top_k_indices(const Eigen::VectorXd& scores, int k) {
  std::vector<int> order(static_cast<std::size_t>(scores.size()));
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  order.resize(static_cast<std::size_t>(k));
  return SupportSet::of(std::move(order));
}

}  // namespace

LassoPath lasso_path(const Eigen::VectorXd& y, const DesignMatrix& X,
                     std::vector<double> lambdas, int grid, double min_ratio, double tol) {
  return path_on(y, X.data, std::move(lambdas), grid, min_ratio, tol);
}

LassoCvResult lasso_cv(const Eigen::VectorXd& y, const DesignMatrix& X, int folds, int grid,
                       std::uint64_t seed) {
  const int n = X.n();
  if (n < folds) throw TooFewSamplesError("lasso_cv: fewer samples than folds");

  const std::vector<double> lambdas = default_grid(lambda_max_of(y, X.data), grid, 1e-3);

  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int r = rng.next_int(i + 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(r)]);
  }

  Eigen::VectorXd cv_mse = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lambdas.size()));
  for (int f = 0; f < folds; ++f) {
    const int lo = static_cast<int>(static_cast<long>(f) * n / folds);
    const int hi = static_cast<int>(static_cast<long>(f + 1) * n / folds);
    const int n_val = hi - lo;
    const int n_train = n - n_val;
    Eigen::MatrixXd X_train(n_train, X.p()), X_val(n_val, X.p());
    Eigen::VectorXd y_train(n_train), y_val(n_val);
    int it = 0, iv = 0;
    for (int i = 0; i < n; ++i) {
      const int row = perm[static_cast<std::size_t>(i)];
      if (i >= lo && i < hi) {
        X_val.row(iv) = X.data.row(row);
        y_val[iv++] = y[row];
      } else {
        X_train.row(it) = X.data.row(row);
        y_train[it++] = y[row];
      }
    }
    const LassoPath fold_path = path_on(y_train, X_train, lambdas, 0, 0.0, 1e-7);
    for (std::size_t t = 0; t < lambdas.size(); ++t) {
      const Eigen::VectorXd pred =
          X_val * fold_path.coefficients.col(static_cast<Eigen::Index>(t));
      cv_mse[static_cast<Eigen::Index>(t)] +=
          (y_val - pred).squaredNorm() / static_cast<double>(n_val);
    }
  }

  int best = 0;
  for (std::size_t t = 1; t < lambdas.size(); ++t)
    if (cv_mse[static_cast<Eigen::Index>(t)] < cv_mse[best]) best = static_cast<int>(t);

  const LassoPath full = path_on(y, X.data, lambdas, 0, 0.0, 1e-7);
  LassoCvResult out;
  out.lambda_star = lambdas[static_cast<std::size_t>(best)];
  out.lambda_index = best;
  out.beta.values = full.coefficients.col(best);
  out.beta.support = full.supports[static_cast<std::size_t>(best)];
  return out;
}

SelectionResult tlasso(const Eigen::VectorXd& y, const DesignMatrix& X, int k, int folds,
                       std::uint64_t seed) {
  if (k > X.p()) throw std::invalid_argument("tlasso: k exceeds variable count");
  const LassoCvResult cv = lasso_cv(y, X, folds, 100, seed);
  SelectionResult out;
  out.support = top_k_indices(cv.beta.values.cwiseAbs(), k);
  out.degenerate = cv.beta.support.size() < k;
  return out;
}

SupportSet foba(const Eigen::VectorXd& y, const DesignMatrix& X, int k, double nu) {
  if (k > X.n()) throw std::invalid_argument("foba: k exceeds sample count");
  if (k == 0) return SupportSet{};
  const int p = X.p();

  ActiveFit fit = fit_support(y, X, SupportSet{});
  double last_gain = 0.0;
  const int step_cap = 4 * p * std::max(1, k) + 100;
  for (int step = 0; step < step_cap; ++step) {
    if (fit.size() < k) {
      // Forward: most correlated column with the current residual.
      const Eigen::VectorXd residual = y - fit.Q * fit.qty;
      int best_j = -1;
      double best_score = -1.0;
      for (int j = 0; j < p; ++j) {
        if (fit.support.contains(j)) continue;
        const double score = std::abs(X.col(j).dot(residual));
        if (score > best_score) {
          best_score = score;
          best_j = j;
        }
      }
      if (best_j < 0) break;
      ActiveFit next = fit;
      if (!append_column(next, best_j, y, X)) {
        // Dependent column: fall back to the smallest-index independent one.
        bool appended = false;
        for (int j = 0; j < p && !appended; ++j) {
          if (fit.support.contains(j)) continue;
          next = fit;
          appended = append_column(next, j, y, X);
        }
        if (!appended) break;
      }
      last_gain = fit.loss - next.loss;
      fit = std::move(next);
      continue;
    }
    // At the target size: admit a backward step only on a small loss rise.
    int worst_i = -1;
    double smallest_rise = std::numeric_limits<double>::infinity();
    for (int i : fit.support) {
      const double rise = remove_column(fit, i).loss - fit.loss;
      if (rise < smallest_rise) {
        smallest_rise = rise;
        worst_i = i;
      }
    }
    if (worst_i >= 0 && smallest_rise < nu * last_gain) {
      fit = remove_column(fit, worst_i);
    } else {
      break;
    }
  }
  return fit.support;
}

SupportSet omp(const Eigen::VectorXd& y, const DesignMatrix& X, int k) {
  return foba(y, X, k, 0.0);
}

SupportSet cosamp(const Eigen::VectorXd& y, const DesignMatrix& X, int k, int max_iter) {
  const int p = X.p();
  if (k < 1) throw std::invalid_argument("cosamp: k must be >= 1");
  if (2 * k > X.n()) throw TooFewSamplesError("cosamp: needs 2k <= n");

  SupportSet current;
  Eigen::VectorXd residual = y;
  std::set<SupportSet> seen;
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd proxy = (X.data.transpose() * residual).cwiseAbs();
    const SupportSet top2k = top_k_indices(proxy, std::min(2 * k, p));

    std::vector<int> merged = current.indices();
    for (int j : top2k)
      if (!current.contains(j)) merged.push_back(j);
    const SupportSet T = SupportSet::of(std::move(merged));

    // Tolerant least squares on the merged support; dependent columns get 0.
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(p);
    {
      ActiveFit fit = fit_support(y, X, SupportSet{});
      std::vector<int> kept;
      for (int j : T) {
        ActiveFit next = fit;
        if (append_column(next, j, y, X)) {
          fit = std::move(next);
          kept.push_back(j);
        }
      }
      const CoefficientVector beta = constrained_ls(fit, X);
      for (int j : kept) coeffs[j] = beta.values[j];
    }

    const SupportSet pruned = top_k_indices(coeffs.cwiseAbs(), k);
    Eigen::VectorXd approx = Eigen::VectorXd::Zero(X.n());
    for (int j : pruned) approx += X.col(j) * coeffs[j];
    residual = y - approx;

    if (pruned == current || seen.count(pruned)) return pruned;
    seen.insert(current);
    current = pruned;
  }
  return current;
}

SupportSet marginal_regression(const Eigen::VectorXd& y, const DesignMatrix& X, int k) {
  if (k > X.p()) throw std::invalid_argument("marginal_regression: k exceeds variable count");
  return top_k_indices((X.data.transpose() * y).cwiseAbs(), k);
}

SupportSet random_support(int p, int k, std::uint64_t seed) {
  if (k < 0 || k > p) throw std::invalid_argument("random_support: invalid k");
  std::vector<int> pool(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) pool[static_cast<std::size_t>(j)] = j;
  Rng rng(seed);
  for (int j = 0; j < k; ++j) {
    const int r = j + rng.next_int(p - j);
    std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(r)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return SupportSet::of(std::move(pool));
}

SelectionResult support_at_sparsity(const LassoPath& path, int k, const Eigen::VectorXd& y,
                                    const DesignMatrix& X) {
  SelectionResult out;
  for (std::size_t t = 0; t < path.lambdas.size(); ++t) {
    if (path.supports[t].size() >= k) {
      out.support = top_k_indices(
          path.coefficients.col(static_cast<Eigen::Index>(t)).cwiseAbs(), k);
      return out;
    }
  }
  // No lambda reached k active variables: keep the densest support and fill
  // the remainder by marginal correlation with its residual.
  int densest = 0;
  for (std::size_t t = 1; t < path.lambdas.size(); ++t)
    if (path.supports[t].size() > path.supports[static_cast<std::size_t>(densest)].size())
      densest = static_cast<int>(t);
  const SupportSet base = path.supports[static_cast<std::size_t>(densest)];
  const Eigen::VectorXd residual =
      y - X.data * path.coefficients.col(densest);
  Eigen::VectorXd scores = (X.data.transpose() * residual).cwiseAbs();
  for (int j : base) scores[j] = std::numeric_limits<double>::infinity();
  out.support = top_k_indices(scores, k);
  out.degenerate = true;
  return out;
}

}  // namespace swapreg
