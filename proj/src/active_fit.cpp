#include "swapreg/active_fit.hpp"

#include <cmath>
#include <sstream>

namespace swapreg {

namespace {

std::string support_to_string(const SupportSet& S) {
  std::ostringstream os;
  os << "{";
  for (int j = 0; j < S.size(); ++j) os << (j ? "," : "") << S[j];
  os << "}";
  return os.str();
}

double rank_tol(int n) { return kRankTolFactor * std::sqrt(static_cast<double>(n)); }

// Residual of x against the columns of Q, with one reorthogonalization pass.
// Returns the residual u, its squared norm d, the inner product t = u^T y and
// the accumulated projection coefficients (the would-be R column).
struct Orthogonalized {
  Eigen::VectorXd u;
  Eigen::VectorXd coeffs;
  double d = 0.0;
  double t = 0.0;
};

Orthogonalized orthogonalize(const Eigen::MatrixXd& Q, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y) {
  Orthogonalized out;
  const auto s = Q.cols();
  out.coeffs = Eigen::VectorXd::Zero(s);
  out.u = x;
  if (s > 0) {
    Eigen::VectorXd c1 = Q.transpose() * out.u;
    out.u.noalias() -= Q * c1;
    Eigen::VectorXd c2 = Q.transpose() * out.u;  // second pass for stability
    out.u.noalias() -= Q * c2;
    out.coeffs = c1 + c2;
  }
  out.d = out.u.squaredNorm();
  out.t = out.u.dot(y);
  return out;
}

}  // namespace

ActiveFit fit_support(const Eigen::VectorXd& y, const DesignMatrix& X, const SupportSet& S) {
  const int n = X.n();
  S.check_bound(X.p());
  if (S.size() > n)
    throw RankDeficientError("support " + support_to_string(S) + " larger than sample count");

  ActiveFit fit;
  fit.support = S;
  fit.y_norm_sq = y.squaredNorm();
  fit.loss = fit.y_norm_sq;
  const int s = S.size();
  fit.Q.resize(n, s);
  fit.R = Eigen::MatrixXd::Zero(s, s);
  fit.qty.resize(s);
  fit.column_order.reserve(static_cast<std::size_t>(s));

  const double tol = rank_tol(n);
  int filled = 0;
  for (int idx : S) {
    auto ortho = orthogonalize(fit.Q.leftCols(filled), X.col(idx), y);
    const double diag = std::sqrt(ortho.d);
    if (diag < tol)
      throw RankDeficientError("support " + support_to_string(S) + " is rank deficient");
    fit.R.col(filled).head(filled) = ortho.coeffs;
    fit.R(filled, filled) = diag;
    fit.Q.col(filled) = ortho.u / diag;
    fit.qty[filled] = ortho.t / diag;
    fit.loss -= ortho.t * ortho.t / ortho.d;
    fit.column_order.push_back(idx);
    ++filled;
  }
  if (fit.loss < 0.0) fit.loss = 0.0;
  return fit;
}

ActiveFit remove_column(const ActiveFit& fit, int i) {
  const int s = fit.size();
  int pos = -1;
  for (int j = 0; j < s; ++j)
    if (fit.column_order[static_cast<std::size_t>(j)] == i) pos = j;
  if (pos < 0) throw std::invalid_argument("column to remove is not in the support");

  ActiveFit out;
  out.support = fit.support.without(i);
  out.y_norm_sq = fit.y_norm_sq;
  out.swaps_since_rebuild = fit.swaps_since_rebuild;
  out.column_order = fit.column_order;
  out.column_order.erase(out.column_order.begin() + pos);

  // Drop column pos of R, then chase the subdiagonal with Givens rotations.
  Eigen::MatrixXd R(s, s - 1);
  if (pos > 0) R.leftCols(pos) = fit.R.leftCols(pos);
  if (pos < s - 1) R.rightCols(s - 1 - pos) = fit.R.rightCols(s - 1 - pos);
  Eigen::MatrixXd Q = fit.Q;
  Eigen::VectorXd qty = fit.qty;

  for (int c = pos; c < s - 1; ++c) {
    Eigen::JacobiRotation<double> g;
    g.makeGivens(R(c, c), R(c + 1, c));
    R.applyOnTheLeft(c, c + 1, g.adjoint());
    Q.applyOnTheRight(c, c + 1, g);
    const double a = qty[c], b = qty[c + 1];
    qty[c] = g.c() * a - g.s() * b;
    qty[c + 1] = g.s() * a + g.c() * b;
  }

  out.Q = Q.leftCols(s - 1);
  out.R = R.topRows(s - 1);
  out.qty = qty.head(s - 1);
  out.loss = fit.loss + qty[s - 1] * qty[s - 1];
  out.y_norm_sq = fit.y_norm_sq;
  return out;
}

double candidate_loss(const ActiveFit& base, int i_new, const Eigen::VectorXd& y,
                      const DesignMatrix& X) {
  auto ortho = orthogonalize(base.Q, X.col(i_new), y);
  const double tol = rank_tol(X.n());
  if (ortho.d < tol * tol) return kInvalidLoss;
  return base.loss - ortho.t * ortho.t / ortho.d;
}

bool append_column(ActiveFit& fit, int i_new, const Eigen::VectorXd& y,
                   const DesignMatrix& X) {
  auto ortho = orthogonalize(fit.Q, X.col(i_new), y);
  const double tol = rank_tol(X.n());
  if (ortho.d < tol * tol) return false;
  const int s = fit.size();
  const double diag = std::sqrt(ortho.d);

  fit.Q.conservativeResize(Eigen::NoChange, s + 1);
  fit.Q.col(s) = ortho.u / diag;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(s + 1, s + 1);
  R.topLeftCorner(s, s) = fit.R;
  R.col(s).head(s) = ortho.coeffs;
  R(s, s) = diag;
  fit.R = std::move(R);
  fit.qty.conservativeResize(s + 1);
  fit.qty[s] = ortho.t / diag;
  // Same expression as candidate_loss so previews and commits agree exactly.
  fit.loss -= ortho.t * ortho.t / ortho.d;
  fit.column_order.push_back(i_new);
  fit.support = fit.support.with(i_new);
  return true;
}

double swap_loss(const ActiveFit& fit, int i, int i_new, const Eigen::VectorXd& y,
                 const DesignMatrix& X) {
  if (!fit.support.contains(i)) throw std::invalid_argument("swap source not in support");
  if (fit.support.contains(i_new)) throw std::invalid_argument("swap target already in support");
  ActiveFit down = remove_column(fit, i);
  return candidate_loss(down, i_new, y, X);
}

ActiveFit apply_swap(const ActiveFit& fit, int i, int i_new, const Eigen::VectorXd& y,
                     const DesignMatrix& X) {
  if (!fit.support.contains(i)) throw std::invalid_argument("swap source not in support");
  if (fit.support.contains(i_new)) throw std::invalid_argument("swap target already in support");
  ActiveFit down = remove_column(fit, i);
  if (!append_column(down, i_new, y, X))
    throw RankDeficientError("swapped support is rank deficient");
  down.swaps_since_rebuild = fit.swaps_since_rebuild + 1;
  return down;
}

CoefficientVector constrained_ls(const ActiveFit& fit, const DesignMatrix& X) {
  const int s = fit.size();
  Eigen::VectorXd alpha(s);
  if (s > 0)
    alpha = fit.R.triangularView<Eigen::Upper>().solve(fit.qty);
  CoefficientVector beta;
  beta.values = Eigen::VectorXd::Zero(X.p());
  beta.support = fit.support;
  for (int j = 0; j < s; ++j)
    beta.values[fit.column_order[static_cast<std::size_t>(j)]] = alpha[j];
  return beta;
}

CoefficientVector constrained_ls(const Eigen::VectorXd& y, const DesignMatrix& X,
                                 const SupportSet& S) {
  return constrained_ls(fit_support(y, X, S), X);
}

double orthogonality_error(const ActiveFit& fit) {
  if (fit.size() == 0) return 0.0;
  Eigen::MatrixXd G = fit.Q.transpose() * fit.Q;
  G.diagonal().array() -= 1.0;
  return G.cwiseAbs().maxCoeff();
}

ActiveFit rebuild(const ActiveFit& fit, const Eigen::VectorXd& y, const DesignMatrix& X) {
  return fit_support(y, X, fit.support);
}

double support_loss_tolerant(const Eigen::VectorXd& y, const DesignMatrix& X,
                             const SupportSet& S) {
  const int n = X.n();
  Eigen::MatrixXd Q(n, std::min(S.size(), n));
  int filled = 0;
  double loss = y.squaredNorm();
  const double tol = rank_tol(n);
  for (int idx : S) {
    if (filled == n) break;
    auto ortho = orthogonalize(Q.leftCols(filled), X.col(idx), y);
    const double diag = std::sqrt(ortho.d);
    if (diag < tol) continue;  // dependent column adds nothing to the span
    Q.col(filled) = ortho.u / diag;
    loss -= ortho.t * ortho.t / ortho.d;
    ++filled;
  }
  return loss < 0.0 ? 0.0 : loss;
}

}  // namespace swapreg
