#include "swapreg/theory.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "swapreg/active_fit.hpp"
#include "swapreg/combinatorics.hpp"

namespace swapreg {

namespace {

constexpr double kEnumGuard = 1e6;
constexpr double kDegenerateDiag = 1e-12;

void check_enum_guard(double count, const std::string& what) {
  if (!(count <= kEnumGuard))
    throw CombinatorialBlowupError(what + " would enumerate " + std::to_string(count) +
                                   " supports (guard 1e6)");
}

// Residual columns Z_j = P_perp[B] X_j for the requested columns, computed by
// projecting through a tolerant orthonormal basis of X_B. Entries of the
// projected Gram are then Z_i^T Z_j / n.
Eigen::MatrixXd residual_columns(const DesignMatrix& X, const std::vector<int>& base,
                                 const std::vector<int>& wanted) {
  const int n = X.n();
  Eigen::MatrixXd Q(n, std::min<int>(static_cast<int>(base.size()), n));
  int filled = 0;
  const double tol = kRankTolFactor * std::sqrt(static_cast<double>(n));
  for (int idx : base) {
    if (filled == n) break;
    Eigen::VectorXd u = X.col(idx);
    if (filled > 0) {
      u -= Q.leftCols(filled) * (Q.leftCols(filled).transpose() * u);
      u -= Q.leftCols(filled) * (Q.leftCols(filled).transpose() * u);
    }
    const double norm = u.norm();
    if (norm < tol) continue;
    Q.col(filled) = u / norm;
    ++filled;
  }
  Eigen::MatrixXd Z(n, wanted.size());
  for (std::size_t j = 0; j < wanted.size(); ++j) {
    Eigen::VectorXd z = X.col(wanted[j]);
    if (filled > 0) {
      z -= Q.leftCols(filled) * (Q.leftCols(filled).transpose() * z);
      z -= Q.leftCols(filled) * (Q.leftCols(filled).transpose() * z);
    }
    Z.col(static_cast<Eigen::Index>(j)) = z;
  }
  return Z;
}

double lambda_min_gram(const DesignMatrix& X, const std::vector<int>& cols) {
  const int m = static_cast<int>(cols.size());
  Eigen::MatrixXd G(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      const double v =
          X.col(cols[static_cast<std::size_t>(a)]).dot(X.col(cols[static_cast<std::size_t>(b)])) /
          static_cast<double>(X.n());
      G(a, b) = v;
      G(b, a) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<int> complement_of(const SupportSet& S, int p) {
  std::vector<int> out;
  for (int j = 0; j < p; ++j)
    if (!S.contains(j)) out.push_back(j);
  return out;
}

std::vector<int> set_difference(const SupportSet& a, const SupportSet& b) {
  std::vector<int> out;
  for (int j : a)
    if (!b.contains(j)) out.push_back(j);
  return out;
}

bool in_family(const SupportSet& S, const SupportSet& S_star, int d, DistanceMode mode) {
  const int missing = difference_size(S_star, S);
  return mode == DistanceMode::Exact ? missing == d : missing <= d;
}

// Solves M v = rhs for symmetric PSD M; nullopt when M is numerically singular.
std::optional<Eigen::VectorXd> solve_psd(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) return std::nullopt;
  if (es.eigenvalues().minCoeff() < kDegenerateDiag) return std::nullopt;
  return es.eigenvectors() *
         (es.eigenvectors().transpose() * rhs).cwiseQuotient(es.eigenvalues());
}

}  // namespace

EsdResult esd(const Eigen::VectorXd& y, const DesignMatrix& X, int k) {
  const int p = X.p();
  if (k < 0 || k > p) throw std::invalid_argument("esd: invalid sparsity level");
  check_enum_guard(binomial(p, k), "esd");

  EsdResult best;
  best.loss = std::numeric_limits<double>::infinity();
  for_each_combination(p, k, [&](const std::vector<int>& comb) {
    const SupportSet S = SupportSet::of(comb);
    const double loss = support_loss_tolerant(y, X, S);
    if (loss < best.loss) {
      best.loss = loss;
      best.support = S;
    }
  });
  return best;
}

double rho_plus(const DesignMatrix& X, const SupportSet& S_star, int ell) {
  if (ell < 0) throw std::invalid_argument("rho_plus: ell must be >= 0");
  const int p = X.p();
  const std::vector<int> outside = complement_of(S_star, p);
  if (ell > static_cast<int>(outside.size()))
    throw std::invalid_argument("rho_plus: ell exceeds the number of inactive columns");
  check_enum_guard(binomial(static_cast<int>(outside.size()), ell), "rho_plus");

  double best = std::numeric_limits<double>::infinity();
  for_each_combination(static_cast<int>(outside.size()), ell, [&](const std::vector<int>& comb) {
    std::vector<int> cols = S_star.indices();
    for (int pos : comb) cols.push_back(outside[static_cast<std::size_t>(pos)]);
    best = std::min(best, lambda_min_gram(X, cols));
  });
  return best;
}

double rho_restricted(const DesignMatrix& X, const SupportSet& S_star, int size,
                      int min_overlap) {
  const int p = X.p();
  if (size < 1 || size > p) throw std::invalid_argument("rho_restricted: invalid block size");
  check_enum_guard(binomial(p, size), "rho_restricted");

  double best = std::numeric_limits<double>::infinity();
  for_each_combination(p, size, [&](const std::vector<int>& comb) {
    const SupportSet A = SupportSet::of(comb);
    if (intersection_size(A, S_star) < min_overlap) return;
    best = std::min(best, lambda_min_gram(X, comb));
  });
  if (!std::isfinite(best))
    throw std::invalid_argument("rho_restricted: no support meets the overlap constraint");
  return best;
}

double rho_cap(const DesignMatrix& X, const SupportSet& S_star, int ell) {
  return rho_restricted(X, S_star, S_star.size(), ell);
}

ProjectedCorrelation gamma_d(const DesignMatrix& X, const SupportSet& S_star, int k, int d,
                             DistanceMode mode) {
  const int p = X.p();
  const int n = X.n();
  if (k != S_star.size())
    throw std::invalid_argument("gamma_d: k must match the true support size");
  if (d < 1 || d > k) throw std::invalid_argument("gamma_d: d must be in [1, k]");
  check_enum_guard(binomial(p, k), "gamma_d");

  ProjectedCorrelation out;
  double best = 0.0;
  bool any_support = false;

  for_each_combination(p, k, [&](const std::vector<int>& comb) {
    const SupportSet S = SupportSet::of(comb);
    if (S == S_star || !in_family(S, S_star, d, mode)) return;
    const std::vector<int> sbar = set_difference(S_star, S);  // missed actives
    if (sbar.empty()) return;
    ++out.supports_visited;

    double inner = std::numeric_limits<double>::infinity();
    for (int i : S) {
      if (S_star.contains(i)) continue;
      std::vector<int> base;
      for (int c : S)
        if (c != i) base.push_back(c);

      std::vector<int> wanted = sbar;
      wanted.push_back(i);
      const Eigen::MatrixXd Z = residual_columns(X, base, wanted);
      const int db = static_cast<int>(sbar.size());
      const Eigen::MatrixXd Gram = Z.transpose() * Z / static_cast<double>(n);
      const double diag_i = Gram(db, db);
      if (diag_i < kDegenerateDiag) {
        ++out.skipped;
        continue;
      }
      const Eigen::MatrixXd M = Gram.topLeftCorner(db, db);
      const Eigen::VectorXd rhs = Gram.col(db).head(db);
      const auto v = solve_psd(M, rhs);
      if (!v) {
        ++out.skipped;
        continue;
      }
      const double l1 = v->lpNorm<1>();
      inner = std::min(inner, l1 * l1 / diag_i);
    }
    if (std::isfinite(inner)) {
      best = std::max(best, inner);
      any_support = true;
    }
  });

  out.value = any_support ? best : 0.0;
  return out;
}

ProjectedCorrelation nu_d(const DesignMatrix& X, const SupportSet& S_star, int k, int d,
                          DistanceMode mode, NuConvention convention) {
  const int p = X.p();
  const int n = X.n();
  if (k != S_star.size()) throw std::invalid_argument("nu_d: k must match the true support size");
  if (d < 1 || d > k) throw std::invalid_argument("nu_d: d must be in [1, k]");
  check_enum_guard(binomial(p, k), "nu_d");

  ProjectedCorrelation out;
  double best = 0.0;
  bool any_support = false;

  for_each_combination(p, k, [&](const std::vector<int>& comb) {
    const SupportSet S = SupportSet::of(comb);
    if (S == S_star || !in_family(S, S_star, d, mode)) return;
    const std::vector<int> sbar = set_difference(S_star, S);
    if (sbar.empty()) return;
    ++out.supports_visited;

    double inner = std::numeric_limits<double>::infinity();
    for (int i : S) {
      if (S_star.contains(i)) continue;

      double worst = 0.0;
      bool any_pair = false;
      for (int j : S) {
        // j = i degenerates to the single-removal comparison: the bar set
        // stays S* \ S and the base drops i once.
        std::vector<int> base;
        for (int c : S)
          if (c != i && c != j) base.push_back(c);
        std::vector<int> barj = sbar;
        if (j != i) barj.push_back(j);

        for (int jp = 0; jp < p; ++jp) {
          if (S.contains(jp) || S_star.contains(jp)) continue;

          std::vector<int> wanted = barj;
          wanted.push_back(i);
          wanted.push_back(jp);
          const Eigen::MatrixXd Z = residual_columns(X, base, wanted);
          const int nb = static_cast<int>(barj.size());
          const Eigen::MatrixXd Gram = Z.transpose() * Z / static_cast<double>(n);
          const double diag_i = Gram(nb, nb);
          const double diag_jp = Gram(nb + 1, nb + 1);
          const double denom = std::min(diag_i, diag_jp);
          if (denom < kDegenerateDiag) {
            ++out.skipped;
            continue;
          }
          const Eigen::MatrixXd M = Gram.topLeftCorner(nb, nb);
          const auto vi = solve_psd(M, Gram.col(nb).head(nb));
          if (!vi) {
            ++out.skipped;
            continue;
          }
          double second = 0.0;
          if (convention == NuConvention::SquareBlocks) {
            const auto vj = solve_psd(M, Gram.col(nb + 1).head(nb));
            if (!vj) {
              ++out.skipped;
              continue;
            }
            second = vj->lpNorm<1>();
          } else {
            // Cross-block variant: inverse rows indexed by S* \ S only.
            const int ns = static_cast<int>(sbar.size());
            const Eigen::MatrixXd cross = Gram.topLeftCorner(ns, nb);
            const Eigen::VectorXd rj = Gram.col(nb + 1).head(nb);
            const Eigen::VectorXd vj =
                cross.completeOrthogonalDecomposition().pseudoInverse().transpose() * rj;
            second = vj.lpNorm<1>();
          }
          const double first = vi->lpNorm<1>();
          const double val = (first * first + second * second) / denom;
          worst = std::max(worst, val);
          any_pair = true;
        }
      }
      if (any_pair) inner = std::min(inner, worst);
    }
    if (std::isfinite(inner)) {
      best = std::max(best, inner);
      any_support = true;
    }
  });

  out.value = any_support ? best : 0.0;
  return out;
}

double zeta(const DesignMatrix& X, const SupportSet& S_star) {
  const int p = X.p();
  const int n = X.n();
  const int k = S_star.size();
  if (k == 0) return 0.0;
  Eigen::MatrixXd G(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      G(a, b) = X.col(S_star[a]).dot(X.col(S_star[b])) / static_cast<double>(n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success)
    throw RankDeficientError("zeta: active Gram block is singular");

  double best = 0.0;
  for (int i = 0; i < p; ++i) {
    if (S_star.contains(i)) continue;
    Eigen::VectorXd rhs(k);
    for (int a = 0; a < k; ++a)
      rhs[a] = X.col(S_star[a]).dot(X.col(i)) / static_cast<double>(n);
    const double l1 = ldlt.solve(rhs).lpNorm<1>();
    best = std::max(best, l1 * l1);
  }
  return best;
}

double g_eval(double delta, double rho, double c) {
  if (delta < 0.0) throw std::domain_error("g_eval: delta must be >= 0");
  if (rho <= 0.0) throw std::domain_error("g_eval: rho must be > 0");
  return (delta - 1.0) + 2.0 * c * (std::sqrt(delta) + 1.0 / std::sqrt(rho)) + 2.0 * c * c;
}

bool check_event_ekd(const Eigen::VectorXd& y, const DesignMatrix& X, const SupportSet& S1,
                     const SupportSet& S_star, int k, int d) {
  const int p = X.p();
  if (S1.size() != k) throw std::invalid_argument("check_event_ekd: |S1| must equal k");
  check_enum_guard(binomial(p, k), "check_event_ekd");

  const double l1 = support_loss_tolerant(y, X, S1);
  bool holds = true;
  for_each_combination(p, k, [&](const std::vector<int>& comb) {
    if (!holds) return;
    const SupportSet S = SupportSet::of(comb);
    if (S == S1 || difference_size(S_star, S) < d) return;
    if (!(l1 < support_loss_tolerant(y, X, S))) holds = false;
  });
  return holds;
}

std::vector<PredicateRecord> theorem_predicates(const TheoryReport& report, int n, int p,
                                                int k, double sigma, double c, int d) {
  std::vector<PredicateRecord> preds;
  const double beta_min = report.beta_min.value_or(1.0);
  const double rho_2k = report.rho_plus.count(k) ? report.rho_plus.at(k) : 0.0;
  const double cs = c * sigma;
  const bool c_ok = sigma == 0.0 || c * c <= 1.0 / (18.0 * sigma * sigma);

  {
    PredicateRecord r;
    r.name = "single_miss_recovery";  // initialization within one variable of the truth
    const double bound =
        (4.0 + std::log(static_cast<double>(k) * k * (p - k))) /
        (c * c * beta_min * beta_min * rho_2k / 2.0);
    r.holds = rho_2k > 0.0 && n > bound && c_ok;
    r.values = {{"n", static_cast<double>(n)},
                {"n_required", bound},
                {"rho_2k", rho_2k},
                {"beta_min", beta_min},
                {"c", c}};
    preds.push_back(std::move(r));
  }
  {
    PredicateRecord r;
    r.name = "arbitrary_init_recovery";
    const double gamma_k = report.gamma.count(k) ? report.gamma.at(k) : 0.0;
    const double rho_k1 = report.rho_cap.count(1) ? report.rho_cap.at(1) : 0.0;
    const double log_pk = std::lgamma(p + 1.0) - std::lgamma(k + 1.0) - std::lgamma(p - k + 1.0);
    const double g = rho_k1 > 0.0 ? g_eval(gamma_k, rho_k1, cs)
                                  : std::numeric_limits<double>::infinity();
    const double n_bound = 2.0 * log_pk / (c * c * beta_min * beta_min * rho_2k * rho_2k);
    const bool count_cond = log_pk > 4.0 + std::log(static_cast<double>(k) * k * (p - k));
    r.holds = g < 0.0 && count_cond && n > n_bound && c_ok;
    r.values = {{"g", g},
                {"gamma_k", gamma_k},
                {"rho_k_1", rho_k1},
                {"n", static_cast<double>(n)},
                {"n_required", n_bound},
                {"log_binom_p_k", log_pk}};
    preds.push_back(std::move(r));
  }
  {
    PredicateRecord r;
    r.name = "partial_init_recovery";
    const double gamma_dm1 =
        d >= 2 && report.gamma.count(d - 1) ? report.gamma.at(d - 1) : 0.0;
    const double rho_k1 = report.rho_cap.count(1) ? report.rho_cap.at(1) : 0.0;
    const double log_pd = std::lgamma(p + 1.0) - std::lgamma(d + 1.0) - std::lgamma(p - d + 1.0);
    const double g = rho_k1 > 0.0 ? g_eval(gamma_dm1, rho_k1, cs)
                                  : std::numeric_limits<double>::infinity();
    const double n_bound = 6.0 * log_pd / (c * c * beta_min * beta_min * rho_2k * rho_2k);
    const bool count_cond = 3.0 * log_pd > 4.0 + std::log(static_cast<double>(k) * k * (p - k));
    r.holds = g < 0.0 && count_cond && n > n_bound && c_ok;
    r.values = {{"g", g},
                {"gamma_d_minus_1", gamma_dm1},
                {"d", static_cast<double>(d)},
                {"n", static_cast<double>(n)},
                {"n_required", n_bound}};
    preds.push_back(std::move(r));
  }
  {
    PredicateRecord r;
    r.name = "optimal_sample_recovery";
    const double nu = report.nu.count(d) ? report.nu.at(d) : 0.0;
    const double rho_km1 = report.rho_km1_free.value_or(0.0);
    const double g = rho_km1 > 0.0 ? g_eval(nu, rho_km1 / 2.0, cs)
                                   : std::numeric_limits<double>::infinity();
    const double n_bound = (2.0 * k + std::log(static_cast<double>(k) * (p - k))) /
                           (c * c * beta_min * beta_min * rho_2k * rho_2k / 4.0);
    r.holds = g < 0.0 && n > n_bound && c_ok;
    r.values = {{"g", g},
                {"nu_d", nu},
                {"rho_km1_0", rho_km1},
                {"n", static_cast<double>(n)},
                {"n_required", n_bound}};
    preds.push_back(std::move(r));
  }
  return preds;
}

TheoryReport compute_theory_report(const DesignMatrix& X, const SupportSet& S_star,
                                   const std::optional<CoefficientVector>& beta_star,
                                   const TheoryOptions& opts) {
  const int k = S_star.size();
  const int p = X.p();
  TheoryReport report;
  report.mode = opts.mode;

  const int ell_max = std::min(opts.ell_max, p - k);
  for (int ell = 0; ell <= ell_max; ++ell)
    report.rho_plus[ell] = rho_plus(X, S_star, ell);
  if (p - k >= k) report.rho_plus[k] = rho_plus(X, S_star, k);  // the 2k block

  for (int ell = k; ell >= std::max(0, k - 2); --ell)
    report.rho_cap[ell] = rho_cap(X, S_star, ell);
  if (k >= 2) report.rho_km1_free = rho_restricted(X, S_star, k - 1, 0);

  const int d_max = opts.d_max > 0 ? std::min(opts.d_max, k) : k;
  for (int d = 1; d <= d_max; ++d) {
    auto g = gamma_d(X, S_star, k, d, opts.mode);
    report.gamma[d] = g.value;
    report.gamma_skipped += g.skipped;
    auto nu = nu_d(X, S_star, k, d, opts.mode);
    report.nu[d] = nu.value;
    report.nu_skipped += nu.skipped;
  }

  report.zeta = zeta(X, S_star);
  if (beta_star) report.beta_min = beta_star->min_abs_on_support();

  const double cs = opts.c * opts.sigma;
  for (const auto& [d, gv] : report.gamma) {
    if (report.rho_cap.count(1) && report.rho_cap.at(1) > 0.0) {
      GRecord rec{"g(gamma_" + std::to_string(d) + ", rho_k_1, c*sigma)", gv,
                  report.rho_cap.at(1), cs, 0.0};
      rec.value = g_eval(rec.delta, rec.rho, rec.c);
      report.g_values.push_back(rec);
    }
  }

  const int d_pred = std::min(std::max(1, opts.d_for_predicates), k);
  report.predicates = theorem_predicates(report, X.n(), p, k, opts.sigma, opts.c, d_pred);
  return report;
}

nlohmann::json theory_report_to_json(const TheoryReport& report) {
  nlohmann::json j;
  auto map_to_json = [](const std::map<int, double>& m) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : m) out[std::to_string(key)] = value;
    return out;
  };
  j["rho_plus"] = map_to_json(report.rho_plus);
  j["rho_cap"] = map_to_json(report.rho_cap);
  if (report.rho_km1_free) j["rho_km1_free"] = *report.rho_km1_free;
  j["gamma"] = map_to_json(report.gamma);
  j["nu"] = map_to_json(report.nu);
  j["zeta"] = report.zeta;
  if (report.beta_min)
    j["beta_min"] = *report.beta_min;
  else
    j["beta_min"] = nullptr;
  j["distance_mode"] = report.mode == DistanceMode::Exact ? "exact" : "at_most";
  j["gamma_skipped"] = report.gamma_skipped;
  j["nu_skipped"] = report.nu_skipped;
  j["g_values"] = nlohmann::json::array();
  for (const auto& g : report.g_values)
    j["g_values"].push_back({{"label", g.label},
                             {"delta", g.delta},
                             {"rho", g.rho},
                             {"c", g.c},
                             {"value", g.value}});
  j["predicates"] = nlohmann::json::array();
  for (const auto& pred : report.predicates) {
    nlohmann::json pj{{"name", pred.name}, {"holds", pred.holds}};
    pj["values"] = pred.values;
    j["predicates"].push_back(pj);
  }
  return j;
}

}  // namespace swapreg
