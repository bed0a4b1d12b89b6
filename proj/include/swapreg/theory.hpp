#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "swapreg/types.hpp"

namespace swapreg {

// Membership rule for the family of size-k supports at distance d from the
// true support. Exact (|S* \ S| == d) is the operative convention; AtMost
// (|S* \ S| <= d) nests the families and makes the d -> value map monotone.
enum class DistanceMode { Exact, AtMost };

struct EsdResult {
  SupportSet support;
  double loss = 0.0;
};

// Exhaustive search over all size-k supports; ties resolve to the
// lexicographically first support. Guarded by C(p, k) <= 1e6.
EsdResult esd(const Eigen::VectorXd& y, const DesignMatrix& X, int k);

// min over A containing S_star, |A| = |S_star| + ell, of lambda_min(X_A^T X_A / n).
double rho_plus(const DesignMatrix& X, const SupportSet& S_star, int ell);

// min over |A| = size, |A n S_star| >= min_overlap, of lambda_min(X_A^T X_A / n).
double rho_restricted(const DesignMatrix& X, const SupportSet& S_star, int size,
                      int min_overlap);

// rho_restricted at size |S_star|.
double rho_cap(const DesignMatrix& X, const SupportSet& S_star, int ell);

// Result of a projected-correlation sweep; skipped counts candidates dropped
// for degenerate denominators or singular inner blocks.
struct ProjectedCorrelation {
  double value = 0.0;
  int skipped = 0;
  int supports_visited = 0;
};

ProjectedCorrelation gamma_d(const DesignMatrix& X, const SupportSet& S_star, int k, int d,
                             DistanceMode mode = DistanceMode::Exact);

// Block convention for the second numerator term of the nu sweep. SquareBlocks
// inverts the (S* \ S) u {j} block in both terms; CrossBlock couples the
// (S* \ S) rows with that block through a pseudo-inverse and exists for
// comparison only.
enum class NuConvention { SquareBlocks, CrossBlock };

ProjectedCorrelation nu_d(const DesignMatrix& X, const SupportSet& S_star, int k, int d,
                          DistanceMode mode = DistanceMode::Exact,
                          NuConvention convention = NuConvention::SquareBlocks);

// max over inactive i of ||Sigma_{i,S*} Sigma_{S*,S*}^{-1}||_1^2.
double zeta(const DesignMatrix& X, const SupportSet& S_star);

// (delta - 1) + 2c(sqrt(delta) + 1/sqrt(rho)) + 2c^2.
double g_eval(double delta, double rho, double c);

// True when L(S1) beats every size-k support S != S1 with |S_star \ S| >= d.
bool check_event_ekd(const Eigen::VectorXd& y, const DesignMatrix& X, const SupportSet& S1,
                     const SupportSet& S_star, int k, int d);

struct PredicateRecord {
  std::string name;
  bool holds = false;
  std::map<std::string, double> values;
};

struct GRecord {
  std::string label;
  double delta = 0.0;
  double rho = 0.0;
  double c = 0.0;
  double value = 0.0;
};

struct TheoryReport {
  std::map<int, double> rho_plus;      // ell -> value
  std::map<int, double> rho_cap;       // ell -> value, blocks of size k
  std::optional<double> rho_km1_free;  // size k-1 blocks, no overlap constraint
  std::map<int, double> gamma;         // d -> value
  std::map<int, double> nu;            // d -> value
  double zeta = 0.0;
  std::optional<double> beta_min;
  std::vector<GRecord> g_values;
  std::vector<PredicateRecord> predicates;
  DistanceMode mode = DistanceMode::Exact;
  int gamma_skipped = 0;
  int nu_skipped = 0;
};

struct TheoryOptions {
  int ell_max = 2;
  int d_max = 0;  // 0 resolves to k
  double sigma = 0.0;
  double c = 0.1;
  int d_for_predicates = 2;
  DistanceMode mode = DistanceMode::Exact;
};

TheoryReport compute_theory_report(const DesignMatrix& X, const SupportSet& S_star,
                                   const std::optional<CoefficientVector>& beta_star,
                                   const TheoryOptions& opts);

// Sufficient-condition checks of the recovery statements, with every plugged
// number echoed. Purely diagnostic.
std::vector<PredicateRecord> theorem_predicates(const TheoryReport& report, int n, int p,
                                                int k, double sigma, double c, int d);

nlohmann::json theory_report_to_json(const TheoryReport& report);

}  // namespace swapreg
