#pragma once

#include <cstdint>

#include "swapreg/types.hpp"

namespace swapreg {

// Population covariance used to draw or realize a design matrix.
struct CovarianceSpec {
  enum class Kind { Identity, BlockDiagonal, Bordered };
  Kind kind = Kind::Identity;
  int p = 0;
  int block_size = 0;  // BlockDiagonal
  double a = 0.0;      // within-block correlation / border weight
  int k = 0;           // Bordered: actives {0..k-1} correlated with column p-1
};

CovarianceSpec identity_cov(int p);
CovarianceSpec block_cov(int p, int block_size, double a);
// Unit diagonal, entry a between column p-1 and each of columns 0..k-1;
// positive definite iff a < 1/sqrt(k).
CovarianceSpec bordered_cov(int p, int k, double a);

Eigen::MatrixXd build_covariance(const CovarianceSpec& spec);

// Rows i.i.d. N(0, Sigma) followed by column normalization.
DesignMatrix sample_gaussian_design(const CovarianceSpec& spec, int n, std::uint64_t seed);

// Square deterministic design with X^T X / n equal to Sigma exactly (n = p).
DesignMatrix exact_gram_design(const CovarianceSpec& spec);

struct LayoutSpec {
  enum class Kind { OnePerBlock, GroupedPerBlock };
  Kind kind = Kind::OnePerBlock;
  int blocks_chosen = 0;  // GroupedPerBlock
  int per_block = 0;
};

// Places k active variables across the blocks of a block-diagonal spec. For
// Identity the whole index range acts as a single block; for Bordered the
// support is {0..k-1} by construction.
SupportSet place_support(const CovarianceSpec& spec, int k, const LayoutSpec& layout,
                         std::uint64_t seed);

// Signs +-magnitude on the support, equiprobable per entry.
CoefficientVector gen_beta(const SupportSet& S_star, int p, double magnitude,
                           std::uint64_t seed);

struct SyntheticInstance {
  DesignMatrix X;
  Eigen::VectorXd y;
  CoefficientVector beta_star;
  SupportSet S_star;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  Eigen::VectorXd noise;  // retained for audit: y = X beta_star + noise
  CovarianceSpec spec;
};

SyntheticInstance synthesize(const CovarianceSpec& spec, int n, int k, double sigma,
                             const LayoutSpec& layout, std::uint64_t seed,
                             double beta_magnitude = 1.0);

}  // namespace swapreg
