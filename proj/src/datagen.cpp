#include "swapreg/datagen.hpp"

#include <cmath>

#include "swapreg/rng.hpp"

namespace swapreg {

CovarianceSpec identity_cov(int p) {
  CovarianceSpec s;
  s.kind = CovarianceSpec::Kind::Identity;
  s.p = p;
  return s;
}

CovarianceSpec block_cov(int p, int block_size, double a) {
  if (block_size < 1 || p % block_size != 0)
    throw std::invalid_argument("block size must divide p");
  if (a < 0.0 || a >= 1.0)
    throw std::invalid_argument("within-block correlation must lie in [0, 1)");
  CovarianceSpec s;
  s.kind = CovarianceSpec::Kind::BlockDiagonal;
  s.p = p;
  s.block_size = block_size;
  s.a = a;
  return s;
}

CovarianceSpec bordered_cov(int p, int k, double a) {
  if (k < 1 || k >= p) throw std::invalid_argument("bordered spec needs 1 <= k < p");
  if (a < 0.0) throw std::invalid_argument("border weight must be >= 0");
  CovarianceSpec s;
  s.kind = CovarianceSpec::Kind::Bordered;
  s.p = p;
  s.k = k;
  s.a = a;
  return s;
}

Eigen::MatrixXd build_covariance(const CovarianceSpec& spec) {
  const int p = spec.p;
  if (p < 1) throw std::invalid_argument("covariance spec has p < 1");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(p, p);
  switch (spec.kind) {
    case CovarianceSpec::Kind::Identity:
      break;
    case CovarianceSpec::Kind::BlockDiagonal: {
      for (int b = 0; b < p / spec.block_size; ++b) {
        const int off = b * spec.block_size;
        for (int i = 0; i < spec.block_size; ++i)
          for (int j = 0; j < spec.block_size; ++j)
            if (i != j) sigma(off + i, off + j) = spec.a;
      }
      break;
    }
    case CovarianceSpec::Kind::Bordered: {
      // lambda_min = 1 - a sqrt(k), so a < 1/sqrt(k) is required.
      if (spec.a * std::sqrt(static_cast<double>(spec.k)) >= 1.0)
        throw NotPositiveDefiniteError(
            "bordered covariance needs a < 1/sqrt(k); lambda_min = 1 - a sqrt(k) <= 0");
      for (int j = 0; j < spec.k; ++j) {
        sigma(p - 1, j) = spec.a;
        sigma(j, p - 1) = spec.a;
      }
      break;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("covariance is not positive definite");
  return sigma;
}

DesignMatrix sample_gaussian_design(const CovarianceSpec& spec, int n, std::uint64_t seed) {
  const Eigen::MatrixXd sigma = build_covariance(spec);
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
  const int p = spec.p;
  Rng rng(seed);
  Eigen::MatrixXd Z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) Z(i, j) = rng.next_normal();
  DesignMatrix X = make_design(Z * L.transpose());
  return normalize_columns(X);
}

DesignMatrix exact_gram_design(const CovarianceSpec& spec) {
  const Eigen::MatrixXd sigma = build_covariance(spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw NotPositiveDefiniteError("covariance is not positive definite");
  const int p = spec.p;
  const Eigen::MatrixXd root =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  DesignMatrix X = make_design(std::sqrt(static_cast<double>(p)) * root);
  // Unit Gram diagonal means the columns are already normalized.
  X.normalized = true;
  return X;
}

SupportSet place_support(const CovarianceSpec& spec, int k, const LayoutSpec& layout,
                         std::uint64_t seed) {
  const int p = spec.p;
  if (k < 1 || k > p) throw std::invalid_argument("support size must lie in [1, p]");
  Rng rng(seed);

  if (spec.kind == CovarianceSpec::Kind::Bordered) return SupportSet::first_k(spec.k);

  const int block_size = spec.kind == CovarianceSpec::Kind::BlockDiagonal ? spec.block_size : p;
  const int n_blocks = p / block_size;

  auto pick_distinct = [&rng](int count, int bound) {
    std::vector<int> pool(static_cast<std::size_t>(bound));
    for (int j = 0; j < bound; ++j) pool[static_cast<std::size_t>(j)] = j;
    for (int j = 0; j < count; ++j) {
      const int r = j + rng.next_int(bound - j);
      std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(r)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    return pool;
  };

  std::vector<int> chosen;
  switch (layout.kind) {
    case LayoutSpec::Kind::OnePerBlock: {
      if (k > n_blocks)
        throw std::invalid_argument("one-per-block layout needs k <= number of blocks");
      const std::vector<int> blocks = pick_distinct(k, n_blocks);
      for (int b : blocks) chosen.push_back(b * block_size + rng.next_int(block_size));
      break;
    }
    case LayoutSpec::Kind::GroupedPerBlock: {
      if (layout.blocks_chosen * layout.per_block != k)
        throw std::invalid_argument("grouped layout: blocks_chosen * per_block must equal k");
      if (layout.blocks_chosen > n_blocks || layout.per_block > block_size)
        throw std::invalid_argument("grouped layout does not fit the block structure");
      const std::vector<int> blocks = pick_distinct(layout.blocks_chosen, n_blocks);
      for (int b : blocks) {
        const std::vector<int> members = pick_distinct(layout.per_block, block_size);
        for (int m : members) chosen.push_back(b * block_size + m);
      }
      break;
    }
  }
  return SupportSet::of(std::move(chosen));
}

CoefficientVector gen_beta(const SupportSet& S_star, int p, double magnitude,
                           std::uint64_t seed) {
  S_star.check_bound(p);
  Rng rng(seed);
  CoefficientVector beta;
  beta.values = Eigen::VectorXd::Zero(p);
  beta.support = S_star;
  for (int j : S_star) beta.values[j] = rng.next_bool() ? magnitude : -magnitude;
  return beta;
}

SyntheticInstance synthesize(const CovarianceSpec& spec, int n, int k, double sigma,
                             const LayoutSpec& layout, std::uint64_t seed,
                             double beta_magnitude) {
  SyntheticInstance inst;
  inst.spec = spec;
  inst.sigma = sigma;
  inst.seed = seed;
  inst.X = sample_gaussian_design(spec, n, hash_combine(seed, 1));
  inst.S_star = place_support(spec, k, layout, hash_combine(seed, 2));
  inst.beta_star = gen_beta(inst.S_star, spec.p, beta_magnitude, hash_combine(seed, 3));
  Rng noise_rng(hash_combine(seed, 4));
  inst.noise.resize(n);
  for (int i = 0; i < n; ++i) inst.noise[i] = sigma * noise_rng.next_normal();
  inst.y = inst.X.data * inst.beta_star.values + inst.noise;
  return inst;
}

}  // namespace swapreg
