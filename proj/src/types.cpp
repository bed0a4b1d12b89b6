#include "swapreg/types.hpp"

#include <cmath>

namespace swapreg {

DesignMatrix make_design(Eigen::MatrixXd data) {
  if (data.rows() < 1 || data.cols() < 1)
    throw std::invalid_argument("design matrix must have at least one row and column");
  if (!data.allFinite()) throw NonFiniteError("design matrix has non-finite entries");
  DesignMatrix X;
  X.data = std::move(data);
  X.normalized = false;
  return X;
}

DesignMatrix normalize_columns(const DesignMatrix& X) {
  const int n = X.n();
  const int p = X.p();
  DesignMatrix out;
  out.data.resize(n, p);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (int j = 0; j < p; ++j) {
    const double norm = X.data.col(j).norm();
    if (norm == 0.0) throw ZeroColumnError(j);
    out.data.col(j) = X.data.col(j) * (sqrt_n / norm);
  }
  out.normalized = true;
  return out;
}

}  // namespace swapreg
