#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <compare>
#include <vector>

#include "swapreg/errors.hpp"

namespace swapreg {

// Ordered set of column indices. Always strictly increasing, no duplicates.
class SupportSet {
 public:
  SupportSet() = default;

  // Sorts the input; throws on duplicates or negative indices.
  static SupportSet of(std::vector<int> indices) {
    std::sort(indices.begin(), indices.end());
    for (std::size_t j = 0; j < indices.size(); ++j) {
      if (indices[j] < 0) throw std::invalid_argument("negative support index");
      if (j > 0 && indices[j] == indices[j - 1])
        throw std::invalid_argument("duplicate support index");
    }
    SupportSet s;
    s.idx_ = std::move(indices);
    return s;
  }

  static SupportSet first_k(int k) {
    std::vector<int> v(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) v[static_cast<std::size_t>(j)] = j;
    return of(std::move(v));
  }

  int size() const { return static_cast<int>(idx_.size()); }
  bool empty() const { return idx_.empty(); }
  int operator[](int j) const { return idx_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& indices() const { return idx_; }

  bool contains(int i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
  }

  SupportSet without(int i) const {
    std::vector<int> v;
    v.reserve(idx_.size());
    for (int j : idx_)
      if (j != i) v.push_back(j);
    SupportSet s;
    s.idx_ = std::move(v);
    return s;
  }

  SupportSet with(int i) const {
    std::vector<int> v = idx_;
    v.push_back(i);
    return of(std::move(v));
  }

  void check_bound(int p) const {
    for (int j : idx_)
      if (j >= p) throw std::invalid_argument("support index exceeds variable count");
  }

  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

  bool operator==(const SupportSet&) const = default;
  auto operator<=>(const SupportSet&) const = default;

 private:
  std::vector<int> idx_;
};

inline int intersection_size(const SupportSet& a, const SupportSet& b) {
  int count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

// |A \ B|
inline int difference_size(const SupportSet& a, const SupportSet& b) {
  return a.size() - intersection_size(a, b);
}

// The n x p measurement matrix together with its normalization state.
struct DesignMatrix {
  Eigen::MatrixXd data;  // n x p, column j is variable j
  bool normalized = false;

  int n() const { return static_cast<int>(data.rows()); }
  int p() const { return static_cast<int>(data.cols()); }
  Eigen::MatrixXd::ConstColXpr col(int j) const { return data.col(j); }
};

DesignMatrix make_design(Eigen::MatrixXd data);

// Scales every column to squared norm n. Throws ZeroColumnError.
DesignMatrix normalize_columns(const DesignMatrix& X);

// Dense p-vector whose nonzeros are confined to a support.
struct CoefficientVector {
  Eigen::VectorXd values;  // length p
  SupportSet support;

  double min_abs_on_support() const {
    double m = std::numeric_limits<double>::infinity();
    for (int j : support) m = std::min(m, std::abs(values[j]));
    return m;
  }
};

}  // namespace swapreg
