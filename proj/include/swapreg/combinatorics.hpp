#pragma once

#include <algorithm>
#include <vector>

namespace swapreg {

// C(n, k) in double precision; saturates at +inf for huge counts, which is
// all the enumeration guards need.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
  return r;
}

// Visits every k-subset of {0, ..., n-1} in lexicographic order.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> comb(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) comb[static_cast<std::size_t>(j)] = j;
  while (true) {
    fn(comb);
    int j = k - 1;
    while (j >= 0 && comb[static_cast<std::size_t>(j)] == n - k + j) --j;
    if (j < 0) return;
    ++comb[static_cast<std::size_t>(j)];
    for (int t = j + 1; t < k; ++t)
      comb[static_cast<std::size_t>(t)] = comb[static_cast<std::size_t>(t - 1)] + 1;
  }
}

}  // namespace swapreg
