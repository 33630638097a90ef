#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace styleval {

// Sparse vector as (index, value) pairs with strictly increasing indices.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const { return entries.empty(); }
  std::size_t nnz() const { return entries.size(); }

  static SparseVector from_counts(
      const std::map<std::uint32_t, double>& counts) {
    SparseVector v;
    v.entries.assign(counts.begin(), counts.end());
    return v;
  }
};

inline double dot(const SparseVector& u, const SparseVector& v) {
  double sum = 0.0;
  auto a = u.entries.begin();
  auto b = v.entries.begin();
  while (a != u.entries.end() && b != v.entries.end()) {
    if (a->first == b->first) {
      sum += a->second * b->second;
      ++a;
      ++b;
    } else if (a->first < b->first) {
      ++a;
    } else {
      ++b;
    }
  }
  return sum;
}

inline double l2_norm(const SparseVector& v) {
  double sum = 0.0;
  for (const auto& [i, x] : v.entries) sum += x * x;
  return std::sqrt(sum);
}

inline void l2_normalize(SparseVector& v) {
  const double norm = l2_norm(v);
  if (norm == 0.0) return;
  for (auto& [i, x] : v.entries) x /= norm;
}

// Cosine similarity; 0 when either vector is zero. Nonnegative inputs give
// values in [0, 1], and identical vectors score exactly 1.
inline double cosine(const SparseVector& u, const SparseVector& v) {
  if (u.empty() || v.empty()) return 0.0;
  if (u.entries == v.entries) return 1.0;
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot(u, v) / (nu * nv);
}

}  // namespace styleval
