#pragma once

#include <vector>

#include "steinlab/multi_index.hpp"
#include "steinlab/types.hpp"

namespace steinlab {

/// Canonical index system for symmetric k-tensors on R^d: one slot per
/// multiset {i_1 <= ... <= i_k} of coordinate indices (0-based), stored in
/// lexicographic order of the sorted tuple together with the multiplicity
/// k!/prod(c_j!) of ordered arrangements. Shared and cached per (order, dim).
struct SymIndexSet {
  int order = 0;
  int dim = 1;
  std::vector<std::vector<int>> tuples;  // sorted tuples, lex order
  std::vector<MultiIndex> counts;        // per-coordinate repetition counts
  Vec multiplicity;

  int size() const { return static_cast<int>(tuples.size()); }
  /// Position of the entry whose repetition counts equal `c` (degree == order).
  int position(const MultiIndex& c) const;
};

const SymIndexSet& sym_index_set(int order, int dim);

/// Dense symmetric tensor in canonical (multiset) storage. order == 0 is a
/// scalar, order == 1 a vector, order == 2 a symmetric matrix. The full
/// Euclidean inner product over all d^k ordered indices is recovered by
/// weighting canonical entries with their multiplicities.
struct SymTensor {
  int order = 0;
  int dim = 1;
  Vec values;

  SymTensor() : values(Vec::Zero(1)) {}
  SymTensor(int order_, int dim_)
      : order(order_), dim(dim_), values(Vec::Zero(sym_index_set(order_, dim_).size())) {}

  static SymTensor zeros(int order, int dim) { return SymTensor(order, dim); }
  static SymTensor identity(int dim);  // order-2 identity

  const SymIndexSet& index_set() const { return sym_index_set(order, dim); }

  /// Read/write through an arbitrary (unsorted) index tuple, 0-based.
  double at(const std::vector<int>& idx) const;
  void set(const std::vector<int>& idx, double v);
  /// Read through repetition counts (degree must equal order).
  double at_counts(const MultiIndex& c) const { return values[index_set().position(c)]; }
};

/// Full Euclidean inner product sum_{i_1..i_k} A B over ordered indices.
double inner(const SymTensor& a, const SymTensor& b);
inline double norm2_squared(const SymTensor& a) { return inner(a, a); }

/// Contraction over the last slot: (A y)_{i_1..i_k} = sum_j A_{i_1..i_k j} y_j.
SymTensor tensor_apply(const SymTensor& a, const Vec& y);

}  // namespace steinlab
