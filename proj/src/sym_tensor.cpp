#include "steinlab/sym_tensor.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace steinlab {

namespace {

std::unique_ptr<SymIndexSet> build_index_set(int order, int dim) {
  auto set = std::make_unique<SymIndexSet>();
  set->order = order;
  set->dim = dim;
  std::vector<int> tuple(order);
  auto rec = [&](auto&& self, int slot, int min_coord) -> void {
    if (slot == order) {
      set->tuples.push_back(tuple);
      return;
    }
    for (int c = min_coord; c < dim; ++c) {
      tuple[slot] = c;
      self(self, slot + 1, c);
    }
  };
  rec(rec, 0, 0);

  const int n = static_cast<int>(set->tuples.size());
  set->counts.reserve(n);
  set->multiplicity.resize(n);
  for (int i = 0; i < n; ++i) {
    MultiIndex c = MultiIndex::zero(dim);
    for (int v : set->tuples[i]) c.e[v] += 1;
    set->multiplicity[i] = factorial(order) / multi_factorial(c);
    set->counts.push_back(std::move(c));
  }
  return set;
}

}  // namespace

int SymIndexSet::position(const MultiIndex& c) const {
  // counts lists are tiny (C(d+k-1,k)); linear scan is fine and keeps the
  // set trivially shareable between threads
  for (int i = 0; i < size(); ++i)
    if (counts[i] == c) return i;
  throw std::out_of_range("SymIndexSet::position: counts not of this order/dim");
}

const SymIndexSet& sym_index_set(int order, int dim) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, std::unique_ptr<SymIndexSet>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto& slot = cache[{order, dim}];
  if (!slot) slot = build_index_set(order, dim);
  return *slot;
}

SymTensor SymTensor::identity(int dim) {
  SymTensor t(2, dim);
  for (int j = 0; j < dim; ++j) t.set({j, j}, 1.0);
  return t;
}

namespace {
MultiIndex counts_of(const std::vector<int>& idx, int dim) {
  MultiIndex c = MultiIndex::zero(dim);
  for (int v : idx) {
    if (v < 0 || v >= dim) throw std::out_of_range("SymTensor: coordinate index out of range");
    c.e[v] += 1;
  }
  return c;
}
}  // namespace

double SymTensor::at(const std::vector<int>& idx) const {
  if (static_cast<int>(idx.size()) != order)
    throw std::invalid_argument("SymTensor::at: wrong number of indices");
  return values[index_set().position(counts_of(idx, dim))];
}

void SymTensor::set(const std::vector<int>& idx, double v) {
  if (static_cast<int>(idx.size()) != order)
    throw std::invalid_argument("SymTensor::set: wrong number of indices");
  values[index_set().position(counts_of(idx, dim))] = v;
}

double inner(const SymTensor& a, const SymTensor& b) {
  if (a.order != b.order || a.dim != b.dim)
    throw std::invalid_argument("inner: tensor order/dim mismatch");
  const auto& set = a.index_set();
  return (set.multiplicity.array() * a.values.array() * b.values.array()).sum();
}

SymTensor tensor_apply(const SymTensor& a, const Vec& y) {
  if (a.order < 1) throw std::invalid_argument("tensor_apply: order must be >= 1");
  if (y.size() != a.dim) throw std::invalid_argument("tensor_apply: dim mismatch");
  SymTensor out(a.order - 1, a.dim);
  const auto& oset = out.index_set();
  const auto& aset = a.index_set();
  for (int i = 0; i < oset.size(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.dim; ++j) s += a.values[aset.position(oset.counts[i].plus_unit(j))] * y[j];
    out.values[i] = s;
  }
  return out;
}

}  // namespace steinlab
