#ifndef BLOCHOBS_EXACT_LINALG_HPP
#define BLOCHOBS_EXACT_LINALG_HPP

// Gaussian elimination over exact fields (Rational, CScalar).  Matrices are
// dense row-major vectors of rows; sizes here are a few hundred at most.

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "blochobs/rational.hpp"

namespace blochobs::exact {

template <class T>
using Matrix = std::vector<std::vector<T>>;

/// Reduces `m` in place to row echelon form; returns the pivot columns.
template <class T>
std::vector<std::size_t> row_reduce(Matrix<T>& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size(), cols = m.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && is_zero(m[p][c])) ++p;
    if (p == rows) continue;
    std::swap(m[r], m[p]);
    const T inv = T(1) / m[r][c];
    for (std::size_t k = c; k < cols; ++k) m[r][k] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero(m[i][c])) continue;
      const T f = m[i][c];
      for (std::size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class T>
std::size_t rank(Matrix<T> m) {
  return row_reduce(m).size();
}

/// Solves A x = b.  Returns nullopt if inconsistent; free variables are set to
/// zero, so the answer is unique exactly when A has full column rank.
template <class T>
std::optional<std::vector<T>> solve(const Matrix<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("exact::solve: dimension mismatch");
  if (a.empty()) return std::vector<T>{};
  const std::size_t n = a.front().size();
  Matrix<T> aug = a;
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
  const auto pivots = row_reduce(aug);
  if (!pivots.empty() && pivots.back() == n) return std::nullopt;
  std::vector<T> x(n);
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][n];
  return x;
}

/// Maintains a reduced basis for the span of the vectors added so far.
template <class T>
class IncrementalSpan {
public:
  explicit IncrementalSpan(std::size_t dim) : dim_(dim) {}

  std::size_t dimension() const { return dim_; }
  std::size_t rank() const { return rows_.size(); }

  /// Adds `v` if it is independent of the current span; returns whether it was.
  bool insert(std::vector<T> v) {
    reduce(v);
    std::size_t c = 0;
    while (c < dim_ && is_zero(v[c])) ++c;
    if (c == dim_) return false;
    const T inv = T(1) / v[c];
    for (auto& x : v) x *= inv;
    // Keep rows fully reduced against the new pivot.
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (is_zero(rows_[i][c])) continue;
      const T f = rows_[i][c];
      for (std::size_t k = 0; k < dim_; ++k) rows_[i][k] -= f * v[k];
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(c);
    return true;
  }

  bool contains(std::vector<T> v) const {
    reduce(v);
    for (const auto& x : v)
      if (!is_zero(x)) return false;
    return true;
  }

private:
  void reduce(std::vector<T>& v) const {
    if (v.size() != dim_) throw std::invalid_argument("IncrementalSpan: dimension mismatch");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const T f = v[pivots_[i]];
      if (is_zero(f)) continue;
      for (std::size_t k = 0; k < dim_; ++k) v[k] -= f * rows_[i][k];
    }
  }

  std::size_t dim_;
  Matrix<T> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace blochobs::exact

#endif  // BLOCHOBS_EXACT_LINALG_HPP
