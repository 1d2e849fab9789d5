#ifndef BLOCHOBS_QUADRATURE_HPP
#define BLOCHOBS_QUADRATURE_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace blochobs {

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// Sigma = [a1, b1] x [a2, b2]: sigma1 is the drift scale, sigma2 the control scale.
struct ParameterBox {
  double a1 = 0.0, b1 = 1.0, a2 = 0.5, b2 = 1.5;

  /// Requires a1 < b1 and 0 < a2 < b2, all finite.
  void validate() const;
  double area() const { return (b1 - a1) * (b2 - a2); }
};

using Sigma = std::array<double, 2>;

/// Tensor Gauss-Legendre grid.  Node (i1, i2) is stored at index i1 * n2 + i2.
struct ParameterGrid {
  ParameterBox box;
  int n1 = 0, n2 = 0;
  std::vector<Sigma> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  std::size_t index(int i1, int i2) const { return static_cast<std::size_t>(i1) * n2 + i2; }
  /// Up to four axis-aligned neighbours, in the order -sigma1, +sigma1, -sigma2, +sigma2.
  std::vector<std::size_t> neighbors(std::size_t node) const;
};

ParameterGrid make_grid(const ParameterBox& box, int n1, int n2);

}  // namespace blochobs

#endif  // BLOCHOBS_QUADRATURE_HPP
