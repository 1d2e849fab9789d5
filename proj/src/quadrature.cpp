#include "blochobs/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace blochobs {

namespace {

// (P_n(x), P_n'(x)) by the three-term recurrence; |x| < 1.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Roots are symmetric; Newton from the usual cosine guesses for the positive half.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

void ParameterBox::validate() const {
  for (double v : {a1, b1, a2, b2})
    if (!std::isfinite(v)) throw std::invalid_argument("parameter box bounds must be finite");
  if (!(a1 < b1)) throw std::invalid_argument("parameter box requires a1 < b1");
  if (!(0.0 < a2 && a2 < b2)) throw std::invalid_argument("parameter box requires 0 < a2 < b2");
}

std::vector<std::size_t> ParameterGrid::neighbors(std::size_t node) const {
  const int i1 = static_cast<int>(node) / n2, i2 = static_cast<int>(node) % n2;
  std::vector<std::size_t> out;
  if (i1 > 0) out.push_back(index(i1 - 1, i2));
  if (i1 + 1 < n1) out.push_back(index(i1 + 1, i2));
  if (i2 > 0) out.push_back(index(i1, i2 - 1));
  if (i2 + 1 < n2) out.push_back(index(i1, i2 + 1));
  return out;
}

ParameterGrid make_grid(const ParameterBox& box, int n1, int n2) {
  box.validate();
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("grid sizes must be positive");
  const GaussRule r1 = gauss_legendre(n1), r2 = gauss_legendre(n2);
  const double h1 = 0.5 * (box.b1 - box.a1), h2 = 0.5 * (box.b2 - box.a2);
  const double m1 = 0.5 * (box.b1 + box.a1), m2 = 0.5 * (box.b2 + box.a2);
  ParameterGrid g;
  g.box = box;
  g.n1 = n1;
  g.n2 = n2;
  g.nodes.reserve(static_cast<std::size_t>(n1) * n2);
  g.weights.reserve(g.nodes.capacity());
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      g.nodes.push_back({m1 + h1 * r1.nodes[i], m2 + h2 * r2.nodes[j]});
      g.weights.push_back(h1 * r1.weights[i] * h2 * r2.weights[j]);
    }
  return g;
}

}  // namespace blochobs
