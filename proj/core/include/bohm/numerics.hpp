#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bohm {

// Pairwise summation: fixed association order, O(log n) error growth.
double pairwise_sum(std::span<const double> values);

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Composite Gauss-Legendre integral of f over [a, b].
template <class F>
double integrate_interval(F&& f, double a, double b, int panels, const GaussRule& rule) {
  const double w = (b - a) / panels;
  std::vector<double> parts;
  parts.reserve(static_cast<std::size_t>(panels));
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * f(lo + 0.5 * w * (rule.nodes[i] + 1.0));
    parts.push_back(0.5 * w * s);
  }
  return pairwise_sum(parts);
}

}  // namespace bohm
