#ifndef DISLOSIM_QUADRATURE_HPP
#define DISLOSIM_QUADRATURE_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "dislosim/errors.hpp"

namespace dislosim
{

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule
{
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussRule(int order)
  {
    if (order < 1)
      throw InvalidArgument("GaussRule: order must be positive");
    nodes.resize(order);
    weights.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i)
    {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it)
      {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= order; ++k)
        {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16)
          break;
      }
      // recompute derivative at the converged root
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k)
      {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[i] = -x;
      nodes[order - 1 - i] = x;
      weights[i] = w;
      weights[order - 1 - i] = w;
    }
    if (order % 2 == 1)
      nodes[order / 2] = 0.0;
  }

  int size() const { return static_cast<int>(nodes.size()); }

  /// ∫_a^b f(x) dx with the rule mapped onto [a, b].
  template <class F>
  auto integrate(F&& f, double a, double b) const
  {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    auto sum = weights[0] * f(mid + half * nodes[0]);
    for (int i = 1; i < size(); ++i)
      sum += weights[i] * f(mid + half * nodes[i]);
    return half * sum;
  }
};

} // namespace dislosim

#endif // DISLOSIM_QUADRATURE_HPP
