#ifndef DISLOSIM_TESTS_SUPPORT_HPP
#define DISLOSIM_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>

#include "dislosim/tensor.hpp"

namespace dislosim::testing
{

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0)
{
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng), n(rng)};
}

inline Vec3 random_unit(std::mt19937_64& rng)
{
  for (;;)
  {
    const Vec3 v = random_vec(rng);
    const double m = norm(v);
    if (m > 1e-3)
      return v / m;
  }
}

inline SymTensor3 random_sym(std::mt19937_64& rng, double scale = 1.0)
{
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng), n(rng), n(rng), n(rng), n(rng)};
}

inline double max_abs_diff(const SymTensor3& a, const SymTensor3& b)
{
  const SymTensor3 d = a - b;
  return std::max({std::abs(d.t11), std::abs(d.t22), std::abs(d.t33), std::abs(d.t12), std::abs(d.t13),
                   std::abs(d.t23)});
}

} // namespace dislosim::testing

#endif
