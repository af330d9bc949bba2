#ifndef DISLOSIM_CURVES_HPP
#define DISLOSIM_CURVES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "dislosim/errors.hpp"
#include "dislosim/measures.hpp"
#include "dislosim/mobility.hpp"

namespace dislosim
{

struct CurveState
{
  DislocationCurve curve;
  double time = 0.0;
};

/// External stress field x -> T(x). The curve's own field is not included.
using StressProvider = std::function<SymTensor3(const Vec3&)>;

inline StressProvider uniform_stress(const SymTensor3& t)
{
  return [t](const Vec3&) { return t; };
}

struct CurveStepOptions
{
  double cfl = 0.5;
  /// Remeshing threshold; segments longer than h_max are split and segments
  /// shorter than h_max / 5 are merged. Infinite disables remeshing.
  double h_max = std::numeric_limits<double>::infinity();
  double eps_screw = default_screw_tolerance;
};

namespace detail
{
inline std::vector<Vec3> velocities_of(const DislocationCurve& c, const StressProvider& stress,
                                       const MobilityLaw& law, double eps_screw)
{
  std::vector<Vec3> v(c.vertex_count());
  for (std::size_t i = 0; i < c.vertex_count(); ++i)
  {
    const Vec3 tau = c.node_tangent(i);
    const Vec3& x = c.vertices()[i];
    try
    {
      v[i] = normal_velocity(law, tau, stress(x), c.burgers(), eps_screw);
    }
    catch (const ScrewSingularity&)
    {
      throw ScrewSingularity("screw orientation at node " + std::to_string(i), i);
    }
  }
  return v;
}

inline double max_speed(const std::vector<Vec3>& v)
{
  double m = 0.0;
  for (const auto& x : v)
    m = std::max(m, norm(x));
  return m;
}
} // namespace detail

/// Normal velocity of every vertex, v = f(b^⊥τ·F) b^⊥τ with τ the bisector tangent.
inline std::vector<Vec3> nodal_velocity(const CurveState& s, const StressProvider& stress, const MobilityLaw& law,
                                        double eps_screw = default_screw_tolerance)
{
  return detail::velocities_of(s.curve, stress, law, eps_screw);
}

/// Same velocities through proj_τ α̃(τ, F).
inline std::vector<Vec3> nodal_velocity_projected(const CurveState& s, const StressProvider& stress,
                                                  const MobilityLaw& law,
                                                  double eps_screw = default_screw_tolerance)
{
  const auto& c = s.curve;
  std::vector<Vec3> v(c.vertex_count());
  for (std::size_t i = 0; i < c.vertex_count(); ++i)
  {
    const Vec3& x = c.vertices()[i];
    v[i] = normal_velocity_projected(law, c.node_tangent(i), stress(x), c.burgers(), eps_screw);
  }
  return v;
}

/// Line-length weighted discrete dissipation Σ_i (T b̂)·(α̃(τ, F) × τ) ℓ_i, ℓ_i the
/// half lengths of the adjacent segments.
inline double nodal_dissipation(const CurveState& s, const StressProvider& stress, const MobilityLaw& law,
                                double eps_screw = default_screw_tolerance)
{
  const auto& c = s.curve;
  const Vec3 b_hat = c.burgers_direction();
  double total = 0.0;
  const std::size_t n = c.vertex_count();
  for (std::size_t i = 0; i < n; ++i)
  {
    const Vec3 tau = c.node_tangent(i);
    const Vec3& x = c.vertices()[i];
    const SymTensor3 T = stress(x);
    const Vec3 F = peach_koehler(tau, T, c.burgers());
    const Vec3 alpha = cross(alpha_tilde(law, tau, F, c.burgers(), eps_screw), tau);
    const double dl = 0.5 * (c.segment_length(i) + c.segment_length((i + n - 1) % n));
    total += dissipation_density(T, b_hat, alpha) * dl;
  }
  return total;
}

/// Splits segments longer than h_max and removes vertices closing segments
/// shorter than h_max / 5.
inline DislocationCurve remesh(const DislocationCurve& c, double h_max)
{
  if (!std::isfinite(h_max))
    return c;
  if (!(h_max > 0.0))
    throw InvalidArgument("remesh: h_max must be positive");
  std::vector<Vec3> split;
  for (std::size_t s = 0; s < c.segment_count(); ++s)
  {
    const Vec3 a = c.segment_start(s);
    const Vec3 d = c.segment_end(s) - a;
    const int parts = std::max(1, static_cast<int>(std::ceil(norm(d) / h_max)));
    for (int p = 0; p < parts; ++p)
      split.push_back(a + (static_cast<double>(p) / parts) * d);
  }
  const double h_min = h_max / 5.0;
  const std::size_t min_vertices = c.is_periodic() ? 1 : 3;
  std::vector<Vec3> merged;
  merged.reserve(split.size());
  for (std::size_t i = 0; i < split.size(); ++i)
  {
    if (!merged.empty() && norm(split[i] - merged.back()) < h_min &&
        split.size() - (i - merged.size() + 1) >= min_vertices)
      continue;
    merged.push_back(split[i]);
  }
  // closing segment
  while (merged.size() > min_vertices && norm(merged.front() + c.period() - merged.back()) < h_min)
    merged.pop_back();
  return c.with_vertices(std::move(merged));
}

/// Throws InvariantViolation when two non-adjacent vertices come within h_min.
inline void check_separation(const DislocationCurve& c, double h_min)
{
  const std::size_t n = c.vertex_count();
  if (c.is_periodic() || n < 4)
    return;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j)
    {
      if (i == 0 && j == n - 1)
        continue;
      if (norm(c.vertices()[i] - c.vertices()[j]) < h_min)
      {
        std::ostringstream os;
        os << "curve approaches itself: vertices " << i << " and " << j << " closer than " << h_min
           << "; topology changes are not modelled";
        throw InvariantViolation(os.str());
      }
    }
}

/// One explicit midpoint (RK2) step of the normal-velocity law, then remeshing.
inline CurveState step(const CurveState& s, const StressProvider& stress, const MobilityLaw& law, double dt,
                       const CurveStepOptions& opt = {})
{
  if (!(dt > 0.0))
    throw InvalidArgument("curve step: dt must be positive");
  const auto& c = s.curve;
  const auto v1 = detail::velocities_of(c, stress, law, opt.eps_screw);
  const double vmax = detail::max_speed(v1);
  const double hmin = c.min_segment_length();
  if (dt * vmax > opt.cfl * hmin * (1.0 + 1e-12))
  {
    const double suggested = opt.cfl * hmin / vmax;
    std::ostringstream os;
    os << "curve step: CFL violated (dt*max|v| = " << dt * vmax << " > " << opt.cfl * hmin
       << "); use dt <= " << suggested;
    throw CflViolation(os.str(), suggested);
  }
  std::vector<Vec3> mid(c.vertex_count());
  for (std::size_t i = 0; i < mid.size(); ++i)
    mid[i] = c.vertices()[i] + (0.5 * dt) * v1[i];
  const auto v2 = detail::velocities_of(c.with_vertices(mid), stress, law, opt.eps_screw);
  std::vector<Vec3> next(c.vertex_count());
  for (std::size_t i = 0; i < next.size(); ++i)
    next[i] = c.vertices()[i] + dt * v2[i];
  DislocationCurve moved = remesh(c.with_vertices(std::move(next)), opt.h_max);
  if (std::isfinite(opt.h_max))
    check_separation(moved, opt.h_max / 5.0);
  return {std::move(moved), s.time + dt};
}

/// Max over vertices of |(x - x_ref)·g| for a loop gliding on the plane through
/// x_ref with unit normal g. Requires b·g = 0.
inline double plane_confinement_residual(const CurveState& s, const Vec3& g, const Vec3& x_ref)
{
  if (std::abs(norm(g) - 1.0) > 1e-12)
    throw InvalidArgument("plane_confinement_residual: g must be a unit vector");
  if (std::abs(dot(s.curve.burgers(), g)) > 1e-12 * norm(s.curve.burgers()))
    throw InvalidArgument("plane_confinement_residual: Burgers vector must lie in the slip plane (b.g = 0)");
  double r = 0.0;
  for (const auto& x : s.curve.vertices())
    r = std::max(r, std::abs(dot(x - x_ref, g)));
  return r;
}

/// Regular polygon approximating a circle of the given radius in the plane
/// through `center` with unit normal `normal`, oriented counter-clockwise about
/// the normal. Vertex k sits at angle 2π(k + phase)/n from the in-plane axis.
inline DislocationCurve circular_loop(const Vec3& center, double radius, const Vec3& normal, int nodes,
                                      const Vec3& burgers, double phase = 0.5)
{
  if (nodes < 3 || !(radius > 0.0))
    throw InvalidArgument("circular_loop: need >= 3 nodes and a positive radius");
  const Vec3 g = normalized(normal);
  // in-plane basis (e1, e2) with e1 × e2 = g
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(g[a]) < std::abs(g[axis]))
      axis = a;
  const Vec3 e1 = normalized(project_out(Vec3::unit(axis), g));
  const Vec3 e2 = cross(g, e1);
  std::vector<Vec3> v(nodes);
  for (int k = 0; k < nodes; ++k)
  {
    const double th = 2.0 * std::numbers::pi * (k + phase) / nodes;
    v[k] = center + radius * (std::cos(th) * e1 + std::sin(th) * e2);
  }
  return {std::move(v), burgers};
}

/// Radius of the circle with the same enclosed area as a planar loop.
inline double equivalent_radius(const DislocationCurve& c, const Vec3& normal)
{
  const Vec3 g = normalized(normal);
  Vec3 area_vec;
  const Vec3 origin = c.vertices().front();
  for (std::size_t i = 0; i < c.segment_count(); ++i)
    area_vec += 0.5 * cross(c.segment_start(i) - origin, c.segment_end(i) - origin);
  return std::sqrt(std::abs(dot(area_vec, g)) / std::numbers::pi);
}

} // namespace dislosim

#endif // DISLOSIM_CURVES_HPP
