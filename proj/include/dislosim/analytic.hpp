#ifndef DISLOSIM_ANALYTIC_HPP
#define DISLOSIM_ANALYTIC_HPP

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dislosim/errors.hpp"
#include "dislosim/quadrature.hpp"
#include "dislosim/tensor.hpp"
#include "dislosim/test_functions.hpp"

/// Closed-form Volterra field of a straight dislocation along the x3-axis in an
/// infinite isotropic body, with the cut surface Σ = {x1 > 0, x2 = 0}.
namespace dislosim::analytic
{

inline constexpr double default_core_radius = 1e-12;

class StraightDislocation
{
public:
  StraightDislocation(double b1, double b3, IsotropicElasticity elasticity,
                      double core_radius = default_core_radius)
    : b1_(b1), b3_(b3), elasticity_(elasticity), core_radius_(core_radius)
  {
    if (b1 == 0.0 && b3 == 0.0)
      throw InvalidArgument("StraightDislocation: Burgers vector must be nonzero");
    if (!std::isfinite(b1) || !std::isfinite(b3))
      throw InvalidArgument("StraightDislocation: non-finite Burgers vector");
    const double nu = elasticity_.nu();
    d1_ = elasticity_.mu() * b1_ / (2.0 * std::numbers::pi * (1.0 - nu));
    d2_ = elasticity_.mu() * b3_ / (2.0 * std::numbers::pi);
  }

  double b1() const noexcept { return b1_; }
  double b3() const noexcept { return b3_; }
  Vec3 burgers() const noexcept { return {b1_, 0.0, b3_}; }
  const IsotropicElasticity& elasticity() const noexcept { return elasticity_; }
  double nu() const noexcept { return elasticity_.nu(); }
  double D1() const noexcept { return d1_; }
  double D2() const noexcept { return d2_; }
  double core_radius() const noexcept { return core_radius_; }

private:
  double b1_;
  double b3_;
  IsotropicElasticity elasticity_;
  double core_radius_;
  double d1_;
  double d2_;
};

/// Polar angle in (0, 2π) with the branch cut on Σ. Throws on the closure of Σ.
inline double cut_angle(double x1, double x2)
{
  if (x2 == 0.0 && x1 >= 0.0)
    throw DomainError("point lies on the closure of the cut surface");
  double theta = std::atan2(x2, x1);
  if (theta <= 0.0)
    theta += 2.0 * std::numbers::pi;
  return theta;
}

namespace detail
{
inline double radius_squared_checked(const StraightDislocation& d, const Vec3& x)
{
  const double r2 = x.x1 * x.x1 + x.x2 * x.x2;
  if (!(r2 > d.core_radius() * d.core_radius()))
    throw DomainError("point lies inside the dislocation core");
  return r2;
}
} // namespace detail

inline Vec3 displacement(const StraightDislocation& d, const Vec3& x)
{
  const double theta = cut_angle(x.x1, x.x2);
  const double r2 = detail::radius_squared_checked(d, x);
  const double nu = d.nu();
  const double pi = std::numbers::pi;
  const double u1 = d.b1() / (2.0 * pi) * (theta + x.x1 * x.x2 / (2.0 * (1.0 - nu) * r2));
  const double u2 = -d.b1() / (4.0 * pi * (1.0 - nu)) *
                    ((1.0 - 2.0 * nu) * 0.5 * std::log(r2) + x.x1 * x.x1 / r2);
  const double u3 = d.b3() / (2.0 * pi) * theta;
  return {u1, u2, u3};
}

/// Analytic displacement gradient (∇u)_ij = ∂_j u_i, defined off ℓ (smooth across Σ).
inline Tensor3 displacement_gradient(const StraightDislocation& d, const Vec3& x)
{
  const double r2 = detail::radius_squared_checked(d, x);
  const double r4 = r2 * r2;
  const double x1 = x.x1;
  const double x2 = x.x2;
  const double nu = d.nu();
  const double pi = std::numbers::pi;
  const double c1 = d.b1() / (2.0 * pi);
  const double k = 1.0 / (2.0 * (1.0 - nu));
  const double c2 = -d.b1() / (4.0 * pi * (1.0 - nu));
  const double c3 = d.b3() / (2.0 * pi);

  Tensor3 g;
  g(0, 0) = c1 * (-x2 / r2 + k * x2 * (x2 * x2 - x1 * x1) / r4);
  g(0, 1) = c1 * (x1 / r2 + k * x1 * (x1 * x1 - x2 * x2) / r4);
  g(1, 0) = c2 * ((1.0 - 2.0 * nu) * x1 / r2 + 2.0 * x1 * x2 * x2 / r4);
  g(1, 1) = c2 * ((1.0 - 2.0 * nu) * x2 / r2 - 2.0 * x1 * x1 * x2 / r4);
  g(2, 0) = -c3 * x2 / r2;
  g(2, 1) = c3 * x1 / r2;
  return g;
}

inline SymTensor3 stress(const StraightDislocation& d, const Vec3& x)
{
  const double r2 = detail::radius_squared_checked(d, x);
  const double r4 = r2 * r2;
  const double x1 = x.x1;
  const double x2 = x.x2;
  const double D1 = d.D1();
  const double D2 = d.D2();
  SymTensor3 t;
  t.t11 = -D1 * x2 * (3.0 * x1 * x1 + x2 * x2) / r4;
  t.t12 = D1 * x1 * (x1 * x1 - x2 * x2) / r4;
  t.t13 = -D2 * x2 / r2;
  t.t22 = D1 * x2 * (x1 * x1 - x2 * x2) / r4;
  t.t23 = D2 * x1 / r2;
  t.t33 = -2.0 * d.nu() * D1 * x2 / r2;
  return t;
}

/// u(x1, +η, x3) - u(x1, -η, x3) for x1 > 0.
inline Vec3 displacement_jump(const StraightDislocation& d, double x1, double x3, double eta = 1e-12)
{
  if (!(x1 > 0.0))
    throw InvalidArgument("displacement_jump: x1 must be positive");
  return displacement(d, {x1, eta, x3}) - displacement(d, {x1, -eta, x3});
}

/// Max component of the centred finite-difference divergence of the stress.
inline double verify_equilibrium(const StraightDislocation& d, const Vec3& x, double h)
{
  if (!(h > 0.0))
    throw InvalidArgument("verify_equilibrium: h must be positive");
  const double r = std::hypot(x.x1, x.x2);
  if (!(r > 2.0 * h))
    throw DomainError("verify_equilibrium: stencil touches the dislocation core");
  Vec3 div;
  for (int j = 0; j < 3; ++j)
  {
    const Vec3 e = Vec3::unit(j);
    const SymTensor3 dT = (1.0 / (2.0 * h)) * (stress(d, x + h * e) - stress(d, x - h * e));
    for (int i = 0; i < 3; ++i)
      div[i] += dT(i, j);
  }
  return std::max({std::abs(div.x1), std::abs(div.x2), std::abs(div.x3)});
}

struct QuadratureControl
{
  int theta_points = 64;
  int axial_order = 16;
  int axial_panels = 4;
  int max_refinements = 8;
  double tolerance = 1e-12;
};

/// Component-wise flux ∫_{C_r} (T n)_i φ_i dS over the cylinder of radius r about
/// the line, n the outward radial normal. The sum of the components is the
/// traction pairing whose limit as r -> 0 vanishes.
inline Vec3 traction_limit_integral(const StraightDislocation& d, double r, const VectorTestFunction& phi,
                                    const QuadratureControl& ctl = {})
{
  if (!(r > d.core_radius()))
    throw InvalidArgument("traction_limit_integral: radius must exceed the core radius");
  const double z0 = phi.support().lo.x3;
  const double z1 = phi.support().hi.x3;

  auto evaluate = [&](int n_theta, int panels) {
    const GaussRule rule(ctl.axial_order);
    Vec3 total;
    const double dz = (z1 - z0) / panels;
    for (int it = 0; it < n_theta; ++it)
    {
      const double theta = 2.0 * std::numbers::pi * (it + 0.5) / n_theta;
      const Vec3 n{std::cos(theta), std::sin(theta), 0.0};
      for (int p = 0; p < panels; ++p)
      {
        total += rule.integrate(
          [&](double z) {
            const Vec3 x{r * n.x1, r * n.x2, z};
            const Vec3 tn = stress(d, x) * n;
            const Vec3 f = phi(x);
            return Vec3{tn.x1 * f.x1, tn.x2 * f.x2, tn.x3 * f.x3};
          },
          z0 + p * dz, z0 + (p + 1) * dz);
      }
    }
    return (2.0 * std::numbers::pi * r / n_theta) * total;
  };

  int n_theta = ctl.theta_points;
  int panels = ctl.axial_panels;
  Vec3 previous = evaluate(n_theta, panels);
  for (int k = 0; k < ctl.max_refinements; ++k)
  {
    n_theta *= 2;
    panels *= 2;
    const Vec3 current = evaluate(n_theta, panels);
    const double scale = std::max(1.0, norm(current));
    if (norm(current - previous) <= ctl.tolerance * scale)
      return current;
    previous = current;
  }
  throw NumericalFailure("traction_limit_integral: quadrature did not converge");
}

struct WeakRotResult
{
  double pairing = 0.0;        // ⟨∇u, rot φ̃⟩ including the tube estimate
  double tube_estimate = 0.0;  // analytic contribution of r < delta
  double delta = 0.0;          // final tube radius
  int refinements = 0;
};

struct WeakRotControl
{
  double initial_delta = 0.1;
  double tolerance = 1e-4; // relative change between successive tube radii
  int max_refinements = 20;
  int radial_panels = 24;
  int radial_order = 8;
  int theta_points = 192;
  int axial_panels = 8;
  int axial_order = 8;
  double fd_step = 1e-3;
};

/// Volume pairing ∫ ∇u : rot φ̃ dx for the regular part of ∇u, computed in
/// cylindrical coordinates outside a tube of radius δ around the line. The tube
/// contribution uses the homogeneity ∇u(x) = |x'|⁻¹ G(θ) with rot φ̃ frozen on
/// the axis. δ is halved until successive pairings differ by < tolerance.
inline WeakRotResult weak_rot_pairing(const StraightDislocation& d, const TensorTestFunction& phit,
                                      const WeakRotControl& ctl = {})
{
  const Box& box = phit.support();
  double rmax = 0.0;
  for (double a : {box.lo.x1, box.hi.x1})
    for (double c : {box.lo.x2, box.hi.x2})
      rmax = std::max(rmax, std::hypot(a, c));
  if (!(rmax > ctl.initial_delta))
    throw InvalidArgument("weak_rot_pairing: support too small for the initial tube radius");

  const GaussRule radial(ctl.radial_order);
  const GaussRule axial(ctl.axial_order);
  const double z0 = box.lo.x3;
  const double z1 = box.hi.x3;
  const double dz = (z1 - z0) / ctl.axial_panels;
  const int nt = ctl.theta_points;
  const double dtheta = 2.0 * std::numbers::pi / nt;

  auto rot_at = [&](const Vec3& x) { return rot_fd(phit, x, ctl.fd_step); };

  // ∫_{a}^{b} r dr ∫ dθ ∫ dz ∇u : rot φ̃, with geometric panels toward the axis.
  auto shell = [&](double a, double b, int panels) {
    double total = 0.0;
    const double ratio = std::pow(b / a, 1.0 / panels);
    double lo = a;
    for (int p = 0; p < panels; ++p)
    {
      const double hi = (p == panels - 1) ? b : lo * ratio;
      total += radial.integrate(
        [&](double r) {
          double ring = 0.0;
          for (int it = 0; it < nt; ++it)
          {
            const double theta = (it + 0.5) * dtheta;
            const double c = std::cos(theta);
            const double s = std::sin(theta);
            for (int q = 0; q < ctl.axial_panels; ++q)
            {
              ring += axial.integrate(
                [&](double z) {
                  const Vec3 x{r * c, r * s, z};
                  if (!box.contains(x))
                    return 0.0;
                  return contract(displacement_gradient(d, x), rot_at(x));
                },
                z0 + q * dz, z0 + (q + 1) * dz);
            }
          }
          return r * ring * dtheta;
        },
        lo, hi);
      lo = hi;
    }
    return total;
  };

  // Tube r < δ: ∫_0^δ r dr (1/r) ∫ G(θ) : rot φ̃(0, 0, z) = δ ∫∫ G : rot φ̃.
  auto tube = [&](double delta) {
    double total = 0.0;
    for (int it = 0; it < nt; ++it)
    {
      const double theta = (it + 0.5) * dtheta;
      const Tensor3 G = displacement_gradient(d, {std::cos(theta), std::sin(theta), 0.0});
      for (int q = 0; q < ctl.axial_panels; ++q)
        total += axial.integrate([&](double z) { return contract(G, rot_at({0.0, 0.0, z})); },
                                 z0 + q * dz, z0 + (q + 1) * dz);
    }
    return delta * total * dtheta;
  };

  double delta = ctl.initial_delta;
  const double outer = shell(delta, rmax, ctl.radial_panels);
  double inner = 0.0; // accumulated shells between the current δ and the initial one
  double previous = outer + tube(delta);
  for (int k = 1; k <= ctl.max_refinements; ++k)
  {
    const double next = 0.5 * delta;
    inner += shell(next, delta, 2);
    delta = next;
    const double t = tube(delta);
    const double current = outer + inner + t;
    if (std::abs(current - previous) <= ctl.tolerance * std::max(std::abs(current), 1e-300))
      return {current, t, delta, k};
    previous = current;
  }
  throw NumericalFailure("weak_rot_pairing: tube refinement did not converge");
}

} // namespace dislosim::analytic

#endif // DISLOSIM_ANALYTIC_HPP
