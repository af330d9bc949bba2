#ifndef DISLOSIM_MOBILITY_HPP
#define DISLOSIM_MOBILITY_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <variant>
#include <vector>

#include "dislosim/errors.hpp"
#include "dislosim/tensor.hpp"

namespace dislosim
{

/// Odd constitutive function f with s·f(s) >= 0.
///
/// Either the power law f(s) = C |s|^{γ-1} s, or a piecewise-linear table that
/// passed the sign and oddness validator.
class MobilityLaw
{
public:
  MobilityLaw(double C, double gamma) : law_(Power{C, gamma})
  {
    if (!(C > 0.0) || !std::isfinite(C))
      throw InvalidArgument("MobilityLaw: C must be positive");
    if (!(gamma >= 1.0) || !std::isfinite(gamma))
      throw InvalidArgument("MobilityLaw: gamma must be >= 1");
  }

  /// Tabulated law through (s_i, f_i), linearly interpolated and held constant
  /// beyond the end points. The table must be odd, contain s = 0, and satisfy
  /// s f(s) >= 0.
  static MobilityLaw tabulated(std::vector<std::pair<double, double>> points)
  {
    std::sort(points.begin(), points.end());
    if (points.size() < 3)
      throw InvalidArgument("MobilityLaw: table needs at least three points");
    bool has_zero = false;
    for (const auto& [s, f] : points)
    {
      if (!std::isfinite(s) || !std::isfinite(f))
        throw InvalidArgument("MobilityLaw: non-finite table entry");
      if (s * f < 0.0)
        throw InvalidArgument("MobilityLaw: table violates s*f(s) >= 0");
      if (s == 0.0)
      {
        has_zero = true;
        if (f != 0.0)
          throw InvalidArgument("MobilityLaw: table requires f(0) = 0");
      }
    }
    if (!has_zero)
      throw InvalidArgument("MobilityLaw: table must contain s = 0");
    for (std::size_t i = 0; i < points.size(); ++i)
    {
      const auto& p = points[i];
      const auto& q = points[points.size() - 1 - i];
      const double scale = std::max({1.0, std::abs(p.first), std::abs(p.second)});
      if (std::abs(p.first + q.first) > 1e-12 * scale || std::abs(p.second + q.second) > 1e-12 * scale)
        throw InvalidArgument("MobilityLaw: table is not odd");
    }
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i].first == points[i - 1].first)
        throw InvalidArgument("MobilityLaw: duplicate abscissa in table");
    return MobilityLaw(Table{std::move(points)});
  }

  double operator()(double s) const
  {
    return std::visit([s](const auto& law) { return law(s); }, law_);
  }

  /// Power-law parameters; meaningful only for the power law.
  bool is_power_law() const { return std::holds_alternative<Power>(law_); }
  double C() const { return is_power_law() ? std::get<Power>(law_).C : 0.0; }
  double gamma() const { return is_power_law() ? std::get<Power>(law_).gamma : 0.0; }

private:
  struct Power
  {
    double C;
    double gamma;
    double operator()(double s) const
    {
      if (gamma == 1.0)
        return C * s;
      return C * std::pow(std::abs(s), gamma - 1.0) * s;
    }
  };

  struct Table
  {
    std::vector<std::pair<double, double>> points;
    double operator()(double s) const
    {
      if (s <= points.front().first)
        return points.front().second;
      if (s >= points.back().first)
        return points.back().second;
      auto it = std::upper_bound(points.begin(), points.end(), s,
                                 [](double v, const auto& p) { return v < p.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double t = (s - lo.first) / (hi.first - lo.first);
      return lo.second + t * (hi.second - lo.second);
    }
  };

  explicit MobilityLaw(Table t) : law_(std::move(t)) {}

  std::variant<Power, Table> law_;
};

inline constexpr double default_screw_tolerance = 1e-8;

struct PeachKoehlerSample
{
  Vec3 tau;
  SymTensor3 stress;
  Vec3 burgers;
};

/// Peach-Koehler force F = τ × T b.
inline Vec3 peach_koehler(const Vec3& tau, const SymTensor3& stress, const Vec3& b)
{
  return cross(tau, stress * b);
}

inline Vec3 peach_koehler(const PeachKoehlerSample& s)
{
  if (std::abs(norm(s.tau) - 1.0) > 1e-12)
    throw InvalidArgument("peach_koehler: tau must be a unit vector");
  return peach_koehler(s.tau, s.stress, s.burgers);
}

namespace detail
{
inline double checked_screw_norm(const Vec3& tau, const Vec3& b, double eps_rel)
{
  const double m = norm(cross(b, tau));
  if (!(m > eps_rel * norm(b)))
    throw ScrewSingularity("screw orientation: tangent is parallel to the Burgers vector");
  return m;
}
} // namespace detail

/// α̃(τ, ξ) = b / |b×τ| · f(b·ξ / |b×τ|).
inline Vec3 alpha_tilde(const MobilityLaw& f, const Vec3& tau, const Vec3& xi, const Vec3& b,
                        double eps_screw = default_screw_tolerance)
{
  const double m = detail::checked_screw_norm(tau, b, eps_screw);
  return (f(dot(b, xi) / m) / m) * b;
}

/// Unit vector of proj_τ b, the glide direction of the line at orientation τ.
inline Vec3 glide_direction(const Vec3& tau, const Vec3& b, double eps_screw = default_screw_tolerance)
{
  detail::checked_screw_norm(tau, b, eps_screw);
  return normalized(project_out(b, tau));
}

/// v = f(b^⊥τ · F) b^⊥τ with F the Peach-Koehler force.
inline Vec3 normal_velocity(const MobilityLaw& f, const Vec3& tau, const SymTensor3& stress, const Vec3& b,
                            double eps_screw = default_screw_tolerance)
{
  const Vec3 p = glide_direction(tau, b, eps_screw);
  const Vec3 F = peach_koehler(tau, stress, b);
  return f(dot(p, F)) * p;
}

/// v = proj_τ α̃(τ, F), the projected form of the same law.
inline Vec3 normal_velocity_projected(const MobilityLaw& f, const Vec3& tau, const SymTensor3& stress,
                                      const Vec3& b, double eps_screw = default_screw_tolerance)
{
  const Vec3 F = peach_koehler(tau, stress, b);
  return project_out(alpha_tilde(f, tau, F, b, eps_screw), tau);
}

/// (T b̂)·α, the local dissipation rate of a plastic-distortion rate α.
inline double dissipation_density(const SymTensor3& stress, const Vec3& b_hat, const Vec3& alpha)
{
  return dot(stress * b_hat, alpha);
}

/// True iff v is parallel to proj_τ b to relative tolerance 1e-10.
inline bool glide_direction_check(const Vec3& tau, const Vec3& b, const Vec3& v,
                                  double eps_screw = default_screw_tolerance)
{
  const double vn = norm(v);
  if (vn == 0.0)
    return true;
  const Vec3 p = glide_direction(tau, b, eps_screw);
  return norm(v - dot(v, p) * p) <= 1e-10 * vn;
}

} // namespace dislosim

#endif // DISLOSIM_MOBILITY_HPP
