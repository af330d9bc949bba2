#ifndef DISLOSIM_MEASURES_HPP
#define DISLOSIM_MEASURES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dislosim/errors.hpp"
#include "dislosim/grid.hpp"
#include "dislosim/quadrature.hpp"
#include "dislosim/spectral.hpp"
#include "dislosim/tensor.hpp"
#include "dislosim/test_functions.hpp"

namespace dislosim
{

/// Closed polyline carrying a Burgers vector.
///
/// The last vertex connects back to the first vertex shifted by `period`. A
/// zero period gives an ordinary closed loop; a nonzero period describes a line
/// that closes through the periodic cell (e.g. an infinite straight line).
class DislocationCurve
{
public:
  static constexpr double min_segment = 1e-9;

  DislocationCurve(std::vector<Vec3> vertices, Vec3 burgers, Vec3 period = {})
    : vertices_(std::move(vertices)), burgers_(burgers), period_(period)
  {
    if (!(norm(burgers_) > 0.0) || !is_finite(burgers_))
      throw InvalidArgument("DislocationCurve: Burgers vector must be nonzero and finite");
    if (!is_periodic() && vertices_.size() < 3)
      throw InvalidArgument("DislocationCurve: a closed loop needs at least 3 vertices");
    if (vertices_.empty())
      throw InvalidArgument("DislocationCurve: no vertices");
    for (const auto& v : vertices_)
      if (!is_finite(v))
        throw InvalidArgument("DislocationCurve: non-finite vertex");
    for (std::size_t i = 0; i < segment_count(); ++i)
      if (!(norm(segment_end(i) - segment_start(i)) > min_segment))
        throw InvalidArgument("DislocationCurve: segment " + std::to_string(i) + " is degenerate");
  }

  const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  const Vec3& burgers() const noexcept { return burgers_; }
  Vec3 burgers_direction() const { return normalized(burgers_); }
  const Vec3& period() const noexcept { return period_; }
  bool is_periodic() const { return norm(period_) > 0.0; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t segment_count() const noexcept { return vertices_.size(); }

  const Vec3& segment_start(std::size_t i) const { return vertices_[i]; }
  Vec3 segment_end(std::size_t i) const
  {
    return i + 1 < vertices_.size() ? vertices_[i + 1] : vertices_[0] + period_;
  }

  /// Vertex i with the periodic shift applied for out-of-range neighbours.
  Vec3 vertex(std::ptrdiff_t i) const
  {
    const auto n = static_cast<std::ptrdiff_t>(vertices_.size());
    std::ptrdiff_t wraps = i >= 0 ? i / n : -((-i + n - 1) / n);
    return vertices_[static_cast<std::size_t>(i - wraps * n)] + static_cast<double>(wraps) * period_;
  }

  Vec3 segment_tangent(std::size_t i) const { return normalized(segment_end(i) - segment_start(i)); }
  double segment_length(std::size_t i) const { return norm(segment_end(i) - segment_start(i)); }

  double length() const
  {
    double s = 0.0;
    for (std::size_t i = 0; i < segment_count(); ++i)
      s += segment_length(i);
    return s;
  }

  double min_segment_length() const
  {
    double m = segment_length(0);
    for (std::size_t i = 1; i < segment_count(); ++i)
      m = std::min(m, segment_length(i));
    return m;
  }

  /// Angle-bisector tangent at vertex i (normalized sum of adjacent unit tangents).
  Vec3 node_tangent(std::size_t i) const
  {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const Vec3 before = normalized(vertex(ii) - vertex(ii - 1));
    const Vec3 after = normalized(vertex(ii + 1) - vertex(ii));
    const Vec3 s = before + after;
    if (!(norm(s) > 1e-12))
      throw InvalidArgument("DislocationCurve: cusp at vertex " + std::to_string(i));
    return normalized(s);
  }

  DislocationCurve with_vertices(std::vector<Vec3> v) const { return {std::move(v), burgers_, period_}; }

private:
  std::vector<Vec3> vertices_;
  Vec3 burgers_;
  Vec3 period_;
};

/// ⟨ρ_ℓ, φ⟩ = |b| ∫_ℓ τ·φ ds, Gauss-Legendre per segment.
inline double pair_vector(const DislocationCurve& c, const VectorTestFunction& phi, int order = 4)
{
  const GaussRule rule(order);
  double total = 0.0;
  for (std::size_t s = 0; s < c.segment_count(); ++s)
  {
    const Vec3 a = c.segment_start(s);
    const Vec3 d = c.segment_end(s) - a;
    const Vec3 tau = normalized(d);
    total += norm(d) * rule.integrate([&](double t) { return dot(tau, phi(a + t * d)); }, 0.0, 1.0);
  }
  return norm(c.burgers()) * total;
}

/// ⟨b̂⊗ρ_ℓ, φ̃⟩ = ∫_ℓ (b⊗τ):φ̃ ds.
inline double pair_tensor(const DislocationCurve& c, const TensorTestFunction& phit, int order = 4)
{
  const GaussRule rule(order);
  double total = 0.0;
  for (std::size_t s = 0; s < c.segment_count(); ++s)
  {
    const Vec3 a = c.segment_start(s);
    const Vec3 d = c.segment_end(s) - a;
    const Tensor3 nye = outer(c.burgers(), normalized(d));
    total += norm(d) * rule.integrate([&](double t) { return contract(nye, phit(a + t * d)); }, 0.0, 1.0);
  }
  return total;
}

/// Same pairing through the total-variation form ⟨|ρ|, (b̂⊗τ):φ̃⟩, |ρ| = |b| H¹⌊ℓ.
inline double pair_tensor_by_variation(const DislocationCurve& c, const TensorTestFunction& phit, int order = 4)
{
  const GaussRule rule(order);
  const Vec3 b_hat = c.burgers_direction();
  double total = 0.0;
  for (std::size_t s = 0; s < c.segment_count(); ++s)
  {
    const Vec3 a = c.segment_start(s);
    const Vec3 d = c.segment_end(s) - a;
    const Tensor3 dir = outer(b_hat, normalized(d));
    total += norm(d) * rule.integrate([&](double t) { return contract(dir, phit(a + t * d)); }, 0.0, 1.0);
  }
  return norm(c.burgers()) * total;
}

/// Gridded dislocation density on a periodic cell.
struct DensityGrid
{
  VectorField rho;    // τ|ρ| per unit volume
  ScalarField weight; // |ρ| per unit volume

  explicit DensityGrid(const PeriodicCell& cell) : rho(cell), weight(cell) {}

  const PeriodicCell& cell() const noexcept { return rho.cell; }

  /// Unit line direction at node n; zero where the vector density vanishes.
  Vec3 tau(std::size_t n) const
  {
    const double m = norm(rho.data[n]);
    return m > 0.0 ? rho.data[n] / m : Vec3{};
  }

  /// Σ weight dV, the total variation |ρ|(cell).
  double total_weight() const { return integrate(weight); }
};

struct RasterizeOptions
{
  /// Sub-samples per grid spacing along each segment.
  double samples_per_spacing = 4.0;
  /// Remove the gradient part left by the deposition kernel.
  bool solenoidal_projection = true;
};

namespace detail
{
template <class T>
void deposit_trilinear(GridField<T>& f, const Vec3& x, const T& value)
{
  const PeriodicCell& c = f.cell;
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int a = 0; a < 3; ++a)
  {
    const double s = x[a] / c.spacing(a);
    const double fl = std::floor(s);
    base[a] = static_cast<int>(fl);
    frac[a] = s - fl;
  }
  const double inv_vol = 1.0 / c.node_volume();
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk)
      {
        const double w = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) *
                         (dk ? frac[2] : 1.0 - frac[2]);
        f.at(base[0] + di, base[1] + dj, base[2] + dk) += (w * inv_vol) * value;
      }
}
} // namespace detail

/// Deposits |b| τ ds of every curve onto the grid with cloud-in-cell weights.
/// Curves are wrapped periodically into the cell.
inline DensityGrid rasterize(std::span<const DislocationCurve> curves, const PeriodicCell& cell,
                             const RasterizeOptions& opt = {})
{
  DensityGrid g(cell);
  const double h = cell.min_spacing();
  for (const auto& c : curves)
  {
    const double bn = norm(c.burgers());
    for (std::size_t s = 0; s < c.segment_count(); ++s)
    {
      const Vec3 a = c.segment_start(s);
      const Vec3 d = c.segment_end(s) - a;
      const double len = norm(d);
      const Vec3 tau = d / len;
      const int m = std::max(1, static_cast<int>(std::ceil(len * opt.samples_per_spacing / h)));
      const double ds = len / m;
      for (int q = 0; q < m; ++q)
      {
        const Vec3 x = a + ((q + 0.5) / m) * d;
        detail::deposit_trilinear(g.rho, x, (bn * ds) * tau);
        detail::deposit_trilinear(g.weight, x, bn * ds);
      }
    }
  }
  if (opt.solenoidal_projection && !curves.empty())
  {
    Spectral sp(cell);
    g.rho = sp.solenoidal_projection(g.rho);
  }
  return g;
}

inline DensityGrid rasterize(const DislocationCurve& curve, const PeriodicCell& cell, const RasterizeOptions& opt = {})
{
  return rasterize(std::span<const DislocationCurve>(&curve, 1), cell, opt);
}

/// Σ_n ρ(x_n)·φ(x_n) dV, the grid version of ⟨ρ, φ⟩.
inline double pair_vector(const DensityGrid& g, const VectorTestFunction& phi)
{
  double total = 0.0;
  for (std::size_t n = 0; n < g.rho.size(); ++n)
    total += dot(g.rho.data[n], phi(g.cell().position(n)));
  return total * g.cell().node_volume();
}

/// Relative spectral divergence ‖div ρ‖ / (Σ_j ‖∂_j ρ_j‖²)^{1/2}; zero for a zero field.
inline double relative_divergence(const DensityGrid& g)
{
  Spectral sp(g.cell());
  const double div = l2_norm(sp.divergence(g.rho));
  double scale = 0.0;
  for (int j = 0; j < 3; ++j)
  {
    const double t = l2_norm(sp.derivative(Spectral::component(g.rho, j), j));
    scale += t * t;
  }
  scale = std::sqrt(scale);
  return scale > 0.0 ? div / scale : 0.0;
}

/// Relative L² mismatch between the spectral curl of h and the vector density,
/// normalized by the larger of the two norms (zero when both vanish).
inline double curl_consistency(const VectorField& h, const DensityGrid& rho)
{
  require_same_cell(h.cell, rho.cell(), "curl_consistency");
  Spectral sp(h.cell);
  const VectorField c = sp.curl(h);
  const double denom = std::max(l2_norm(c), l2_norm(rho.rho));
  if (denom == 0.0)
    return 0.0;
  return l2_norm(c - rho.rho) / denom;
}

} // namespace dislosim

#endif // DISLOSIM_MEASURES_HPP
