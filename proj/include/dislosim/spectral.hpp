#ifndef DISLOSIM_SPECTRAL_HPP
#define DISLOSIM_SPECTRAL_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "dislosim/grid.hpp"

namespace dislosim
{

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

namespace detail
{
// The FFTW planner is not re-entrant.
inline std::mutex& fftw_planner_mutex()
{
  static std::mutex m;
  return m;
}

struct FftwBuffer
{
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

struct FftwPlan
{
  fftw_plan plan = nullptr;
  FftwPlan() = default;
  explicit FftwPlan(fftw_plan p) : plan(p) {}
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  FftwPlan(FftwPlan&& o) noexcept : plan(o.plan) { o.plan = nullptr; }
  FftwPlan& operator=(FftwPlan&& o) noexcept
  {
    std::swap(plan, o.plan);
    return *this;
  }
  ~FftwPlan()
  {
    if (plan)
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};
} // namespace detail

/// Fourier differentiation on a periodic cell.
///
/// First-derivative wavenumbers drop the Nyquist mode, so the discrete
/// operators satisfy div∘curl = 0 and curl∘grad = 0 to rounding. An instance
/// owns scratch buffers and must not be shared between threads.
class Spectral
{
public:
  explicit Spectral(const PeriodicCell& cell) : cell_(cell), n_(cell.size())
  {
    buffer_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_)));
    const auto& r = cell.resolution();
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      // FFTW is row-major with the last index fastest; our x1 is fastest.
      forward_ = detail::FftwPlan(
        fftw_plan_dft_3d(r[2], r[1], r[0], buffer_.get(), buffer_.get(), FFTW_FORWARD, FFTW_ESTIMATE));
      backward_ = detail::FftwPlan(
        fftw_plan_dft_3d(r[2], r[1], r[0], buffer_.get(), buffer_.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
    }
    for (int a = 0; a < 3; ++a)
    {
      const int n = r[a];
      k_[a].resize(n);
      for (int m = 0; m < n; ++m)
      {
        const int s = m <= n / 2 ? m : m - n;
        k_[a][m] = (m == n / 2) ? 0.0 : 2.0 * std::numbers::pi * s / cell.length(a);
      }
    }
  }

  const PeriodicCell& cell() const noexcept { return cell_; }

  /// Wave vector of spectral index n (Nyquist components zeroed).
  Vec3 wavevector(std::size_t n) const
  {
    const auto c = cell_.coordinates(n);
    return {k_[0][c[0]], k_[1][c[1]], k_[2][c[2]]};
  }

  Spectrum forward(const ScalarField& f)
  {
    require_same_cell(cell_, f.cell, "Spectral::forward");
    auto* b = reinterpret_cast<Complex*>(buffer_.get());
    for (std::size_t i = 0; i < n_; ++i)
      b[i] = f.data[i];
    fftw_execute(forward_.plan);
    return Spectrum(b, b + n_);
  }

  /// Inverse transform, keeping the real part.
  ScalarField inverse(const Spectrum& s)
  {
    auto* b = reinterpret_cast<Complex*>(buffer_.get());
    std::copy(s.begin(), s.end(), b);
    fftw_execute(backward_.plan);
    ScalarField f(cell_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i)
      f.data[i] = b[i].real() * scale;
    return f;
  }

  std::array<Spectrum, 3> forward(const VectorField& v)
  {
    std::array<Spectrum, 3> out;
    for (int c = 0; c < 3; ++c)
      out[c] = forward(component(v, c));
    return out;
  }

  VectorField inverse(const std::array<Spectrum, 3>& s)
  {
    VectorField v(cell_);
    for (int c = 0; c < 3; ++c)
    {
      const ScalarField f = inverse(s[c]);
      for (std::size_t i = 0; i < n_; ++i)
        v.data[i][c] = f.data[i];
    }
    return v;
  }

  ScalarField derivative(const ScalarField& f, int axis)
  {
    Spectrum s = forward(f);
    for (std::size_t i = 0; i < n_; ++i)
      s[i] *= Complex(0.0, wavevector(i)[axis]);
    return inverse(s);
  }

  VectorField gradient(const ScalarField& f)
  {
    const Spectrum s = forward(f);
    std::array<Spectrum, 3> g{s, s, s};
    for (std::size_t i = 0; i < n_; ++i)
    {
      const Vec3 k = wavevector(i);
      for (int a = 0; a < 3; ++a)
        g[a][i] *= Complex(0.0, k[a]);
    }
    return inverse(g);
  }

  ScalarField divergence(const VectorField& v)
  {
    const auto s = forward(v);
    Spectrum d(n_);
    for (std::size_t i = 0; i < n_; ++i)
    {
      const Vec3 k = wavevector(i);
      d[i] = Complex(0.0, 1.0) * (k.x1 * s[0][i] + k.x2 * s[1][i] + k.x3 * s[2][i]);
    }
    return inverse(d);
  }

  /// Row-wise divergence (div T)_i = Σ_j ∂_j T_ij.
  VectorField divergence(const SymTensorField& t)
  {
    std::array<Spectrum, 3> d;
    for (auto& c : d)
      c.assign(n_, Complex(0.0));
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
      {
        ScalarField comp(cell_);
        for (std::size_t n = 0; n < n_; ++n)
          comp.data[n] = t.data[n](i, j);
        const Spectrum s = forward(comp);
        for (std::size_t n = 0; n < n_; ++n)
        {
          const Vec3 k = wavevector(n);
          d[i][n] += Complex(0.0, k[j]) * s[n];
          if (j != i)
            d[j][n] += Complex(0.0, k[i]) * s[n];
        }
      }
    return inverse(d);
  }

  VectorField curl(const VectorField& v)
  {
    const auto s = forward(v);
    std::array<Spectrum, 3> c;
    for (auto& x : c)
      x.resize(n_);
    const Complex I(0.0, 1.0);
    for (std::size_t n = 0; n < n_; ++n)
    {
      const Vec3 k = wavevector(n);
      c[0][n] = I * (k.x2 * s[2][n] - k.x3 * s[1][n]);
      c[1][n] = I * (k.x3 * s[0][n] - k.x1 * s[2][n]);
      c[2][n] = I * (k.x1 * s[1][n] - k.x2 * s[0][n]);
    }
    return inverse(c);
  }

  /// h with curl h = rho and div h = 0, for solenoidal zero-mean rho:
  /// ĥ = i k × ρ̂ / |k|².
  VectorField inverse_curl(const VectorField& rho)
  {
    const auto s = forward(rho);
    std::array<Spectrum, 3> h;
    for (auto& x : h)
      x.assign(n_, Complex(0.0));
    const Complex I(0.0, 1.0);
    for (std::size_t n = 0; n < n_; ++n)
    {
      const Vec3 k = wavevector(n);
      const double k2 = dot(k, k);
      if (k2 == 0.0)
        continue;
      h[0][n] = I * (k.x2 * s[2][n] - k.x3 * s[1][n]) / k2;
      h[1][n] = I * (k.x3 * s[0][n] - k.x1 * s[2][n]) / k2;
      h[2][n] = I * (k.x1 * s[1][n] - k.x2 * s[0][n]) / k2;
    }
    return inverse(h);
  }

  /// Removes the gradient part of v (Helmholtz-Leray projection); the mean is kept.
  VectorField solenoidal_projection(const VectorField& v)
  {
    auto s = forward(v);
    for (std::size_t n = 0; n < n_; ++n)
    {
      const Vec3 k = wavevector(n);
      const double k2 = dot(k, k);
      if (k2 == 0.0)
        continue;
      const Complex kv = (k.x1 * s[0][n] + k.x2 * s[1][n] + k.x3 * s[2][n]) / k2;
      for (int a = 0; a < 3; ++a)
        s[a][n] -= k[a] * kv;
    }
    return inverse(s);
  }

  static ScalarField component(const VectorField& v, int c)
  {
    ScalarField f(v.cell);
    for (std::size_t i = 0; i < v.size(); ++i)
      f.data[i] = v.data[i][c];
    return f;
  }

private:
  PeriodicCell cell_;
  std::size_t n_;
  std::unique_ptr<fftw_complex, detail::FftwBuffer> buffer_;
  detail::FftwPlan forward_;
  detail::FftwPlan backward_;
  std::array<std::vector<double>, 3> k_;
};

} // namespace dislosim

#endif // DISLOSIM_SPECTRAL_HPP
