#ifndef DISLOSIM_CONTINUUM_HPP
#define DISLOSIM_CONTINUUM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "dislosim/errors.hpp"
#include "dislosim/grid.hpp"
#include "dislosim/measures.hpp"
#include "dislosim/mobility.hpp"
#include "dislosim/spectral.hpp"
#include "dislosim/tensor.hpp"

namespace dislosim
{

/// Slip plane normal g with an in-plane Burgers vector b and slip tensor m = ε(b̂⊗g).
class SlipSystem
{
public:
  SlipSystem(const Vec3& g, const Vec3& b) : g_(g), b_(b)
  {
    if (std::abs(norm(g) - 1.0) > 1e-12)
      throw InvalidArgument("SlipSystem: slip-plane normal g must be a unit vector");
    if (!(norm(b) > 0.0))
      throw InvalidArgument("SlipSystem: Burgers vector must be nonzero");
    if (std::abs(dot(b, g)) > 1e-12 * norm(b))
      throw InvalidArgument("SlipSystem: b.g != 0; the Burgers vector must lie in the slip plane");
    m_ = slip_tensor(normalized(b), g);
  }

  const Vec3& g() const noexcept { return g_; }
  const Vec3& b() const noexcept { return b_; }
  Vec3 b_hat() const { return normalized(b_); }
  const SymTensor3& m() const noexcept { return m_; }

  /// Index of the cell axis parallel to g, or -1 when g is oblique.
  int normal_axis() const
  {
    for (int a = 0; a < 3; ++a)
      if (std::abs(std::abs(g_[a]) - 1.0) <= 1e-12)
        return a;
    return -1;
  }

private:
  Vec3 g_;
  Vec3 b_;
  SymTensor3 m_;
};

struct SlipField
{
  ScalarField eps_p;
  SlipSystem system;
};

struct PlasticDistortionField
{
  VectorField hp;
  Vec3 b_hat;

  /// max |b̂·h_p| over the nodes.
  double volume_residual() const
  {
    double r = 0.0;
    for (const auto& v : hp.data)
      r = std::max(r, std::abs(dot(b_hat, v)));
    return r;
  }
};

struct MechanicalState
{
  SymTensorField stress;
  SymTensor3 mean_stress;
  Elasticity elasticity;
  double free_energy = 0.0;
  /// Periodic displacement fluctuation; the full field is mean_strain·x + u.
  VectorField displacement;
  SymTensor3 mean_strain;
  /// Relative spectral equilibrium residual of `stress`.
  double div_residual = 0.0;
};

inline SymTensorField plastic_strain(const PlasticDistortionField& f)
{
  SymTensorField e(f.hp.cell);
  for (std::size_t n = 0; n < e.size(); ++n)
    e.data[n] = sym_outer(f.b_hat, f.hp.data[n]);
  return e;
}

inline SymTensorField plastic_strain(const SlipField& f)
{
  SymTensorField e(f.eps_p.cell);
  for (std::size_t n = 0; n < e.size(); ++n)
    e.data[n] = f.eps_p.data[n] * f.system.m();
  return e;
}

/// ψ = ½ ∫ T : D⁻¹ T over the cell.
inline double free_energy(const SymTensorField& stress, const Elasticity& D)
{
  double s = 0.0;
  for (const auto& t : stress.data)
    s += contract(t, apply_compliance(D, t));
  return 0.5 * s * stress.cell.node_volume();
}

/// ‖div T‖ / ‖∇T‖ with spectral derivatives; zero for uniform T.
inline double equilibrium_residual(const SymTensorField& T)
{
  Spectral sp(T.cell);
  const double div = l2_norm(sp.divergence(T));
  double scale = 0.0;
  for (int c = 0; c < 6; ++c)
  {
    ScalarField f(T.cell);
    for (std::size_t n = 0; n < f.size(); ++n)
      f.data[n] = T.data[n](c < 3 ? c : (c == 5 ? 1 : 0), c < 3 ? c : (c == 3 ? 1 : 2));
    const double w = c < 3 ? 1.0 : 2.0;
    for (int k = 0; k < 3; ++k)
    {
      const double d = l2_norm(sp.derivative(f, k));
      scale += w * d * d;
    }
  }
  scale = std::sqrt(scale);
  return scale > 0.0 ? div / scale : 0.0;
}

namespace detail
{
using Stiffness4 = std::array<double, 81>;

inline Stiffness4 stiffness_tensor(const Elasticity& D)
{
  static constexpr int mandel_index[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
  const Matrix6 M = mandel_matrix(D);
  Stiffness4 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
        {
          const double wi = i == j ? 1.0 : std::numbers::sqrt2;
          const double wk = k == l ? 1.0 : std::numbers::sqrt2;
          c[27 * i + 9 * j + 3 * k + l] = M(mandel_index[i][j], mandel_index[k][l]) / (wi * wk);
        }
  return c;
}

inline SymTensor3 sym_component_unit(int c)
{
  SymTensor3 t;
  static constexpr int ij[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  t(ij[c][0], ij[c][1]) = 1.0;
  return t;
}

inline double sym_component(const SymTensor3& t, int c)
{
  static constexpr int ij[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  return t(ij[c][0], ij[c][1]);
}
} // namespace detail

/// Stress T = D(ε(∇u) + E − ε*) for a periodic fluctuation u, mean strain E and
/// eigenstrain field ε*, with spectral derivatives.
inline SymTensorField stress_from_strain(const Elasticity& D, const VectorField& u, const SymTensor3& mean_strain,
                                         const SymTensorField& eps_star)
{
  require_same_cell(u.cell, eps_star.cell, "stress_from_strain");
  Spectral sp(u.cell);
  std::array<VectorField, 3> grad{VectorField(u.cell), VectorField(u.cell), VectorField(u.cell)};
  for (int i = 0; i < 3; ++i)
    grad[i] = sp.gradient(Spectral::component(u, i));
  SymTensorField T(u.cell);
  for (std::size_t n = 0; n < T.size(); ++n)
  {
    Tensor3 g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        g(i, j) = grad[i].data[n][j];
    T.data[n] = apply_elasticity(D, strain(g) + mean_strain - eps_star.data[n]);
  }
  return T;
}

/// Quasi-static periodic elasticity with eigenstrain: −div T = 0,
/// T = D(ε(∇u) − ε*), ⟨T⟩ = mean_stress.
///
/// Solved mode by mode with the acoustic tensor K(k) = D_ijkl k_j k_l, which is
/// exact for any homogeneous positive definite D.
inline MechanicalState solve_elasticity(const PeriodicCell& cell, const Elasticity& D,
                                        const SymTensorField& eps_star, const SymTensor3& mean_stress)
{
  require_same_cell(cell, eps_star.cell, "solve_elasticity");
  for (const auto& e : eps_star.data)
    if (!is_finite(e))
      throw NumericalFailure("solve_elasticity: non-finite plastic strain");
  const std::size_t N = cell.size();
  Spectral sp(cell);
  const auto C = detail::stiffness_tensor(D);

  // polarization P = D ε*
  std::array<Spectrum, 6> P;
  {
    std::array<ScalarField, 6> comp{ScalarField(cell), ScalarField(cell), ScalarField(cell),
                                    ScalarField(cell), ScalarField(cell), ScalarField(cell)};
    for (std::size_t n = 0; n < N; ++n)
    {
      const SymTensor3 p = apply_elasticity(D, eps_star.data[n]);
      for (int c = 0; c < 6; ++c)
        comp[c].data[n] = detail::sym_component(p, c);
    }
    for (int c = 0; c < 6; ++c)
      P[c] = sp.forward(comp[c]);
  }

  std::array<Spectrum, 3> U;
  for (auto& x : U)
    x.assign(N, Complex(0.0));
  std::array<Spectrum, 6> S;
  for (auto& x : S)
    x.assign(N, Complex(0.0));
  const Complex I(0.0, 1.0);
  for (std::size_t n = 1; n < N; ++n)
  {
    const Vec3 k = sp.wavevector(n);
    std::array<Complex, 6> p{};
    for (int c = 0; c < 6; ++c)
      p[c] = P[c][n];
    auto Pij = [&](int i, int j) -> Complex {
      if (i == j)
        return p[i];
      const int s = i + j;
      return s == 1 ? p[3] : (s == 2 ? p[4] : p[5]);
    };
    Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i)
      for (int kk = 0; kk < 3; ++kk)
        for (int j = 0; j < 3; ++j)
          for (int l = 0; l < 3; ++l)
            K(i, kk) += C[27 * i + 9 * j + 3 * kk + l] * k[j] * k[l];
    if (dot(k, k) > 0.0)
    {
      Eigen::Vector3cd rhs;
      for (int i = 0; i < 3; ++i)
        rhs(i) = Pij(i, 0) * k.x1 + Pij(i, 1) * k.x2 + Pij(i, 2) * k.x3;
      const Eigen::Vector3cd u = -I * (K.inverse().cast<Complex>() * rhs);
      for (int i = 0; i < 3; ++i)
        U[i][n] = u(i);
      // T̂ = D ε(i û⊗k) − P̂, applied to real and imaginary parts separately
      SymTensor3 er, ei;
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
        {
          const Complex e = 0.5 * I * (u(i) * k[j] + u(j) * k[i]);
          er(i, j) = e.real();
          ei(i, j) = e.imag();
        }
      const SymTensor3 tr = apply_elasticity(D, er);
      const SymTensor3 ti = apply_elasticity(D, ei);
      for (int c = 0; c < 6; ++c)
        S[c][n] = Complex(detail::sym_component(tr, c), detail::sym_component(ti, c)) - p[c];
    }
    else
    {
      for (int c = 0; c < 6; ++c)
        S[c][n] = -p[c];
    }
  }

  MechanicalState st{SymTensorField(cell), mean_stress, D, 0.0, VectorField(cell), {}, 0.0};
  st.displacement = sp.inverse(U);
  for (int c = 0; c < 6; ++c)
  {
    const ScalarField f = sp.inverse(S[c]);
    const SymTensor3 unit = detail::sym_component_unit(c);
    const double m = detail::sym_component(mean_stress, c);
    for (std::size_t n = 0; n < N; ++n)
      st.stress.data[n] += (f.data[n] + m) * unit;
  }
  st.mean_strain = apply_compliance(D, mean_stress) + mean(eps_star);
  st.free_energy = free_energy(st.stress, D);
  st.div_residual = equilibrium_residual(st.stress);
  return st;
}

inline MechanicalState solve_elasticity(const PlasticDistortionField& hp, const Elasticity& D,
                                        const SymTensor3& mean_stress)
{
  return solve_elasticity(hp.hp.cell, D, plastic_strain(hp), mean_stress);
}

inline MechanicalState solve_elasticity(const SlipField& sf, const Elasticity& D, const SymTensor3& mean_stress)
{
  return solve_elasticity(sf.eps_p.cell, D, plastic_strain(sf), mean_stress);
}

/// T = D(ε(∇u) + E − ε(b̂⊗h_p)).
inline SymTensorField stress_from_fields(const Elasticity& D, const VectorField& u, const SymTensor3& mean_strain,
                                         const PlasticDistortionField& hp)
{
  return stress_from_strain(D, u, mean_strain, plastic_strain(hp));
}

struct GaugePair
{
  VectorField u;
  PlasticDistortionField hp;
};

/// (u, h_p) -> (u + b̂Γ, h_p + ∇Γ); the stress is unchanged.
inline GaugePair gauge_transform(const VectorField& u, const PlasticDistortionField& hp, const ScalarField& gamma)
{
  require_same_cell(u.cell, hp.hp.cell, "gauge_transform");
  require_same_cell(u.cell, gamma.cell, "gauge_transform");
  Spectral sp(u.cell);
  const VectorField grad = sp.gradient(gamma);
  GaugePair out{u, hp};
  for (std::size_t n = 0; n < u.size(); ++n)
  {
    out.u.data[n] += gamma.data[n] * hp.b_hat;
    out.hp.hp.data[n] += grad.data[n];
  }
  return out;
}

struct EvolveOptions
{
  double cfl = 0.5;
  /// Freeze threshold for the direction field of the h_p law.
  double eps_dir = 1e-10;
  /// When set, the slip law uses this constant in place of |∇_g ε_p|.
  std::optional<double> frozen_gradient;
};

namespace detail
{
[[noreturn]] inline void throw_cfl(const char* who, double dt, double fmax, double limit)
{
  const double suggested = limit / fmax;
  std::ostringstream os;
  os << who << ": CFL violated (dt*max|f| = " << dt * fmax << " > " << limit << "); use dt <= " << suggested;
  throw CflViolation(os.str(), suggested);
}
} // namespace detail

/// Rate ∂_t h_p = f(n·Tb) n |rot h_p| with n = (b×τ)/|b×τ| = −∂_b̂h_p/|∂_b̂h_p|.
/// Nodes with |∂_b̂h_p| < eps_dir are frozen. The rate is orthogonal to b̂.
inline VectorField hp_rate(const PlasticDistortionField& f, const MechanicalState& state, const MobilityLaw& law,
                           const Vec3& burgers, const EvolveOptions& opt = {})
{
  const PeriodicCell& cell = f.hp.cell;
  require_same_cell(cell, state.stress.cell, "hp_rate");
  Spectral sp(cell);
  const VectorField rot = sp.curl(f.hp);
  // ∂_b̂ h_p, the directional derivative of every component
  VectorField dir(cell);
  for (int c = 0; c < 3; ++c)
  {
    Spectrum s = sp.forward(Spectral::component(f.hp, c));
    for (std::size_t n = 0; n < s.size(); ++n)
      s[n] *= Complex(0.0, dot(sp.wavevector(n), f.b_hat));
    const ScalarField d = sp.inverse(s);
    for (std::size_t n = 0; n < cell.size(); ++n)
      dir.data[n][c] = d.data[n];
  }
  VectorField rate(cell);
  for (std::size_t n = 0; n < cell.size(); ++n)
  {
    const double m = norm(dir.data[n]);
    if (m < opt.eps_dir)
      continue;
    const Vec3 nrm = -dir.data[n] / m;
    const Vec3 r = law(dot(nrm, state.stress.data[n] * burgers)) * norm(rot.data[n]) * nrm;
    rate.data[n] = project_out(r, f.b_hat);
  }
  return rate;
}

/// One forward-Euler step of the h_p law under the given stress.
inline PlasticDistortionField evolve_hp(const PlasticDistortionField& f, const MechanicalState& state,
                                        const MobilityLaw& law, const Vec3& burgers, double dt,
                                        const EvolveOptions& opt = {})
{
  if (!(dt > 0.0))
    throw InvalidArgument("evolve_hp: dt must be positive");
  double scale = 1.0;
  for (const auto& v : f.hp.data)
    scale = std::max(scale, norm(v));
  if (f.volume_residual() > 1e-12 * scale)
    throw InvalidArgument("evolve_hp: initial field violates b.h_p = 0");
  const PeriodicCell& cell = f.hp.cell;
  double fmax = 0.0;
  for (const auto& T : state.stress.data)
    fmax = std::max(fmax, std::abs(law(norm(T * burgers))));
  const double limit = opt.cfl * cell.min_spacing();
  if (dt * fmax > limit * (1.0 + 1e-12))
    detail::throw_cfl("evolve_hp", dt, fmax, limit);
  const VectorField rate = hp_rate(f, state, law, burgers, opt);
  PlasticDistortionField out = f;
  for (std::size_t n = 0; n < cell.size(); ++n)
    out.hp.data[n] += dt * rate.data[n];
  return out;
}

namespace detail
{
inline std::array<int, 2> in_plane_axes(const SlipSystem& s, const char* who)
{
  const int a = s.normal_axis();
  if (a < 0)
    throw InvalidArgument(std::string(who) + ": slip-plane normal must be aligned with a cell axis");
  return {(a + 1) % 3, (a + 2) % 3};
}

/// Godunov gradient norm for ∂_t φ = F|∇φ| along the two in-plane axes.
inline double godunov_norm(const ScalarField& phi, int i, int j, int k, const std::array<int, 2>& axes, bool grows)
{
  double s = 0.0;
  const auto& c = phi.cell;
  const double v = phi.at(i, j, k);
  for (int a : axes)
  {
    std::array<int, 3> lo{i, j, k}, hi{i, j, k};
    --lo[a];
    ++hi[a];
    const double h = c.spacing(a);
    const double dm = (v - phi.at(lo[0], lo[1], lo[2])) / h;
    const double dp = (phi.at(hi[0], hi[1], hi[2]) - v) / h;
    const double t = grows ? std::max(std::pow(std::min(dm, 0.0), 2), std::pow(std::max(dp, 0.0), 2))
                           : std::max(std::pow(std::max(dm, 0.0), 2), std::pow(std::min(dp, 0.0), 2));
    s += t;
  }
  return std::sqrt(s);
}
} // namespace detail

/// Resolved shear |b| m:T at every node.
inline ScalarField resolved_shear(const SlipSystem& s, const SymTensorField& T)
{
  ScalarField r(T.cell);
  const double bn = norm(s.b());
  for (std::size_t n = 0; n < r.size(); ++n)
    r.data[n] = bn * contract(s.m(), T.data[n]);
  return r;
}

/// ∂_t ε_p = f(|b| m:T) |∇_g ε_p| with the Godunov upwind gradient norm.
inline ScalarField slip_rate(const SlipField& sf, const MechanicalState& state, const MobilityLaw& law,
                             const EvolveOptions& opt = {})
{
  const auto axes = detail::in_plane_axes(sf.system, "evolve_slip");
  const PeriodicCell& cell = sf.eps_p.cell;
  require_same_cell(cell, state.stress.cell, "evolve_slip");
  const ScalarField tau = resolved_shear(sf.system, state.stress);
  ScalarField rate(cell);
  for (std::size_t n = 0; n < cell.size(); ++n)
  {
    const double F = law(tau.data[n]);
    if (F == 0.0)
      continue;
    double G;
    if (opt.frozen_gradient)
      G = *opt.frozen_gradient;
    else
    {
      const auto x = cell.coordinates(n);
      G = detail::godunov_norm(sf.eps_p, x[0], x[1], x[2], axes, F > 0.0);
    }
    rate.data[n] = F * G;
  }
  return rate;
}

inline double slip_cfl_limit(const SlipField& sf, double cfl = 0.5)
{
  const auto axes = detail::in_plane_axes(sf.system, "evolve_slip");
  return cfl * std::min(sf.eps_p.cell.spacing(axes[0]), sf.eps_p.cell.spacing(axes[1]));
}

inline double max_slip_speed(const SlipField& sf, const MechanicalState& state, const MobilityLaw& law)
{
  const ScalarField tau = resolved_shear(sf.system, state.stress);
  double fmax = 0.0;
  for (double t : tau.data)
    fmax = std::max(fmax, std::abs(law(t)));
  return fmax;
}

/// One explicit Euler step of the slip-plane law.
inline SlipField evolve_slip(const SlipField& sf, const MechanicalState& state, const MobilityLaw& law, double dt,
                             const EvolveOptions& opt = {})
{
  if (!(dt > 0.0))
    throw InvalidArgument("evolve_slip: dt must be positive");
  const double limit = slip_cfl_limit(sf, opt.cfl);
  const double fmax = max_slip_speed(sf, state, law);
  if (dt * fmax > limit * (1.0 + 1e-12))
    detail::throw_cfl("evolve_slip", dt, fmax, limit);
  const ScalarField rate = slip_rate(sf, state, law, opt);
  SlipField out = sf;
  for (std::size_t n = 0; n < rate.size(); ++n)
    out.eps_p.data[n] += dt * rate.data[n];
  return out;
}

/// Classical pointwise law ∂_t ε_p = f(s·m:T), one Euler step.
inline ScalarField classical_step(const ScalarField& eps_p, const SlipSystem& system, const MechanicalState& state,
                                  const MobilityLaw& law, double dt, double argument_scale = 1.0)
{
  require_same_cell(eps_p.cell, state.stress.cell, "classical_step");
  ScalarField out = eps_p;
  for (std::size_t n = 0; n < out.size(); ++n)
    out.data[n] += dt * law(argument_scale * contract(system.m(), state.stress.data[n]));
  return out;
}

/// ρ = rot(ε_p g) = ∇ε_p × g with spectral derivatives; weight |ρ|.
inline DensityGrid dislocation_density_of_slip(const SlipField& sf)
{
  const PeriodicCell& cell = sf.eps_p.cell;
  Spectral sp(cell);
  const VectorField grad = sp.gradient(sf.eps_p);
  DensityGrid d(cell);
  for (std::size_t n = 0; n < cell.size(); ++n)
  {
    d.rho.data[n] = cross(grad.data[n], sf.system.g());
    d.weight.data[n] = norm(d.rho.data[n]);
  }
  return d;
}

/// h_p = ε_p g.
inline PlasticDistortionField embed_slip(const SlipField& sf)
{
  PlasticDistortionField f{VectorField(sf.eps_p.cell), sf.system.b_hat()};
  for (std::size_t n = 0; n < f.hp.size(); ++n)
    f.hp.data[n] = sf.eps_p.data[n] * sf.system.g();
  return f;
}

struct EnergyRecord
{
  double psi_before = 0.0;
  double psi_after = 0.0;
  double dissipation = 0.0;
};

/// Free energy before/after a step and the dissipation dt ∫ (T b̂)·∂_t h_p.
/// At zero mean stress an increase of ψ beyond tol_energy is an invariant violation.
inline EnergyRecord energy_ledger(const MechanicalState& before, const MechanicalState& after,
                                  const VectorField& hp_rate_field, const Vec3& b_hat, double dt,
                                  double tol_energy)
{
  require_same_cell(before.stress.cell, hp_rate_field.cell, "energy_ledger");
  double d = 0.0;
  for (std::size_t n = 0; n < hp_rate_field.size(); ++n)
    d += dot(before.stress.data[n] * b_hat, hp_rate_field.data[n]);
  EnergyRecord r{before.free_energy, after.free_energy, dt * d * hp_rate_field.cell.node_volume()};
  if (before.mean_stress == SymTensor3{} && r.psi_after - r.psi_before > tol_energy)
  {
    std::ostringstream os;
    os.precision(17);
    os << "energy_ledger: free energy increased at zero mean stress: psi_after - psi_before = "
       << r.psi_after - r.psi_before << " > " << tol_energy;
    throw InvariantViolation(os.str());
  }
  return r;
}

inline EnergyRecord energy_ledger(const MechanicalState& before, const MechanicalState& after,
                                  const ScalarField& slip_rate_field, const SlipSystem& system, double dt,
                                  double tol_energy)
{
  VectorField r(slip_rate_field.cell);
  for (std::size_t n = 0; n < r.size(); ++n)
    r.data[n] = slip_rate_field.data[n] * system.g();
  return energy_ledger(before, after, r, system.b_hat(), dt, tol_energy);
}

/// C¹ smoothed Heaviside: 0 below -w, 1 above w.
inline double smoothed_step(double s, double w)
{
  if (s <= -w)
    return 0.0;
  if (s >= w)
    return 1.0;
  return 0.5 * (1.0 + s / w + std::sin(std::numbers::pi * s / w) / std::numbers::pi);
}

/// ε_p = height·H_w(R − r), r the in-plane periodic distance to `center`; the
/// default smoothing width is three grid spacings.
inline ScalarField mollified_disc(const PeriodicCell& cell, const SlipSystem& system, const Vec3& center,
                                  double radius, double height, double width = 0.0)
{
  const auto axes = detail::in_plane_axes(system, "mollified_disc");
  const double w = width > 0.0 ? width : 3.0 * std::max(cell.spacing(axes[0]), cell.spacing(axes[1]));
  return ScalarField::from_function(cell, [&](const Vec3& x) {
    const Vec3 d = cell.minimum_image(x - center);
    const double r = std::hypot(d[axes[0]], d[axes[1]]);
    return height * smoothed_step(radius - r, w);
  });
}

/// Periodic tent ε_p = slope·min(x_a, L_a − x_a) along one axis.
inline ScalarField periodic_tent(const PeriodicCell& cell, int axis, double slope)
{
  const double L = cell.length(axis);
  return ScalarField::from_function(cell, [&](const Vec3& x) { return slope * std::min(x[axis], L - x[axis]); });
}

} // namespace dislosim

#endif // DISLOSIM_CONTINUUM_HPP
