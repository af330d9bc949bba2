#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dislosim/continuum.hpp"
#include "support.hpp"

using namespace dislosim;
using dislosim::testing::max_abs_diff;

namespace
{
constexpr double kPi = std::numbers::pi;
const IsotropicElasticity kIso(1.5, 1.0);

double max_diff(const SymTensorField& a, const SymTensorField& b)
{
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n)
    m = std::max(m, max_abs_diff(a.data[n], b.data[n]));
  return m;
}

MechanicalState uniform_state(const PeriodicCell& cell, const SymTensor3& T)
{
  return {SymTensorField(cell, T), T, kIso, 0.0, VectorField(cell), {}, 0.0};
}

GeneralElasticity anisotropic()
{
  Matrix6 m = IsotropicElasticity(1.2, 0.8).mandel_matrix();
  m(0, 0) += 0.7;
  m(1, 2) += 0.2;
  m(2, 1) += 0.2;
  m(3, 4) += 0.1;
  m(4, 3) += 0.1;
  m(0, 5) += 0.15;
  m(5, 0) += 0.15;
  return GeneralElasticity(m);
}
} // namespace

TEST(SlipSystem, Validation)
{
  EXPECT_NO_THROW(SlipSystem({0, 0, 1}, {1, 0, 0}));
  EXPECT_THROW(SlipSystem({0, 0, 2}, {1, 0, 0}), InvalidArgument);
  EXPECT_THROW(SlipSystem({0, 0, 1}, {0, 0, 0}), InvalidArgument);
  EXPECT_THROW(SlipSystem({0, 0, 1}, {1, 0, 0.1}), InvalidArgument);
  EXPECT_EQ(SlipSystem({0, 1, 0}, {1, 0, 0}).normal_axis(), 1);
  EXPECT_EQ(SlipSystem(normalized(Vec3{1, 1, 0}), {0, 0, 1}).normal_axis(), -1);
}

TEST(Elasticity, ZeroEigenstrainGivesMeanStress)
{
  const PeriodicCell cell({1, 1, 1}, {8, 8, 8});
  const SymTensor3 S{0.1, -0.2, 0.3, 0.05, -0.04, 0.02};
  const auto st = solve_elasticity(cell, kIso, SymTensorField(cell), S);
  for (const auto& T : st.stress.data)
    EXPECT_LT(max_abs_diff(T, S), 1e-14);
  EXPECT_LT(max_abs_diff(st.mean_strain, kIso.apply_inverse(S)), 1e-14);
}

TEST(Elasticity, ConstantEigenstrainOnlyShiftsMeanStrain)
{
  const PeriodicCell cell({1, 2, 1}, {8, 8, 8});
  const SymTensor3 e{0.01, 0.02, -0.01, 0.03, 0.0, 0.01};
  const auto st = solve_elasticity(cell, kIso, SymTensorField(cell, e), {});
  for (const auto& T : st.stress.data)
    EXPECT_LT(norm(T), 1e-14);
  EXPECT_LT(max_abs_diff(st.mean_strain, e), 1e-15);
  EXPECT_NEAR(st.free_energy, 0.0, 1e-28);
}

TEST(Elasticity, SingleHarmonicMatchesHandSolution)
{
  const double L = 2.0;
  const PeriodicCell cell({L, 1, 1}, {16, 8, 8});
  const SymTensor3 m{0.3, -0.1, 0.2, 0.4, -0.25, 0.15};
  const SymTensor3 S{0.05, 0.1, -0.07, 0.02, 0.03, -0.01};
  const double lam = kIso.lambda(), mu = kIso.mu();
  auto s = [&](const Vec3& x) { return std::sin(2.0 * kPi * x.x1 / L); };
  const auto eps = SymTensorField::from_function(cell, [&](const Vec3& x) { return s(x) * m; });
  const auto st = solve_elasticity(cell, kIso, eps, S);
  for (std::size_t n = 0; n < cell.size(); ++n)
  {
    const double sn = s(cell.position(n));
    const double tr = m.trace();
    const double u1p = (lam * tr + 2.0 * mu * m.t11) * sn / (lam + 2.0 * mu);
    SymTensor3 T;
    T.t22 = lam * (u1p - tr * sn) - 2.0 * mu * m.t22 * sn;
    T.t33 = lam * (u1p - tr * sn) - 2.0 * mu * m.t33 * sn;
    T.t23 = -2.0 * mu * m.t23 * sn;
    EXPECT_LT(max_abs_diff(st.stress.data[n], T + S), 1e-10) << "node " << n;
  }
  EXPECT_LT(st.div_residual, 1e-10);
}

TEST(Elasticity, AnisotropicSolveIsInEquilibrium)
{
  const PeriodicCell cell({1, 1.3, 0.8}, {16, 16, 8});
  std::mt19937_64 rng(5);
  const SymTensor3 a = dislosim::testing::random_sym(rng, 0.01), b = dislosim::testing::random_sym(rng, 0.01);
  const auto eps = SymTensorField::from_function(cell, [&](const Vec3& x) {
    return std::sin(2 * kPi * x.x1) * std::cos(2 * kPi * x.x2 / 1.3) * a + std::cos(2 * kPi * x.x3 / 0.8) * b;
  });
  const Elasticity D = anisotropic();
  const SymTensor3 S{0.01, 0, 0, 0.02, 0, 0};
  const auto st = solve_elasticity(cell, D, eps, S);
  EXPECT_LT(st.div_residual, 1e-10);
  EXPECT_LT(max_abs_diff(mean(st.stress), S), 1e-14);
  const auto T = stress_from_strain(D, st.displacement, st.mean_strain, eps);
  EXPECT_LT(max_diff(T, st.stress), 1e-12);
}

TEST(Elasticity, RejectsNonFiniteEigenstrain)
{
  const PeriodicCell cell({1, 1, 1}, {8, 8, 8});
  SymTensorField e(cell);
  e.data[3].t12 = std::nan("");
  EXPECT_THROW(solve_elasticity(cell, kIso, e, {}), NumericalFailure);
}

TEST(Gauge, StressIsInvariant)
{
  const PeriodicCell cell({1, 1, 1}, {16, 16, 8});
  const Vec3 b_hat = normalized(Vec3{1, 1, 0});
  PlasticDistortionField hp{VectorField::from_function(cell,
                                                       [&](const Vec3& x) {
                                                         const double s = 0.1 * std::sin(2 * kPi * x.x1);
                                                         return Vec3{0, 0, s + 0.05 * std::cos(2 * kPi * x.x2)};
                                                       }),
                            b_hat};
  const auto st = solve_elasticity(hp, kIso, {});
  const auto T0 = stress_from_fields(kIso, st.displacement, st.mean_strain, hp);
  EXPECT_LT(max_diff(T0, st.stress), 1e-13);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(0.0, 0.1);
  for (int trial = 0; trial < 20; ++trial)
  {
    const Vec3 k{double(int(nd(rng) * 30)), double(int(nd(rng) * 30)), double(int(nd(rng) * 20))};
    const double a = nd(rng), phase = nd(rng);
    const auto gamma = ScalarField::from_function(cell, [&](const Vec3& x) {
      return a * std::sin(2 * kPi * dot(k, x) + phase);
    });
    const auto g = gauge_transform(st.displacement, hp, gamma);
    const auto T = stress_from_fields(kIso, g.u, st.mean_strain, g.hp);
    EXPECT_LT(max_diff(T, T0), 1e-12) << "trial " << trial;
  }
}

TEST(Slip, ZeroStressOrConstantFieldIsFrozen)
{
  const PeriodicCell cell({1, 1, 1}, {16, 16, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  const MobilityLaw f(1.0, 1.0);
  const SlipField disc{mollified_disc(cell, sys, {0.5, 0.5, 0}, 0.25, 1.0), sys};
  const auto a = evolve_slip(disc, uniform_state(cell, {}), f, 0.01);
  EXPECT_EQ(a.eps_p.data, disc.eps_p.data);
  const SlipField flat{ScalarField(cell, 0.7), sys};
  const auto b = evolve_slip(flat, uniform_state(cell, {0, 0, 0, 0, 0.3, 0}), f, 0.01);
  EXPECT_EQ(b.eps_p.data, flat.eps_p.data);
}

TEST(Slip, TentFrontMovesAtMobilitySpeed)
{
  const PeriodicCell cell({4, 1, 1}, {64, 8, 8});
  const SlipSystem sys({0, 0, 1}, {2, 0, 0});
  const MobilityLaw f(0.5, 2.0);
  const double slope = 0.3, sigma = 0.4;
  const SlipField sf{periodic_tent(cell, 0, slope), sys};
  const auto st = uniform_state(cell, {0, 0, 0, 0, sigma, 0});
  const double F = f(2.0 * sigma);
  const double dt = 0.2 * cell.spacing(0) / F;
  const auto next = evolve_slip(sf, st, f, dt);
  for (int i = 1; i < 64; ++i)
  {
    if (i == 32)
      continue;
    EXPECT_NEAR(next.eps_p.at(i, 1, 2) - sf.eps_p.at(i, 1, 2), dt * F * slope, 1e-14) << i;
  }
}

TEST(Slip, SignOfRateFollowsStress)
{
  const PeriodicCell cell({1, 1, 1}, {32, 32, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  const SlipField sf{mollified_disc(cell, sys, {0.5, 0.5, 0}, 0.25, 1.0), sys};
  for (double sigma : {0.2, -0.2})
  {
    const auto next = evolve_slip(sf, uniform_state(cell, {0, 0, 0, 0, sigma, 0}), MobilityLaw(1, 1), 0.005);
    for (std::size_t n = 0; n < cell.size(); ++n)
      EXPECT_GE(sigma * (next.eps_p.data[n] - sf.eps_p.data[n]), 0.0);
  }
}

TEST(Slip, CflAndGeometryChecks)
{
  const PeriodicCell cell({1, 1, 1}, {16, 16, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  const SlipField sf{periodic_tent(cell, 0, 1.0), sys};
  const auto st = uniform_state(cell, {0, 0, 0, 0, 1.0, 0});
  try
  {
    evolve_slip(sf, st, MobilityLaw(1, 1), 1.0);
    FAIL();
  }
  catch (const CflViolation& e)
  {
    EXPECT_NEAR(e.suggested_dt(), 0.5 / 16.0, 1e-15);
  }
  const SlipSystem oblique(normalized(Vec3{1, 0, 1}), {0, 1, 0});
  EXPECT_THROW(evolve_slip({sf.eps_p, oblique}, st, MobilityLaw(1, 1), 0.01), InvalidArgument);
  EXPECT_THROW(evolve_slip(sf, st, MobilityLaw(1, 1), 0.0), InvalidArgument);
}

TEST(Classical, MatchesFrozenGradientSlipLaw)
{
  const PeriodicCell cell({1, 1, 1}, {16, 16, 8});
  const SlipSystem sys({0, 0, 1}, {0.5, 0.3, 0});
  const SlipField sf{mollified_disc(cell, sys, {0.5, 0.5, 0}, 0.3, 1.0), sys};
  const auto st = solve_elasticity(sf, kIso, {0.01, 0, 0, 0.02, 0.05, -0.03});
  const MobilityLaw f(2.0, 1.5);
  const double dt = 1e-3;
  const auto a = evolve_slip(sf, st, f, dt, {.cfl = 0.5, .eps_dir = 1e-10, .frozen_gradient = 1.0});
  const auto b = classical_step(sf.eps_p, sys, st, f, dt, norm(sys.b()));
  EXPECT_EQ(a.eps_p.data, b.data);
}

TEST(Classical, GrowsLinearlyUnderUniformStress)
{
  const PeriodicCell cell({1, 1, 1}, {8, 8, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  const auto st = uniform_state(cell, {0, 0, 0, 0, 0.2, 0});
  ScalarField e(cell);
  for (int k = 0; k < 10; ++k)
    e = classical_step(e, sys, st, MobilityLaw(1, 1), 0.1);
  for (double v : e.data)
    EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(Density, OfSlipField)
{
  const PeriodicCell cell({2, 1, 1}, {32, 8, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  const SlipField wave{ScalarField::from_function(cell, [](const Vec3& x) { return std::sin(kPi * x.x1); }), sys};
  const auto d = dislocation_density_of_slip(wave);
  for (std::size_t n = 0; n < cell.size(); ++n)
  {
    const double dp = kPi * std::cos(kPi * cell.position(n).x1);
    EXPECT_LT(norm(d.rho.data[n] - Vec3{0, -dp, 0}), 1e-12);
  }
  Spectral sp(cell);
  const auto rot = sp.curl(embed_slip(wave).hp);
  for (std::size_t n = 0; n < cell.size(); ++n)
    EXPECT_LT(norm(rot.data[n] - d.rho.data[n]), 1e-10);

  const auto flat = dislocation_density_of_slip({ScalarField(cell, 3.0), sys});
  EXPECT_LT(flat.total_weight(), 1e-13);
}

TEST(Density, DiscWeightIsCircumference)
{
  const PeriodicCell cell({1, 1, 0.25}, {128, 128, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  const double R = 0.3, height = 0.5;
  const auto d = dislocation_density_of_slip({mollified_disc(cell, sys, {0.5, 0.5, 0}, R, height), sys});
  EXPECT_NEAR(d.total_weight() / (height * 2 * kPi * R * cell.length(2)), 1.0, 0.05);
}

TEST(Energy, LedgerBasics)
{
  const PeriodicCell cell({1, 1, 1}, {8, 8, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  const SlipField sf{mollified_disc(cell, sys, {0.5, 0.5, 0}, 0.3, 0.1), sys};
  const auto st = solve_elasticity(sf, kIso, {});
  const auto r = energy_ledger(st, st, ScalarField(cell), sys, 0.1, 0.0);
  EXPECT_EQ(r.psi_before, r.psi_after);
  EXPECT_EQ(r.dissipation, 0.0);
  auto worse = st;
  worse.free_energy += 1e-6;
  EXPECT_THROW(energy_ledger(st, worse, ScalarField(cell), sys, 0.1, 1e-8), InvariantViolation);
  EXPECT_NO_THROW(energy_ledger(st, worse, ScalarField(cell), sys, 0.1, 1e-5));
}

TEST(Energy, DissipationIsFirstOrderEnergyChange)
{
  const PeriodicCell cell({1, 1, 1}, {32, 32, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  const SlipField sf{mollified_disc(cell, sys, {0.5, 0.5, 0}, 0.25, 0.05), sys};
  const auto st = solve_elasticity(sf, kIso, {});
  const MobilityLaw f(1.0, 1.0);
  const auto rate = slip_rate(sf, st, f);
  double prev = 0.0;
  for (int level = 0; level < 3; ++level)
  {
    const double dt = 0.01 / std::pow(2.0, level);
    SlipField next = sf;
    for (std::size_t n = 0; n < rate.size(); ++n)
      next.eps_p.data[n] += dt * rate.data[n];
    const auto after = solve_elasticity(next, kIso, {});
    const auto r = energy_ledger(st, after, rate, sys, dt, 1.0);
    const double err = std::abs(r.psi_after - r.psi_before + r.dissipation);
    EXPECT_LT(err, 0.05 * r.dissipation);
    if (level > 0)
    {
      EXPECT_NEAR(prev / err, 4.0, 0.2);
    }
    prev = err;
  }
}

TEST(Energy, CoupledRelaxationDoesNotIncreaseFreeEnergy)
{
  const PeriodicCell cell({1, 1, 1}, {32, 32, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  SlipField sf{mollified_disc(cell, sys, {0.5, 0.5, 0}, 0.3, 0.05), sys};
  const MobilityLaw f(1.0, 1.0);
  auto st = solve_elasticity(sf, kIso, {});
  const double psi0 = st.free_energy;
  for (int k = 0; k < 20; ++k)
  {
    const double dt = 0.5 * slip_cfl_limit(sf) / std::max(max_slip_speed(sf, st, f), 1e-30);
    const auto rate = slip_rate(sf, st, f);
    sf = evolve_slip(sf, st, f, dt);
    const auto next = solve_elasticity(sf, kIso, {});
    const auto r = energy_ledger(st, next, rate, sys, dt, 1e-10 * psi0);
    EXPECT_GE(r.dissipation, 0.0);
    st = next;
  }
  EXPECT_LT(st.free_energy, psi0);
}

TEST(PlasticDistortion, ZeroStressAndCurlFreeFieldsAreFrozen)
{
  const PeriodicCell cell({1, 1, 1}, {16, 16, 8});
  const Vec3 b{1, 0, 0};
  const PlasticDistortionField grad{
      VectorField::from_function(cell, [](const Vec3& x) { return Vec3{0, 0.2 * std::cos(2 * kPi * x.x2), 0}; }),
      normalized(b)};
  const MobilityLaw f(1, 1);
  const auto a = evolve_hp(grad, uniform_state(cell, {0, 0, 0, 0, 0.3, 0.1}), f, b, 0.01);
  for (std::size_t n = 0; n < cell.size(); ++n)
    EXPECT_LT(norm(a.hp.data[n] - grad.hp.data[n]), 1e-14);
  const PlasticDistortionField slab{
      VectorField::from_function(cell, [](const Vec3& x) { return Vec3{0, 0, 0.1 * std::sin(2 * kPi * x.x1)}; }),
      normalized(b)};
  const auto c = evolve_hp(slab, uniform_state(cell, {}), f, b, 0.01);
  EXPECT_EQ(c.hp.data, slab.hp.data);
}

TEST(PlasticDistortion, SlabReducesToSlipLaw)
{
  const PeriodicCell cell({1, 1, 1}, {32, 8, 8});
  const Vec3 b{1, 0, 0};
  const double sigma = 0.25;
  const MobilityLaw f(1.3, 2.0);
  const PlasticDistortionField slab{
      VectorField::from_function(cell, [](const Vec3& x) { return Vec3{0, 0, 0.1 * std::sin(2 * kPi * x.x1)}; }),
      b};
  const auto st = uniform_state(cell, {0, 0, 0, 0, sigma, 0});
  const double dt = 0.01;
  const auto next = evolve_hp(slab, st, f, b, dt);
  for (std::size_t n = 0; n < cell.size(); ++n)
  {
    const double grad = std::abs(0.2 * kPi * std::cos(2 * kPi * cell.position(n).x1));
    const Vec3 expected = slab.hp.data[n] + Vec3{0, 0, dt * f(sigma) * grad};
    EXPECT_LT(norm(next.hp.data[n] - expected), 1e-12) << n;
  }
  EXPECT_LT(next.volume_residual(), 1e-15);
}

TEST(PlasticDistortion, KeepsVolumeConstraintAndChecksInputs)
{
  const PeriodicCell cell({1, 1, 1}, {16, 16, 8});
  const Vec3 b = Vec3{1, 1, 0};
  const Vec3 b_hat = normalized(b);
  const PlasticDistortionField hp{VectorField::from_function(cell,
                                                             [&](const Vec3& x) {
                                                               return Vec3{0, 0, 0.1 * std::sin(2 * kPi * x.x1)} +
                                                                      0.05 * std::cos(2 * kPi * x.x2) *
                                                                          Vec3{1, -1, 0};
                                                             }),
                                  b_hat};
  const auto st = uniform_state(cell, {0.1, -0.1, 0.0, 0.2, 0.1, -0.05});
  const auto next = evolve_hp(hp, st, MobilityLaw(1, 1), b, 0.01);
  EXPECT_LT(next.volume_residual(), 1e-14);

  PlasticDistortionField bad = hp;
  bad.hp.data[0] += 0.1 * b_hat;
  EXPECT_THROW(evolve_hp(bad, st, MobilityLaw(1, 1), b, 0.01), InvalidArgument);
  EXPECT_THROW(evolve_hp(hp, st, MobilityLaw(1, 1), b, 10.0), CflViolation);
}

TEST(Initializers, DiscAndTent)
{
  const PeriodicCell cell({1, 1, 1}, {64, 64, 8});
  const SlipSystem sys({0, 0, 1}, {1, 0, 0});
  const auto disc = mollified_disc(cell, sys, {0.5, 0.5, 0}, 0.25, 2.0);
  EXPECT_DOUBLE_EQ(disc.at(32, 32, 0), 2.0);
  EXPECT_DOUBLE_EQ(disc.at(0, 0, 1), 0.0);
  const auto tent = periodic_tent(cell, 1, 0.5);
  EXPECT_DOUBLE_EQ(tent.at(3, 32, 0), 0.25);
  EXPECT_DOUBLE_EQ(tent.at(3, 48, 0), 0.125);
  EXPECT_DOUBLE_EQ(smoothed_step(0.0, 1.0), 0.5);
}
