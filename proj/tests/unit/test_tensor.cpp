#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dislosim/quadrature.hpp"
#include "dislosim/tensor.hpp"
#include "support.hpp"

using namespace dislosim;
using dislosim::testing::random_sym;
using dislosim::testing::random_vec;

TEST(Vec3, CrossIsOrthogonalAndAnticommutative)
{
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k)
  {
    const Vec3 a = random_vec(rng), b = random_vec(rng);
    const Vec3 c = cross(a, b);
    EXPECT_NEAR(dot(c, a), 0.0, 1e-12);
    EXPECT_NEAR(dot(c, b), 0.0, 1e-12);
    EXPECT_NEAR(norm(c + cross(b, a)), 0.0, 1e-14);
  }
  EXPECT_EQ(cross(Vec3::unit(0), Vec3::unit(1)), Vec3::unit(2));
}

TEST(Vec3, NormalizeZeroThrows)
{
  EXPECT_THROW(normalized(Vec3{}), InvalidArgument);
}

TEST(SymTensor3, ContractMatchesFullTensor)
{
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k)
  {
    const SymTensor3 a = random_sym(rng), b = random_sym(rng);
    EXPECT_NEAR(contract(a, b), contract(a.full(), b.full()), 1e-13);
    const Vec3 v = random_vec(rng);
    EXPECT_NEAR(norm(a * v - a.full() * v), 0.0, 1e-13);
  }
}

TEST(SlipTensor, IsSymmetricPartOfOuterProduct)
{
  const Vec3 b = Vec3::unit(0), g = Vec3::unit(2);
  const SymTensor3 m = slip_tensor(b, g);
  EXPECT_DOUBLE_EQ(m.t13, 0.5);
  EXPECT_DOUBLE_EQ(m.trace(), 0.0);
  EXPECT_THROW(slip_tensor({2.0, 0.0, 0.0}, g), InvalidArgument);
}

TEST(Mandel, RoundTripAndContraction)
{
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k)
  {
    const SymTensor3 a = random_sym(rng), b = random_sym(rng);
    EXPECT_LT(dislosim::testing::max_abs_diff(from_mandel(to_mandel(a)), a), 1e-15);
    EXPECT_NEAR(to_mandel(a).dot(to_mandel(b)), contract(a, b), 1e-13);
  }
}

TEST(IsotropicElasticity, InverseAndPoisson)
{
  const auto D = IsotropicElasticity::from_poisson(1.0, 0.25);
  EXPECT_NEAR(D.lambda(), 1.0, 1e-15);
  EXPECT_NEAR(D.nu(), 0.25, 1e-15);
  EXPECT_NEAR(IsotropicElasticity::from_poisson(1.0, 0.3).lambda(), 1.5, 1e-14);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k)
  {
    const SymTensor3 e = random_sym(rng);
    EXPECT_LT(dislosim::testing::max_abs_diff(D.apply_inverse(D.apply(e)), e), 1e-14);
    EXPECT_LT(dislosim::testing::max_abs_diff(from_mandel(D.mandel_matrix() * to_mandel(e)), D.apply(e)), 1e-14);
  }
}

TEST(IsotropicElasticity, RejectsUnstableModuli)
{
  EXPECT_THROW(IsotropicElasticity(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(IsotropicElasticity(-1.0, 1.0), InvalidArgument);
  EXPECT_THROW(IsotropicElasticity::from_poisson(1.0, 0.5), InvalidArgument);
}

TEST(GeneralElasticity, MatchesIsotropicAndChecksDefiniteness)
{
  const IsotropicElasticity iso(1.5, 1.0);
  const GeneralElasticity gen(iso);
  std::mt19937_64 rng(5);
  const SymTensor3 e = random_sym(rng);
  EXPECT_LT(dislosim::testing::max_abs_diff(gen.apply(e), iso.apply(e)), 1e-14);
  EXPECT_LT(dislosim::testing::max_abs_diff(gen.apply_inverse(gen.apply(e)), e), 1e-13);
  EXPECT_NEAR(gen.mean_shear_modulus(), 1.0, 1e-15);

  Matrix6 m = iso.mandel_matrix();
  m(0, 1) += 1e-3;
  EXPECT_THROW(GeneralElasticity{m}, InvalidArgument);
  Matrix6 neg = -iso.mandel_matrix();
  EXPECT_THROW(GeneralElasticity{neg}, InvalidArgument);
}

TEST(GaussRule, IntegratesPolynomialsExactly)
{
  for (int order = 1; order <= 12; ++order)
  {
    const GaussRule r(order);
    for (int p = 0; p < 2 * order; ++p)
    {
      const double exact = (std::pow(2.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1);
      EXPECT_NEAR(r.integrate([p](double x) { return std::pow(x, p); }, -1.0, 2.0), exact, 1e-11 * std::abs(exact) + 1e-13)
        << "order " << order << " degree " << p;
    }
  }
  EXPECT_NEAR(GaussRule(16).integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), 2.0, 1e-14);
}
