#ifndef DISLOSIM_TENSOR_HPP
#define DISLOSIM_TENSOR_HPP

#include <array>
#include <cmath>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "dislosim/errors.hpp"

/// Small fixed-size tensor algebra in three dimensions.
///
/// All quantities are nondimensional: lengths in units of |b| and stresses in
/// units of the shear modulus. Indices in operator() are zero based.
namespace dislosim
{

struct Vec3
{
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x1 : (i == 1 ? x2 : x3); }
  constexpr double& operator[](int i) { return i == 0 ? x1 : (i == 1 ? x2 : x3); }

  static constexpr Vec3 unit(int i)
  {
    Vec3 e;
    e[i] = 1.0;
    return e;
  }

  constexpr Vec3& operator+=(const Vec3& o)
  {
    x1 += o.x1;
    x2 += o.x2;
    x3 += o.x3;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o)
  {
    x1 -= o.x1;
    x2 -= o.x2;
    x3 -= o.x3;
    return *this;
  }
  constexpr Vec3& operator*=(double s)
  {
    x1 *= s;
    x2 *= s;
    x3 *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& c) { return a += c; }
constexpr Vec3 operator-(Vec3 a, const Vec3& c) { return a -= c; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x1, -a.x2, -a.x3}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

constexpr double dot(const Vec3& a, const Vec3& c) { return a.x1 * c.x1 + a.x2 * c.x2 + a.x3 * c.x3; }

constexpr Vec3 cross(const Vec3& a, const Vec3& c)
{
  return {a.x2 * c.x3 - a.x3 * c.x2, a.x3 * c.x1 - a.x1 * c.x3, a.x1 * c.x2 - a.x2 * c.x1};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a)
{
  const double n = norm(a);
  if (n == 0.0)
    throw InvalidArgument("cannot normalize the zero vector");
  return a / n;
}

/// Projection onto the plane orthogonal to the unit vector n.
constexpr Vec3 project_out(const Vec3& v, const Vec3& n) { return v - dot(v, n) * n; }

inline bool is_finite(const Vec3& a)
{
  return std::isfinite(a.x1) && std::isfinite(a.x2) && std::isfinite(a.x3);
}

/// General (not necessarily symmetric) 3x3 tensor, row-major.
struct Tensor3
{
  std::array<double, 9> a{};

  constexpr double operator()(int i, int j) const { return a[3 * i + j]; }
  constexpr double& operator()(int i, int j) { return a[3 * i + j]; }

  static constexpr Tensor3 identity()
  {
    Tensor3 t;
    t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
    return t;
  }

  constexpr Tensor3 transpose() const
  {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t(i, j) = (*this)(j, i);
    return t;
  }

  constexpr Vec3 row(int i) const { return {(*this)(i, 0), (*this)(i, 1), (*this)(i, 2)}; }

  constexpr Tensor3& operator+=(const Tensor3& o)
  {
    for (int k = 0; k < 9; ++k)
      a[k] += o.a[k];
    return *this;
  }
  constexpr Tensor3& operator-=(const Tensor3& o)
  {
    for (int k = 0; k < 9; ++k)
      a[k] -= o.a[k];
    return *this;
  }
  constexpr Tensor3& operator*=(double s)
  {
    for (auto& v : a)
      v *= s;
    return *this;
  }
};

constexpr Tensor3 operator+(Tensor3 a, const Tensor3& c) { return a += c; }
constexpr Tensor3 operator-(Tensor3 a, const Tensor3& c) { return a -= c; }
constexpr Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

/// a ⊗ c, the matrix (a_i c_j).
constexpr Tensor3 outer(const Vec3& a, const Vec3& c)
{
  Tensor3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t(i, j) = a[i] * c[j];
  return t;
}

constexpr double contract(const Tensor3& A, const Tensor3& B)
{
  double s = 0.0;
  for (int k = 0; k < 9; ++k)
    s += A.a[k] * B.a[k];
  return s;
}

constexpr Vec3 operator*(const Tensor3& A, const Vec3& v)
{
  return {dot(A.row(0), v), dot(A.row(1), v), dot(A.row(2), v)};
}

/// Symmetric 3x3 tensor with six stored components.
struct SymTensor3
{
  double t11 = 0.0;
  double t22 = 0.0;
  double t33 = 0.0;
  double t12 = 0.0;
  double t13 = 0.0;
  double t23 = 0.0;

  constexpr double operator()(int i, int j) const
  {
    if (i == j)
      return i == 0 ? t11 : (i == 1 ? t22 : t33);
    const int k = i + j; // 1 -> 12, 2 -> 13, 3 -> 23
    return k == 1 ? t12 : (k == 2 ? t13 : t23);
  }

  constexpr double& operator()(int i, int j)
  {
    if (i == j)
      return i == 0 ? t11 : (i == 1 ? t22 : t33);
    const int k = i + j;
    return k == 1 ? t12 : (k == 2 ? t13 : t23);
  }

  static constexpr SymTensor3 identity() { return {1.0, 1.0, 1.0, 0.0, 0.0, 0.0}; }

  constexpr double trace() const { return t11 + t22 + t33; }

  constexpr Tensor3 full() const
  {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        t(i, j) = (*this)(i, j);
    return t;
  }

  constexpr SymTensor3& operator+=(const SymTensor3& o)
  {
    t11 += o.t11;
    t22 += o.t22;
    t33 += o.t33;
    t12 += o.t12;
    t13 += o.t13;
    t23 += o.t23;
    return *this;
  }
  constexpr SymTensor3& operator-=(const SymTensor3& o)
  {
    t11 -= o.t11;
    t22 -= o.t22;
    t33 -= o.t33;
    t12 -= o.t12;
    t13 -= o.t13;
    t23 -= o.t23;
    return *this;
  }
  constexpr SymTensor3& operator*=(double s)
  {
    t11 *= s;
    t22 *= s;
    t33 *= s;
    t12 *= s;
    t13 *= s;
    t23 *= s;
    return *this;
  }

  friend constexpr bool operator==(const SymTensor3&, const SymTensor3&) = default;
};

constexpr SymTensor3 operator+(SymTensor3 a, const SymTensor3& c) { return a += c; }
constexpr SymTensor3 operator-(SymTensor3 a, const SymTensor3& c) { return a -= c; }
constexpr SymTensor3 operator-(SymTensor3 a) { return a *= -1.0; }
constexpr SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }
constexpr SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }

constexpr Vec3 operator*(const SymTensor3& T, const Vec3& v)
{
  return {T.t11 * v.x1 + T.t12 * v.x2 + T.t13 * v.x3,
          T.t12 * v.x1 + T.t22 * v.x2 + T.t23 * v.x3,
          T.t13 * v.x1 + T.t23 * v.x2 + T.t33 * v.x3};
}

constexpr double contract(const SymTensor3& A, const SymTensor3& B)
{
  return A.t11 * B.t11 + A.t22 * B.t22 + A.t33 * B.t33 +
         2.0 * (A.t12 * B.t12 + A.t13 * B.t13 + A.t23 * B.t23);
}

constexpr double contract(const SymTensor3& A, const Tensor3& B) { return contract(A.full(), B); }

inline double norm(const SymTensor3& A) { return std::sqrt(contract(A, A)); }

inline bool is_finite(const SymTensor3& A)
{
  return std::isfinite(A.t11) && std::isfinite(A.t22) && std::isfinite(A.t33) &&
         std::isfinite(A.t12) && std::isfinite(A.t13) && std::isfinite(A.t23);
}

/// Symmetric part ½(A + Aᵀ), the linear strain of a displacement gradient.
constexpr SymTensor3 strain(const Tensor3& grad_u)
{
  return {grad_u(0, 0),
          grad_u(1, 1),
          grad_u(2, 2),
          0.5 * (grad_u(0, 1) + grad_u(1, 0)),
          0.5 * (grad_u(0, 2) + grad_u(2, 0)),
          0.5 * (grad_u(1, 2) + grad_u(2, 1))};
}

/// ½(a⊗c + c⊗a).
constexpr SymTensor3 sym_outer(const Vec3& a, const Vec3& c) { return strain(outer(a, c)); }

/// Slip tensor m = ε(b̂⊗g) of a slip system. Both arguments must be unit vectors.
inline SymTensor3 slip_tensor(const Vec3& b_hat, const Vec3& g)
{
  constexpr double tol = 1e-12;
  if (std::abs(norm(b_hat) - 1.0) > tol || std::abs(norm(g) - 1.0) > tol)
    throw InvalidArgument("slip_tensor: b_hat and g must be unit vectors");
  return sym_outer(b_hat, g);
}

// Mandel representation: (11, 22, 33, 23, 13, 12) with √2 on the shear slots,
// so that contract(A, B) equals the Euclidean dot product of the 6-vectors.
using Mandel6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

inline Mandel6 to_mandel(const SymTensor3& t)
{
  const double r2 = std::sqrt(2.0);
  Mandel6 v;
  v << t.t11, t.t22, t.t33, r2 * t.t23, r2 * t.t13, r2 * t.t12;
  return v;
}

inline SymTensor3 from_mandel(const Mandel6& v)
{
  const double ir2 = 1.0 / std::sqrt(2.0);
  return {v(0), v(1), v(2), ir2 * v(5), ir2 * v(4), ir2 * v(3)};
}

class IsotropicElasticity
{
public:
  IsotropicElasticity(double lambda, double mu) : lambda_(lambda), mu_(mu)
  {
    if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0) || !std::isfinite(lambda))
      throw InvalidArgument("IsotropicElasticity: require mu > 0 and 3*lambda + 2*mu > 0");
  }

  /// Build from shear modulus and Poisson's ratio, -1 < nu < 1/2.
  static IsotropicElasticity from_poisson(double mu, double nu)
  {
    if (!(nu > -1.0 && nu < 0.5))
      throw InvalidArgument("IsotropicElasticity: Poisson's ratio must lie in (-1, 1/2)");
    return {2.0 * mu * nu / (1.0 - 2.0 * nu), mu};
  }

  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }
  double nu() const noexcept { return lambda_ / (2.0 * (lambda_ + mu_)); }

  SymTensor3 apply(const SymTensor3& e) const
  {
    return lambda_ * e.trace() * SymTensor3::identity() + 2.0 * mu_ * e;
  }

  SymTensor3 apply_inverse(const SymTensor3& t) const
  {
    const double tr_coeff = lambda_ / (2.0 * mu_ * (3.0 * lambda_ + 2.0 * mu_));
    return (1.0 / (2.0 * mu_)) * t - tr_coeff * t.trace() * SymTensor3::identity();
  }

  Matrix6 mandel_matrix() const
  {
    Matrix6 m = Matrix6::Zero();
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
        m(i, j) = lambda_;
      m(i, i) += 2.0 * mu_;
      m(i + 3, i + 3) = 2.0 * mu_;
    }
    return m;
  }

private:
  double lambda_;
  double mu_;
};

/// Anisotropic elasticity as a symmetric positive definite Mandel 6x6 matrix.
class GeneralElasticity
{
public:
  explicit GeneralElasticity(const Matrix6& mandel) : m_(mandel)
  {
    if (!m_.allFinite())
      throw InvalidArgument("GeneralElasticity: non-finite entries");
    const double scale = m_.cwiseAbs().maxCoeff();
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw InvalidArgument("GeneralElasticity: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix6> eig(m_);
    if (eig.eigenvalues().minCoeff() <= 0.0)
      throw InvalidArgument("GeneralElasticity: matrix is not positive definite");
    inverse_ = m_.inverse();
  }

  explicit GeneralElasticity(const IsotropicElasticity& iso) : GeneralElasticity(iso.mandel_matrix()) {}

  SymTensor3 apply(const SymTensor3& e) const { return from_mandel(m_ * to_mandel(e)); }
  SymTensor3 apply_inverse(const SymTensor3& t) const { return from_mandel(inverse_ * to_mandel(t)); }

  const Matrix6& mandel_matrix() const noexcept { return m_; }

  /// Mean of the three shear eigen-moduli, used as a reference modulus.
  double mean_shear_modulus() const { return (m_(3, 3) + m_(4, 4) + m_(5, 5)) / 6.0; }

private:
  Matrix6 m_;
  Matrix6 inverse_;
};

using Elasticity = std::variant<IsotropicElasticity, GeneralElasticity>;

inline SymTensor3 apply_elasticity(const IsotropicElasticity& D, const SymTensor3& e) { return D.apply(e); }
inline SymTensor3 apply_elasticity(const GeneralElasticity& D, const SymTensor3& e) { return D.apply(e); }
inline SymTensor3 apply_elasticity(const Elasticity& D, const SymTensor3& e)
{
  return std::visit([&](const auto& d) { return d.apply(e); }, D);
}

inline SymTensor3 apply_compliance(const Elasticity& D, const SymTensor3& t)
{
  return std::visit([&](const auto& d) { return d.apply_inverse(t); }, D);
}

inline Matrix6 mandel_matrix(const Elasticity& D)
{
  return std::visit([](const auto& d) -> Matrix6 { return d.mandel_matrix(); }, D);
}

} // namespace dislosim

#endif // DISLOSIM_TENSOR_HPP
