#ifndef DISLOSIM_GRID_HPP
#define DISLOSIM_GRID_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dislosim/errors.hpp"
#include "dislosim/tensor.hpp"

namespace dislosim
{

/// Periodic box [0, L1) x [0, L2) x [0, L3) sampled at n_i nodes per axis.
/// Nodes are stored with x1 fastest: index = i + n1 (j + n2 k).
class PeriodicCell
{
public:
  PeriodicCell(std::array<double, 3> lengths, std::array<int, 3> nodes) : L_(lengths), n_(nodes)
  {
    for (int a = 0; a < 3; ++a)
    {
      if (!(L_[a] > 0.0) || !std::isfinite(L_[a]))
        throw InvalidArgument("PeriodicCell: cell lengths must be positive");
      if (n_[a] < 8 || n_[a] % 2 != 0)
        throw InvalidArgument("PeriodicCell: resolution n" + std::to_string(a + 1) +
                              " must be an even integer >= 8");
    }
  }

  double length(int axis) const { return L_[axis]; }
  int nodes(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return L_[axis] / n_[axis]; }
  const std::array<double, 3>& lengths() const noexcept { return L_; }
  const std::array<int, 3>& resolution() const noexcept { return n_; }

  std::size_t size() const { return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]; }
  double node_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  double volume() const { return L_[0] * L_[1] * L_[2]; }
  double min_spacing() const { return std::min({spacing(0), spacing(1), spacing(2)}); }

  std::size_t index(int i, int j, int k) const
  {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * (j + static_cast<std::size_t>(n_[1]) * k);
  }

  /// Index with periodic wrap of each coordinate.
  std::size_t wrapped_index(int i, int j, int k) const { return index(wrap(i, 0), wrap(j, 1), wrap(k, 2)); }

  int wrap(int i, int axis) const
  {
    const int n = n_[axis];
    const int r = i % n;
    return r < 0 ? r + n : r;
  }

  std::array<int, 3> coordinates(std::size_t idx) const
  {
    const int i = static_cast<int>(idx % n_[0]);
    const std::size_t rest = idx / n_[0];
    const int j = static_cast<int>(rest % n_[1]);
    const int k = static_cast<int>(rest / n_[1]);
    return {i, j, k};
  }

  Vec3 position(int i, int j, int k) const { return {i * spacing(0), j * spacing(1), k * spacing(2)}; }

  Vec3 position(std::size_t idx) const
  {
    const auto c = coordinates(idx);
    return position(c[0], c[1], c[2]);
  }

  /// Shortest periodic image of the displacement x - y.
  Vec3 minimum_image(const Vec3& d) const
  {
    Vec3 r = d;
    for (int a = 0; a < 3; ++a)
      r[a] -= L_[a] * std::round(r[a] / L_[a]);
    return r;
  }

  friend bool operator==(const PeriodicCell&, const PeriodicCell&) = default;

private:
  std::array<double, 3> L_;
  std::array<int, 3> n_;
};

/// Node-wise field on a periodic cell.
template <class T>
struct GridField
{
  PeriodicCell cell;
  std::vector<T> data;

  explicit GridField(const PeriodicCell& c, const T& value = T{}) : cell(c), data(c.size(), value) {}

  template <class Fn>
  static GridField from_function(const PeriodicCell& c, Fn&& fn)
  {
    GridField f(c);
    for (std::size_t n = 0; n < c.size(); ++n)
      f.data[n] = fn(c.position(n));
    return f;
  }

  std::size_t size() const { return data.size(); }
  T& operator[](std::size_t n) { return data[n]; }
  const T& operator[](std::size_t n) const { return data[n]; }
  T& at(int i, int j, int k) { return data[cell.wrapped_index(i, j, k)]; }
  const T& at(int i, int j, int k) const { return data[cell.wrapped_index(i, j, k)]; }
};

using ScalarField = GridField<double>;
using VectorField = GridField<Vec3>;
using SymTensorField = GridField<SymTensor3>;

inline void require_same_cell(const PeriodicCell& a, const PeriodicCell& b, const char* what)
{
  if (!(a == b))
    throw InvalidArgument(std::string(what) + ": fields live on different cells");
}

/// Cell integral by the node-wise trapezoid rule (exact midpoint rule for periodic data).
template <class T>
T integrate(const GridField<T>& f)
{
  T sum{};
  for (const auto& v : f.data)
    sum += v;
  return sum * f.cell.node_volume();
}

template <class T>
T mean(const GridField<T>& f)
{
  T sum{};
  for (const auto& v : f.data)
    sum += v;
  return sum * (1.0 / static_cast<double>(f.size()));
}

inline double l2_norm(const ScalarField& f)
{
  double s = 0.0;
  for (double v : f.data)
    s += v * v;
  return std::sqrt(s * f.cell.node_volume());
}

inline double l2_norm(const VectorField& f)
{
  double s = 0.0;
  for (const auto& v : f.data)
    s += dot(v, v);
  return std::sqrt(s * f.cell.node_volume());
}

inline double l2_norm(const SymTensorField& f)
{
  double s = 0.0;
  for (const auto& v : f.data)
    s += contract(v, v);
  return std::sqrt(s * f.cell.node_volume());
}

template <class T>
GridField<T> operator-(const GridField<T>& a, const GridField<T>& b)
{
  require_same_cell(a.cell, b.cell, "field difference");
  GridField<T> r(a.cell);
  for (std::size_t n = 0; n < a.size(); ++n)
    r.data[n] = a.data[n] - b.data[n];
  return r;
}

} // namespace dislosim

#endif // DISLOSIM_GRID_HPP
