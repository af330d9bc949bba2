#ifndef DISLOSIM_IO_HPP
#define DISLOSIM_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dislosim/errors.hpp"
#include "dislosim/grid.hpp"
#include "dislosim/measures.hpp"

namespace dislosim::io
{

namespace detail
{
inline std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline Vec3 parse_vec3(std::istringstream& is, const std::string& what, int line)
{
  Vec3 v;
  if (!(is >> v.x1 >> v.x2 >> v.x3))
    throw ConfigError("line " + std::to_string(line) + ": expected three numbers for " + what);
  std::string extra;
  if (is >> extra)
    throw ConfigError("line " + std::to_string(line) + ": unexpected token '" + extra + "'");
  return v;
}

inline std::ofstream open_out(const std::filesystem::path& p, std::ios::openmode mode = std::ios::out)
{
  std::ofstream os(p, mode);
  if (!os)
    throw ConfigError("cannot open '" + p.string() + "' for writing");
  return os;
}
} // namespace detail

// ---------------------------------------------------------------------------
// Curve files
//
//   burgers bx by bz
//   period px py pz        (optional)
//   x y z                  (one vertex per line)
//
// Curves are separated by blank lines; '#' starts a comment.

inline void write_curves(std::ostream& os, std::span<const DislocationCurve> curves)
{
  os << std::setprecision(17);
  bool first = true;
  for (const auto& c : curves)
  {
    if (!first)
      os << '\n';
    first = false;
    const Vec3& b = c.burgers();
    os << "burgers " << b.x1 << ' ' << b.x2 << ' ' << b.x3 << '\n';
    if (c.is_periodic())
      os << "period " << c.period().x1 << ' ' << c.period().x2 << ' ' << c.period().x3 << '\n';
    for (const auto& v : c.vertices())
      os << v.x1 << ' ' << v.x2 << ' ' << v.x3 << '\n';
  }
}

inline std::vector<DislocationCurve> read_curves(std::istream& is)
{
  std::vector<DislocationCurve> out;
  std::string line;
  int lineno = 0;
  bool have_b = false;
  int b_line = 0;
  Vec3 b, period;
  std::vector<Vec3> verts;
  auto flush = [&]() {
    if (!have_b && verts.empty())
      return;
    if (!have_b)
      throw ConfigError("line " + std::to_string(lineno) + ": curve without a 'burgers' line");
    try
    {
      out.emplace_back(verts, b, period);
    }
    catch (const InvalidArgument& e)
    {
      throw ConfigError("curve starting at line " + std::to_string(b_line) + ": " + e.what());
    }
    have_b = false;
    verts.clear();
    period = {};
  };
  while (std::getline(is, line))
  {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = detail::trim(line);
    if (line.empty())
    {
      flush();
      continue;
    }
    std::istringstream ls(line);
    if (line.rfind("burgers", 0) == 0)
    {
      if (have_b || !verts.empty())
        flush();
      std::string kw;
      ls >> kw;
      b = detail::parse_vec3(ls, "burgers", lineno);
      have_b = true;
      b_line = lineno;
    }
    else if (line.rfind("period", 0) == 0)
    {
      std::string kw;
      ls >> kw;
      if (!have_b || !verts.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": 'period' must follow 'burgers'");
      period = detail::parse_vec3(ls, "period", lineno);
    }
    else
    {
      if (!have_b)
        throw ConfigError("line " + std::to_string(lineno) + ": vertex before 'burgers' line");
      verts.push_back(detail::parse_vec3(ls, "vertex", lineno));
    }
  }
  flush();
  return out;
}

inline void save_curves(const std::filesystem::path& p, std::span<const DislocationCurve> curves)
{
  auto os = detail::open_out(p);
  write_curves(os, curves);
}

inline std::vector<DislocationCurve> load_curves(const std::filesystem::path& p)
{
  std::ifstream is(p);
  if (!is)
    throw ConfigError("cannot open curve file '" + p.string() + "'");
  return read_curves(is);
}

// ---------------------------------------------------------------------------
// Grid snapshots
//
//   dislosim-grid v1
//   dims n1 n2 n3
//   spacing h1 h2 h3
//   field <name> <ncomp>
//
// followed by n1*n2*n3*ncomp little-endian float64 values, node-major with
// x1 fastest. Symmetric tensors store (11, 22, 33, 12, 13, 23).

template <class T>
constexpr int component_count()
{
  if constexpr (std::is_same_v<T, double>)
    return 1;
  else if constexpr (std::is_same_v<T, Vec3>)
    return 3;
  else
    return 6;
}

namespace detail
{
inline void put_le(std::ostream& os, double v)
{
  std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i)
    bytes[i] = static_cast<char>((u >> (8 * i)) & 0xffu);
  os.write(bytes, 8);
}

inline double get_le(std::istream& is)
{
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8))
    throw ConfigError("grid snapshot: truncated data block");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i)
    u |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

inline void put_value(std::ostream& os, double v) { put_le(os, v); }
inline void put_value(std::ostream& os, const Vec3& v)
{
  for (int c = 0; c < 3; ++c)
    put_le(os, v[c]);
}
inline void put_value(std::ostream& os, const SymTensor3& t)
{
  for (double c : {t.t11, t.t22, t.t33, t.t12, t.t13, t.t23})
    put_le(os, c);
}

inline void get_value(std::istream& is, double& v) { v = get_le(is); }
inline void get_value(std::istream& is, Vec3& v)
{
  for (int c = 0; c < 3; ++c)
    v[c] = get_le(is);
}
inline void get_value(std::istream& is, SymTensor3& t)
{
  for (double* c : {&t.t11, &t.t22, &t.t33, &t.t12, &t.t13, &t.t23})
    *c = get_le(is);
}
} // namespace detail

template <class T>
void write_grid(std::ostream& os, const GridField<T>& f, const std::string& name)
{
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
    throw InvalidArgument("grid snapshot: field name must be a single non-empty token");
  const auto& c = f.cell;
  os << std::setprecision(17);
  os << "dislosim-grid v1\n";
  os << "dims " << c.nodes(0) << ' ' << c.nodes(1) << ' ' << c.nodes(2) << '\n';
  os << "spacing " << c.spacing(0) << ' ' << c.spacing(1) << ' ' << c.spacing(2) << '\n';
  os << "field " << name << ' ' << component_count<T>() << '\n';
  for (const auto& v : f.data)
    detail::put_value(os, v);
}

struct GridHeader
{
  std::array<int, 3> dims{};
  Vec3 spacing;
  std::string name;
  int components = 0;

  PeriodicCell cell() const
  {
    return PeriodicCell({spacing.x1 * dims[0], spacing.x2 * dims[1], spacing.x3 * dims[2]}, dims);
  }
};

inline GridHeader read_grid_header(std::istream& is)
{
  GridHeader h;
  std::string line;
  auto next = [&](const char* key) {
    if (!std::getline(is, line))
      throw ConfigError(std::string("grid snapshot: missing '") + key + "' line");
    return std::istringstream(line);
  };
  if (!std::getline(is, line) || line != "dislosim-grid v1")
    throw ConfigError("grid snapshot: bad magic line (expected 'dislosim-grid v1')");
  std::string kw;
  auto dims = next("dims");
  if (!(dims >> kw >> h.dims[0] >> h.dims[1] >> h.dims[2]) || kw != "dims")
    throw ConfigError("grid snapshot: malformed 'dims' line");
  auto sp = next("spacing");
  if (!(sp >> kw >> h.spacing.x1 >> h.spacing.x2 >> h.spacing.x3) || kw != "spacing")
    throw ConfigError("grid snapshot: malformed 'spacing' line");
  auto fl = next("field");
  if (!(fl >> kw >> h.name >> h.components) || kw != "field")
    throw ConfigError("grid snapshot: malformed 'field' line");
  return h;
}

template <class T>
GridField<T> read_grid(std::istream& is, std::string* name = nullptr)
{
  const GridHeader h = read_grid_header(is);
  if (h.components != component_count<T>())
    throw ConfigError("grid snapshot: field '" + h.name + "' has " + std::to_string(h.components) +
                      " components, expected " + std::to_string(component_count<T>()));
  GridField<T> f(h.cell());
  for (auto& v : f.data)
    detail::get_value(is, v);
  if (name)
    *name = h.name;
  return f;
}

template <class T>
void save_grid(const std::filesystem::path& p, const GridField<T>& f, const std::string& name)
{
  auto os = detail::open_out(p, std::ios::out | std::ios::binary);
  write_grid(os, f, name);
}

template <class T>
GridField<T> load_grid(const std::filesystem::path& p, std::string* name = nullptr)
{
  std::ifstream is(p, std::ios::binary);
  if (!is)
    throw ConfigError("cannot open grid snapshot '" + p.string() + "'");
  return read_grid<T>(is, name);
}

// ---------------------------------------------------------------------------
// Time series

struct TimeSeriesRow
{
  double t = 0.0;
  double psi = 0.0;
  double dissipation = 0.0;
  double max_div_residual = 0.0;
  double total_dislocation_weight = 0.0;
};

class TimeSeriesWriter
{
public:
  explicit TimeSeriesWriter(const std::filesystem::path& p) : os_(detail::open_out(p))
  {
    os_ << "t,psi,dissipation,max_div_residual,total_dislocation_weight\n";
    os_ << std::setprecision(17);
  }

  void write(const TimeSeriesRow& r)
  {
    os_ << r.t << ',' << r.psi << ',' << r.dissipation << ',' << r.max_div_residual << ','
        << r.total_dislocation_weight << '\n';
  }

private:
  std::ofstream os_;
};

/// Generic CSV table with a fixed header and full-precision numbers.
class CsvWriter
{
public:
  CsvWriter(const std::filesystem::path& p, const std::vector<std::string>& header) : os_(detail::open_out(p))
  {
    for (std::size_t i = 0; i < header.size(); ++i)
      os_ << (i ? "," : "") << header[i];
    os_ << '\n' << std::setprecision(17);
    columns_ = header.size();
  }

  void row(const std::vector<double>& values)
  {
    if (values.size() != columns_)
      throw InvalidArgument("CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i)
      os_ << (i ? "," : "") << values[i];
    os_ << '\n';
  }

private:
  std::ofstream os_;
  std::size_t columns_ = 0;
};

/// File name for a curve snapshot at time t, e.g. curve_t0.125.txt.
inline std::string curve_snapshot_name(double t)
{
  std::ostringstream os;
  os << "curve_t" << std::setprecision(10) << t << ".txt";
  return os.str();
}

} // namespace dislosim::io

#endif // DISLOSIM_IO_HPP
