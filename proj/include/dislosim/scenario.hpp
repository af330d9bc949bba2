#ifndef DISLOSIM_SCENARIO_HPP
#define DISLOSIM_SCENARIO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dislosim/analytic.hpp"
#include "dislosim/config.hpp"
#include "dislosim/continuum.hpp"
#include "dislosim/curves.hpp"
#include "dislosim/io.hpp"

/// Named experiments driven by a Config. Every function throws the library
/// exception types; the command line tool maps them to exit codes.
namespace dislosim::scenario
{

inline const std::vector<std::string>& names()
{
  static const std::vector<std::string> n{"field-sample", "verify-analytic", "curve-glide",    "loop-shrink",
                                          "slip-plane",   "relaxation",      "classical-compare"};
  return n;
}

struct RunOptions
{
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> max_steps;
};

namespace detail
{

template <class F>
auto checked(const Config& c, const std::string& key, F&& f)
{
  try
  {
    return f();
  }
  catch (const InvalidArgument& e)
  {
    c.fail(c.line_of(key), e.what());
  }
}

inline PeriodicCell parse_cell(const Config& c)
{
  const Vec3 L = c.get_vec3("geometry.lengths");
  const auto n = c.get_int3("geometry.resolution");
  return checked(c, "geometry.resolution", [&] { return PeriodicCell({L.x1, L.x2, L.x3}, n); });
}

inline Elasticity parse_elasticity(const Config& c)
{
  if (c.has("material.stiffness"))
  {
    const auto v = c.numbers("material.stiffness", 36);
    Matrix6 m;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        m(i, j) = v[6 * i + j];
    return checked(c, "material.stiffness", [&] { return Elasticity(GeneralElasticity(m)); });
  }
  const double mu = c.get_double("material.mu", 1.0);
  if (c.has("material.nu"))
  {
    const double nu = c.get_double("material.nu");
    return checked(c, "material.nu", [&] { return Elasticity(IsotropicElasticity::from_poisson(mu, nu)); });
  }
  const double lambda = c.get_double("material.lambda");
  return checked(c, "material.lambda", [&] { return Elasticity(IsotropicElasticity(lambda, mu)); });
}

inline IsotropicElasticity parse_isotropic(const Config& c)
{
  if (c.has("material.stiffness"))
    c.fail(c.line_of("material.stiffness"), "the analytic solution needs isotropic material (lambda, mu)");
  return std::get<IsotropicElasticity>(parse_elasticity(c));
}

inline MobilityLaw parse_mobility(const Config& c)
{
  const double C = c.get_double("mobility.C", 1.0);
  const double gamma = c.get_double("mobility.gamma", 1.0);
  return checked(c, "mobility.gamma", [&] { return MobilityLaw(C, gamma); });
}

/// Six numbers in the order 11 22 33 12 13 23.
inline SymTensor3 parse_stress(const Config& c)
{
  if (!c.has("loading.mean_stress"))
    return {};
  const auto v = c.numbers("loading.mean_stress", 6);
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

inline SlipSystem parse_slip(const Config& c)
{
  const Vec3 g = c.get_vec3("slip.normal");
  const Vec3 b = c.get_vec3("slip.burgers");
  return checked(c, "slip.burgers", [&] {
    if (!(norm(g) > 0.0))
      throw InvalidArgument("slip.normal must be nonzero");
    return SlipSystem(normalized(g), b);
  });
}

struct RunParams
{
  double dt = 0.0;
  double t_end = 0.0;
  long snapshot_every = 0;
  double cfl = 0.5;
};

inline RunParams parse_run(const Config& c)
{
  RunParams r;
  r.dt = c.get_double("run.dt");
  r.t_end = c.get_double("run.t_end");
  r.snapshot_every = c.get_int("run.snapshot_every", 0);
  r.cfl = c.get_double("run.cfl", 0.5);
  if (!(r.dt > 0.0))
    c.fail(c.line_of("run.dt"), "run.dt must be positive");
  if (!(r.t_end >= 0.0))
    c.fail(c.line_of("run.t_end"), "run.t_end must be non-negative");
  if (r.snapshot_every < 0)
    c.fail(c.line_of("run.snapshot_every"), "run.snapshot_every must be non-negative");
  if (!(r.cfl > 0.0 && r.cfl <= 1.0))
    c.fail(c.line_of("run.cfl"), "run.cfl must lie in (0, 1]");
  return r;
}

inline std::filesystem::path output_dir(const Config& c, const RunOptions& o)
{
  const std::string cfg_dir = c.get_string("io.output_dir", "output");
  std::filesystem::path p = o.output_dir ? *o.output_dir : std::filesystem::path(cfg_dir);
  std::filesystem::create_directories(p);
  return p;
}

/// Marks the keys every scenario accepts, then rejects unknown ones.
inline void finish_parse(const Config& c)
{
  c.get_string("io.output_dir", "");
  c.check_all_used();
}

inline std::filesystem::path resolve_relative(const Config& c, const std::string& p)
{
  std::filesystem::path path(p);
  if (path.is_absolute())
    return path;
  return std::filesystem::path(c.source()).parent_path() / path;
}

/// Smooth periodic random field Σ a cos(k·x) + b sin(k·x) over in-plane modes
/// 1..max_mode, normalized to the given max amplitude.
inline ScalarField random_slip(const PeriodicCell& cell, const SlipSystem& sys, double amplitude, int max_mode,
                               std::uint64_t seed)
{
  const int a = sys.normal_axis();
  const int p = (a + 1) % 3;
  const int q = (a + 2) % 3;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  struct Mode
  {
    int kp, kq;
    double c, s;
  };
  std::vector<Mode> modes;
  for (int i = -max_mode; i <= max_mode; ++i)
    for (int j = 0; j <= max_mode; ++j)
      if ((i != 0 || j != 0) && !(j == 0 && i < 0))
        modes.push_back({i, j, nd(rng), nd(rng)});
  ScalarField f = ScalarField::from_function(cell, [&](const Vec3& x) {
    double v = 0.0;
    for (const auto& m : modes)
    {
      const double ph = 2.0 * std::numbers::pi * (m.kp * x[p] / cell.length(p) + m.kq * x[q] / cell.length(q));
      v += m.c * std::cos(ph) + m.s * std::sin(ph);
    }
    return v;
  });
  double mx = 0.0;
  for (double v : f.data)
    mx = std::max(mx, std::abs(v));
  for (double& v : f.data)
    v *= amplitude / mx;
  return f;
}

inline ScalarField parse_initial(const Config& c, const PeriodicCell& cell, const SlipSystem& sys,
                                 const RunOptions& o)
{
  const std::string kind = c.get_string("initial.kind");
  const double bn = norm(sys.b());
  if (sys.normal_axis() < 0)
    c.fail(c.line_of("slip.normal"), "slip.normal must be aligned with a cell axis for the slip-plane solver");
  if (kind == "disc")
  {
    const Vec3 centre = c.get_vec3("initial.center", {0.5 * cell.length(0), 0.5 * cell.length(1),
                                                       0.5 * cell.length(2)});
    const double radius = c.get_double("initial.radius");
    const double height = c.get_double("initial.height", bn);
    const double width = c.get_double("initial.width", 0.0);
    if (!(radius > 0.0))
      c.fail(c.line_of("initial.radius"), "initial.radius must be positive");
    return mollified_disc(cell, sys, centre, radius, height, width);
  }
  if (kind == "tent")
  {
    const long axis = c.get_int("initial.axis");
    if (axis < 1 || axis > 3)
      c.fail(c.line_of("initial.axis"), "initial.axis must be 1, 2 or 3");
    return periodic_tent(cell, static_cast<int>(axis - 1), c.get_double("initial.slope"));
  }
  if (kind == "random")
  {
    const double amp = c.get_double("initial.amplitude", bn);
    const long modes = c.get_int("initial.max_mode", 3);
    if (modes < 1)
      c.fail(c.line_of("initial.max_mode"), "initial.max_mode must be >= 1");
    const std::uint64_t seed = o.seed ? *o.seed : static_cast<std::uint64_t>(c.get_int("initial.seed", 0));
    return random_slip(cell, sys, amp, static_cast<int>(modes), seed);
  }
  if (kind == "uniform")
    return ScalarField(cell, c.get_double("initial.value"));
  c.fail(c.line_of("initial.kind"), "unknown initial.kind '" + kind + "' (disc, tent, random, uniform)");
}

inline std::string fmt(double v, int precision = 6)
{
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

inline std::string step_tag(long step)
{
  std::ostringstream os;
  os << std::setw(6) << std::setfill('0') << step;
  return os.str();
}

inline std::vector<DislocationCurve> parse_curves(const Config& c)
{
  if (c.has("curve.file"))
    return io::load_curves(resolve_relative(c, c.get_string("curve.file")));
  const double R = c.get_double("curve.radius");
  const long nodes = c.get_int("curve.nodes", 64);
  const Vec3 centre = c.get_vec3("curve.center", {});
  const Vec3 normal = c.get_vec3("curve.normal", {0.0, 0.0, 1.0});
  const Vec3 b = c.get_vec3("curve.burgers");
  const double phase = c.get_double("curve.phase", 0.5);
  return {checked(c, "curve.radius",
                  [&] { return circular_loop(centre, R, normal, static_cast<int>(nodes), b, phase); })};
}

struct CurveSetup
{
  std::vector<DislocationCurve> curves;
  MobilityLaw law;
  SymTensor3 stress;
  RunParams run;
  CurveStepOptions step;
};

inline CurveSetup parse_curve_setup(const Config& c)
{
  CurveSetup s{parse_curves(c), parse_mobility(c), parse_stress(c), parse_run(c), {}};
  s.step.cfl = s.run.cfl;
  s.step.h_max = c.get_double("curve.h_max", std::numeric_limits<double>::infinity());
  s.step.eps_screw = c.get_double("curve.eps_screw", default_screw_tolerance);
  if (s.curves.empty())
    c.fail(0, "no curves defined");
  return s;
}

inline double curve_speed_bound(const CurveSetup& s)
{
  double v = 0.0;
  for (const auto& c : s.curves)
    v = std::max(v, std::abs(s.law(norm(s.stress * c.burgers()))));
  return v;
}

/// Largest admissible time step for the current curve configuration.
inline double curve_dt_limit(const std::vector<CurveState>& states, const StressProvider& stress,
                             const MobilityLaw& law, const CurveStepOptions& opt)
{
  double lim = std::numeric_limits<double>::infinity();
  for (const auto& s : states)
  {
    const auto v = nodal_velocity(s, stress, law, opt.eps_screw);
    double vmax = 0.0;
    for (const auto& x : v)
      vmax = std::max(vmax, norm(x));
    if (vmax > 0.0)
      lim = std::min(lim, opt.cfl * s.curve.min_segment_length() / vmax);
  }
  return lim;
}

struct GridSetup
{
  PeriodicCell cell;
  Elasticity elasticity;
  MobilityLaw law;
  SymTensor3 mean_stress;
  SlipSystem system;
  RunParams run;
  ScalarField eps0;
};

inline GridSetup parse_grid_setup(const Config& c, const RunOptions& o)
{
  const PeriodicCell cell = parse_cell(c);
  const SlipSystem sys = parse_slip(c);
  return {cell, parse_elasticity(c), parse_mobility(c), parse_stress(c), sys, parse_run(c),
          parse_initial(c, cell, sys, o)};
}

inline double grid_dt_limit(const GridSetup& s)
{
  const SlipField sf{s.eps0, s.system};
  const double f = std::abs(s.law(norm(s.system.b()) * contract(s.system.m(), s.mean_stress)));
  return f > 0.0 ? slip_cfl_limit(sf, s.run.cfl) / f : std::numeric_limits<double>::infinity();
}

inline double grid_memory_mib(const PeriodicCell& cell)
{
  // stress, displacement, eigenstrain, slip field and scratch, plus spectra
  const double n = static_cast<double>(cell.size());
  return n * (8.0 * (6 + 3 + 6 + 4 + 6) + 16.0 * (6 + 3 + 6 + 1)) / (1024.0 * 1024.0);
}

inline long step_budget(const RunOptions& o)
{
  return o.max_steps ? *o.max_steps : std::numeric_limits<long>::max();
}

} // namespace detail

// ---------------------------------------------------------------------------

/// Samples the straight-dislocation field on the cell nodes, shifted by half a
/// spacing and centred on the line so that no node lies on the cut.
inline void field_sample(const Config& c, const RunOptions& o, std::ostream& log)
{
  const PeriodicCell cell = detail::parse_cell(c);
  const auto D = detail::parse_isotropic(c);
  const double b1 = c.get_double("analytic.b1");
  const double b3 = c.get_double("analytic.b3");
  const analytic::StraightDislocation d =
    detail::checked(c, "analytic.b1", [&] { return analytic::StraightDislocation(b1, b3, D); });
  detail::finish_parse(c);
  const auto out = detail::output_dir(c, o);
  auto shifted = [&](std::size_t n) {
    const auto ijk = cell.coordinates(n);
    Vec3 x;
    for (int a = 0; a < 3; ++a)
      x[a] = (ijk[a] + 0.5) * cell.spacing(a) - 0.5 * cell.length(a);
    return x;
  };
  SymTensorField T(cell);
  VectorField u(cell);
  for (std::size_t n = 0; n < cell.size(); ++n)
  {
    const Vec3 x = shifted(n);
    T.data[n] = analytic::stress(d, x);
    u.data[n] = analytic::displacement(d, x);
  }
  io::save_grid(out / "stress.grid", T, "stress");
  io::save_grid(out / "displacement.grid", u, "displacement");
  log << "field-sample: wrote stress.grid and displacement.grid (" << cell.size() << " nodes) to " << out.string()
      << '\n';
}

/// Check table for the straight-dislocation solution: displacement jump, stress
/// continuity across the cut, equilibrium residual against h, traction decay.
inline void verify_analytic(const Config& c, const RunOptions& o, std::ostream& log)
{
  const auto D = detail::parse_isotropic(c);
  const double b1 = c.get_double("analytic.b1");
  const double b3 = c.get_double("analytic.b3");
  const analytic::StraightDislocation d =
    detail::checked(c, "analytic.b1", [&] { return analytic::StraightDislocation(b1, b3, D); });
  detail::finish_parse(c);
  const auto out = detail::output_dir(c, o);
  std::ofstream table(out / "verify_analytic.txt");
  table << std::setprecision(10);
  bool ok = true;
  std::vector<std::string> failures;

  double jump_err = 0.0;
  double cont_err = 0.0;
  for (int k = 0; k < 20; ++k)
  {
    const double x1 = 0.1 + 0.1 * k;
    const double x3 = -1.0 + 0.1 * k;
    const Vec3 j = analytic::displacement_jump(d, x1, x3);
    jump_err = std::max(jump_err, norm(j + Vec3{b1, 0.0, b3}));
    const SymTensor3 dT = analytic::stress(d, {x1, 1e-13, x3}) - analytic::stress(d, {x1, -1e-13, x3});
    cont_err = std::max(cont_err, norm(dT));
  }
  table << "check value tolerance\n";
  table << "displacement_jump_error " << jump_err << " 1e-10\n";
  table << "stress_continuity_error " << cont_err << " 1e-10\n";
  if (!(jump_err <= 1e-10))
    failures.push_back("displacement jump error " + detail::fmt(jump_err) + " > 1e-10");
  if (!(cont_err <= 1e-10))
    failures.push_back("stress continuity error " + detail::fmt(cont_err) + " > 1e-10");

  const Vec3 x{0.7, 0.4, 0.2};
  const std::vector<double> hs{1e-2, 1e-3, 1e-4};
  std::vector<double> res;
  for (double h : hs)
  {
    res.push_back(analytic::verify_equilibrium(d, x, h));
    table << "equilibrium_residual h=" << h << ' ' << res.back() << " -\n";
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < hs.size(); ++i)
  {
    const double lx = std::log10(hs[i]);
    const double ly = std::log10(res[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(hs.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  table << "equilibrium_slope " << slope << " 2+-0.2\n";
  if (!(std::abs(slope - 2.0) <= 0.2))
    failures.push_back("equilibrium convergence slope " + detail::fmt(slope) + " not within 2 +- 0.2");

  const Box box{{-0.8, -0.9, -1.0}, {1.2, 0.7, 1.1}};
  const std::vector<VectorTestFunction> phis{
    VectorTestFunction([box](const Vec3& y) { return box_bump(box, y) * Vec3{1.0, 0.5, -0.3}; }, box),
    VectorTestFunction([box](const Vec3& y) { return box_bump(box, y) * Vec3{y.x1, y.x2 + 0.3, 1.0}; }, box),
    VectorTestFunction([box](const Vec3& y) { return box_bump(box, y) * Vec3{std::sin(y.x2), y.x1 * y.x1, y.x1}; },
                       box)};
  for (std::size_t p = 0; p < phis.size(); ++p)
  {
    double prev = std::numeric_limits<double>::infinity();
    for (double r : {0.1, 0.05, 0.025})
    {
      const Vec3 flux = analytic::traction_limit_integral(d, r, phis[p]);
      const double v = std::abs(flux.x1 + flux.x2 + flux.x3);
      table << "traction_integral phi" << p + 1 << " r=" << r << ' ' << v << " decreasing\n";
      if (!(v < prev))
        failures.push_back("traction integral for test function " + std::to_string(p + 1) +
                           " not decreasing at r = " + detail::fmt(r));
      prev = v;
    }
  }
  ok = failures.empty();
  table << "result " << (ok ? "pass" : "fail") << '\n';
  log << "verify-analytic: jump error " << detail::fmt(jump_err) << ", continuity error " << detail::fmt(cont_err)
      << ", equilibrium slope " << detail::fmt(slope, 4) << "; table written to "
      << (out / "verify_analytic.txt").string() << '\n';
  if (!ok)
    throw InvariantViolation("verify-analytic: " + failures.front());
}

/// Front tracking of curves under a uniform stress.
inline void curve_glide(const Config& c, const RunOptions& o, std::ostream& log)
{
  auto s = detail::parse_curve_setup(c);
  detail::finish_parse(c);
  const auto out = detail::output_dir(c, o);
  const StressProvider stress = uniform_stress(s.stress);
  std::vector<CurveState> states;
  for (auto& cv : s.curves)
    states.push_back({cv, 0.0});
  io::CsvWriter csv(out / "curve_series.csv", {"t", "length", "dissipation_rate"});
  auto record = [&](double t) {
    double len = 0.0, dis = 0.0;
    for (const auto& st : states)
    {
      len += st.curve.length();
      dis += nodal_dissipation(st, stress, s.law, s.step.eps_screw);
    }
    csv.row({t, len, dis});
  };
  auto snapshot = [&](double t) {
    std::vector<DislocationCurve> cs;
    for (const auto& st : states)
      cs.push_back(st.curve);
    io::save_curves(out / io::curve_snapshot_name(t), cs);
  };
  double t = 0.0;
  long step = 0;
  const long budget = detail::step_budget(o);
  record(t);
  snapshot(t);
  while (t < s.run.t_end && step < budget)
  {
    const double lim = detail::curve_dt_limit(states, stress, s.law, s.step);
    const double dt = std::min({s.run.dt, s.run.t_end - t, lim});
    for (auto& st : states)
      st = dislosim::step(st, stress, s.law, dt, s.step);
    t += dt;
    ++step;
    record(t);
    if (s.run.snapshot_every > 0 && step % s.run.snapshot_every == 0)
      snapshot(t);
  }
  snapshot(t);
  log << "curve-glide: " << step << " steps to t = " << detail::fmt(t) << "; output in " << out.string() << '\n';
}

/// Planar circular loop under uniform resolved shear; compares the enclosed-area
/// radius with R0 + f(|b| m:T) t.
inline void loop_shrink(const Config& c, const RunOptions& o, std::ostream& log)
{
  auto s = detail::parse_curve_setup(c);
  if (c.has("curve.file"))
    c.fail(c.line_of("curve.file"), "loop-shrink builds its own circle; remove curve.file");
  const Vec3 normal = normalized(c.get_vec3("curve.normal", {0.0, 0.0, 1.0}));
  const double R0 = c.get_double("curve.radius");
  detail::finish_parse(c);
  const SlipSystem sys =
    detail::checked(c, "curve.burgers", [&] { return SlipSystem(normal, s.curves.front().burgers()); });
  const double speed = s.law(norm(sys.b()) * contract(sys.m(), s.stress));
  const auto out = detail::output_dir(c, o);
  const StressProvider stress = uniform_stress(s.stress);
  CurveState st{s.curves.front(), 0.0};
  const Vec3 x_ref = st.curve.vertices().front();
  io::CsvWriter csv(out / "loop_radius.csv", {"t", "radius", "radius_exact", "relative_error", "plane_residual"});
  double worst = 0.0;
  long step = 0;
  const long budget = detail::step_budget(o);
  auto record = [&] {
    const double R = equivalent_radius(st.curve, normal);
    const double Rx = R0 + speed * st.time;
    const double err = std::abs(R - Rx) / Rx;
    const double plane = plane_confinement_residual(st, normal, x_ref);
    worst = std::max(worst, err);
    csv.row({st.time, R, Rx, err, plane});
    if (plane > 1e-10)
      throw InvariantViolation("loop-shrink: plane confinement residual " + detail::fmt(plane) + " > 1e-10");
  };
  record();
  io::save_curves(out / io::curve_snapshot_name(0.0), std::span<const DislocationCurve>(&st.curve, 1));
  while (st.time < s.run.t_end && step < budget)
  {
    if (R0 + speed * st.time <= 0.1 * R0)
      break;
    const double lim = detail::curve_dt_limit({st}, stress, s.law, s.step);
    const double dt = std::min({s.run.dt, s.run.t_end - st.time, lim});
    st = dislosim::step(st, stress, s.law, dt, s.step);
    ++step;
    record();
    if (s.run.snapshot_every > 0 && step % s.run.snapshot_every == 0)
      io::save_curves(out / io::curve_snapshot_name(st.time), std::span<const DislocationCurve>(&st.curve, 1));
  }
  io::save_curves(out / io::curve_snapshot_name(st.time), std::span<const DislocationCurve>(&st.curve, 1));
  log << "loop-shrink: " << step << " steps to t = " << detail::fmt(st.time) << ", radial speed "
      << detail::fmt(speed) << ", max relative radius error " << detail::fmt(worst, 4) << '\n';
}

namespace detail
{
enum class SlipMode
{
  free,       // coupled or uniform stress as configured
  relaxation, // coupled, zero mean stress, energy and volume checks enforced
};

inline void run_slip_grid(const Config& c, const RunOptions& o, std::ostream& log, SlipMode mode)
{
  GridSetup s = parse_grid_setup(c, o);
  const bool coupled = c.get_bool("run.coupled", true);
  if (mode == SlipMode::relaxation && !coupled)
    c.fail(c.line_of("run.coupled"), "relaxation requires the coupled elasticity solve");
  const double energy_rel_tol = c.get_double("run.energy_tolerance", 1e-10);
  if (mode == SlipMode::relaxation && !(s.mean_stress == SymTensor3{}))
    c.fail(c.line_of("loading.mean_stress"), "relaxation requires zero mean stress");
  detail::finish_parse(c);
  const auto out = output_dir(c, o);
  const std::string stem = mode == SlipMode::relaxation ? "relaxation" : "slip_plane";

  auto solve = [&](const SlipField& sf) {
    if (coupled)
      return solve_elasticity(sf, s.elasticity, s.mean_stress);
    MechanicalState st{SymTensorField(s.cell, s.mean_stress), s.mean_stress, s.elasticity, 0.0,
                       VectorField(s.cell), apply_compliance(s.elasticity, s.mean_stress), 0.0};
    st.free_energy = free_energy(st.stress, s.elasticity);
    return st;
  };

  SlipField sf{s.eps0, s.system};
  MechanicalState state = solve(sf);
  const double psi0 = state.free_energy;
  const double tol_energy = energy_rel_tol * std::max(psi0, std::numeric_limits<double>::min());
  io::TimeSeriesWriter ts(out / (stem + ".csv"));
  double max_div = state.div_residual;
  ts.write({0.0, state.free_energy, 0.0, max_div, dislocation_density_of_slip(sf).total_weight()});
  io::save_grid(out / ("eps_p_" + step_tag(0) + ".grid"), sf.eps_p, "eps_p");

  double t = 0.0;
  long step = 0;
  const long budget = step_budget(o);
  double total_dissipation = 0.0;
  while (t < s.run.t_end && step < budget)
  {
    const double dt = std::min(s.run.dt, s.run.t_end - t);
    const ScalarField rate = slip_rate(sf, state, s.law);
    SlipField next = evolve_slip(sf, state, s.law, dt, {.cfl = s.run.cfl, .eps_dir = 1e-10, .frozen_gradient = std::nullopt});
    MechanicalState after = solve(next);
    if (after.div_residual > 1e-10)
      throw InvariantViolation("equilibrium residual " + fmt(after.div_residual) + " > 1e-10 at step " +
                               std::to_string(step + 1));
    const EnergyRecord e = energy_ledger(state, after, rate, s.system, dt, tol_energy);
    if (mode == SlipMode::relaxation)
    {
      const double vol = embed_slip(next).volume_residual();
      if (vol > 1e-12)
        throw InvariantViolation("volume conservation residual |b.h_p| = " + fmt(vol) + " > 1e-12");
    }
    total_dissipation += e.dissipation;
    sf = std::move(next);
    state = std::move(after);
    t += dt;
    ++step;
    max_div = std::max(max_div, state.div_residual);
    ts.write({t, state.free_energy, e.dissipation, max_div, dislocation_density_of_slip(sf).total_weight()});
    if (s.run.snapshot_every > 0 && step % s.run.snapshot_every == 0)
      io::save_grid(out / ("eps_p_" + step_tag(step) + ".grid"), sf.eps_p, "eps_p");
  }
  io::save_grid(out / "eps_p_final.grid", sf.eps_p, "eps_p");
  log << stem << ": " << step << " steps to t = " << fmt(t) << ", psi " << fmt(psi0) << " -> "
      << fmt(state.free_energy) << ", dissipation " << fmt(total_dissipation) << ", max div residual "
      << fmt(max_div, 3) << '\n';
}
} // namespace detail

inline void slip_plane(const Config& c, const RunOptions& o, std::ostream& log)
{
  detail::run_slip_grid(c, o, log, detail::SlipMode::free);
}

inline void relaxation(const Config& c, const RunOptions& o, std::ostream& log)
{
  detail::run_slip_grid(c, o, log, detail::SlipMode::relaxation);
}

/// Runs the slip-plane law with |∇_g ε_p| frozen and the classical pointwise law
/// side by side under the same stress.
inline void classical_compare(const Config& c, const RunOptions& o, std::ostream& log)
{
  detail::GridSetup s = detail::parse_grid_setup(c, o);
  const bool coupled = c.get_bool("run.coupled", true);
  const double frozen = c.get_double("run.frozen_gradient", 1.0);
  detail::finish_parse(c);
  const auto out = detail::output_dir(c, o);
  SlipField sf{s.eps0, s.system};
  ScalarField classical = s.eps0;
  const double bn = norm(s.system.b());
  auto solve = [&](const SlipField& f) {
    if (coupled)
      return solve_elasticity(f, s.elasticity, s.mean_stress);
    return MechanicalState{SymTensorField(s.cell, s.mean_stress), s.mean_stress, s.elasticity, 0.0,
                           VectorField(s.cell), {}, 0.0};
  };
  io::CsvWriter series(out / "classical_compare_series.csv", {"t", "max_abs_difference"});
  double t = 0.0;
  long step = 0;
  double worst = 0.0;
  const long budget = detail::step_budget(o);
  series.row({0.0, 0.0});
  while (t < s.run.t_end && step < budget)
  {
    const double dt = std::min(s.run.dt, s.run.t_end - t);
    const MechanicalState state = solve(sf);
    sf = evolve_slip(sf, state, s.law, dt, {.cfl = s.run.cfl, .frozen_gradient = frozen});
    classical = classical_step(classical, s.system, state, s.law, dt, bn * frozen);
    t += dt;
    ++step;
    double d = 0.0;
    for (std::size_t n = 0; n < classical.size(); ++n)
      d = std::max(d, std::abs(sf.eps_p.data[n] - classical.data[n]));
    worst = std::max(worst, d);
    series.row({t, d});
  }
  io::CsvWriter csv(out / "classical_compare.csv", {"x1", "x2", "x3", "eps_p_new", "eps_p_classical"});
  for (std::size_t n = 0; n < classical.size(); ++n)
  {
    const Vec3 x = s.cell.position(n);
    csv.row({x.x1, x.x2, x.x3, sf.eps_p.data[n], classical.data[n]});
  }
  log << "classical-compare: " << step << " steps to t = " << detail::fmt(t) << ", max |eps_new - eps_classical| = "
      << detail::fmt(worst, 3) << '\n';
}

/// Runs the scenario named in [scenario] name (or `forced`, when given).
inline void run(const Config& c, const RunOptions& o, std::ostream& log, const std::string& forced = {})
{
  const std::string name = forced.empty() ? c.get_string("scenario.name") : forced;
  if (!forced.empty() && c.has("scenario.name") && c.get_string("scenario.name") != forced)
    c.fail(c.line_of("scenario.name"), "scenario.name does not match the '" + forced + "' command");
  if (name == "field-sample")
    field_sample(c, o, log);
  else if (name == "verify-analytic")
    verify_analytic(c, o, log);
  else if (name == "curve-glide")
    curve_glide(c, o, log);
  else if (name == "loop-shrink")
    loop_shrink(c, o, log);
  else if (name == "slip-plane")
    slip_plane(c, o, log);
  else if (name == "relaxation")
    relaxation(c, o, log);
  else if (name == "classical-compare")
    classical_compare(c, o, log);
  else
    c.fail(c.line_of("scenario.name"), "unknown scenario '" + name + "'");
}

/// Dry run: parses and validates everything, prints CFL and memory estimates.
inline void validate(const Config& c, const RunOptions& o, std::ostream& log)
{
  const std::string name = c.get_string("scenario.name");
  std::ostringstream est;
  if (name == "field-sample" || name == "verify-analytic")
  {
    if (name == "field-sample")
    {
      const PeriodicCell cell = detail::parse_cell(c);
      est << "memory estimate " << detail::fmt(cell.size() * 9.0 * 8.0 / (1024.0 * 1024.0), 3) << " MiB";
    }
    else
      est << "memory estimate < 1 MiB";
    detail::parse_isotropic(c);
    const double b1 = c.get_double("analytic.b1");
    const double b3 = c.get_double("analytic.b3");
    detail::checked(c, "analytic.b1", [&] { return analytic::StraightDislocation(b1, b3, IsotropicElasticity(1, 1)); });
    c.get_string("io.output_dir", "");
  }
  else if (name == "curve-glide" || name == "loop-shrink")
  {
    auto s = detail::parse_curve_setup(c);
    if (name == "loop-shrink")
    {
      const Vec3 normal = c.get_vec3("curve.normal", {0.0, 0.0, 1.0});
      detail::checked(c, "curve.burgers", [&] { return SlipSystem(normalized(normal), s.curves.front().burgers()); });
    }
    c.get_string("io.output_dir", "");
    const double v = detail::curve_speed_bound(s);
    double h = std::numeric_limits<double>::infinity();
    std::size_t nodes = 0;
    for (const auto& cv : s.curves)
    {
      h = std::min(h, cv.min_segment_length());
      nodes += cv.vertex_count();
    }
    const double lim = v > 0.0 ? s.run.cfl * h / v : std::numeric_limits<double>::infinity();
    est << "CFL estimate dt <= " << detail::fmt(lim) << " (configured dt " << detail::fmt(s.run.dt)
        << ", steps are clipped to the limit); memory estimate "
        << detail::fmt(nodes * 200.0 / (1024.0 * 1024.0), 3) << " MiB";
  }
  else if (name == "slip-plane" || name == "relaxation" || name == "classical-compare")
  {
    const detail::GridSetup s = detail::parse_grid_setup(c, o);
    c.get_bool("run.coupled", true);
    if (name == "classical-compare")
      c.get_double("run.frozen_gradient", 1.0);
    else
      c.get_double("run.energy_tolerance", 1e-10);
    if (name == "relaxation" && !(s.mean_stress == SymTensor3{}))
      c.fail(c.line_of("loading.mean_stress"), "relaxation requires zero mean stress");
    c.get_string("io.output_dir", "");
    const double lim = detail::grid_dt_limit(s);
    if (s.run.dt > lim)
      c.fail(c.line_of("run.dt"), "run.dt = " + detail::fmt(s.run.dt) + " exceeds the CFL limit " +
                                    detail::fmt(lim) + " for the applied stress");
    est << "CFL estimate dt <= " << detail::fmt(lim) << " from the applied stress (configured dt "
        << detail::fmt(s.run.dt) << "); memory estimate " << detail::fmt(detail::grid_memory_mib(s.cell), 3)
        << " MiB";
  }
  else
    c.fail(c.line_of("scenario.name"), "unknown scenario '" + name + "'");
  c.check_all_used();
  log << "ok\n" << est.str() << '\n';
}

} // namespace dislosim::scenario

#endif // DISLOSIM_SCENARIO_HPP
