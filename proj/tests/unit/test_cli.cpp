#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "dislosim/io.hpp"

namespace fs = std::filesystem;

namespace
{

struct Result
{
  int code = -1;
  std::string out;
};

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           ("dislosim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text)
  {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  Result cli(const std::string& args)
  {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = std::string("\"") + DISLOSIM_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream is(log);
    std::stringstream ss;
    ss << is.rdbuf();
    r.out = ss.str();
    return r;
  }

  fs::path dir_;
};

const std::string kSlip = R"([scenario]
name = slip-plane
[geometry]
lengths = 1 1 0.25
resolution = RES
[material]
nu = 0.3
[slip]
normal = 0 0 1
burgers = BURGERS
[loading]
mean_stress = 0 0 0 0 0 0
[initial]
kind = disc
radius = 0.25
height = 0.1
[run]
coupled = false
dt = 0.01
t_end = 0.05
snapshot_every = 1
)";

std::string slip_config(const std::string& res = "16 16 8", const std::string& burgers = "1 0 0")
{
  std::string s = kSlip;
  s.replace(s.find("RES"), 3, res);
  s.replace(s.find("BURGERS"), 7, burgers);
  return s;
}

} // namespace

TEST_F(Cli, ShippedConfigsValidate)
{
  int count = 0;
  for (const auto& e : fs::directory_iterator(DISLOSIM_CONFIG_DIR))
  {
    if (e.path().extension() != ".cfg")
      continue;
    ++count;
    const auto r = cli("validate \"" + e.path().string() + "\"");
    EXPECT_EQ(r.code, 0) << e.path() << '\n' << r.out;
    EXPECT_EQ(r.out.rfind("ok\n", 0), 0u) << r.out;
  }
  EXPECT_EQ(count, 7);
}

TEST_F(Cli, ConfigErrorsExitWithTwo)
{
  auto r = cli("validate \"" + write("odd.cfg", slip_config("15 16 8")).string() + "\"");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("even"), std::string::npos) << r.out;

  r = cli("validate \"" + write("bg.cfg", slip_config("16 16 8", "1 0 0.5")).string() + "\"");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("b.g != 0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("bg.cfg:10:"), std::string::npos) << r.out;

  r = cli("run \"" + write("unknown.cfg", slip_config() + "extra = 1\n").string() + "\"");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("unknown key 'run.extra'"), std::string::npos) << r.out;

  r = cli("run \"" + (dir_ / "missing.cfg").string() + "\"");
  EXPECT_EQ(r.code, 2) << r.out;
  r = cli("frobnicate");
  EXPECT_EQ(r.code, 2) << r.out;
}

TEST_F(Cli, ZeroStressUncoupledRunLeavesSlipUnchanged)
{
  const auto cfg = write("zero.cfg", slip_config());
  const auto out = dir_ / "out";
  const auto r = cli("run \"" + cfg.string() + "\" --output-dir \"" + out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto first = dislosim::io::load_grid<double>(out / "eps_p_000000.grid");
  const auto last = dislosim::io::load_grid<double>(out / "eps_p_final.grid");
  EXPECT_EQ(first.data, last.data);
  EXPECT_TRUE(fs::exists(out / "eps_p_000005.grid"));
  std::ifstream ts(out / "slip_plane.csv");
  std::string header;
  std::getline(ts, header);
  EXPECT_EQ(header, "t,psi,dissipation,max_div_residual,total_dislocation_weight");
}

TEST_F(Cli, FieldSampleWritesGrids)
{
  const auto out = dir_ / "fs";
  const auto r = cli("field-sample \"" + (fs::path(DISLOSIM_CONFIG_DIR) / "field_sample.cfg").string() +
                     "\" --output-dir \"" + out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.out;
  std::string name;
  const auto T = dislosim::io::load_grid<dislosim::SymTensor3>(out / "stress.grid", &name);
  EXPECT_EQ(name, "stress");
  EXPECT_EQ(T.cell.resolution(), (std::array<int, 3>{32, 32, 8}));
  EXPECT_TRUE(fs::exists(out / "displacement.grid"));
}

TEST_F(Cli, InvariantViolationExitsWithThree)
{
  write("hairpin.txt", "burgers 0 0 1\n0 0 0\n0.25 0 0\n0.5 0 0\n0.75 0 0\n1 0 0\n1 0.01 0\n0.75 0.01 0\n"
                       "0.5 0.01 0\n0.25 0.01 0\n0 0.01 0\n");
  const auto cfg = write("hairpin.cfg", "[scenario]\nname = curve-glide\n[curve]\nfile = hairpin.txt\nh_max = 0.5\n"
                                        "[run]\ndt = 0.1\nt_end = 1\n");
  const auto r = cli("run \"" + cfg.string() + "\" --output-dir \"" + (dir_ / "out").string() + "\"");
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("approaches itself"), std::string::npos) << r.out;
}

TEST_F(Cli, VerifyAnalyticPasses)
{
  const auto out = dir_ / "va";
  const auto r = cli("run \"" + (fs::path(DISLOSIM_CONFIG_DIR) / "verify_analytic.cfg").string() +
                     "\" --output-dir \"" + out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream is(out / "verify_analytic.txt");
  std::stringstream ss;
  ss << is.rdbuf();
  EXPECT_NE(ss.str().find("result pass"), std::string::npos) << ss.str();
}

TEST_F(Cli, LoopShrinkTracksExactRadius)
{
  const auto out = dir_ / "ls";
  const auto r = cli("run \"" + (fs::path(DISLOSIM_CONFIG_DIR) / "loop_shrink.cfg").string() +
                     "\" --output-dir \"" + out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream is(out / "loop_radius.csv");
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,radius,radius_exact,relative_error,plane_residual");
  double worst = 0.0;
  int rows = 0;
  while (std::getline(is, line))
  {
    std::stringstream ls(line);
    std::string cell;
    for (int i = 0; i < 4; ++i)
      std::getline(ls, cell, ',');
    worst = std::max(worst, std::stod(cell));
    ++rows;
  }
  EXPECT_GT(rows, 10);
  EXPECT_LT(worst, 1e-3);
}
