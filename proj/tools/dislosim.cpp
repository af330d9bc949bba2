#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dislosim/config.hpp"
#include "dislosim/errors.hpp"
#include "dislosim/scenario.hpp"

namespace
{

enum ExitCode : int
{
  ok = 0,
  config_error = 2,
  invariant_violation = 3,
  numerical_failure = 4,
};

template <class F>
int guarded(F&& f)
{
  try
  {
    f();
    return ok;
  }
  catch (const dislosim::ConfigError& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  }
  catch (const dislosim::InvalidArgument& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  }
  catch (const dislosim::InvariantViolation& e)
  {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return invariant_violation;
  }
  catch (const dislosim::CflViolation& e)
  {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  }
  catch (const dislosim::ScrewSingularity& e)
  {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  }
  catch (const dislosim::NumericalFailure& e)
  {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  }
  catch (const std::exception& e)
  {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"dislosim: dislocation dynamics scenarios on periodic cells"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> max_steps;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "scenario configuration file")->required();
    sub->add_option("--output-dir", output_dir, "directory for snapshots and tables (overrides io.output_dir)");
    sub->add_option("--seed", seed, "seed for randomized initial conditions");
    sub->add_option("--max-steps", max_steps, "stop after this many time steps")->check(CLI::NonNegativeNumber);
  };

  auto* run = app.add_subcommand("run", "run the scenario named in the configuration");
  add_common(run);
  auto* validate = app.add_subcommand("validate", "check a configuration and print CFL and memory estimates");
  add_common(validate);
  auto* sample = app.add_subcommand("field-sample", "sample the straight-dislocation field on a grid");
  add_common(sample);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  dislosim::scenario::RunOptions opts;
  if (output_dir)
    opts.output_dir = *output_dir;
  opts.seed = seed;
  opts.max_steps = max_steps;

  return guarded([&] {
    const auto cfg = dislosim::Config::load(config_path);
    if (run->parsed())
      dislosim::scenario::run(cfg, opts, std::cout);
    else if (validate->parsed())
      dislosim::scenario::validate(cfg, opts, std::cout);
    else
      dislosim::scenario::run(cfg, opts, std::cout, "field-sample");
  });
}
