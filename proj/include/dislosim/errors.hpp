#ifndef DISLOSIM_ERRORS_HPP
#define DISLOSIM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dislosim
{

/// Invalid construction arguments or violated preconditions.
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation point lies on the branch cut or the dislocation core.
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Tangent parallel to the Burgers vector where the mobility law is undefined.
class ScrewSingularity : public std::domain_error
{
public:
  explicit ScrewSingularity(const std::string& what, std::size_t node = npos)
    : std::domain_error(what), node_(node)
  {
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Offending node index, or npos when the caller evaluated a single sample.
  std::size_t node() const noexcept { return node_; }

private:
  std::size_t node_;
};

/// Explicit time step too large; carries the largest admissible step.
class CflViolation : public std::runtime_error
{
public:
  CflViolation(const std::string& what, double suggested_dt)
    : std::runtime_error(what), suggested_dt_(suggested_dt)
  {
  }

  double suggested_dt() const noexcept { return suggested_dt_; }

private:
  double suggested_dt_;
};

/// Iterative or quadrature procedure failed to reach its tolerance.
class NumericalFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration or input file.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A physical invariant checked during a run was violated.
class InvariantViolation : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace dislosim

#endif // DISLOSIM_ERRORS_HPP
