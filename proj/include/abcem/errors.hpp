#pragma once

#include <stdexcept>

namespace abcem {

// Bad arguments, bad configuration values, malformed inputs.
class invalid_parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base class for failures raised while a model or solver is running.
class simulation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Market clearance has no admissible price (no bracket / nonpositive root).
class clearance_error : public simulation_error {
 public:
  using simulation_error::simulation_error;
};

// A wealth update produced a nonpositive wealth.
class bankruptcy_error : public simulation_error {
 public:
  using simulation_error::simulation_error;
};

// A return history makes the log utility undefined somewhere on the
// feasible allocation range (total-loss scenario).
class degenerate_history_error : public simulation_error {
 public:
  using simulation_error::simulation_error;
};

// The nonlocal coefficient of the mean-field drift is not positive.
class singular_coefficient_error : public simulation_error {
 public:
  using simulation_error::simulation_error;
};

// A requested explicit step violates the scheme's CFL bound.
class cfl_error : public simulation_error {
 public:
  using simulation_error::simulation_error;
};

// An iterative solve did not reach its tolerance within the step budget.
class convergence_error : public simulation_error {
 public:
  using simulation_error::simulation_error;
};

}  // namespace abcem
