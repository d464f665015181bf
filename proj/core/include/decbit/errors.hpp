#pragma once

#include <stdexcept>
#include <string>

namespace decbit {

// Input outside the mathematical domain of a metric (e.g. fairness of an
// all-zero vector).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Scenario or graph description that cannot be simulated as given.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Event ordering or bookkeeping invariant broken while the simulation runs.
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace decbit
