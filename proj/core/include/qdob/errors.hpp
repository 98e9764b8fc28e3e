#pragma once

#include <stdexcept>

namespace qdob {

// Invalid hyperparameters or a filter configuration that cannot be realized.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure while evaluating a transfer function, integral, or
// simulation (overflow, pole proximity, non convergence).
class eval_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdob
