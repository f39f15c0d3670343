#pragma once

#include <stdexcept>

namespace r2l {

// Bad or missing input data (datasets, checkpoints, CLI file arguments).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// NaN/Inf encountered in a numeric pipeline (training, forward pass).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace r2l
