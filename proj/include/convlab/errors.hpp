#pragma once

#include <stdexcept>
#include <string>

namespace convlab {

struct construction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct model_mismatch_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Convolution mass would fall outside a RealLineGrid index range.
struct overflow_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace convlab
