#pragma once

#include <stdexcept>

namespace nestmc {

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotPowerOfTwo : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct LevelOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct InnerSamplerUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingTruth : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace nestmc
