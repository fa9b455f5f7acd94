#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nestmc/batch.hpp"
#include "nestmc/outer_function.hpp"
#include "nestmc/rng.hpp"

namespace nestmc {

// A generative model for a nested expectation E_Y f(E[X|Y]): a joint
// sampler over (X, Y), the outer map f, and optional extras — an analytic
// truth value, a conditional sampler for X | Y (n draws, row-major n x J),
// and the exact conditional mean E[X|Y] when it has a closed form.
// Instances are immutable after construction; samplers take an explicit
// stream and are otherwise pure.
struct NestedProblem {
  std::string name;
  std::size_t j_dim = 0;
  std::size_t k_dim = 0;
  OuterFunction f;
  std::function<SampleBatch(std::size_t, RngStream&)> sample_joint;
  std::optional<double> truth;
  std::function<std::vector<double>(std::span<const double>, std::size_t, RngStream&)>
      inner_conditional;
  std::function<std::vector<double>(std::span<const double>)> conditional_mean;
};

}  // namespace nestmc
