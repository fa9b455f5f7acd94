#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>

namespace nestmc {

// The outer map f: R^J -> R applied to inner-mean vectors. eval must be
// deterministic and total on finite inputs.
struct OuterFunction {
  std::size_t j_dim = 0;
  std::function<double(std::span<const double>)> eval;
};

// f(x) = max_j x_j, the decision rule behind value-of-information targets.
inline OuterFunction max_component(std::size_t j_dim) {
  return {j_dim, [](std::span<const double> x) {
            return *std::max_element(x.begin(), x.end());
          }};
}

}  // namespace nestmc
