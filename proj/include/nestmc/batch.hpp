#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nestmc {

// N joint draws: inner payoff vectors X (N x J) and outer observations
// Y (N x K), row-aligned so row i is the joint draw (X^(i), Y^(i)).
struct SampleBatch {
  std::size_t n = 0;
  std::size_t j_dim = 0;
  std::size_t k_dim = 0;
  std::vector<double> x;  // n * j_dim, row-major
  std::vector<double> y;  // n * k_dim, row-major

  SampleBatch() = default;
  SampleBatch(std::size_t rows, std::size_t j, std::size_t k)
      : n(rows), j_dim(j), k_dim(k), x(rows * j, 0.0), y(rows * k, 0.0) {}

  std::span<const double> x_row(std::size_t i) const {
    return {x.data() + i * j_dim, j_dim};
  }
  std::span<const double> y_row(std::size_t i) const {
    return {y.data() + i * k_dim, k_dim};
  }
  double x_at(std::size_t i, std::size_t j) const { return x[i * j_dim + j]; }
  double y_at(std::size_t i, std::size_t k) const { return y[i * k_dim + k]; }
  double& x_at(std::size_t i, std::size_t j) { return x[i * j_dim + j]; }
  double& y_at(std::size_t i, std::size_t k) { return y[i * k_dim + k]; }
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Exact log2 of a power of two.
inline int log2_exact(std::size_t n) {
  int m = 0;
  while ((std::size_t{1} << m) < n) ++m;
  return m;
}

}  // namespace nestmc
