#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "nestmc/batch.hpp"
#include "nestmc/errors.hpp"
#include "nestmc/outer_function.hpp"
#include "nestmc/partition.hpp"
#include "nestmc/problem.hpp"

namespace nestmc {

enum class Method { sparse_grid, simple, nested_mc };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::sparse_grid: return "sparse_grid";
    case Method::simple: return "simple";
    case Method::nested_mc: return "nested_mc";
  }
  return "unknown";
}

inline std::optional<Method> method_from_name(std::string_view name) {
  if (name == "sparse_grid") return Method::sparse_grid;
  if (name == "simple") return Method::simple;
  if (name == "nested_mc") return Method::nested_mc;
  return std::nullopt;
}

struct EstimateRecord {
  double value = 0.0;
  Method method = Method::sparse_grid;
  int m = -1;                    // depth for the stratified methods
  std::size_t n_outer = 0;       // nested_mc only
  std::size_t n_inner = 0;       // nested_mc only
  std::size_t samples_used = 0;
  std::size_t f_evals = 0;
  std::vector<std::uint64_t> seed_path;
};

// The telescoped level sums: p_terms[d] approximates the target with 2^d
// outer strata of 2^(m-d) inner samples each (value blocks); q_terms[d-1]
// is the matching index-block term that cancels the coarser level.
struct LevelTerms {
  std::vector<double> p_terms;  // d = 0..m
  std::vector<double> q_terms;  // d = 1..m
  std::size_t f_evals = 0;
};

namespace detail {

inline void check_estimator_input(const SampleBatch& batch, const OuterFunction& f) {
  if (!is_power_of_two(batch.n))
    throw NotPowerOfTwo("estimator: sample count must be a power of 2");
  if (f.j_dim != batch.j_dim)
    throw DimensionMismatch("estimator: f dimension does not match batch X");
}

// Sum of f over all leaf rows in ascending original-index order. Both
// families' singleton levels use this one order so the d = m terms cancel
// bit-exactly; each family still pays its own f evaluations.
inline double leaf_level_term(const SampleBatch& batch, const OuterFunction& f,
                              std::size_t& f_evals) {
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.n; ++i) {
    sum += f.eval(batch.x_row(i));
    ++f_evals;
  }
  return sum / static_cast<double>(batch.n);
}

}  // namespace detail

inline LevelTerms level_terms(const SampleBatch& batch, const OuterFunction& f) {
  detail::check_estimator_input(batch, f);
  const PartitionPlan plan = build_partitions(batch);
  const int m = plan.m;

  LevelTerms terms;
  terms.p_terms.resize(m + 1);
  terms.q_terms.resize(m);

  const BlockMeans value_means = block_mean_tree(batch, plan, BlockFamily::value);
  const BlockMeans index_means = block_mean_tree(batch, plan, BlockFamily::index);

  for (int d = 0; d < m; ++d) {
    double sum = 0.0;
    for (std::size_t u = 0; u < plan.block_count(d); ++u) {
      sum += f.eval(value_means.block(d, u));
      ++terms.f_evals;
    }
    terms.p_terms[d] = sum / static_cast<double>(plan.block_count(d));
  }
  for (int d = 1; d < m; ++d) {
    double sum = 0.0;
    for (std::size_t u = 0; u < plan.block_count(d); ++u) {
      sum += f.eval(index_means.block(d, u));
      ++terms.f_evals;
    }
    terms.q_terms[d - 1] = sum / static_cast<double>(plan.block_count(d));
  }
  terms.p_terms[m] = detail::leaf_level_term(batch, f, terms.f_evals);
  if (m >= 1) terms.q_terms[m - 1] = detail::leaf_level_term(batch, f, terms.f_evals);
  return terms;
}

// The sparse-grid estimator: sum of the value-block level terms minus the
// index-block correction terms, accumulated level-major.
inline EstimateRecord sparse_grid_estimate(const SampleBatch& batch,
                                           const OuterFunction& f) {
  const LevelTerms terms = level_terms(batch, f);
  double sum_p = 0.0, sum_q = 0.0;
  for (double p : terms.p_terms) sum_p += p;
  for (double q : terms.q_terms) sum_q += q;

  EstimateRecord rec;
  rec.value = sum_p - sum_q;
  rec.method = Method::sparse_grid;
  rec.m = log2_exact(batch.n);
  rec.samples_used = batch.n;
  rec.f_evals = terms.f_evals;
  return rec;
}

// The single balanced term P̂^(floor(m/2), ceil(m/2)) over value blocks.
inline EstimateRecord simple_estimate(const SampleBatch& batch, const OuterFunction& f) {
  detail::check_estimator_input(batch, f);
  const PartitionPlan plan = build_partitions(batch);
  const int d0 = plan.m / 2;
  const BlockMeans value_means = block_mean_tree(batch, plan, BlockFamily::value);

  EstimateRecord rec;
  rec.method = Method::simple;
  rec.m = plan.m;
  rec.samples_used = batch.n;
  double sum = 0.0;
  for (std::size_t u = 0; u < plan.block_count(d0); ++u) {
    sum += f.eval(value_means.block(d0, u));
    ++rec.f_evals;
  }
  rec.value = sum / static_cast<double>(plan.block_count(d0));
  return rec;
}

// Plain nested Monte Carlo: n_outer draws of Y, n_inner conditional draws
// of X each. Requires the problem's inner conditional sampler.
inline EstimateRecord nested_mc_estimate(const NestedProblem& problem,
                                         std::size_t n_outer, std::size_t n_inner,
                                         RngStream& rng) {
  if (!problem.inner_conditional)
    throw InnerSamplerUnavailable("nested_mc_estimate: problem has no inner conditional sampler");
  if (n_outer < 1 || n_inner < 1)
    throw InvalidParameter("nested_mc_estimate: n_outer and n_inner must be >= 1");

  const SampleBatch outer = problem.sample_joint(n_outer, rng);
  const std::size_t j = problem.j_dim;
  EstimateRecord rec;
  rec.method = Method::nested_mc;
  rec.n_outer = n_outer;
  rec.n_inner = n_inner;
  rec.samples_used = n_outer * n_inner;

  std::vector<double> mean(j);
  double sum = 0.0;
  for (std::size_t o = 0; o < n_outer; ++o) {
    const std::vector<double> draws = problem.inner_conditional(outer.y_row(o), n_inner, rng);
    std::fill(mean.begin(), mean.end(), 0.0);
    for (std::size_t l = 0; l < n_inner; ++l)
      for (std::size_t c = 0; c < j; ++c) mean[c] += draws[l * j + c];
    for (double& v : mean) v /= static_cast<double>(n_inner);
    sum += problem.f.eval(mean);
    ++rec.f_evals;
  }
  rec.value = sum / static_cast<double>(n_outer);
  return rec;
}

}  // namespace nestmc
