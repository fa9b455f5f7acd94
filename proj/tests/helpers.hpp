#pragma once

// Shared generators and checkers used by both the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "nestmc/batch.hpp"
#include "nestmc/partition.hpp"
#include "nestmc/problems.hpp"
#include "nestmc/rng.hpp"

namespace testutil {

enum class TieMode { continuous, quantized, heavy };

// Random batch with X in [-1, 1]. TieMode controls how much the outer
// coordinates repeat: continuous (no ties in practice), quantized (values
// on a grid of 8), heavy (binary values plus an occasional constant column).
inline nestmc::SampleBatch random_batch(nestmc::RngStream& rng, int m, std::size_t k_dim,
                                        std::size_t j_dim, TieMode ties) {
  nestmc::SampleBatch batch(std::size_t{1} << m, j_dim, k_dim);
  for (double& v : batch.x) v = 2.0 * rng.uniform() - 1.0;
  for (std::size_t k = 0; k < k_dim; ++k) {
    const bool constant_column = ties == TieMode::heavy && rng.uniform() < 0.25;
    const double constant = rng.uniform();
    for (std::size_t i = 0; i < batch.n; ++i) {
      double v = rng.uniform();
      if (ties == TieMode::quantized)
        v = std::floor(v * 8.0) / 8.0;
      else if (ties == TieMode::heavy)
        v = constant_column ? constant : (v < 0.5 ? 0.0 : 1.0);
      batch.y_at(i, k) = v;
    }
  }
  return batch;
}

// Count of violated PartitionPlan invariants: block sizes, disjoint child
// unions (both families), the value-order constraint between siblings, the
// index-order constraint, and the level-wide permutation property.
inline std::size_t plan_violations(const nestmc::SampleBatch& batch,
                                   const nestmc::PartitionPlan& plan) {
  using nestmc::BlockFamily;
  std::size_t bad = 0;
  const std::size_t n = batch.n;

  auto is_permutation = [&](const std::vector<std::uint32_t>& order) {
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (std::uint32_t i : order) {
      if (i >= n || seen[i]) return false;
      seen[i] = true;
    }
    return true;
  };

  for (int d = 0; d <= plan.m; ++d)
    if (!is_permutation(plan.value_order[d])) ++bad;
  for (int d = 1; d <= plan.m; ++d)
    if (!is_permutation(plan.index_order[d])) ++bad;

  for (int d = 1; d <= plan.m; ++d) {
    const std::size_t k = static_cast<std::size_t>(d - 1) % batch.k_dim;
    for (std::size_t u = 0; u < plan.block_count(d - 1); ++u) {
      const auto parent = plan.block(BlockFamily::value, d - 1, u);
      const std::set<std::uint32_t> parent_set(parent.begin(), parent.end());

      for (BlockFamily family : {BlockFamily::value, BlockFamily::index}) {
        const auto child0 = plan.block(family, d, 2 * u);
        const auto child1 = plan.block(family, d, 2 * u + 1);
        if (child0.size() != plan.block_size(d) || child1.size() != plan.block_size(d))
          ++bad;
        std::set<std::uint32_t> merged(child0.begin(), child0.end());
        merged.insert(child1.begin(), child1.end());
        if (merged.size() != parent.size() || merged != parent_set) ++bad;
      }

      const auto v0 = plan.block(BlockFamily::value, d, 2 * u);
      const auto v1 = plan.block(BlockFamily::value, d, 2 * u + 1);
      double max0 = -1e300, min1 = 1e300;
      for (std::uint32_t i : v0) max0 = std::max(max0, batch.y_at(i, k));
      for (std::uint32_t i : v1) min1 = std::min(min1, batch.y_at(i, k));
      if (max0 > min1) ++bad;

      const auto i0 = plan.block(BlockFamily::index, d, 2 * u);
      const auto i1 = plan.block(BlockFamily::index, d, 2 * u + 1);
      if (*std::max_element(i0.begin(), i0.end()) >
          *std::min_element(i1.begin(), i1.end()))
        ++bad;
    }
  }
  return bad;
}

// Marginal-consistency oracle for the conjugate update: draw logOR from the
// prior, an observation Y given it, then logOR' from the posterior at Y.
// Marginally logOR' must follow the prior again, so the empirical moments
// are compared entry-wise against the prior within standard errors.
// Returned values are the largest |empirical - prior| / stderr z-scores.
struct ConjugacyCheck {
  double max_mean_z = 0.0;
  double max_cov_z = 0.0;
};

inline ConjugacyCheck conjugacy_roundtrip(const nestmc::Problem2Spec& spec,
                                          std::size_t trials, nestmc::RngStream& rng) {
  using nestmc::Matrix;
  using nestmc::MvnSpec;
  Matrix prior_cov(3, 3);
  std::copy(spec.table.log_or_cov.begin(), spec.table.log_or_cov.end(),
            prior_cov.a.begin());
  const std::vector<double> prior_mean{spec.table.log_or_mean.begin(),
                                       spec.table.log_or_mean.end()};
  const MvnSpec prior(prior_mean, prior_cov);
  const MvnSpec noise(std::vector<double>(3, 0.0),
                      nestmc::problem2_observation_cov(spec));

  double s1[3] = {0, 0, 0}, s2[3] = {0, 0, 0};
  double w1[3][3] = {{0}}, w2[3][3] = {{0}};
  std::vector<double> y(3);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::vector<double> log_or = prior.sample(rng);
    const std::vector<double> eps = noise.sample(rng);
    for (std::size_t c = 0; c < 3; ++c) y[c] = log_or[c] + eps[c];
    const MvnSpec posterior = nestmc::problem2_posterior(spec, y);
    const std::vector<double> redraw = posterior.sample(rng);
    for (std::size_t a = 0; a < 3; ++a) {
      s1[a] += redraw[a];
      s2[a] += redraw[a] * redraw[a];
      for (std::size_t b = 0; b < 3; ++b) {
        const double w = (redraw[a] - prior_mean[a]) * (redraw[b] - prior_mean[b]);
        w1[a][b] += w;
        w2[a][b] += w * w;
      }
    }
  }

  ConjugacyCheck out;
  const double n = static_cast<double>(trials);
  for (std::size_t a = 0; a < 3; ++a) {
    const double mean = s1[a] / n;
    const double sd = std::sqrt(s2[a] / n - mean * mean);
    out.max_mean_z =
        std::max(out.max_mean_z, std::fabs(mean - prior_mean[a]) / (sd / std::sqrt(n)));
    for (std::size_t b = 0; b < 3; ++b) {
      const double wmean = w1[a][b] / n;
      const double wsd = std::sqrt(w2[a][b] / n - wmean * wmean);
      out.max_cov_z = std::max(out.max_cov_z, std::fabs(wmean - prior_cov(a, b)) /
                                                  (wsd / std::sqrt(n)));
    }
  }
  return out;
}

// The canonical 4-sample batch used by the worked examples: J = K = 1,
// X = (1,2,3,4), Y = (0.9, 0.1, 0.5, 0.7).
inline nestmc::SampleBatch worked_batch() {
  nestmc::SampleBatch batch(4, 1, 1);
  const double xs[4] = {1, 2, 3, 4};
  const double ys[4] = {0.9, 0.1, 0.5, 0.7};
  for (std::size_t i = 0; i < 4; ++i) {
    batch.x_at(i, 0) = xs[i];
    batch.y_at(i, 0) = ys[i];
  }
  return batch;
}

}  // namespace testutil
