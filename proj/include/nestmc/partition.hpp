#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "nestmc/batch.hpp"
#include "nestmc/errors.hpp"

namespace nestmc {

enum class BlockFamily { value, index };

// The two recursive block families over sample indices. Level d holds 2^d
// blocks of 2^(m-d) indices each. Storage is one contiguous permutation per
// level: block u at level d (binary word u in lexicographic order) is the
// range [u * 2^(m-d), (u+1) * 2^(m-d)) of that level's permutation.
//
// value_order[d] (d = 0..m): splits cycle through the outer coordinates;
// the two children of a block are its lower/upper half under the
// (Y_k, original index) order with k = (d-1) mod K.
//
// index_order[d] (d = 1..m): the children partition the *value* block at
// level d-1 by original sample index.
struct PartitionPlan {
  int m = 0;
  std::size_t k_dims = 1;
  std::vector<std::vector<std::uint32_t>> value_order;
  std::vector<std::vector<std::uint32_t>> index_order;  // [0] unused

  std::size_t n() const { return std::size_t{1} << m; }
  std::size_t block_count(int d) const { return std::size_t{1} << d; }
  std::size_t block_size(int d) const { return std::size_t{1} << (m - d); }

  std::span<const std::uint32_t> block(BlockFamily family, int d, std::size_t u) const {
    const auto& order =
        (family == BlockFamily::value) ? value_order[d] : index_order[d];
    const std::size_t w = block_size(d);
    return {order.data() + u * w, w};
  }
};

// Build both families by recursive halving; O(N (log N)^2) total.
inline PartitionPlan build_partitions(const SampleBatch& batch) {
  if (!is_power_of_two(batch.n))
    throw NotPowerOfTwo("build_partitions: sample count must be a power of 2");
  PartitionPlan plan;
  plan.m = log2_exact(batch.n);
  plan.k_dims = batch.k_dim;
  plan.value_order.resize(plan.m + 1);
  plan.index_order.resize(plan.m + 1);

  std::vector<std::uint32_t> ident(batch.n);
  std::iota(ident.begin(), ident.end(), 0u);
  plan.value_order[0] = ident;

  for (int d = 1; d <= plan.m; ++d) {
    const std::size_t k = static_cast<std::size_t>(d - 1) % batch.k_dim;
    const std::size_t parent_width = plan.block_size(d - 1);
    // ties in Y_k break by ascending original index, so the split is
    // deterministic and all-ties collapses B onto B'
    std::vector<std::uint32_t> by_value = plan.value_order[d - 1];
    std::vector<std::uint32_t> by_index = plan.value_order[d - 1];
    for (std::size_t start = 0; start < batch.n; start += parent_width) {
      std::sort(by_value.begin() + start, by_value.begin() + start + parent_width,
                [&](std::uint32_t a, std::uint32_t b) {
                  const double ya = batch.y_at(a, k), yb = batch.y_at(b, k);
                  return ya < yb || (ya == yb && a < b);
                });
      std::sort(by_index.begin() + start, by_index.begin() + start + parent_width);
    }
    plan.value_order[d] = std::move(by_value);
    plan.index_order[d] = std::move(by_index);
  }
  return plan;
}

namespace detail {

// Balanced (halving) mean of the X rows listed in idx; len is a power of 2.
// Both families use this shape so that equal blocks give bit-equal means.
inline void halving_mean(const SampleBatch& batch, const std::uint32_t* idx,
                         std::size_t len, double* out) {
  if (len == 1) {
    const auto row = batch.x_row(idx[0]);
    std::copy(row.begin(), row.end(), out);
    return;
  }
  const std::size_t half = len / 2;
  std::vector<double> right(batch.j_dim);
  halving_mean(batch, idx, half, out);
  halving_mean(batch, idx + half, half, right.data());
  for (std::size_t j = 0; j < batch.j_dim; ++j) out[j] = 0.5 * (out[j] + right[j]);
}

}  // namespace detail

// Per-level, per-block mean vectors of X. level[d] holds 2^d rows of J
// doubles (block u at offset u*J). For the value family levels run d=0..m
// and parents are computed bottom-up as the average of their two children;
// for the index family levels run d=1..m (level[0] stays empty).
struct BlockMeans {
  std::size_t j_dim = 0;
  std::vector<std::vector<double>> level;

  std::span<const double> block(int d, std::size_t u) const {
    return {level[d].data() + u * j_dim, j_dim};
  }
};

inline BlockMeans block_mean_tree(const SampleBatch& batch, const PartitionPlan& plan,
                                  BlockFamily family) {
  BlockMeans means;
  means.j_dim = batch.j_dim;
  means.level.resize(plan.m + 1);
  const std::size_t j = batch.j_dim;

  if (family == BlockFamily::value) {
    means.level[plan.m].resize(plan.n() * j);
    for (std::size_t u = 0; u < plan.n(); ++u) {
      const auto row = batch.x_row(plan.value_order[plan.m][u]);
      std::copy(row.begin(), row.end(), means.level[plan.m].data() + u * j);
    }
    for (int d = plan.m - 1; d >= 0; --d) {
      means.level[d].resize(plan.block_count(d) * j);
      for (std::size_t u = 0; u < plan.block_count(d); ++u)
        for (std::size_t c = 0; c < j; ++c)
          means.level[d][u * j + c] =
              0.5 * (means.level[d + 1][(2 * u) * j + c] +
                     means.level[d + 1][(2 * u + 1) * j + c]);
    }
  } else {
    for (int d = 1; d <= plan.m; ++d) {
      means.level[d].resize(plan.block_count(d) * j);
      const std::size_t w = plan.block_size(d);
      for (std::size_t u = 0; u < plan.block_count(d); ++u)
        detail::halving_mean(batch, plan.index_order[d].data() + u * w, w,
                             means.level[d].data() + u * j);
    }
  }
  return means;
}

// Rank-based empirical-CDF transform of outer coordinate k: the r-th
// smallest value maps to r/(N-1), ties sharing the averaged rank. N = 1
// maps to 0. The result lies in [0,1] and is nondecreasing in the value,
// which is what the width bounds below require.
inline std::vector<double> rank_transform(const SampleBatch& batch, std::size_t k) {
  const std::size_t n = batch.n;
  std::vector<double> t(n, 0.0);
  if (n <= 1) return t;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return batch.y_at(a, k) < batch.y_at(b, k);
  });
  const double denom = static_cast<double>(n - 1);
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos + 1;
    while (end < n &&
           batch.y_at(order[end], k) == batch.y_at(order[pos], k))
      ++end;
    const double avg_rank = 0.5 * (static_cast<double>(pos) + static_cast<double>(end - 1));
    for (std::size_t r = pos; r < end; ++r) t[order[r]] = avg_rank / denom;
    pos = end;
  }
  return t;
}

// Lemma-style width diagnostic at one level of the value family.
// w_per_dim[k] = average over blocks of (max - min) of T_k within the block;
// lemma_lhs    = average over blocks of the max pairwise squared distance
//                between transformed observation vectors;
// lemma_rhs    = 2K / 2^(d/K), the proved ceiling for lemma_lhs.
struct WidthDiagnostic {
  std::vector<double> w_per_dim;
  double lemma_lhs = 0.0;
  double lemma_rhs = 0.0;
};

inline WidthDiagnostic width_diagnostic(const SampleBatch& batch,
                                        const PartitionPlan& plan, int d) {
  if (d < 0 || d > plan.m)
    throw LevelOutOfRange("width_diagnostic: level must lie in [0, m]");
  const std::size_t kdim = batch.k_dim;
  std::vector<std::vector<double>> t(kdim);
  for (std::size_t k = 0; k < kdim; ++k) t[k] = rank_transform(batch, k);

  WidthDiagnostic diag;
  diag.w_per_dim.assign(kdim, 0.0);
  diag.lemma_rhs = 2.0 * static_cast<double>(kdim) /
                   std::pow(2.0, static_cast<double>(d) / static_cast<double>(kdim));

  const double inv_blocks = 1.0 / static_cast<double>(plan.block_count(d));
  double lhs = 0.0;
  for (std::size_t u = 0; u < plan.block_count(d); ++u) {
    const auto blk = plan.block(BlockFamily::value, d, u);
    for (std::size_t k = 0; k < kdim; ++k) {
      double lo = t[k][blk[0]], hi = lo;
      for (std::uint32_t i : blk) {
        lo = std::min(lo, t[k][i]);
        hi = std::max(hi, t[k][i]);
      }
      diag.w_per_dim[k] += (hi - lo) * inv_blocks;
    }
    double max_sq = 0.0;
    for (std::size_t a = 0; a < blk.size(); ++a)
      for (std::size_t b = a + 1; b < blk.size(); ++b) {
        double sq = 0.0;
        for (std::size_t k = 0; k < kdim; ++k) {
          const double diff = t[k][blk[a]] - t[k][blk[b]];
          sq += diff * diff;
        }
        max_sq = std::max(max_sq, sq);
      }
    lhs += max_sq;
  }
  diag.lemma_lhs = lhs * inv_blocks;
  return diag;
}

}  // namespace nestmc
