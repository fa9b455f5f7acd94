#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nestmc/distributions.hpp"
#include "nestmc/errors.hpp"
#include "nestmc/problem.hpp"

namespace nestmc {

// --- Problem 1: synthetic signal-detection model ---------------------------
//
// A binary state theta ~ Bernoulli(1/2) pays X = (theta, 1 - theta). Each of
// M observation channels reports Y_i = (2 b_i - 1) U_i (2 theta - 1) with
// b_i ~ Bernoulli(p) and U_i ~ Uniform(0,1): the sign of Y_i agrees with the
// state with probability p and the magnitude carries no information. The
// posterior of theta, and hence the exact target value, depend only on the
// count of positive signs, so this problem supplies an analytic truth.

struct Problem1Spec {
  std::size_t signal_count = 1;  // M
  double p = 0.5;
};

namespace detail {

inline void validate(const Problem1Spec& spec) {
  if (spec.signal_count < 1)
    throw InvalidParameter("problem1: signal count must be >= 1");
  if (!(spec.p > 0.0 && spec.p < 1.0))
    throw InvalidParameter("problem1: p must lie in (0,1)");
}

}  // namespace detail

// P(theta = 1 | y): Bayes over the positive-sign count.
inline double problem1_posterior(const Problem1Spec& spec, std::span<const double> y) {
  detail::validate(spec);
  const double m = static_cast<double>(spec.signal_count);
  double mplus = 0.0;
  for (double v : y)
    if (v > 0.0) mplus += 1.0;
  const double like1 = std::pow(spec.p, mplus) * std::pow(1.0 - spec.p, m - mplus);
  const double like0 = std::pow(1.0 - spec.p, mplus) * std::pow(spec.p, m - mplus);
  return like1 / (like1 + like0);
}

// Exact target value by enumeration over the positive-sign count.
inline double problem1_truth(const Problem1Spec& spec) {
  detail::validate(spec);
  const std::size_t m = spec.signal_count;
  double binom = 1.0;  // C(M, mplus), updated multiplicatively
  double total = 0.0;
  for (std::size_t mplus = 0; mplus <= m; ++mplus) {
    if (mplus > 0)
      binom *= static_cast<double>(m - mplus + 1) / static_cast<double>(mplus);
    const double e = static_cast<double>(mplus);
    const double a = std::pow(spec.p, e) * std::pow(1.0 - spec.p, static_cast<double>(m) - e);
    const double b = std::pow(1.0 - spec.p, e) * std::pow(spec.p, static_cast<double>(m) - e);
    total += binom * std::max(a, b);
  }
  return 0.5 * total;
}

inline NestedProblem problem1(const Problem1Spec& spec) {
  detail::validate(spec);
  const std::size_t m = spec.signal_count;

  NestedProblem prob;
  prob.name = "p1";
  prob.j_dim = 2;
  prob.k_dim = m;
  prob.f = max_component(2);
  prob.truth = problem1_truth(spec);

  // per row: theta, then (b_i, U_i) for each channel in order
  prob.sample_joint = [spec, m](std::size_t n, RngStream& rng) {
    SampleBatch batch(n, 2, m);
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = rng.uniform() < 0.5 ? 1.0 : 0.0;
      batch.x_at(i, 0) = theta;
      batch.x_at(i, 1) = 1.0 - theta;
      const double state_sign = 2.0 * theta - 1.0;
      for (std::size_t c = 0; c < m; ++c) {
        const double b = rng.uniform() < spec.p ? 1.0 : 0.0;
        const double u = rng.uniform();
        batch.y_at(i, c) = (2.0 * b - 1.0) * u * state_sign;
      }
    }
    return batch;
  };

  prob.inner_conditional = [spec](std::span<const double> y, std::size_t n,
                                  RngStream& rng) {
    const double q = problem1_posterior(spec, y);
    std::vector<double> out(n * 2);
    for (std::size_t l = 0; l < n; ++l) {
      const double theta = rng.uniform() < q ? 1.0 : 0.0;
      out[2 * l] = theta;
      out[2 * l + 1] = 1.0 - theta;
    }
    return out;
  };

  prob.conditional_mean = [spec](std::span<const double> y) {
    const double q = problem1_posterior(spec, y);
    return std::vector<double>{q, 1.0 - q};
  };

  return prob;
}

// --- Problem 2: wound-dressing trial decision model -------------------------
//
// Four dressing policies D = {E, S, G, A} with uncertain infection risks.
// The inner parameters are the simple-dressing risk, the cost of an
// infection, and a trivariate lognormal odds-ratio vector for the other
// arms; the trial observation Y is a noisy 3-dimensional reading of the
// log odds ratios whose covariance follows the planned arm sizes.

enum class TrialScenario { EvSvG, EvSvGvA };

inline std::string_view scenario_name(TrialScenario s) {
  return s == TrialScenario::EvSvG ? "EvSvG" : "EvSvGvA";
}

inline std::optional<TrialScenario> scenario_from_name(std::string_view name) {
  if (name == "EvSvG") return TrialScenario::EvSvG;
  if (name == "EvSvGvA") return TrialScenario::EvSvGvA;
  return std::nullopt;
}

struct Problem2Table {
  double wtp = 20000.0;
  double ssi_qaly_loss = 0.12;
  double ssi_cost_log_mean = 8.972;
  double ssi_cost_log_sd = 0.1631;
  std::array<double, 4> dressing_cost{0.0, 5.25, 13.86, 21.39};  // E, S, G, A
  double p_ssi_s_mean = 0.1380;
  double p_ssi_s_sd = 0.0018;
  std::array<double, 3> log_or_mean{-0.05, -0.07, -0.18};  // E, G, A
  std::array<double, 9> log_or_cov{0.07, 0.06, 0.02,       //
                                   0.06, 0.22, 0.02,       //
                                   0.02, 0.02, 0.05};
};

struct Problem2Spec {
  TrialScenario scenario = TrialScenario::EvSvG;
  double n_participants = 1000.0;
  Problem2Table table{};
  double log_odds_sd = 3.7;  // per-arm standard deviation of log odds ratios
};

struct ArmSizes {
  double e = 0.0, s = 0.0, g = 0.0, a = 0.0;
};

// Arm sizes after substituting 1e-3 for an empty arm (keeps the observation
// covariance finite while leaving that reading essentially uninformative).
inline ArmSizes arm_sizes(const Problem2Spec& spec) {
  if (!(spec.n_participants > 0.0))
    throw InvalidParameter("problem2: participant count must be > 0");
  const double n = spec.n_participants;
  ArmSizes sizes;
  if (spec.scenario == TrialScenario::EvSvG) {
    sizes = {0.4 * n, 0.4 * n, 0.2 * n, 1e-3};
  } else {
    sizes = {0.25 * n, 0.25 * n, 0.25 * n, 0.25 * n};
  }
  return sizes;
}

inline Matrix problem2_observation_cov(const Problem2Spec& spec) {
  if (!(spec.log_odds_sd > 0.0))
    throw InvalidParameter("problem2: log-odds standard deviation must be > 0");
  const ArmSizes sizes = arm_sizes(spec);
  const double s2 = spec.log_odds_sd * spec.log_odds_sd;
  const std::array<double, 3> other{sizes.e, sizes.g, sizes.a};
  Matrix cov(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      cov(i, j) = (i == j) ? s2 * (sizes.s + other[i]) / (sizes.s * other[i])
                           : s2 / sizes.s;
  return cov;
}

// Risk for arm d from the simple-dressing risk and the odds ratio.
inline double odds_ratio_risk(double p_ssi_s, double odds_ratio) {
  const double odds = odds_ratio * p_ssi_s / (1.0 - p_ssi_s);
  return odds / (1.0 + odds);
}

// Net benefit components (NB_E, NB_S, NB_G, NB_A) for one parameter draw;
// or_vec holds the odds ratios for (E, G, A) relative to S.
inline std::array<double, 4> problem2_net_benefit(const Problem2Table& table,
                                                  std::span<const double> or_vec,
                                                  double ssi_cost, double p_ssi_s) {
  const double ssi_burden = ssi_cost + table.ssi_qaly_loss * table.wtp;
  const std::array<double, 4> risk{
      odds_ratio_risk(p_ssi_s, or_vec[0]),  // E
      p_ssi_s,                              // S
      odds_ratio_risk(p_ssi_s, or_vec[1]),  // G
      odds_ratio_risk(p_ssi_s, or_vec[2]),  // A
  };
  std::array<double, 4> nb;
  for (std::size_t d = 0; d < 4; ++d)
    nb[d] = -(table.dressing_cost[d] + risk[d] * ssi_burden);
  return nb;
}

namespace detail {

inline MvnSpec log_or_prior(const Problem2Table& table) {
  Matrix cov(3, 3);
  std::copy(table.log_or_cov.begin(), table.log_or_cov.end(), cov.a.begin());
  return MvnSpec({table.log_or_mean.begin(), table.log_or_mean.end()}, std::move(cov));
}

inline double clamp_probability(double p) {
  return std::clamp(p, 1e-9, 1.0 - 1e-9);
}

}  // namespace detail

// Conjugate normal-normal update of the log odds-ratio vector given one
// trial observation y.
inline MvnSpec problem2_posterior(const Problem2Spec& spec, std::span<const double> y) {
  const MvnSpec prior = detail::log_or_prior(spec.table);
  const Matrix prior_prec = spd_inverse(prior.covariance);
  const Matrix obs_prec = spd_inverse(problem2_observation_cov(spec));

  Matrix post_prec(3, 3);
  for (std::size_t i = 0; i < 9; ++i) post_prec.a[i] = prior_prec.a[i] + obs_prec.a[i];
  Matrix post_cov = spd_inverse(post_prec);

  const std::vector<double> lhs_prior = matvec(prior_prec, prior.mean);
  const std::vector<double> lhs_obs = matvec(obs_prec, y);
  std::vector<double> rhs(3);
  for (std::size_t i = 0; i < 3; ++i) rhs[i] = lhs_prior[i] + lhs_obs[i];
  std::vector<double> post_mean = matvec(post_cov, rhs);
  return MvnSpec(std::move(post_mean), std::move(post_cov));
}

inline NestedProblem problem2(const Problem2Spec& spec) {
  const MvnSpec prior = detail::log_or_prior(spec.table);
  const MvnSpec obs_noise(std::vector<double>(3, 0.0), problem2_observation_cov(spec));
  const Normal ssi_cost_log(spec.table.ssi_cost_log_mean, spec.table.ssi_cost_log_sd);
  const Normal p_ssi_s_dist(spec.table.p_ssi_s_mean, spec.table.p_ssi_s_sd);
  const Problem2Table table = spec.table;

  NestedProblem prob;
  prob.name = "p2";
  prob.j_dim = 4;
  prob.k_dim = 3;
  prob.f = max_component(4);

  // per row: log odds ratios, infection cost, simple-dressing risk, trial noise
  prob.sample_joint = [prior, obs_noise, ssi_cost_log, p_ssi_s_dist, table](
                          std::size_t n, RngStream& rng) {
    SampleBatch batch(n, 4, 3);
    std::array<double, 3> or_vec;
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double> log_or = prior.sample(rng);
      const double ssi_cost = std::exp(ssi_cost_log.sample(rng));
      const double p_ssi_s = detail::clamp_probability(p_ssi_s_dist.sample(rng));
      const std::vector<double> noise = obs_noise.sample(rng);
      for (std::size_t c = 0; c < 3; ++c) {
        or_vec[c] = std::exp(log_or[c]);
        batch.y_at(i, c) = log_or[c] + noise[c];
      }
      const std::array<double, 4> nb =
          problem2_net_benefit(table, or_vec, ssi_cost, p_ssi_s);
      for (std::size_t d = 0; d < 4; ++d) batch.x_at(i, d) = nb[d];
    }
    return batch;
  };

  // Y informs only the log odds ratios; cost and baseline risk are
  // resampled from their priors.
  prob.inner_conditional = [spec, ssi_cost_log, p_ssi_s_dist, table](
                               std::span<const double> y, std::size_t n,
                               RngStream& rng) {
    const MvnSpec posterior = problem2_posterior(spec, y);
    std::vector<double> out(n * 4);
    std::array<double, 3> or_vec;
    for (std::size_t l = 0; l < n; ++l) {
      const std::vector<double> log_or = posterior.sample(rng);
      const double ssi_cost = std::exp(ssi_cost_log.sample(rng));
      const double p_ssi_s = detail::clamp_probability(p_ssi_s_dist.sample(rng));
      for (std::size_t c = 0; c < 3; ++c) or_vec[c] = std::exp(log_or[c]);
      const std::array<double, 4> nb =
          problem2_net_benefit(table, or_vec, ssi_cost, p_ssi_s);
      for (std::size_t d = 0; d < 4; ++d) out[l * 4 + d] = nb[d];
    }
    return out;
  };

  return prob;
}

}  // namespace nestmc
