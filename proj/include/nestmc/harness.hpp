#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "nestmc/errors.hpp"
#include "nestmc/estimators.hpp"
#include "nestmc/problem.hpp"
#include "nestmc/rng.hpp"

namespace nestmc {

// Stable across platforms and insertion-order independent: adding a method
// or budget to a config never perturbs the randomness of other cells.
inline std::uint64_t replication_hash(std::string_view method, int m, std::uint64_t rep) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a 64
  auto feed = [&h](std::string_view bytes) {
    for (char c : bytes) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001B3ull;
    }
  };
  feed(method);
  feed(":");
  feed(std::to_string(m));
  feed(":");
  feed(std::to_string(rep));
  return detail::mix64(h);
}

struct ReferenceValue {
  double value = 0.0;
  double stderr_ = std::numeric_limits<double>::infinity();
};

// Nested-MC reference: budget_outer draws of Y with budget_inner conditional
// draws each; budget_inner == 0 selects the problem's exact conditional mean.
// The standard error is the outer-replicate standard error of the mean
// (infinite for a single outer draw).
inline ReferenceValue reference_value(const NestedProblem& problem,
                                      std::size_t budget_outer,
                                      std::size_t budget_inner, RngStream& rng) {
  if (budget_outer < 1)
    throw InvalidParameter("reference_value: budget_outer must be >= 1");
  if (budget_inner == 0 && !problem.conditional_mean)
    throw InnerSamplerUnavailable(
        "reference_value: exact conditional mean unavailable for this problem");
  if (budget_inner > 0 && !problem.inner_conditional)
    throw InnerSamplerUnavailable(
        "reference_value: problem has no inner conditional sampler");

  const SampleBatch outer = problem.sample_joint(budget_outer, rng);
  const std::size_t j = problem.j_dim;
  std::vector<double> values(budget_outer);
  std::vector<double> mean(j);
  for (std::size_t o = 0; o < budget_outer; ++o) {
    if (budget_inner == 0) {
      const std::vector<double> exact = problem.conditional_mean(outer.y_row(o));
      values[o] = problem.f.eval(exact);
    } else {
      const std::vector<double> draws =
          problem.inner_conditional(outer.y_row(o), budget_inner, rng);
      std::fill(mean.begin(), mean.end(), 0.0);
      for (std::size_t l = 0; l < budget_inner; ++l)
        for (std::size_t c = 0; c < j; ++c) mean[c] += draws[l * j + c];
      for (double& v : mean) v /= static_cast<double>(budget_inner);
      values[o] = problem.f.eval(mean);
    }
  }

  ReferenceValue ref;
  double sum = 0.0;
  for (double v : values) sum += v;
  ref.value = sum / static_cast<double>(budget_outer);
  if (budget_outer >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - ref.value) * (v - ref.value);
    ref.stderr_ = std::sqrt(ss / static_cast<double>(budget_outer - 1) /
                            static_cast<double>(budget_outer));
  }
  return ref;
}

// Ordinary least-squares slope of log2(mse) on log2(N).
inline double convergence_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw DegenerateInput("convergence_slope: need at least 2 points");
  for (const auto& [n, mse] : points)
    if (!(n > 0.0) || !(mse > 0.0))
      throw DegenerateInput("convergence_slope: points must be positive");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double cnt = static_cast<double>(points.size());
  for (const auto& [n, mse] : points) {
    const double lx = std::log2(n), ly = std::log2(mse);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = cnt * sxx - sx * sx;
  if (denom == 0.0)
    throw DegenerateInput("convergence_slope: all budgets identical");
  return (cnt * sxy - sx * sy) / denom;
}

struct ReferenceSpec {
  enum class Kind { analytic, nested_mc };
  Kind kind = Kind::analytic;
  std::size_t budget_outer = 100000;
  std::size_t budget_inner = 1000;
};

struct ExperimentConfig {
  NestedProblem problem;
  std::string problem_label;
  std::string scenario_label;
  std::vector<Method> methods;
  std::vector<int> m_values;
  std::size_t replications = 100;
  std::uint64_t master_seed = 0;
  ReferenceSpec reference;
  unsigned threads = 1;
};

struct MethodCell {
  Method method = Method::sparse_grid;
  int m = 0;
  std::size_t n = 0;  // sample budget 2^m
  std::vector<EstimateRecord> estimates;
  double mse = 0.0;
  double mse_stderr = 0.0;
  double wall_seconds = 0.0;
};

struct RunReport {
  std::string problem_label;
  std::string scenario_label;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  double reference = 0.0;
  double reference_stderr = 0.0;  // 0 for an analytic truth
  std::vector<MethodCell> cells;  // method-major, m ascending
  std::vector<std::pair<Method, double>> slopes;
};

namespace detail {

inline EstimateRecord run_one(const NestedProblem& problem, Method method, int m,
                              RngStream stream) {
  EstimateRecord rec;
  switch (method) {
    case Method::sparse_grid: {
      const SampleBatch batch = problem.sample_joint(std::size_t{1} << m, stream);
      rec = sparse_grid_estimate(batch, problem.f);
      break;
    }
    case Method::simple: {
      const SampleBatch batch = problem.sample_joint(std::size_t{1} << m, stream);
      rec = simple_estimate(batch, problem.f);
      break;
    }
    case Method::nested_mc: {
      const std::size_t n_outer = std::size_t{1} << ((m + 1) / 2);
      const std::size_t n_inner = std::size_t{1} << (m / 2);
      rec = nested_mc_estimate(problem, n_outer, n_inner, stream);
      rec.m = m;
      break;
    }
  }
  rec.seed_path = stream.seed_path();
  return rec;
}

}  // namespace detail

// Replicated MSE experiment: r independent estimates per (method, budget)
// cell, squared-error aggregation against the reference, and per-method
// log-log slopes. Replication i of a cell draws from
// substream(master, replication_hash(method, m, i)), so results do not
// depend on execution order or thread count.
inline RunReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replications < 1)
    throw InvalidParameter("run_experiment: replications must be >= 1");
  if (cfg.m_values.empty())
    throw InvalidParameter("run_experiment: m_values must be nonempty");
  for (int m : cfg.m_values)
    if (m < 0) throw InvalidParameter("run_experiment: m must be nonnegative");
  if (cfg.methods.empty())
    throw InvalidParameter("run_experiment: methods must be nonempty");
  for (Method method : cfg.methods)
    if (method == Method::nested_mc && !cfg.problem.inner_conditional)
      throw InnerSamplerUnavailable(
          "run_experiment: nested_mc requested but the problem has no inner sampler");

  const RngStream master = make_stream(cfg.master_seed);

  RunReport report;
  report.problem_label = cfg.problem_label;
  report.scenario_label = cfg.scenario_label;
  report.replications = cfg.replications;
  report.master_seed = cfg.master_seed;

  if (cfg.reference.kind == ReferenceSpec::Kind::analytic) {
    if (!cfg.problem.truth)
      throw MissingTruth("run_experiment: analytic reference requested but problem has no truth");
    report.reference = *cfg.problem.truth;
    report.reference_stderr = 0.0;
  } else {
    RngStream ref_stream = substream(master, replication_hash("reference", 0, 0));
    const ReferenceValue ref =
        reference_value(cfg.problem, cfg.reference.budget_outer,
                        cfg.reference.budget_inner, ref_stream);
    report.reference = ref.value;
    report.reference_stderr = ref.stderr_;
  }

  struct Task {
    std::size_t cell;
    std::size_t rep;
  };
  std::vector<Task> tasks;
  report.cells.reserve(cfg.methods.size() * cfg.m_values.size());
  for (Method method : cfg.methods)
    for (int m : cfg.m_values) {
      MethodCell cell;
      cell.method = method;
      cell.m = m;
      cell.n = std::size_t{1} << m;
      cell.estimates.resize(cfg.replications);
      const std::size_t idx = report.cells.size();
      report.cells.push_back(std::move(cell));
      for (std::size_t rep = 0; rep < cfg.replications; ++rep)
        tasks.push_back({idx, rep});
    }

  std::vector<double> task_seconds(tasks.size(), 0.0);
  auto run_task = [&](std::size_t t) {
    const Task& task = tasks[t];
    MethodCell& cell = report.cells[task.cell];
    const auto start = std::chrono::steady_clock::now();
    RngStream stream = substream(
        master, replication_hash(method_name(cell.method), cell.m, task.rep));
    cell.estimates[task.rep] =
        detail::run_one(cfg.problem, cell.method, cell.m, std::move(stream));
    task_seconds[t] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const unsigned threads = std::max(1u, cfg.threads);
  if (threads == 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= tasks.size()) return;
          try {
            run_task(t);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  for (std::size_t t = 0; t < tasks.size(); ++t)
    report.cells[tasks[t].cell].wall_seconds += task_seconds[t];

  // aggregate in replication-index order
  for (MethodCell& cell : report.cells) {
    const double r = static_cast<double>(cfg.replications);
    double mse = 0.0;
    for (const EstimateRecord& rec : cell.estimates) {
      const double err = report.reference - rec.value;
      mse += err * err;
    }
    mse /= r;
    cell.mse = mse;
    if (cfg.replications >= 2) {
      double ss = 0.0;
      for (const EstimateRecord& rec : cell.estimates) {
        const double err = report.reference - rec.value;
        const double dev = err * err - mse;
        ss += dev * dev;
      }
      cell.mse_stderr = std::sqrt(ss / (r - 1.0)) / std::sqrt(r);
    } else {
      cell.mse_stderr = std::numeric_limits<double>::infinity();
    }
  }

  for (Method method : cfg.methods) {
    std::vector<std::pair<double, double>> points;
    for (const MethodCell& cell : report.cells)
      if (cell.method == method && cell.mse > 0.0)
        points.emplace_back(static_cast<double>(cell.n), cell.mse);
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (points.size() >= 2) slope = convergence_slope(points);
    report.slopes.emplace_back(method, slope);
  }
  return report;
}

}  // namespace nestmc
