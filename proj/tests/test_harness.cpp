#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "nestmc/harness.hpp"
#include "nestmc/problems.hpp"

using namespace nestmc;

namespace {

// A problem whose estimate is exact: X is constant, so every method
// reproduces the truth bit-for-bit.
NestedProblem constant_problem(double c) {
  NestedProblem prob;
  prob.name = "const";
  prob.j_dim = 1;
  prob.k_dim = 1;
  prob.f = max_component(1);
  prob.truth = c;
  prob.sample_joint = [c](std::size_t n, RngStream& rng) {
    SampleBatch batch(n, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      batch.x_at(i, 0) = c;
      batch.y_at(i, 0) = rng.uniform();
    }
    return batch;
  };
  prob.inner_conditional = [c](std::span<const double>, std::size_t n, RngStream&) {
    return std::vector<double>(n, c);
  };
  prob.conditional_mean = [c](std::span<const double>) {
    return std::vector<double>{c};
  };
  return prob;
}

ExperimentConfig p1_config() {
  ExperimentConfig cfg;
  cfg.problem = problem1({3, 0.8});
  cfg.problem_label = "p1";
  cfg.methods = {Method::sparse_grid, Method::simple};
  cfg.m_values = {4, 6, 8};
  cfg.replications = 20;
  cfg.master_seed = 77;
  cfg.reference.kind = ReferenceSpec::Kind::analytic;
  return cfg;
}

bool reports_equal(const RunReport& a, const RunReport& b) {
  if (a.reference != b.reference || a.reference_stderr != b.reference_stderr)
    return false;
  if (a.cells.size() != b.cells.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const MethodCell& ca = a.cells[i];
    const MethodCell& cb = b.cells[i];
    if (ca.method != cb.method || ca.m != cb.m || ca.mse != cb.mse ||
        ca.mse_stderr != cb.mse_stderr)
      return false;
    for (std::size_t r = 0; r < ca.estimates.size(); ++r) {
      if (ca.estimates[r].value != cb.estimates[r].value) return false;
      if (ca.estimates[r].seed_path != cb.estimates[r].seed_path) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("convergence slope worked examples") {
  CHECK(convergence_slope({{2, 1.0}, {4, 0.25}}) == doctest::Approx(-2.0).epsilon(1e-14));

  std::vector<std::pair<double, double>> powerlaw;
  for (int m = 2; m <= 10; ++m) {
    const double n = std::pow(2.0, m);
    powerlaw.emplace_back(n, 1.0 / n);
  }
  CHECK(std::fabs(convergence_slope(powerlaw) + 1.0) <= 1e-12);

  std::vector<std::pair<double, double>> constant;
  for (int m = 2; m <= 6; ++m) constant.emplace_back(std::pow(2.0, m), 0.125);
  CHECK(convergence_slope(constant) == doctest::Approx(0.0));

  CHECK_THROWS_AS(convergence_slope({{2, 1.0}}), DegenerateInput);
  CHECK_THROWS_AS(convergence_slope({{2, 1.0}, {4, -1.0}}), DegenerateInput);
  CHECK_THROWS_AS(convergence_slope({{2, 1.0}, {2, 0.5}}), DegenerateInput);
}

TEST_CASE("replication hash separates cells and is stable") {
  CHECK(replication_hash("sparse_grid", 8, 0) == replication_hash("sparse_grid", 8, 0));
  std::set<std::uint64_t> seen;
  for (const char* method : {"sparse_grid", "simple", "nested_mc"})
    for (int m = 0; m < 12; ++m)
      for (std::uint64_t rep = 0; rep < 32; ++rep)
        seen.insert(replication_hash(method, m, rep));
  CHECK(seen.size() == 3u * 12u * 32u);
}

TEST_CASE("reference value: degenerate outer budget and stderr scaling") {
  const NestedProblem p1 = problem1({5, 0.7});

  RngStream rng1 = make_stream(601);
  const ReferenceValue single = reference_value(p1, 1, 0, rng1);
  CHECK(std::isinf(single.stderr_));

  // stderr shrinks like 1/sqrt(2) when the outer budget doubles
  double se_small = 0.0, se_big = 0.0;
  const int repeats = 30;
  for (int i = 0; i < repeats; ++i) {
    RngStream a = substream(make_stream(602), i);
    RngStream b = substream(make_stream(603), i);
    se_small += reference_value(p1, 2000, 0, a).stderr_;
    se_big += reference_value(p1, 4000, 0, b).stderr_;
  }
  const double ratio = (se_big / repeats) / (se_small / repeats);
  CHECK(std::fabs(ratio - 1.0 / std::sqrt(2.0)) < 0.2 / std::sqrt(2.0));
}

TEST_CASE("reference value agrees with the analytic truth") {
  const Problem1Spec spec{7, 0.7};
  const NestedProblem p1 = problem1(spec);
  RngStream rng = make_stream(604);
  const ReferenceValue ref = reference_value(p1, 20000, 0, rng);
  CHECK(std::fabs(ref.value - problem1_truth(spec)) <= 3.0 * ref.stderr_);
}

TEST_CASE("reference value requires the right inner capability") {
  NestedProblem prob = problem1({2, 0.6});
  RngStream rng = make_stream(605);
  prob.conditional_mean = nullptr;
  CHECK_THROWS_AS(reference_value(prob, 10, 0, rng), InnerSamplerUnavailable);
  prob.inner_conditional = nullptr;
  CHECK_THROWS_AS(reference_value(prob, 10, 5, rng), InnerSamplerUnavailable);
  CHECK_THROWS_AS(reference_value(prob, 0, 5, rng), InvalidParameter);
}

TEST_CASE("exact problem gives exactly zero mse") {
  ExperimentConfig cfg;
  cfg.problem = constant_problem(0.625);
  cfg.problem_label = "const";
  cfg.methods = {Method::sparse_grid, Method::simple, Method::nested_mc};
  cfg.m_values = {0, 3};
  cfg.replications = 1;
  cfg.reference.kind = ReferenceSpec::Kind::analytic;
  const RunReport report = run_experiment(cfg);
  for (const MethodCell& cell : report.cells) {
    CHECK(cell.mse == 0.0);
    CHECK(cell.estimates[0].value == 0.625);
    CHECK(std::isinf(cell.mse_stderr));  // undefined spread for r = 1
  }
}

TEST_CASE("mse matches a direct recomputation from stored estimates") {
  const RunReport report = run_experiment(p1_config());
  for (const MethodCell& cell : report.cells) {
    double mse = 0.0;
    for (const EstimateRecord& rec : cell.estimates) {
      const double e = report.reference - rec.value;
      mse += e * e;
    }
    mse /= static_cast<double>(cell.estimates.size());
    CHECK(cell.mse == mse);
    CHECK(cell.n == (std::size_t{1} << cell.m));
  }
  // replication seed paths record master seed and the hashed substream index
  const MethodCell& cell = report.cells.front();
  CHECK(cell.estimates[0].seed_path.size() == 2);
  CHECK(cell.estimates[0].seed_path[0] == 77);
  CHECK(cell.estimates[0].seed_path[1] ==
        replication_hash(method_name(cell.method), cell.m, 0));
}

TEST_CASE("repeat run is identical; thread count does not matter") {
  ExperimentConfig cfg = p1_config();
  const RunReport serial = run_experiment(cfg);
  const RunReport again = run_experiment(cfg);
  CHECK(reports_equal(serial, again));

  cfg.threads = 4;
  const RunReport parallel = run_experiment(cfg);
  CHECK(reports_equal(serial, parallel));
}

TEST_CASE("adding a method never perturbs existing cells") {
  ExperimentConfig small = p1_config();
  small.methods = {Method::sparse_grid};
  ExperimentConfig big = p1_config();
  big.methods = {Method::nested_mc, Method::sparse_grid};

  const RunReport a = run_experiment(small);
  const RunReport b = run_experiment(big);
  for (const MethodCell& cell_a : a.cells)
    for (const MethodCell& cell_b : b.cells)
      if (cell_b.method == cell_a.method && cell_b.m == cell_a.m)
        for (std::size_t r = 0; r < cell_a.estimates.size(); ++r)
          CHECK(cell_a.estimates[r].value == cell_b.estimates[r].value);
}

TEST_CASE("config validation errors") {
  ExperimentConfig cfg = p1_config();
  cfg.replications = 0;
  CHECK_THROWS_AS(run_experiment(cfg), InvalidParameter);

  cfg = p1_config();
  cfg.m_values = {};
  CHECK_THROWS_AS(run_experiment(cfg), InvalidParameter);

  cfg = p1_config();
  cfg.m_values = {-1};
  CHECK_THROWS_AS(run_experiment(cfg), InvalidParameter);

  cfg = p1_config();
  cfg.problem.truth = std::nullopt;
  CHECK_THROWS_AS(run_experiment(cfg), MissingTruth);

  cfg = p1_config();
  cfg.methods = {Method::nested_mc};
  cfg.problem.inner_conditional = nullptr;
  CHECK_THROWS_AS(run_experiment(cfg), InnerSamplerUnavailable);
}

TEST_CASE("mse decreases with the budget on an informative problem") {
  ExperimentConfig cfg;
  cfg.problem = problem1({1, 0.5});
  cfg.problem_label = "p1";
  cfg.methods = {Method::sparse_grid};
  cfg.m_values = {4, 8, 12};
  cfg.replications = 40;
  cfg.master_seed = 9;
  cfg.reference.kind = ReferenceSpec::Kind::analytic;
  const RunReport report = run_experiment(cfg);
  REQUIRE(report.reference == 0.5);
  CHECK(report.cells.front().mse > report.cells.back().mse);
  CHECK(report.cells.back().mse < 0.01);
  CHECK(report.slopes.front().second < 0.0);
}
