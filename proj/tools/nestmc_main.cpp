// Command-line front end: single estimates, replicated MSE benchmarks,
// partition-width diagnostics, and SVG rendering of benchmark summaries.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nestmc/nestmc.hpp"

namespace {

using namespace nestmc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitBoundViolated = 4;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Options env_layer() {
  Options opt;
  if (const char* env = std::getenv("NESTMC_SEED")) {
    std::uint64_t seed = 0;
    const std::string_view sv(env);
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), seed);
    if (ec != std::errc{} || ptr != sv.data() + sv.size())
      throw InvalidParameter("NESTMC_SEED must be a nonnegative 64-bit integer");
    opt.seed = seed;
  }
  return opt;
}

Options file_layer(const std::optional<std::string>& path) {
  if (!path) return {};
  std::ifstream in(*path);
  if (!in) throw InvalidParameter("cannot open config file: " + *path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("config: ") + e.what());
  }
  return options_from_json(doc);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// "8..14" expands to the inclusive range; "8,10,12" is taken literally.
std::vector<long long> parse_m_values(const std::string& s) {
  std::vector<long long> out;
  const auto dots = s.find("..");
  try {
    if (dots != std::string::npos) {
      const long long lo = std::stoll(s.substr(0, dots));
      const long long hi = std::stoll(s.substr(dots + 2));
      if (hi < lo) throw InvalidParameter("m range is empty: " + s);
      for (long long m = lo; m <= hi; ++m) out.push_back(m);
    } else {
      for (const std::string& item : split_list(s)) out.push_back(std::stoll(item));
    }
  } catch (const InvalidParameter&) {
    throw;
  } catch (const std::exception&) {
    throw InvalidParameter("cannot parse m values: " + s);
  }
  if (out.empty()) throw InvalidParameter("m values must be nonempty");
  return out;
}

void check_m(long long m) {
  if (m < 0) throw InvalidParameter("m must be a nonnegative integer");
  if (m > 26) throw InvalidParameter("m too large (max 26)");
}

struct BuiltProblem {
  NestedProblem problem;
  std::string label;
  std::string scenario;
};

BuiltProblem build_problem(const Options& o) {
  const std::string which = o.problem.value_or("p1");
  if (which == "p1") {
    Problem1Spec spec;
    if (o.signal_count) {
      if (*o.signal_count < 1) throw InvalidParameter("M must be >= 1");
      spec.signal_count = static_cast<std::size_t>(*o.signal_count);
    } else {
      spec.signal_count = 7;
    }
    spec.p = o.p.value_or(0.7);
    return {problem1(spec), "p1", ""};
  }
  if (which == "p2") {
    Problem2Spec spec;
    const std::string scen = o.scenario.value_or("EvSvG");
    const auto parsed = scenario_from_name(scen);
    if (!parsed) throw InvalidParameter("scenario must be EvSvG or EvSvGvA");
    spec.scenario = *parsed;
    spec.n_participants = o.n_participants.value_or(1000.0);
    return {problem2(spec), "p2", scen};
  }
  throw InvalidParameter("problem must be p1 or p2");
}

Method parse_method(const std::string& name) {
  const auto method = method_from_name(name);
  if (!method)
    throw InvalidParameter("method must be sparse_grid, simple, or nested_mc");
  return *method;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  return out;
}

int cmd_estimate(const Options& o) {
  const BuiltProblem built = build_problem(o);
  if (!o.m) throw InvalidParameter("m is required (use --m)");
  check_m(*o.m);
  const int m = static_cast<int>(*o.m);
  const std::uint64_t seed = o.seed.value_or(0);
  const Method method = parse_method(o.method.value_or("sparse_grid"));

  RngStream rng = make_stream(seed);
  EstimateRecord rec;
  if (method == Method::nested_mc) {
    const std::size_t n_outer = o.n_outer
                                    ? static_cast<std::size_t>(*o.n_outer)
                                    : std::size_t{1} << ((m + 1) / 2);
    const std::size_t n_inner = o.n_inner ? static_cast<std::size_t>(*o.n_inner)
                                          : std::size_t{1} << (m / 2);
    rec = nested_mc_estimate(built.problem, n_outer, n_inner, rng);
    rec.m = m;
  } else {
    const SampleBatch batch = built.problem.sample_joint(std::size_t{1} << m, rng);
    rec = (method == Method::sparse_grid) ? sparse_grid_estimate(batch, built.problem.f)
                                          : simple_estimate(batch, built.problem.f);
  }

  nlohmann::ordered_json doc;
  doc["method"] = std::string(method_name(method));
  doc["m"] = rec.m;
  doc["N"] = rec.samples_used;
  doc["estimate"] = rec.value;
  doc["samples_used"] = rec.samples_used;
  doc["f_evals"] = rec.f_evals;
  doc["seed"] = seed;
  std::cout << doc.dump() << '\n';
  return kExitOk;
}

int cmd_bench(const Options& o) {
  const BuiltProblem built = build_problem(o);

  ExperimentConfig cfg;
  cfg.problem = built.problem;
  cfg.problem_label = built.label;
  cfg.scenario_label = built.scenario;

  const std::vector<std::string> method_names =
      o.methods.value_or(std::vector<std::string>{"sparse_grid", "simple"});
  for (const std::string& name : method_names) cfg.methods.push_back(parse_method(name));

  std::vector<long long> ms;
  if (o.m_values) {
    ms = *o.m_values;
  } else {
    for (long long m = 8; m <= 16; ++m) ms.push_back(m);
  }
  for (long long m : ms) {
    check_m(m);
    cfg.m_values.push_back(static_cast<int>(m));
  }

  if (o.replications && *o.replications < 1)
    throw InvalidParameter("r must be >= 1");
  cfg.replications = static_cast<std::size_t>(o.replications.value_or(100));
  cfg.master_seed = o.seed.value_or(0);

  const std::string ref_kind =
      o.reference.value_or(built.problem.truth ? "analytic" : "nested_mc");
  if (ref_kind == "analytic") {
    cfg.reference.kind = ReferenceSpec::Kind::analytic;
  } else if (ref_kind == "nested_mc") {
    cfg.reference.kind = ReferenceSpec::Kind::nested_mc;
    if (o.ref_outer && *o.ref_outer < 1)
      throw InvalidParameter("ref_outer must be >= 1");
    if (o.ref_inner && *o.ref_inner < 0)
      throw InvalidParameter("ref_inner must be >= 0");
    cfg.reference.budget_outer = static_cast<std::size_t>(o.ref_outer.value_or(100000));
    cfg.reference.budget_inner = static_cast<std::size_t>(o.ref_inner.value_or(1000));
  } else {
    throw InvalidParameter("reference must be analytic or nested_mc");
  }

  const long long threads =
      o.threads.value_or(static_cast<long long>(std::thread::hardware_concurrency()));
  cfg.threads = threads > 0 ? static_cast<unsigned>(threads) : 1u;

  const RunReport report = run_experiment(cfg);

  const std::string prefix = o.out_prefix.value_or("bench");
  {
    std::ofstream out = open_output(prefix + "_estimates.csv");
    write_estimates_csv(out, report);
    if (!out) throw IoError("write failed: " + prefix + "_estimates.csv");
  }
  {
    std::ofstream out = open_output(prefix + "_summary.csv");
    write_summary_csv(out, report);
    if (!out) throw IoError("write failed: " + prefix + "_summary.csv");
  }
  {
    std::ofstream out = open_output(prefix + ".json");
    write_report_json(out, report);
    if (!out) throw IoError("write failed: " + prefix + ".json");
  }
  std::cerr << "wrote " << prefix << "_estimates.csv, " << prefix << "_summary.csv, "
            << prefix << ".json\n";
  return kExitOk;
}

int cmd_diagnose(const Options& o) {
  const BuiltProblem built = build_problem(o);
  if (!o.m) throw InvalidParameter("m is required (use --m)");
  check_m(*o.m);
  const int m = static_cast<int>(*o.m);
  const std::uint64_t seed = o.seed.value_or(0);

  RngStream rng = make_stream(seed);
  const SampleBatch batch = built.problem.sample_joint(std::size_t{1} << m, rng);
  const PartitionPlan plan = build_partitions(batch);

  std::ostringstream csv;
  csv << "d,k,W_dk,lemma_lhs,lemma_rhs,satisfied\r\n";
  bool all_ok = true;
  for (int d = 0; d <= m; ++d) {
    const WidthDiagnostic diag = width_diagnostic(batch, plan, d);
    const double width_bound =
        2.0 / std::pow(2.0, static_cast<double>(d) / static_cast<double>(batch.k_dim));
    for (std::size_t k = 0; k < batch.k_dim; ++k) {
      const bool ok =
          diag.lemma_lhs <= diag.lemma_rhs && diag.w_per_dim[k] <= width_bound;
      all_ok = all_ok && ok;
      csv << d << ',' << (k + 1) << ',' << format_double(diag.w_per_dim[k]) << ','
          << format_double(diag.lemma_lhs) << ',' << format_double(diag.lemma_rhs)
          << ',' << (ok ? "true" : "false") << "\r\n";
    }
  }

  if (o.out) {
    std::ofstream out = open_output(*o.out);
    out << csv.str();
    if (!out) throw IoError("write failed: " + *o.out);
  } else {
    std::cout << csv.str();
  }
  return all_ok ? kExitOk : kExitBoundViolated;
}

int cmd_plot(const std::string& summary_path, const std::string& out_path) {
  std::ifstream in(summary_path, std::ios::binary);
  if (!in) throw IoError("cannot open summary csv: " + summary_path);
  std::vector<SummaryRow> rows;
  try {
    rows = read_summary_csv(in);
  } catch (const DegenerateInput& e) {
    throw IoError(e.what());
  }
  std::ofstream out = open_output(out_path);
  try {
    write_mse_plot(out, rows);
  } catch (const DegenerateInput& e) {
    throw IoError(e.what());
  }
  if (!out) throw IoError("write failed: " + out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nested-expectation estimation toolkit"};
  app.require_subcommand(1);

  Options flags;
  std::optional<std::string> config_path;
  std::optional<std::string> methods_arg, m_values_arg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--problem", flags.problem, "problem: p1 or p2");
    cmd->add_option("--scenario", flags.scenario, "p2 trial scenario: EvSvG or EvSvGvA");
    cmd->add_option("--M", flags.signal_count, "p1 signal count");
    cmd->add_option("--p", flags.p, "p1 sign fidelity in (0,1)");
    cmd->add_option("--n", flags.n_participants, "p2 trial participant count");
    cmd->add_option("--seed", flags.seed, "master seed (default: NESTMC_SEED or 0)");
  };

  CLI::App* estimate = app.add_subcommand("estimate", "run a single estimate");
  add_common(estimate);
  estimate->add_option("--method", flags.method, "sparse_grid, simple, or nested_mc");
  estimate->add_option("--m", flags.m, "depth: uses N = 2^m samples");
  estimate->add_option("--n-outer", flags.n_outer, "nested_mc outer draws");
  estimate->add_option("--n-inner", flags.n_inner, "nested_mc inner draws");

  CLI::App* bench = app.add_subcommand("bench", "replicated MSE benchmark");
  add_common(bench);
  bench->add_option("--methods", methods_arg, "comma-separated method list");
  bench->add_option("--m-values", m_values_arg, "budgets, e.g. 8..14 or 8,10,12");
  bench->add_option("--r", flags.replications, "replications per cell");
  bench->add_option("--reference", flags.reference, "analytic or nested_mc");
  bench->add_option("--ref-outer", flags.ref_outer, "reference outer budget");
  bench->add_option("--ref-inner", flags.ref_inner,
                    "reference inner budget (0 = exact conditional mean)");
  bench->add_option("--out-prefix", flags.out_prefix, "output path prefix");
  bench->add_option("--threads", flags.threads, "worker threads for replications");

  CLI::App* diagnose = app.add_subcommand("diagnose", "partition width diagnostics");
  add_common(diagnose);
  diagnose->add_option("--m", flags.m, "depth: diagnoses a batch of 2^m samples");
  diagnose->add_option("--out", flags.out, "output CSV path (default: stdout)");

  CLI::App* plot = app.add_subcommand("plot", "render a summary CSV as an SVG chart");
  std::string summary_path, svg_path;
  plot->add_option("summary_csv", summary_path, "benchmark summary CSV")->required();
  plot->add_option("out_svg", svg_path, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (methods_arg) flags.methods = split_list(*methods_arg);
    if (m_values_arg) flags.m_values = parse_m_values(*m_values_arg);
    const Options effective = merge(merge(env_layer(), file_layer(config_path)), flags);

    if (estimate->parsed()) return cmd_estimate(effective);
    if (bench->parsed()) return cmd_bench(effective);
    if (diagnose->parsed()) return cmd_diagnose(effective);
    if (plot->parsed()) return cmd_plot(summary_path, svg_path);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
