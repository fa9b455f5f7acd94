#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nestmc/errors.hpp"

namespace nestmc {

// One layer of CLI configuration. Layers merge field-wise with the later
// (higher-precedence) source winning: built-in defaults < NESTMC_SEED env
// < config file < command-line flags.
struct Options {
  std::optional<std::string> problem;        // "p1" | "p2"
  std::optional<std::string> scenario;       // "EvSvG" | "EvSvGvA"
  std::optional<std::string> method;         // single-estimate method
  std::optional<std::vector<std::string>> methods;
  std::optional<long long> m;
  std::optional<std::vector<long long>> m_values;
  std::optional<long long> signal_count;     // M (problem 1)
  std::optional<double> p;                   // problem 1 sign fidelity
  std::optional<double> n_participants;      // problem 2 trial size
  std::optional<long long> replications;     // r
  std::optional<std::uint64_t> seed;
  std::optional<std::string> reference;      // "analytic" | "nested_mc"
  std::optional<long long> ref_outer;
  std::optional<long long> ref_inner;
  std::optional<long long> n_outer;          // nested_mc single estimate
  std::optional<long long> n_inner;
  std::optional<std::string> out_prefix;
  std::optional<std::string> out;
  std::optional<long long> threads;
};

inline Options merge(const Options& base, const Options& over) {
  Options out = base;
  auto pick = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  pick(out.problem, over.problem);
  pick(out.scenario, over.scenario);
  pick(out.method, over.method);
  pick(out.methods, over.methods);
  pick(out.m, over.m);
  pick(out.m_values, over.m_values);
  pick(out.signal_count, over.signal_count);
  pick(out.p, over.p);
  pick(out.n_participants, over.n_participants);
  pick(out.replications, over.replications);
  pick(out.seed, over.seed);
  pick(out.reference, over.reference);
  pick(out.ref_outer, over.ref_outer);
  pick(out.ref_inner, over.ref_inner);
  pick(out.n_outer, over.n_outer);
  pick(out.n_inner, over.n_inner);
  pick(out.out_prefix, over.out_prefix);
  pick(out.out, over.out);
  pick(out.threads, over.threads);
  return out;
}

// Parse a JSON config object; unknown keys are rejected so typos fail loudly.
inline Options options_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidParameter("config: top level must be a JSON object");
  static const std::set<std::string> known = {
      "problem", "scenario", "method",  "methods",   "m",       "m_values",
      "M",       "p",        "n",       "r",         "seed",    "reference",
      "ref_outer", "ref_inner", "n_outer", "n_inner", "out_prefix", "out",
      "threads"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key))
      throw InvalidParameter("config: unknown key \"" + key + "\"");

  Options opt;
  auto get_str = [&](const char* key, std::optional<std::string>& dst) {
    if (doc.contains(key)) dst = doc.at(key).get<std::string>();
  };
  auto get_int = [&](const char* key, std::optional<long long>& dst) {
    if (doc.contains(key)) dst = doc.at(key).get<long long>();
  };
  auto get_num = [&](const char* key, std::optional<double>& dst) {
    if (doc.contains(key)) dst = doc.at(key).get<double>();
  };
  try {
    get_str("problem", opt.problem);
    get_str("scenario", opt.scenario);
    get_str("method", opt.method);
    if (doc.contains("methods"))
      opt.methods = doc.at("methods").get<std::vector<std::string>>();
    get_int("m", opt.m);
    if (doc.contains("m_values"))
      opt.m_values = doc.at("m_values").get<std::vector<long long>>();
    get_int("M", opt.signal_count);
    get_num("p", opt.p);
    get_num("n", opt.n_participants);
    get_int("r", opt.replications);
    if (doc.contains("seed")) opt.seed = doc.at("seed").get<std::uint64_t>();
    get_str("reference", opt.reference);
    get_int("ref_outer", opt.ref_outer);
    get_int("ref_inner", opt.ref_inner);
    get_int("n_outer", opt.n_outer);
    get_int("n_inner", opt.n_inner);
    get_str("out_prefix", opt.out_prefix);
    get_str("out", opt.out);
    get_int("threads", opt.threads);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("config: ") + e.what());
  }
  return opt;
}

}  // namespace nestmc
