#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nestmc/errors.hpp"
#include "nestmc/harness.hpp"

namespace nestmc {

// 17 significant digits: round-trip exact for IEEE doubles.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// RFC 4180 quoting; only applied when the field needs it.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string seed_path_string(const std::vector<std::uint64_t>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ':';
    out += std::to_string(path[i]);
  }
  return out;
}

inline void write_estimates_csv(std::ostream& os, const RunReport& report) {
  os << "problem,scenario,method,m,N,replication,estimate,seed_path\r\n";
  for (const MethodCell& cell : report.cells)
    for (std::size_t rep = 0; rep < cell.estimates.size(); ++rep) {
      const EstimateRecord& rec = cell.estimates[rep];
      os << csv_field(report.problem_label) << ',' << csv_field(report.scenario_label)
         << ',' << method_name(cell.method) << ',' << cell.m << ',' << cell.n << ','
         << rep << ',' << format_double(rec.value) << ','
         << seed_path_string(rec.seed_path) << "\r\n";
    }
}

inline double slope_for(const RunReport& report, Method method) {
  for (const auto& [m, s] : report.slopes)
    if (m == method) return s;
  return std::numeric_limits<double>::quiet_NaN();
}

inline void write_summary_csv(std::ostream& os, const RunReport& report) {
  os << "problem,scenario,method,m,N,mse,mse_stderr,truth_or_ref,ref_stderr,slope\r\n";
  for (const MethodCell& cell : report.cells) {
    os << csv_field(report.problem_label) << ',' << csv_field(report.scenario_label)
       << ',' << method_name(cell.method) << ',' << cell.m << ',' << cell.n << ','
       << format_double(cell.mse) << ',' << format_double(cell.mse_stderr) << ','
       << format_double(report.reference) << ','
       << format_double(report.reference_stderr) << ','
       << format_double(slope_for(report, cell.method)) << "\r\n";
  }
}

// JSON mirror of the summary (wall-clock time deliberately omitted so that
// reruns of the same config are byte-identical).
inline void write_report_json(std::ostream& os, const RunReport& report) {
  nlohmann::ordered_json doc;
  doc["problem"] = report.problem_label;
  doc["scenario"] = report.scenario_label;
  doc["replications"] = report.replications;
  doc["seed"] = report.master_seed;
  doc["reference"] = {{"value", report.reference}, {"stderr", report.reference_stderr}};
  doc["cells"] = nlohmann::ordered_json::array();
  for (const MethodCell& cell : report.cells) {
    nlohmann::ordered_json j;
    j["method"] = std::string(method_name(cell.method));
    j["m"] = cell.m;
    j["N"] = cell.n;
    j["mse"] = cell.mse;
    j["mse_stderr"] = cell.mse_stderr;
    j["slope"] = slope_for(report, cell.method);
    j["samples_used"] = cell.estimates.empty() ? 0 : cell.estimates.front().samples_used;
    j["f_evals"] = cell.estimates.empty() ? 0 : cell.estimates.front().f_evals;
    j["estimates"] = nlohmann::ordered_json::array();
    for (const EstimateRecord& rec : cell.estimates) j["estimates"].push_back(rec.value);
    doc["cells"].push_back(std::move(j));
  }
  os << doc.dump(2) << '\n';
}

// --- summary CSV reading (for the plot command) ----------------------------

struct SummaryRow {
  std::string problem, scenario, method;
  double n = 0.0;
  double mse = 0.0;
};

namespace detail {

inline std::vector<std::string> parse_csv_record(std::istream& is, bool& ok) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false, any = false;
  int c;
  while ((c = is.get()) != EOF) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          field += '"';
          is.get();
        } else {
          quoted = false;
        }
      } else {
        field += static_cast<char>(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (is.peek() == '\n') is.get();
      break;
    } else if (c == '\n') {
      break;
    } else {
      field += static_cast<char>(c);
    }
  }
  ok = any;
  if (any) fields.push_back(std::move(field));
  return fields;
}

}  // namespace detail

// Reads rows with at least {method, N, mse} columns; throws DegenerateInput
// on a missing header, missing columns, no data rows, or unparsable numbers.
inline std::vector<SummaryRow> read_summary_csv(std::istream& is) {
  bool ok = false;
  const std::vector<std::string> header = detail::parse_csv_record(is, ok);
  if (!ok) throw DegenerateInput("summary csv: empty file");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"method", "N", "mse"})
    if (!col.count(required))
      throw DegenerateInput(std::string("summary csv: missing column ") + required);

  std::vector<SummaryRow> rows;
  for (;;) {
    const std::vector<std::string> fields = detail::parse_csv_record(is, ok);
    if (!ok) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (fields.size() < header.size())
      throw DegenerateInput("summary csv: short record");
    SummaryRow row;
    row.method = fields[col["method"]];
    if (col.count("problem")) row.problem = fields[col["problem"]];
    if (col.count("scenario")) row.scenario = fields[col["scenario"]];
    try {
      row.n = std::stod(fields[col["N"]]);
      row.mse = std::stod(fields[col["mse"]]);
    } catch (const std::exception&) {
      throw DegenerateInput("summary csv: non-numeric N or mse");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DegenerateInput("summary csv: no data rows");
  return rows;
}

}  // namespace nestmc
