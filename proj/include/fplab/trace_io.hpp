#pragma once

// Trace serialization: CSV and JSONL writers plus a CSV reader used by the
// round-trip tests.  Files are written atomically (temp file + rename) so a
// crashed run never leaves a half-written artifact behind.

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fplab/trace.hpp"

namespace fplab {

// Identity of one solver run, attached to every serialized record.
struct RunMeta {
  std::string run_id;
  std::string algorithm;
  std::string operator_label;
  std::uint64_t seed = 0;
};

enum class TraceFormat { Csv, Jsonl };

inline constexpr const char* kTraceCsvHeader =
    "run_id,algorithm,operator,iter,queries,residual,lambda,eps_k,D_estimate,phase";

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory " +
                               path.parent_path().string() + ": " + ec.message());
    }
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw std::runtime_error("rename " + tmp.string() + " -> " + path.string() +
                             " failed: " + ec.message());
  }
}

}  // namespace detail

// CSV layout: a `# seed=N` comment line, the mandatory header, then one row
// per trace record.  Floats use %.17g (round-trip exact); optional fields
// (eps_k, D_estimate, phase) serialize as empty cells when absent.
inline void export_trace_csv(const RunResult& result, const RunMeta& meta,
                             const std::filesystem::path& path) {
  std::string out;
  out.reserve(64 * (result.trace.records().size() + 2));
  out += "# seed=";
  out += std::to_string(meta.seed);
  out += '\n';
  out += kTraceCsvHeader;
  out += '\n';
  for (const TraceRecord& rec : result.trace.records()) {
    out += meta.run_id;
    out += ',';
    out += meta.algorithm;
    out += ',';
    out += meta.operator_label;
    out += ',';
    out += std::to_string(rec.iter);
    out += ',';
    out += std::to_string(rec.queries);
    out += ',';
    out += detail::format_double(rec.residual);
    out += ',';
    out += detail::format_double(rec.lambda);
    out += ',';
    out += detail::format_optional(rec.eps_k);
    out += ',';
    out += detail::format_optional(rec.D_estimate);
    out += ',';
    if (rec.phase) out += std::to_string(*rec.phase);
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

// JSONL layout: one object per record with the same field names as the CSV
// columns; absent optionals are omitted rather than written as null.  The
// seed comment is a CSV-only mechanism, so JSONL carries no seed line.
inline void export_trace_jsonl(const RunResult& result, const RunMeta& meta,
                               const std::filesystem::path& path) {
  std::string out;
  for (const TraceRecord& rec : result.trace.records()) {
    nlohmann::json row;
    row["run_id"] = meta.run_id;
    row["algorithm"] = meta.algorithm;
    row["operator"] = meta.operator_label;
    row["iter"] = rec.iter;
    row["queries"] = rec.queries;
    row["residual"] = rec.residual;
    row["lambda"] = rec.lambda;
    if (rec.eps_k) row["eps_k"] = *rec.eps_k;
    if (rec.D_estimate) row["D_estimate"] = *rec.D_estimate;
    if (rec.phase) row["phase"] = *rec.phase;
    out += row.dump();
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

inline void export_trace(const RunResult& result, const RunMeta& meta,
                         const std::filesystem::path& path, TraceFormat format) {
  if (format == TraceFormat::Csv) {
    export_trace_csv(result, meta, path);
  } else {
    export_trace_jsonl(result, meta, path);
  }
}

// Parsed view of a CSV trace file; `records` re-uses TraceRecord with
// displacement left at zero (displacement is not serialized).
struct ParsedTrace {
  RunMeta meta;
  std::vector<TraceRecord> records;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline double parse_double_field(const std::string& text, const char* what) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    throw std::runtime_error(std::string("bad ") + what + " value: '" + text + "'");
  }
  return v;
}

inline std::uint64_t parse_uint_field(const std::string& text, const char* what) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    throw std::runtime_error(std::string("bad ") + what + " value: '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

inline ParsedTrace parse_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  ParsedTrace parsed;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# seed=";
      if (line.rfind(tag, 0) == 0) {
        parsed.meta.seed = detail::parse_uint_field(line.substr(tag.size()), "seed");
      }
      continue;
    }
    if (!saw_header) {
      if (line != kTraceCsvHeader) {
        throw std::runtime_error("unexpected CSV header in " + path.string() +
                                 ": '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    std::vector<std::string> f = detail::split_csv_line(line);
    if (f.size() != 10) {
      throw std::runtime_error("expected 10 CSV fields, got " +
                               std::to_string(f.size()) + " in " + path.string());
    }
    if (parsed.records.empty()) {
      parsed.meta.run_id = f[0];
      parsed.meta.algorithm = f[1];
      parsed.meta.operator_label = f[2];
    }
    TraceRecord rec;
    rec.iter = detail::parse_uint_field(f[3], "iter");
    rec.queries = detail::parse_uint_field(f[4], "queries");
    rec.residual = detail::parse_double_field(f[5], "residual");
    rec.lambda = detail::parse_double_field(f[6], "lambda");
    if (!f[7].empty()) rec.eps_k = detail::parse_double_field(f[7], "eps_k");
    if (!f[8].empty()) rec.D_estimate = detail::parse_double_field(f[8], "D_estimate");
    if (!f[9].empty()) rec.phase = detail::parse_uint_field(f[9], "phase");
    parsed.records.push_back(std::move(rec));
  }
  if (!saw_header) {
    throw std::runtime_error("no header found in " + path.string());
  }
  return parsed;
}

}  // namespace fplab
