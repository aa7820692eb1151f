#include "castro/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "castro/error.hpp"
#include "csv.hpp"

namespace castro {
namespace {

using nlohmann::ordered_json;

std::string format_fixed(double v, int decimals) {
  // Values that round to zero print unsigned.
  if (std::abs(v) < 0.5 * std::pow(10.0, -decimals)) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string format_csv(const SampleMatrix& rows, std::span<const std::string> names, int decimals) {
  if (static_cast<std::size_t>(rows.cols()) != names.size()) {
    throw DomainError("format_csv: " + std::to_string(rows.cols()) + " columns but " + std::to_string(names.size()) +
                      " names");
  }
  std::string out;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out += ',';
    out += names[c];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (c) out += ',';
      out += format_fixed(rows(r, c), decimals);
    }
    out += '\n';
  }
  return out;
}

LabeledTable parse_csv_table(std::string_view text, std::string_view source) {
  const std::string where(source);
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  const auto lines = detail::split_lines(text);

  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw DataError(where + ": missing header row");

  LabeledTable table;
  for (auto cell : detail::split_csv_line(lines[first])) {
    if (cell.empty()) throw DataError(where + ":" + std::to_string(first + 1) + ": empty column name");
    table.columns.emplace_back(cell);
  }

  std::vector<double> values;
  std::size_t count = 0;
  for (std::size_t ln = first + 1; ln < lines.size(); ++ln) {
    if (detail::trim(lines[ln]).empty()) continue;
    const auto cells = detail::split_csv_line(lines[ln]);
    if (cells.size() != table.columns.size()) {
      throw DataError(where + ":" + std::to_string(ln + 1) + ": expected " + std::to_string(table.columns.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), v);
      if (ec != std::errc() || ptr != cells[c].data() + cells[c].size() || !std::isfinite(v)) {
        throw DataError(where + ":" + std::to_string(ln + 1) + ": non-numeric value '" + std::string(cells[c]) +
                        "' in column '" + table.columns[c] + "'");
      }
      values.push_back(v);
    }
    ++count;
  }
  const auto cols = static_cast<Eigen::Index>(table.columns.size());
  table.rows = SampleMatrix(static_cast<Eigen::Index>(count), cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    table.rows(static_cast<Eigen::Index>(i) / cols, static_cast<Eigen::Index>(i) % cols) = values[i];
  }
  return table;
}

LabeledTable read_csv_table(const std::string& path) { return parse_csv_table(read_file(path), path); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

ordered_json metrics_json(const MetricsTable& table) {
  ordered_json out = ordered_json::array();
  for (const auto& m : table) {
    out.push_back({{"scope", scope_name(m.scope)},
                   {"points", m.point_count},
                   {"cd", m.cd},
                   {"wd", m.wd},
                   {"variance", optional_json(m.variance)}});
  }
  return out;
}

std::string format_metrics_table(const MetricsTable& table) {
  std::string out = "scope,points,cd,wd,variance\n";
  char buf[160];
  for (const auto& m : table) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.6f,", std::string(scope_name(m.scope)).c_str(), m.point_count, m.cd,
                  m.wd);
    out += buf;
    if (m.variance) {
      std::snprintf(buf, sizeof buf, "%.6f", *m.variance);
      out += buf;
    } else {
      out += "NA";
    }
    out += '\n';
  }
  return out;
}

ordered_json build_manifest(const ProblemSpec& spec, const RunOptions& options, const PipelineResult& result,
                            std::size_t data_rows) {
  const std::string canonical = serialize_problem_config(spec);

  ordered_json manifest;
  manifest["tool"] = "castro";
  manifest["version"] = kToolVersion;
  manifest["seed"] = options.seed;
  manifest["config_sha256"] = sha256_hex(canonical);
  manifest["config"] = ordered_json::parse(canonical);
  ordered_json engines = ordered_json::array();
  for (Engine e : options.engines) engines.push_back(engine_name(e));
  manifest["engines"] = engines;
  manifest["data_rows"] = data_rows;
  manifest["working_size"] = result.working_size;

  ordered_json subs = ordered_json::array();
  for (const auto& sub : result.subproblems) {
    ordered_json s;
    s["name"] = sub.name;
    s["kind"] = sub.kind == SubproblemSpec::Kind::Main ? "main" : "group";
    s["tot_samp"] = sub.tot_samp;
    s["n_samp"] = sub.n_samp;
    s["max_rej"] = sub.max_rej;
    ordered_json per_engine = ordered_json::array();
    for (const auto& e : sub.engines) {
      ordered_json perms = ordered_json::array();
      for (const auto& p : e.per_perm) {
        perms.push_back({{"perm", p.perm_index},
                         {"status", status_name(p.status)},
                         {"accepted", p.accepted},
                         {"pairing_rejected", p.pairing_rejected},
                         {"bound_rejected", p.bound_rejected}});
      }
      per_engine.push_back({{"engine", engine_name(e.engine)},
                            {"feasible_rows", e.raw_pool_size},
                            {"synthesis_rejected", e.synthesis_rejected},
                            {"pool_rows", e.pool.rows()},
                            {"shortlist_rows", e.shortlist.rows()},
                            {"permutations", perms}});
    }
    s["engines"] = per_engine;
    s["warnings"] = sub.warnings;
    subs.push_back(s);
  }
  manifest["subproblems"] = subs;

  ordered_json recs = ordered_json::array();
  for (const auto& rec : result.recommendations) {
    ordered_json r;
    r["engine"] = engine_name(rec.engine);
    r["file"] = "recommendations_" + std::string(engine_name(rec.engine)) + ".csv";
    r["rows"] = rec.rows.rows();
    r["flagged_rows"] = rec.flagged;
    ordered_json provenance = ordered_json::array();
    for (const auto& p : rec.provenance) {
      provenance.push_back({{"candidate", p.candidate}, {"subproblem_rows", p.subproblem_rows}});
    }
    r["provenance"] = provenance;
    if (rec.metrics) {
      r["metrics"] = metrics_json(*rec.metrics);
    } else {
      r["metrics"] = nullptr;
      r["metrics_error"] = rec.metrics_error;
    }
    r["warnings"] = rec.warnings;
    recs.push_back(r);
  }
  manifest["recommendations"] = recs;
  manifest["warnings"] = result.warnings;
  return manifest;
}

}  // namespace castro
