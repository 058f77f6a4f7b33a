#pragma once

// Report serialization. CSV columns, in order:
//   corruption, level, stratum, ap_iou_<t0>, ap_iou_<t1>, n_gt, n_tp, n_fp
// AP values are percentages written in shortest round-trip form. A row with
// n_gt = 0 marks an empty stratum.

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "r3bench/evaluation.hpp"
#include "r3bench/io/errors.hpp"
#include "r3bench/io/file.hpp"
#include "r3bench/io/records.hpp"

namespace r3bench::io {

enum class ReportFormat { Csv, Json };

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Column label for an IoU threshold, e.g. 0.3 -> "ap_iou_0.3".
inline std::string ap_column(double threshold) { return "ap_iou_" + format_number(threshold); }

inline std::string format_report_csv(const EvalReport& report) {
  std::string out = "corruption,level,stratum," + ap_column(report.iou_thresholds[0]) + "," +
                    ap_column(report.iou_thresholds[1]) + ",n_gt,n_tp,n_fp\n";
  for (const ReportRow& r : report.rows) {
    out += r.corruption + "," + std::to_string(r.level) + "," + r.stratum + "," + format_number(r.ap_primary) +
           "," + format_number(r.ap_strict) + "," + std::to_string(r.n_gt) + "," + std::to_string(r.n_tp) + "," +
           std::to_string(r.n_fp) + "\n";
  }
  return out;
}

inline std::string format_report_json(const EvalReport& report) {
  json rows = json::array();
  const std::string c0 = ap_column(report.iou_thresholds[0]);
  const std::string c1 = ap_column(report.iou_thresholds[1]);
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"corruption", r.corruption}, {"level", r.level}, {"stratum", r.stratum},
                    {c0, r.ap_primary}, {c1, r.ap_strict}, {"n_gt", r.n_gt}, {"n_tp", r.n_tp},
                    {"n_fp", r.n_fp}, {"empty_stratum", r.n_gt == 0}});
  }
  return json{{"iou_thresholds", report.iou_thresholds}, {"rows", rows}}.dump(2) + "\n";
}

inline std::string format_report(const EvalReport& report, ReportFormat fmt) {
  return fmt == ReportFormat::Csv ? format_report_csv(report) : format_report_json(report);
}

inline void write_report(const EvalReport& report, const fs::path& path, ReportFormat fmt) {
  write_text(path, format_report(report, fmt));
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
bool parse_cell(std::string_view s, T& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool parse_threshold(std::string_view column, double& out) {
  constexpr std::string_view prefix = "ap_iou_";
  if (column.substr(0, prefix.size()) != prefix) return false;
  return parse_cell(column.substr(prefix.size()), out);
}

}  // namespace detail

inline EvalReport parse_report_csv(std::string_view text, const std::string& source = {}) {
  EvalReport report;
  bool header_seen = false;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    auto fail = [&](ParseErrorKind k, const std::string& msg) {
      return ParseError(k, LocationKind::Line, line_no, msg, source);
    };
    const auto cells = detail::split_csv(line);
    if (cells.size() != 8) throw fail(ParseErrorKind::Malformed, "expected 8 columns");
    if (!header_seen) {
      if (cells[0] != "corruption" || cells[1] != "level" || cells[2] != "stratum" || cells[5] != "n_gt" ||
          cells[6] != "n_tp" || cells[7] != "n_fp" || !detail::parse_threshold(cells[3], report.iou_thresholds[0]) ||
          !detail::parse_threshold(cells[4], report.iou_thresholds[1])) {
        throw fail(ParseErrorKind::Malformed, "unexpected header");
      }
      header_seen = true;
      return;
    }
    ReportRow r;
    r.corruption = std::string(cells[0]);
    r.stratum = std::string(cells[2]);
    if (!detail::parse_cell(cells[1], r.level) || !detail::parse_cell(cells[3], r.ap_primary) ||
        !detail::parse_cell(cells[4], r.ap_strict) || !detail::parse_cell(cells[5], r.n_gt) ||
        !detail::parse_cell(cells[6], r.n_tp) || !detail::parse_cell(cells[7], r.n_fp)) {
      throw fail(ParseErrorKind::InvalidValue, "non-numeric cell");
    }
    report.rows.push_back(std::move(r));
  });
  if (!header_seen) throw ParseError(ParseErrorKind::Truncated, LocationKind::Line, 1, "missing header", source);
  return report;
}

inline EvalReport read_report_csv(const fs::path& path) { return parse_report_csv(read_text(path), path.string()); }

}  // namespace r3bench::io
