// Copyright 2026 The rshe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment reports: a numeric table, pass/warn/fail verdicts and their
// CSV / JSON / SVG renderings.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rshe/error.hpp"

namespace rshe {

enum class Status { kPass, kWarn, kFail };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::kPass: return "pass";
    case Status::kWarn: return "warn";
    case Status::kFail: return "fail";
  }
  return "fail";
}

/// A verdict keeps the measured value and the threshold it was judged by,
/// so it can be recomputed from the report alone.
struct Verdict {
  std::string name;
  Status status = Status::kPass;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
  bool soft = false;  // soft checks downgrade failure to a warning
};

struct ExperimentReport {
  std::string name;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Verdict> verdicts;
  nlohmann::json summary = nlohmann::json::object();
  double wall_seconds = 0.0;

  /// Adds a verdict that passes when ok holds; soft verdicts warn instead of failing.
  Verdict& check(std::string label, bool ok, double value, double threshold, std::string detail = {},
                 bool soft = false) {
    Status s = Status::kPass;
    if (!ok) s = soft ? Status::kWarn : Status::kFail;
    verdicts.push_back({std::move(label), s, value, threshold, std::move(detail), soft});
    return verdicts.back();
  }

  void add_row(std::vector<double> row) {
    require(row.size() == columns.size(), "report row width does not match the header");
    rows.push_back(std::move(row));
  }

  [[nodiscard]] Status status() const {
    Status s = Status::kPass;
    for (const Verdict& v : verdicts) {
      if (v.status == Status::kFail) return Status::kFail;
      if (v.status == Status::kWarn) s = Status::kWarn;
    }
    return s;
  }
};

/// Wall clock for one report; stores the elapsed time on destruction.
class ReportTimer {
 public:
  explicit ReportTimer(ExperimentReport& r) : report_(r), start_(std::chrono::steady_clock::now()) {}
  ~ReportTimer() {
    report_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  ReportTimer(const ReportTimer&) = delete;
  ReportTimer& operator=(const ReportTimer&) = delete;

 private:
  ExperimentReport& report_;
  std::chrono::steady_clock::time_point start_;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const ExperimentReport& r) {
  std::string out;
  for (std::size_t c = 0; c < r.columns.size(); ++c) {
    if (c) out += ',';
    out += r.columns[c];
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

/// JSON has no NaN or infinity; those become null.
inline nlohmann::json json_number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["status"] = to_string(r.status());
  j["config"] = r.config;
  j["columns"] = r.columns;
  j["rows"] = r.rows.size();
  j["summary"] = r.summary;
  j["wall_seconds"] = r.wall_seconds;
  j["verdicts"] = nlohmann::json::array();
  for (const Verdict& v : r.verdicts) {
    j["verdicts"].push_back({{"name", v.name},
                             {"status", to_string(v.status)},
                             {"value", json_number(v.value)},
                             {"threshold", json_number(v.threshold)},
                             {"soft", v.soft},
                             {"detail", v.detail}});
  }
  return j;
}

/// Line plot of every column against the first one. Columns whose values are
/// all positive are drawn on a log scale when the x column is too.
inline std::string to_svg(const ExperimentReport& r) {
  const double width = 640, height = 400, pad = 50;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << pad << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << r.name << "</text>\n";
  if (r.rows.size() >= 2 && r.columns.size() >= 2) {
    const auto col = [&](std::size_t c) {
      std::vector<double> v;
      for (const auto& row : r.rows) v.push_back(row[c]);
      return v;
    };
    const auto all_positive = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
    };
    const std::vector<double> xs = col(0);
    const bool logx = all_positive(xs);
    const auto tx = [&](double v) { return logx ? std::log10(v) : v; };
    const auto [xlo_it, xhi_it] = std::minmax_element(xs.begin(), xs.end());
    const double xlo = tx(*xlo_it), xhi = tx(*xhi_it);
    const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    s << "<line x1=\"" << pad << "\" y1=\"" << height - pad << "\" x2=\"" << width - pad << "\" y2=\""
      << height - pad << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << height - pad
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"" << height - 10 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << r.columns[0] << (logx ? " (log10)" : "") << "</text>\n";
    for (std::size_t c = 1; c < r.columns.size(); ++c) {
      const std::vector<double> ys = col(c);
      const bool logy = logx && all_positive(ys);
      std::vector<double> ty;
      for (double v : ys) ty.push_back(logy ? std::log10(v) : v);
      double ylo = INFINITY, yhi = -INFINITY;
      for (double v : ty) {
        if (!std::isfinite(v)) continue;
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
      }
      if (!(yhi >= ylo)) continue;
      if (yhi == ylo) yhi = ylo + 1.0;
      const double xr = xhi > xlo ? xhi - xlo : 1.0;
      s << "<polyline fill=\"none\" stroke=\"" << colours[(c - 1) % 6] << "\" points=\"";
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(ty[i])) continue;
        const double px = pad + (tx(xs[i]) - xlo) / xr * (width - 2 * pad);
        const double py = height - pad - (ty[i] - ylo) / (yhi - ylo) * (height - 2 * pad);
        s << px << ',' << py << ' ';
      }
      s << "\"/>\n";
      s << "<text x=\"" << width - pad - 150 << "\" y=\"" << pad + 14 * static_cast<double>(c) << "\" fill=\""
        << colours[(c - 1) % 6] << "\" font-family=\"sans-serif\" font-size=\"11\">" << r.columns[c]
        << (logy ? " (log10, own scale)" : " (own scale)") << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "output.dir: cannot write " + path);
  out << text;
  require(static_cast<bool>(out), "output.dir: write failed for " + path);
}

}  // namespace rshe
