// Copyright 2026 The Arena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Tournament persistence: records.csv, summary.json and two SVG charts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "arena/tournament.hpp"

namespace arena {

inline constexpr const char* kRecordsHeader = "trial,agent_row,agent_col,episode,reward_row_total,transitions";

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ArenaError(ErrorCode::kIoFailure, "cannot write " + path.string());
}

inline std::string records_csv(const std::vector<MatchRecord>& records) {
  std::string out = std::string(kRecordsHeader) + "\n";
  for (const MatchRecord& r : records) {
    out += std::to_string(r.trial) + ',' + r.agent_row + ',' + r.agent_col + ',' + std::to_string(r.episode) + ',' +
           format_double(r.reward_row_total) + ',' + std::to_string(r.transitions) + '\n';
  }
  return out;
}

inline std::vector<MatchRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArenaError(ErrorCode::kIoFailure, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kRecordsHeader) {
    throw ArenaError(ErrorCode::kIoFailure, "unexpected header in " + path.string());
  }
  std::vector<MatchRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw ArenaError(ErrorCode::kIoFailure, "malformed record: " + line);
    try {
      records.push_back({std::stoi(f[0]), f[1], f[2], std::stoi(f[3]), std::stod(f[4]), std::stoi(f[5])});
    } catch (const std::exception&) {
      throw ArenaError(ErrorCode::kIoFailure, "malformed record: " + line);
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// SVG charts

namespace svg {

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[i % (sizeof palette / sizeof palette[0])];
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Frame {
  double width = 720, height = 420, left = 70, right = 170, top = 40, bottom = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

inline void pad_range(double& lo, double& hi) {
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

inline std::string open(const Frame& f, const std::string& title, const std::string& xlabel,
                        const std::string& ylabel) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.width) + "\" height=\"" +
                  num(f.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(f.width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
  const double xa = f.left, xb = f.width - f.right, ya = f.top, yb = f.height - f.bottom;
  s += "<rect x=\"" + num(xa) + "\" y=\"" + num(ya) + "\" width=\"" + num(xb - xa) + "\" height=\"" + num(yb - ya) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = f.y0 + (f.y1 - f.y0) * k / 4.0;
    s += "<line x1=\"" + num(xa - 4) + "\" x2=\"" + num(xa) + "\" y1=\"" + num(f.py(y)) + "\" y2=\"" + num(f.py(y)) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(xa - 7) + "\" y=\"" + num(f.py(y) + 4) + "\" text-anchor=\"end\">" + tick_label(y) +
         "</text>\n";
  }
  s += "<text x=\"" + num((xa + xb) / 2) + "\" y=\"" + num(f.height - 12) + "\" text-anchor=\"middle\">" + xlabel +
       "</text>\n";
  s += "<text transform=\"translate(16," + num((ya + yb) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" + ylabel +
       "</text>\n";
  if (f.y0 < 0 && f.y1 > 0) {
    s += "<line x1=\"" + num(xa) + "\" x2=\"" + num(xb) + "\" y1=\"" + num(f.py(0)) + "\" y2=\"" + num(f.py(0)) +
         "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  return s;
}

inline std::string legend(const Frame& f, const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = f.top + 14 + 18.0 * static_cast<double>(i);
    const double x = f.width - f.right + 14;
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 9) + "\" width=\"12\" height=\"12\" fill=\"" + color(i) + "\"/>\n";
    s += "<text x=\"" + num(x + 18) + "\" y=\"" + num(y + 1) + "\">" + names[i] + "</text>\n";
  }
  return s;
}

}  // namespace svg

inline std::string reward_line_svg(const AggregateStats& stats) {
  svg::Frame f;
  f.x0 = 0;
  f.x1 = std::max(1, stats.episodes - 1);
  double lo = 0.0, hi = 0.0;
  for (const auto& [_, s] : stats.series) {
    for (double v : s.episode_mean) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  svg::pad_range(lo, hi);
  f.y0 = lo;
  f.y1 = hi;
  std::string out = svg::open(f, "Mean reward per episode", "episode", "mean episode reward");
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4.0;
    out += "<text x=\"" + svg::num(f.px(x)) + "\" y=\"" + svg::num(f.height - f.bottom + 16) +
           "\" text-anchor=\"middle\">" + svg::tick_label(std::round(x)) + "</text>\n";
  }
  for (std::size_t i = 0; i < stats.agents.size(); ++i) {
    const AgentSeries& s = stats.series.at(stats.agents[i]);
    out += "<polyline fill=\"none\" stroke-width=\"1.8\" stroke=\"" + std::string(svg::color(i)) + "\" points=\"";
    for (int e = 0; e < stats.episodes; ++e) {
      out += svg::num(f.px(e)) + "," + svg::num(f.py(s.episode_mean[e])) + (e + 1 < stats.episodes ? " " : "");
    }
    out += "\"/>\n";
  }
  return out + svg::legend(f, stats.agents) + "</svg>\n";
}

inline std::string reward_bar_svg(const AggregateStats& stats) {
  svg::Frame f;
  const double n = static_cast<double>(stats.agents.size());
  f.x0 = 0;
  f.x1 = n;
  double lo = 0.0, hi = 0.0;
  for (const auto& [_, s] : stats.series) {
    lo = std::min(lo, s.cumulative);
    hi = std::max(hi, s.cumulative);
  }
  svg::pad_range(lo, hi);
  f.y0 = lo;
  f.y1 = hi;
  std::string out = svg::open(f, "Cumulative reward", "agent", "sum of per-episode means");
  for (std::size_t i = 0; i < stats.agents.size(); ++i) {
    const double v = stats.series.at(stats.agents[i]).cumulative;
    const double xa = f.px(static_cast<double>(i) + 0.15), xb = f.px(static_cast<double>(i) + 0.85);
    const double ya = f.py(std::max(v, 0.0)), yb = f.py(std::min(v, 0.0));
    out += "<rect x=\"" + svg::num(xa) + "\" y=\"" + svg::num(ya) + "\" width=\"" + svg::num(xb - xa) +
           "\" height=\"" + svg::num(std::max(yb - ya, 0.5)) + "\" fill=\"" + svg::color(i) + "\"/>\n";
    out += "<text x=\"" + svg::num((xa + xb) / 2) + "\" y=\"" + svg::num(f.height - f.bottom + 16) +
           "\" text-anchor=\"middle\">" + stats.agents[i] + "</text>\n";
  }
  return out + svg::legend(f, stats.agents) + "</svg>\n";
}

inline void emit_plots(const AggregateStats& stats, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ArenaError(ErrorCode::kIoFailure, "cannot create " + dir.string());
  write_text(dir / "reward_line.svg", reward_line_svg(stats));
  write_text(dir / "reward_bar.svg", reward_bar_svg(stats));
}

inline nlohmann::json summary_json(const TournamentResults& r, const AggregateStats& stats) {
  return {{"config", r.config.to_json()}, {"matches", r.matches}, {"records", r.records.size()},
          {"stats", to_json(stats)}};
}

inline AggregateStats persist(const TournamentResults& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ArenaError(ErrorCode::kIoFailure, "cannot create " + dir.string());
  const AggregateStats stats = aggregate(r);
  write_text(dir / "records.csv", records_csv(r.records));
  write_text(dir / "summary.json", summary_json(r, stats).dump(2) + "\n");
  emit_plots(stats, dir);
  return stats;
}

// Rebuilds the statistics of a persisted run from its records and config.
inline AggregateStats load_stats(const std::filesystem::path& dir) {
  std::ifstream in(dir / "summary.json");
  if (!in) throw ArenaError(ErrorCode::kIoFailure, "cannot read " + (dir / "summary.json").string());
  nlohmann::json summary;
  try {
    summary = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArenaError(ErrorCode::kIoFailure, std::string("malformed summary.json: ") + e.what());
  }
  const TournamentConfig c = TournamentConfig::from_json(summary.at("config"));
  return aggregate(load_records(dir / "records.csv"), c.agent_ids, c.trials, c.episodes);
}

}  // namespace arena
