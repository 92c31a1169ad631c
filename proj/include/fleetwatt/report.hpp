// Copyright 2026 The FleetWatt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

// Tabular reports with three renderings: markdown tables for reading,
// CSV for plotting, JSON for machines. All renderings are deterministic.

namespace fleetwatt::report {

using nlohmann::json;

enum class Format { kTable, kCsv, kJson };

inline std::string_view to_string(Format f) {
  switch (f) {
    case Format::kTable: return "table";
    case Format::kCsv: return "csv";
    case Format::kJson: return "json";
  }
  return "?";
}

using Cell = std::variant<std::monostate, std::string, std::int64_t, double>;

struct Column {
  std::string name;
  int precision = 2;           // digits after the point for double cells
  bool context_units = false;  // print integer token counts as 2K, 64K, ...
};

struct Table {
  std::string title;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  Table& add(std::vector<Cell> row) {
    row.resize(columns.size());
    rows.push_back(std::move(row));
    return *this;
  }
};

struct Report {
  std::string command;
  json config = json::object();
  json tags = json::array();  // per-profile data-quality tags
  std::vector<Table> tables;
  std::vector<std::string> notes;
  json data = json::object();
};

inline std::string context_label(std::int64_t tokens) {
  if (tokens >= 1024 && tokens % 1024 == 0) return std::to_string(tokens / 1024) + "K";
  return std::to_string(tokens);
}

inline std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

inline std::string format_cell(const Cell& c, const Column& col) {
  struct V {
    const Column& col;
    std::string operator()(std::monostate) const { return "-"; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t v) const {
      return col.context_units ? context_label(v) : std::to_string(v);
    }
    std::string operator()(double v) const { return format_double(v, col.precision); }
  };
  return std::visit(V{col}, c);
}

inline std::string render_markdown(const Report& r) {
  std::ostringstream os;
  for (std::size_t t = 0; t < r.tables.size(); ++t) {
    const Table& tab = r.tables[t];
    if (t) os << '\n';
    if (!tab.title.empty()) os << "### " << tab.title << "\n\n";
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(tab.columns.size(), 3);
    for (std::size_t c = 0; c < tab.columns.size(); ++c) width[c] = std::max(width[c], tab.columns[c].name.size());
    for (const auto& row : tab.rows) {
      std::vector<std::string> line;
      for (std::size_t c = 0; c < tab.columns.size(); ++c) {
        line.push_back(format_cell(row[c], tab.columns[c]));
        width[c] = std::max(width[c], line.back().size());
      }
      cells.push_back(std::move(line));
    }
    auto emit = [&](const std::vector<std::string>& line) {
      os << '|';
      for (std::size_t c = 0; c < line.size(); ++c) {
        os << ' ' << line[c] << std::string(width[c] - line[c].size(), ' ') << " |";
      }
      os << '\n';
    };
    std::vector<std::string> head;
    for (const auto& col : tab.columns) head.push_back(col.name);
    emit(head);
    os << '|';
    for (std::size_t c = 0; c < head.size(); ++c) os << std::string(width[c] + 2, '-') << '|';
    os << '\n';
    for (const auto& line : cells) emit(line);
  }
  if (!r.tags.empty() || !r.notes.empty()) os << '\n';
  for (const auto& tag : r.tags) {
    os << "- " << tag.value("profile", std::string{}) << ": power " << tag.value("power_quality", std::string{})
       << ", W " << tag.value("w_quality", std::string{}) << '\n';
  }
  for (const auto& n : r.notes) os << "- " << n << '\n';
  return os.str();
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

/// One block per table, separated by a blank line and headed by a
/// `# title` comment line. Numbers are printed with 10 significant digits.
inline std::string render_csv(const Report& r) {
  std::ostringstream os;
  for (const auto& tag : r.tags) {
    os << "# profile=" << tag.value("profile", std::string{}) << " power_quality="
       << tag.value("power_quality", std::string{}) << " w_quality=" << tag.value("w_quality", std::string{})
       << '\n';
  }
  for (std::size_t t = 0; t < r.tables.size(); ++t) {
    const Table& tab = r.tables[t];
    if (t || !r.tags.empty()) os << '\n';
    os << "# " << tab.title << '\n';
    for (std::size_t c = 0; c < tab.columns.size(); ++c) {
      os << (c ? "," : "") << csv_escape(tab.columns[c].name);
    }
    os << '\n';
    for (const auto& row : tab.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) os << ',';
        if (const auto* d = std::get_if<double>(&row[c])) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.10g", *d);
          os << buf;
        } else if (const auto* i = std::get_if<std::int64_t>(&row[c])) {
          os << *i;
        } else if (const auto* s = std::get_if<std::string>(&row[c])) {
          os << csv_escape(*s);
        }
      }
      os << '\n';
    }
  }
  return os.str();
}

inline json cell_to_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

inline json to_json_value(const Report& r) {
  json tables = json::array();
  for (const auto& tab : r.tables) {
    json cols = json::array();
    for (const auto& c : tab.columns) cols.push_back(c.name);
    json rows = json::array();
    for (const auto& row : tab.rows) {
      json jr = json::array();
      for (const auto& c : row) jr.push_back(cell_to_json(c));
      rows.push_back(std::move(jr));
    }
    tables.push_back(json{{"title", tab.title}, {"columns", cols}, {"rows", rows}});
  }
  return json{{"command", r.command}, {"config", r.config}, {"tags", r.tags},
              {"tables", tables},     {"notes", r.notes},   {"data", r.data}};
}

inline std::string render_json(const Report& r) { return to_json_value(r).dump(2) + "\n"; }

inline std::string render(const Report& r, Format f) {
  switch (f) {
    case Format::kTable: return render_markdown(r);
    case Format::kCsv: return render_csv(r);
    case Format::kJson: return render_json(r);
  }
  return {};
}

}  // namespace fleetwatt::report
