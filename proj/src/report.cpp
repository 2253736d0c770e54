#include "fqms/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "fqms/common.hpp"

namespace fqms {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void ResultTable::add_row(std::vector<std::string> row) {
  rows.push_back(std::move(row));
}

std::string ResultTable::to_csv(
    const std::vector<std::string>& comments) const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  for (size_t i = 0; i < columns.size(); ++i)
    out += (i ? "," : "") + csv_field(columns[i]);
  out += '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out += (i ? "," : "") + csv_field(row[i]);
    out += '\n';
  }
  return out;
}

nlohmann::json ResultTable::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json obj;
    for (size_t i = 0; i < columns.size() && i < row.size(); ++i) {
      // Keep numerics numeric in JSON output when they parse cleanly.
      const std::string& v = row[i];
      try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos == v.size()) {
          obj[columns[i]] = d;
          continue;
        }
      } catch (const std::exception&) {
      }
      obj[columns[i]] = v;
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

std::string render_report(const std::string& command,
                          const nlohmann::json& params,
                          const nlohmann::json& results,
                          const std::string& format,
                          const ResultTable* table) {
  if (format == "json") {
    nlohmann::json rep{{"command", command}, {"config", params}};
    rep["results"] = results;
    if (table) rep["rows"] = table->to_json();
    return rep.dump(2) + "\n";
  }
  if (format == "csv") {
    std::vector<std::string> comments;
    comments.push_back("command " + command);
    for (const auto& item : params.items())
      comments.push_back(item.key() + "=" + (item.value().is_string()
                                                 ? item.value().get<std::string>()
                                                 : item.value().dump()));
    for (const auto& item : results.items())
      comments.push_back(item.key() + "=" + item.value().dump());
    if (table) return table->to_csv(comments);
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    return out;
  }
  throw config_error("unknown output format '" + format +
                     "' (expected json or csv)");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw config_error("cannot write output file '" + path + "'");
  out << text;
}

}  // namespace fqms
