#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace fqms {

// Row-oriented result table rendered as CSV (with '#'-prefixed metadata
// comment lines) or as part of a JSON report.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string to_csv(const std::vector<std::string>& comments) const;
  nlohmann::json to_json() const;  // array of objects keyed by column
};

std::string format_double(double v);

// Assembles the standard report envelope: command name, resolved
// parameters, and results.
std::string render_report(const std::string& command,
                          const nlohmann::json& params,
                          const nlohmann::json& results,
                          const std::string& format,
                          const ResultTable* table = nullptr);

// Writes to the path, or to stdout when the path is empty.
void write_text(const std::string& path, const std::string& text);

}  // namespace fqms
