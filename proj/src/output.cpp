#include <cmath>
#include <cstdio>
#include <fstream>

#include "homsim/scenario.hpp"

namespace homsim::scenario {

std::string format_number(double value) {
  if (!std::isfinite(value)) {
    throw std::runtime_error("refusing to serialize a non-finite value");
  }
  if (value == 0.0) {
    value = 0.0;  // drop the sign of negative zero
  }
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

nlohmann::json table_metadata(const ScenarioOutput& output, const Table& table) {
  auto meta = output.metadata;
  meta["table"] = table.name;
  return meta;
}

}  // namespace

std::string to_csv(const ScenarioOutput& output, const Table& table) {
  std::string text = "# " + table_metadata(output, table).dump() + "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    text += (c ? "," : "") + table.columns[c];
  }
  text += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) {
        text += ',';
      }
      if (row[c]) {
        text += format_number(*row[c]);
      }
    }
    text += "\n";
  }
  return text;
}

std::string to_json(const ScenarioOutput& output, const Table& table) {
  std::string text = "{\"metadata\":" + table_metadata(output, table).dump() + ",\"columns\":" +
                     nlohmann::json(table.columns).dump() + ",\"rows\":[";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    text += r ? ",\n[" : "\n[";
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) {
        text += ',';
      }
      text += row[c] ? format_number(*row[c]) : "null";
    }
    text += ']';
  }
  text += "\n]}\n";
  return text;
}

std::vector<std::filesystem::path> write_output(const ScenarioOutput& output, OutputFormat format,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& table : output.tables) {
    const bool csv = format == OutputFormat::csv;
    const auto path = dir / (table.name + (csv ? ".csv" : ".json"));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << (csv ? to_csv(output, table) : to_json(output, table));
    if (!out) {
      throw std::runtime_error("failed writing '" + path.string() + "'");
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace homsim::scenario
