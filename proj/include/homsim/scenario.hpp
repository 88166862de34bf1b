#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "homsim/correlation.hpp"
#include "homsim/sources.hpp"
#include "homsim/spectral.hpp"

namespace homsim::scenario {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Scenario { dip, maps, intensities, filtered, g2, dephasing, classical };
enum class SourceKind { spdc, classical };
enum class OutputFormat { csv, json };

struct TauSpec {
  double min = -3.0;
  double max = 3.0;
  std::size_t points = 241;

  bool operator==(const TauSpec&) const = default;
};

/// Fully resolved run description. Every field is echoed into output
/// metadata; see defaults_for() for the per-scenario starting point.
struct ScenarioConfig {
  Scenario scenario = Scenario::dip;
  SourceKind source = SourceKind::spdc;

  double phi = 0.0;
  double phi_prime = 0.0;
  sources::ZetaModel zeta;
  double delta = 1.0;
  double delta_s = 1.0;
  double delta_i = 1.0;
  sources::SwapMode swap = sources::SwapMode::exact_half;
  bool classical_product = false;

  double span = 2.0;
  double filter_span = 1.0;
  spectral::Envelope envelope;
  std::size_t nodes = 201;
  spectral::GridScheme scheme = spectral::GridScheme::grid;
  std::uint64_t seed = 0;
  std::size_t zeta_nodes = 128;
  sources::ZetaSampling zeta_sampling = sources::ZetaSampling::midpoint;

  TauSpec tau;
  correlation::CoincidenceForm form = correlation::CoincidenceForm::paper;
  OutputFormat format = OutputFormat::csv;
  std::vector<double> zeta_halfwidths;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Invalid configuration; `key` names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

ScenarioConfig defaults_for(Scenario scenario);

std::string_view to_string(Scenario scenario);
std::optional<Scenario> scenario_from_string(std::string_view name);

/// Parses an angle given as a number of radians or a string such as "pi",
/// "-pi/2", "3*pi/8" or "0.25pi". Throws ConfigError naming `key`.
double parse_angle(const nlohmann::json& value, const std::string& key);

/// Resolves a JSON document into a validated config. `scenario_override`
/// (the CLI subcommand) must agree with any "scenario" key in the document.
ScenarioConfig parse_config(const nlohmann::json& doc,
                            std::optional<Scenario> scenario_override = std::nullopt);
ScenarioConfig parse_config_text(std::string_view text,
                                 std::optional<Scenario> scenario_override = std::nullopt);
/// Reads a config file into a JSON object; a blank file yields {}.
nlohmann::json read_config_document(const std::filesystem::path& path);

ScenarioConfig parse_config_file(const std::filesystem::path& path,
                                 std::optional<Scenario> scenario_override = std::nullopt);

nlohmann::json serialize(const ScenarioConfig& cfg);

void validate(const ScenarioConfig& cfg);

/// A tabular dataset. Empty cells (flagged g2 gaps) are nullopt.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
};

struct ScenarioOutput {
  nlohmann::json metadata;  // tool, version, seed, resolved config
  std::vector<Table> tables;
  double wall_seconds = 0.0;  // not written to files
};

ScenarioOutput run_scenario(const ScenarioConfig& cfg, unsigned threads = 1);

/// Writes one file per table into `dir` and returns the paths written.
std::vector<std::filesystem::path> write_output(const ScenarioOutput& output, OutputFormat format,
                                                const std::filesystem::path& dir);

std::string format_number(double value);
std::string to_csv(const ScenarioOutput& output, const Table& table);
std::string to_json(const ScenarioOutput& output, const Table& table);

}  // namespace homsim::scenario
