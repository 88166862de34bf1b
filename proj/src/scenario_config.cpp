#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "homsim/scenario.hpp"

namespace homsim::scenario {

using nlohmann::json;
using sources::SwapMode;
using sources::ZetaKind;
using sources::ZetaModel;

namespace {

constexpr double kPi = std::numbers::pi;

template <typename Enum>
struct Names {
  Enum value;
  std::string_view name;
};

constexpr Names<Scenario> kScenarioNames[] = {
    {Scenario::dip, "dip"},          {Scenario::maps, "maps"},
    {Scenario::intensities, "intensities"}, {Scenario::filtered, "filtered"},
    {Scenario::g2, "g2"},            {Scenario::dephasing, "dephasing"},
    {Scenario::classical, "classical"},
};
constexpr Names<SourceKind> kSourceNames[] = {{SourceKind::spdc, "spdc"},
                                              {SourceKind::classical, "classical"}};
constexpr Names<SwapMode> kSwapNames[] = {{SwapMode::exact_half, "exact"},
                                          {SwapMode::bernoulli, "bernoulli"},
                                          {SwapMode::off, "off"}};
constexpr Names<spectral::EnvelopeKind> kEnvelopeNames[] = {
    {spectral::EnvelopeKind::gaussian_peak_one, "gaussian"}, {spectral::EnvelopeKind::unity, "unity"}};
constexpr Names<spectral::GridScheme> kSchemeNames[] = {
    {spectral::GridScheme::grid, "grid"}, {spectral::GridScheme::monte_carlo, "monte_carlo"}};
constexpr Names<sources::ZetaSampling> kZetaSamplingNames[] = {
    {sources::ZetaSampling::midpoint, "midpoint"}, {sources::ZetaSampling::random, "random"}};
constexpr Names<correlation::CoincidenceForm> kFormNames[] = {
    {correlation::CoincidenceForm::paper, "paper"}, {correlation::CoincidenceForm::product, "product"}};
constexpr Names<OutputFormat> kFormatNames[] = {{OutputFormat::csv, "csv"},
                                                {OutputFormat::json, "json"}};

template <typename Enum, std::size_t N>
std::string_view name_of(const Names<Enum> (&table)[N], Enum value) {
  for (const auto& entry : table) {
    if (entry.value == value) {
      return entry.name;
    }
  }
  return "?";
}

template <typename Enum, std::size_t N>
Enum enum_from(const Names<Enum> (&table)[N], const json& value, const std::string& key) {
  if (!value.is_string()) {
    throw ConfigError(key, "'" + key + "' must be a string");
  }
  const auto text = value.get<std::string>();
  std::string choices;
  for (const auto& entry : table) {
    if (entry.name == text) {
      return entry.value;
    }
    choices += (choices.empty() ? "" : "|") + std::string(entry.name);
  }
  throw ConfigError(key, "'" + key + "' must be one of " + choices + ", got '" + text + "'");
}

double number(const json& value, const std::string& key) {
  if (!value.is_number()) {
    throw ConfigError(key, "'" + key + "' must be a number");
  }
  return value.get<double>();
}

std::uint64_t unsigned_integer(const json& value, const std::string& key) {
  if (!value.is_number_integer() ||
      (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
    throw ConfigError(key, "'" + key + "' must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

ZetaModel parse_zeta(const json& value) {
  if (value.is_number() || value.is_string()) {
    return ZetaModel::fixed(parse_angle(value, "zeta"));
  }
  if (!value.is_object() || value.size() != 1) {
    throw ConfigError("zeta", "'zeta' must be an angle, {\"fixed\": angle} or {\"uniform\": halfwidth}");
  }
  const auto& [kind, angle] = *value.items().begin();
  if (kind == "fixed") {
    return ZetaModel::fixed(parse_angle(angle, "zeta"));
  }
  if (kind == "uniform") {
    return ZetaModel::uniform(parse_angle(angle, "zeta"));
  }
  throw ConfigError("zeta", "unknown zeta model '" + kind + "' (expected fixed or uniform)");
}

TauSpec parse_tau(const json& value, TauSpec tau) {
  if (!value.is_object()) {
    throw ConfigError("tau", "'tau' must be an object with min, max, points");
  }
  for (const auto& [key, item] : value.items()) {
    if (key == "min") {
      tau.min = number(item, "tau.min");
    } else if (key == "max") {
      tau.max = number(item, "tau.max");
    } else if (key == "points") {
      tau.points = unsigned_integer(item, "tau.points");
    } else {
      throw ConfigError("tau." + key, "unknown key 'tau." + key + "'");
    }
  }
  return tau;
}

void require(bool ok, const char* key, const std::string& message) {
  if (!ok) {
    throw ConfigError(key, message);
  }
}

}  // namespace

std::string_view to_string(Scenario scenario) { return name_of(kScenarioNames, scenario); }

std::optional<Scenario> scenario_from_string(std::string_view name) {
  for (const auto& entry : kScenarioNames) {
    if (entry.name == name) {
      return entry.value;
    }
  }
  return std::nullopt;
}

ScenarioConfig defaults_for(Scenario scenario) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  cfg.phi_prime = kPi / 2;
  switch (scenario) {
    case Scenario::dip:
      cfg.envelope.kind = spectral::EnvelopeKind::unity;
      cfg.tau = {0.0, 3.0, 121};
      break;
    case Scenario::maps:
    case Scenario::intensities:
    case Scenario::filtered:
      cfg.swap = SwapMode::off;
      break;
    case Scenario::g2:
      break;
    case Scenario::dephasing:
      for (int k = 0; k <= 8; ++k) {
        cfg.zeta_halfwidths.push_back(k * kPi / 8);
      }
      break;
    case Scenario::classical:
      cfg.source = SourceKind::classical;
      break;
  }
  return cfg;
}

double parse_angle(const json& value, const std::string& key) {
  if (value.is_number()) {
    const double radians = value.get<double>();
    if (!std::isfinite(radians)) {
      throw ConfigError(key, "'" + key + "' must be finite");
    }
    return radians;
  }
  if (!value.is_string()) {
    throw ConfigError(key, "'" + key + "' must be a number of radians or a string like \"pi/2\"");
  }
  static const std::regex pattern(
      R"(^\s*([+-])?\s*(\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?|\.\d+))?\s*$)");
  const auto text = value.get<std::string>();
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) {
    throw ConfigError(key, "'" + key + "': cannot parse angle '" + text + "' (expected k*pi/m)");
  }
  const double k = m[2].matched ? std::stod(m[2].str()) : 1.0;
  const double d = m[3].matched ? std::stod(m[3].str()) : 1.0;
  if (d == 0.0) {
    throw ConfigError(key, "'" + key + "': zero denominator in '" + text + "'");
  }
  const double sign = m[1].matched && m[1].str() == "-" ? -1.0 : 1.0;
  return sign * k * kPi / d;
}

ScenarioConfig parse_config(const json& doc, std::optional<Scenario> scenario_override) {
  if (doc.is_null()) {
    return parse_config(json::object(), scenario_override);
  }
  if (!doc.is_object()) {
    throw ConfigError("", "config must be a JSON object");
  }

  Scenario scenario = scenario_override.value_or(Scenario::dip);
  if (doc.contains("scenario")) {
    const auto declared = enum_from(kScenarioNames, doc["scenario"], "scenario");
    if (scenario_override && *scenario_override != declared) {
      throw ConfigError("scenario", "config declares scenario '" + std::string(to_string(declared)) +
                                        "' but '" + std::string(to_string(*scenario_override)) +
                                        "' was requested");
    }
    scenario = declared;
  }

  ScenarioConfig cfg = defaults_for(scenario);
  for (const auto& [key, value] : doc.items()) {
    if (key == "scenario") {
      continue;
    } else if (key == "source") {
      cfg.source = enum_from(kSourceNames, value, key);
    } else if (key == "phi") {
      cfg.phi = parse_angle(value, key);
    } else if (key == "phi_prime") {
      cfg.phi_prime = parse_angle(value, key);
    } else if (key == "zeta") {
      cfg.zeta = parse_zeta(value);
    } else if (key == "delta") {
      cfg.delta = number(value, key);
    } else if (key == "delta_s") {
      cfg.delta_s = number(value, key);
    } else if (key == "delta_i") {
      cfg.delta_i = number(value, key);
    } else if (key == "swap") {
      cfg.swap = enum_from(kSwapNames, value, key);
    } else if (key == "classical_grid") {
      if (value == "collapsed") {
        cfg.classical_product = false;
      } else if (value == "product") {
        cfg.classical_product = true;
      } else {
        throw ConfigError(key, "'classical_grid' must be one of collapsed|product");
      }
    } else if (key == "span") {
      cfg.span = number(value, key);
    } else if (key == "filter_span") {
      cfg.filter_span = number(value, key);
    } else if (key == "envelope") {
      cfg.envelope.kind = enum_from(kEnvelopeNames, value, key);
    } else if (key == "p") {
      const auto p = unsigned_integer(value, key);
      require(p == 1 || p == 2, "p", "'p' must be 1 or 2");
      cfg.envelope.exponent = static_cast<int>(p);
    } else if (key == "nodes") {
      cfg.nodes = unsigned_integer(value, key);
    } else if (key == "scheme") {
      cfg.scheme = enum_from(kSchemeNames, value, key);
    } else if (key == "seed") {
      cfg.seed = unsigned_integer(value, key);
    } else if (key == "zeta_nodes") {
      cfg.zeta_nodes = unsigned_integer(value, key);
    } else if (key == "zeta_sampling") {
      cfg.zeta_sampling = enum_from(kZetaSamplingNames, value, key);
    } else if (key == "tau") {
      cfg.tau = parse_tau(value, cfg.tau);
    } else if (key == "form") {
      cfg.form = enum_from(kFormNames, value, key);
    } else if (key == "format") {
      cfg.format = enum_from(kFormatNames, value, key);
    } else if (key == "zeta_halfwidths") {
      if (!value.is_array()) {
        throw ConfigError(key, "'zeta_halfwidths' must be an array of angles");
      }
      cfg.zeta_halfwidths.clear();
      for (const auto& item : value) {
        cfg.zeta_halfwidths.push_back(parse_angle(item, key));
      }
    } else {
      throw ConfigError(key, "unknown key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

namespace {

json parse_document(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return json::object();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config syntax error: ") + e.what());
  }
}

}  // namespace

ScenarioConfig parse_config_text(std::string_view text, std::optional<Scenario> scenario_override) {
  return parse_config(parse_document(text), scenario_override);
}

json read_config_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("", "cannot read config file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  auto doc = parse_document(buffer.str());
  if (!doc.is_object()) {
    throw ConfigError("", "config must be a JSON object");
  }
  return doc;
}

ScenarioConfig parse_config_file(const std::filesystem::path& path,
                                 std::optional<Scenario> scenario_override) {
  return parse_config(read_config_document(path), scenario_override);
}

json serialize(const ScenarioConfig& cfg) {
  json zeta = json::object();
  zeta[cfg.zeta.kind == ZetaKind::fixed ? "fixed" : "uniform"] = cfg.zeta.value;
  return json{
      {"scenario", to_string(cfg.scenario)},
      {"source", name_of(kSourceNames, cfg.source)},
      {"phi", cfg.phi},
      {"phi_prime", cfg.phi_prime},
      {"zeta", zeta},
      {"delta", cfg.delta},
      {"delta_s", cfg.delta_s},
      {"delta_i", cfg.delta_i},
      {"swap", name_of(kSwapNames, cfg.swap)},
      {"classical_grid", cfg.classical_product ? "product" : "collapsed"},
      {"span", cfg.span},
      {"filter_span", cfg.filter_span},
      {"envelope", name_of(kEnvelopeNames, cfg.envelope.kind)},
      {"p", cfg.envelope.exponent},
      {"nodes", cfg.nodes},
      {"scheme", name_of(kSchemeNames, cfg.scheme)},
      {"seed", cfg.seed},
      {"zeta_nodes", cfg.zeta_nodes},
      {"zeta_sampling", name_of(kZetaSamplingNames, cfg.zeta_sampling)},
      {"tau", {{"min", cfg.tau.min}, {"max", cfg.tau.max}, {"points", cfg.tau.points}}},
      {"form", name_of(kFormNames, cfg.form)},
      {"format", name_of(kFormatNames, cfg.format)},
      {"zeta_halfwidths", cfg.zeta_halfwidths},
  };
}

void validate(const ScenarioConfig& cfg) {
  require(std::isfinite(cfg.phi), "phi", "'phi' must be finite");
  require(std::isfinite(cfg.phi_prime), "phi_prime", "'phi_prime' must be finite");
  try {
    cfg.zeta.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("zeta", e.what());
  }
  require(cfg.delta > 0.0 && std::isfinite(cfg.delta), "delta", "'delta' must be positive");
  require(cfg.delta_s > 0.0 && std::isfinite(cfg.delta_s), "delta_s", "'delta_s' must be positive");
  require(cfg.delta_i > 0.0 && std::isfinite(cfg.delta_i), "delta_i", "'delta_i' must be positive");
  require(cfg.span > 0.0 && std::isfinite(cfg.span), "span", "'span' must be positive");
  require(cfg.filter_span > 0.0 && std::isfinite(cfg.filter_span), "filter_span",
          "'filter_span' must be positive");
  require(cfg.envelope.exponent == 1 || cfg.envelope.exponent == 2, "p", "'p' must be 1 or 2");
  require(cfg.nodes >= 2, "nodes", "'nodes' must be at least 2");
  require(cfg.zeta_nodes >= 1, "zeta_nodes", "'zeta_nodes' must be at least 1");

  require(std::isfinite(cfg.tau.min) && std::isfinite(cfg.tau.max), "tau", "tau bounds must be finite");
  require(cfg.tau.points >= 1, "tau.points", "'tau.points' must be at least 1");
  require(cfg.tau.points == 1 || cfg.tau.max > cfg.tau.min, "tau",
          "'tau.max' must exceed 'tau.min' when points > 1");
  if (cfg.scenario == Scenario::dip) {
    const auto taus = correlation::TauGrid::linspace(cfg.tau.min, cfg.tau.max, cfg.tau.points);
    require(taus.contains(0.0), "tau", "dip scenario needs tau = 0 on the tau grid");
  }

  for (double a : cfg.zeta_halfwidths) {
    require(std::isfinite(a) && a >= 0.0 && a <= kPi, "zeta_halfwidths",
            "'zeta_halfwidths' entries must lie in [0, pi]");
  }
  if (cfg.scenario == Scenario::dephasing) {
    require(!cfg.zeta_halfwidths.empty(), "zeta_halfwidths",
            "dephasing scenario needs at least one half-width");
  }
  if (cfg.scenario == Scenario::classical) {
    require(cfg.source == SourceKind::classical, "source", "classical scenario needs source 'classical'");
  }
  if (cfg.scenario == Scenario::g2) {
    require(cfg.source == SourceKind::spdc, "source", "g2 scenario compares swap modes; needs source 'spdc'");
  }
}

}  // namespace homsim::scenario
