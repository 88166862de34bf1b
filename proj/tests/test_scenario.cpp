#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <catch_amalgamated.hpp>

#include "homsim/scenario.hpp"

using namespace homsim::scenario;
using nlohmann::json;
using Catch::Approx;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

std::string key_of(const std::string& text, std::optional<Scenario> scenario = std::nullopt) {
  try {
    parse_config_text(text, scenario);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

const Table& table_named(const ScenarioOutput& out, const std::string& name) {
  for (const auto& t : out.tables) {
    if (t.name == name) return t;
  }
  FAIL("missing table " << name);
  throw std::logic_error("unreachable");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("homsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ScenarioConfig small(Scenario scenario) {
  auto cfg = defaults_for(scenario);
  cfg.nodes = 41;
  cfg.zeta_nodes = 16;
  cfg.tau.points = cfg.scenario == Scenario::dip ? 31 : 21;
  if (scenario == Scenario::dephasing) {
    cfg.tau = {-1.0, 1.0, 5};
  }
  return cfg;
}

}  // namespace

TEST_CASE("empty config resolves to dip defaults", "[scenario]") {
  CHECK(parse_config_text("") == defaults_for(Scenario::dip));
  CHECK(parse_config_text("{}") == defaults_for(Scenario::dip));
  CHECK(parse_config_text("  \n") == defaults_for(Scenario::dip));
  const auto dip = defaults_for(Scenario::dip);
  CHECK(dip.phi_prime == Approx(pi / 2));
  CHECK(dip.swap == homsim::sources::SwapMode::exact_half);
  CHECK(parse_config_text("{}", Scenario::maps) == defaults_for(Scenario::maps));
  for (auto s : {Scenario::dip, Scenario::maps, Scenario::intensities, Scenario::filtered, Scenario::g2,
                 Scenario::dephasing, Scenario::classical}) {
    CHECK_NOTHROW(validate(defaults_for(s)));
    CHECK(scenario_from_string(to_string(s)) == s);
  }
  CHECK_FALSE(scenario_from_string("nope").has_value());
}

TEST_CASE("angle strings", "[scenario]") {
  CHECK(parse_angle("pi/2", "phi") == Approx(pi / 2).epsilon(1e-15));
  CHECK(parse_angle("-pi/2", "phi") == Approx(-pi / 2).epsilon(1e-15));
  CHECK(parse_angle("pi", "phi") == Approx(pi));
  CHECK(parse_angle("3*pi/8", "phi") == Approx(3 * pi / 8));
  CHECK(parse_angle("0.25pi", "phi") == Approx(pi / 4));
  CHECK(parse_angle(" 2 * pi / 3 ", "phi") == Approx(2 * pi / 3));
  CHECK(parse_angle(1.25, "phi") == 1.25);

  CHECK(parse_config_text(R"({"phi_prime": "pi/2"})").phi_prime == Approx(pi / 2));
  CHECK(parse_config_text(R"({"phi_prime": "-pi/2"})").phi_prime == Approx(-pi / 2));

  for (const char* bad : {"\"half\"", "\"pi/0\"", "\"2pi2\"", "\"\"", "true", "[1]"}) {
    CHECK(key_of(std::string(R"({"phi": )") + bad + "}") == "phi");
  }
}

TEST_CASE("config errors name the offending key", "[scenario]") {
  CHECK(key_of(R"({"zeta": {"uniform": 4.0}})") == "zeta");
  CHECK(key_of(R"({"zeta": {"uniform": -0.5}})") == "zeta");
  CHECK(key_of(R"({"zeta": {"gaussian": 1}})") == "zeta");
  CHECK(key_of(R"({"colour": "blue"})") == "colour");
  CHECK(key_of(R"({"nodes": 1})") == "nodes");
  CHECK(key_of(R"({"nodes": -4})") == "nodes");
  CHECK(key_of(R"({"nodes": 2.5})") == "nodes");
  CHECK(key_of(R"({"p": 3})") == "p");
  CHECK(key_of(R"({"swap": "sometimes"})") == "swap");
  CHECK(key_of(R"({"delta": 0})") == "delta");
  CHECK(key_of(R"({"tau": {"min": 1, "max": 2, "points": 5}})") == "tau");
  CHECK(key_of(R"({"tau": {"step": 1}})") == "tau.step");
  CHECK(key_of(R"({"zeta_halfwidths": []})", Scenario::dephasing) == "zeta_halfwidths");
  CHECK(key_of(R"({"zeta_halfwidths": [0, 4]})", Scenario::dephasing) == "zeta_halfwidths");
  CHECK(key_of(R"({"source": "spdc"})", Scenario::classical) == "source");
  CHECK(key_of(R"({"source": "classical"})", Scenario::g2) == "source");
  CHECK(key_of(R"({"scenario": "maps"})", Scenario::dip) == "scenario");
  CHECK(key_of(R"({"nodes": )") == "");
  CHECK(key_of("[1, 2]") == "");
  CHECK(key_of(R"({"scenario": "maps"})") == "<no error>");
}

TEST_CASE("zeta spellings", "[scenario]") {
  using homsim::sources::ZetaKind;
  auto cfg = parse_config_text(R"({"zeta": "pi/4"})");
  CHECK(cfg.zeta.kind == ZetaKind::fixed);
  CHECK(cfg.zeta.value == Approx(pi / 4));
  cfg = parse_config_text(R"({"zeta": {"uniform": "pi/2"}})");
  CHECK(cfg.zeta.kind == ZetaKind::uniform);
  CHECK(cfg.zeta.value == Approx(pi / 2));
  cfg = parse_config_text(R"({"zeta": {"fixed": 0.3}})");
  CHECK(cfg.zeta.kind == ZetaKind::fixed);
  CHECK(cfg.zeta.value == 0.3);
}

TEST_CASE("serialize round-trips random configs", "[scenario][property]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Scenario scenarios[] = {Scenario::dip, Scenario::maps, Scenario::intensities, Scenario::filtered,
                                Scenario::g2, Scenario::dephasing, Scenario::classical};
  for (int trial = 0; trial < 300; ++trial) {
    auto cfg = defaults_for(scenarios[rng() % 7]);
    cfg.phi = 4.0 * unit(rng) - 2.0;
    cfg.phi_prime = 4.0 * unit(rng) - 2.0;
    cfg.zeta = unit(rng) < 0.5 ? homsim::sources::ZetaModel::fixed(unit(rng))
                               : homsim::sources::ZetaModel::uniform(pi * unit(rng));
    cfg.delta = 0.1 + unit(rng);
    cfg.delta_s = 0.1 + unit(rng);
    cfg.delta_i = 0.1 + unit(rng);
    if (cfg.scenario != Scenario::g2 && cfg.scenario != Scenario::classical && unit(rng) < 0.3) {
      cfg.source = SourceKind::classical;
    }
    cfg.swap = static_cast<homsim::sources::SwapMode>(rng() % 3);
    cfg.classical_product = unit(rng) < 0.5;
    cfg.span = 0.5 + 4.0 * unit(rng);
    cfg.filter_span = 0.1 + unit(rng);
    cfg.envelope.kind = static_cast<homsim::spectral::EnvelopeKind>(rng() % 2);
    cfg.envelope.exponent = 1 + static_cast<int>(rng() % 2);
    cfg.nodes = 2 + rng() % 3000;
    cfg.scheme = static_cast<homsim::spectral::GridScheme>(rng() % 2);
    cfg.seed = rng();
    cfg.zeta_nodes = 1 + rng() % 500;
    cfg.zeta_sampling = static_cast<homsim::sources::ZetaSampling>(rng() % 2);
    cfg.form = static_cast<homsim::correlation::CoincidenceForm>(rng() % 2);
    cfg.format = static_cast<OutputFormat>(rng() % 2);
    if (cfg.scenario != Scenario::dip) {
      cfg.tau = {-unit(rng), 1.0 + unit(rng), 2 + rng() % 400};
    }
    cfg.zeta_halfwidths = {0.0, pi * unit(rng), pi};
    REQUIRE_NOTHROW(validate(cfg));

    const auto text = serialize(cfg).dump();
    CHECK(parse_config_text(text) == cfg);
    CHECK(parse_config_text(text, cfg.scenario) == cfg);
  }
}

TEST_CASE("format_number", "[scenario]") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.33333333333333331");
  CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
  CHECK_THROWS(format_number(std::nan("")));
  CHECK_THROWS(format_number(INFINITY));
}

TEST_CASE("scenario tables have stable headers", "[scenario]") {
  const std::pair<Scenario, std::vector<std::pair<std::string, std::string>>> expected[] = {
      {Scenario::dip, {{"dip", "tau,r_hat,g2"}}},
      {Scenario::maps, {{"maps", "tau,delta_f,r_ab,i_a,i_b"}}},
      {Scenario::intensities,
       {{"intensities", "tau,ia_mean_full,ib_mean_full,ia_mean_filtered,ib_mean_filtered"}}},
      {Scenario::filtered, {{"filtered", "tau,ia_mean,ib_mean,visibility,r_hat"}}},
      {Scenario::g2, {{"g2", "tau,r_hat,g2_no_swap,g2_swap"}}},
      {Scenario::dephasing,
       {{"dephasing", "zeta_halfwidth,r_hat_zero"}, {"dephasing_curves", "zeta_halfwidth,tau,r_hat"}}},
      {Scenario::classical, {{"classical", "tau,r_hat,ia_mean,ib_mean,g2"}}},
  };
  for (const auto& [scenario, tables] : expected) {
    const auto cfg = small(scenario);
    const auto out = run_scenario(cfg);
    REQUIRE(out.tables.size() == tables.size());
    for (std::size_t k = 0; k < tables.size(); ++k) {
      CHECK(out.tables[k].name == tables[k].first);
      const auto csv = to_csv(out, out.tables[k]);
      REQUIRE(csv.rfind("# ", 0) == 0);
      const auto first_nl = csv.find('\n');
      const auto second_nl = csv.find('\n', first_nl + 1);
      CHECK(csv.substr(first_nl + 1, second_nl - first_nl - 1) == tables[k].second);

      // The metadata line re-parses into the config that produced the file.
      const auto meta = json::parse(csv.substr(2, first_nl - 2));
      CHECK(meta["tool"] == "homsim");
      CHECK(meta["version"] == std::string(kToolVersion));
      CHECK(meta["table"] == tables[k].first);
      CHECK(meta["seed"] == cfg.seed);
      CHECK(parse_config(meta["config"]) == cfg);

      const auto js = json::parse(to_json(out, out.tables[k]));
      CHECK(js["rows"].size() == out.tables[k].rows.size());
      CHECK(js["columns"].size() == out.tables[k].columns.size());
    }
  }
}

TEST_CASE("dip and dephasing scenarios reproduce the anchors", "[scenario]") {
  auto dip = defaults_for(Scenario::dip);
  const auto out = run_scenario(dip);
  const auto& table = table_named(out, "dip");
  bool saw_zero = false;
  for (const auto& row : table.rows) {
    if (*row[0] == 0.0) {
      saw_zero = true;
      CHECK(*row[1] <= 1e-9);
    }
  }
  CHECK(saw_zero);

  auto deph = defaults_for(Scenario::dephasing);
  deph.zeta_halfwidths = {0.0, pi / 4, pi / 2, pi};
  deph.tau = {-1.0, 1.0, 3};
  const auto summary = table_named(run_scenario(deph), "dephasing");
  const double expected[] = {0.0, 0.5 - 1.0 / pi, 0.5, 0.5};
  REQUIRE(summary.rows.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::abs(*summary.rows[k][1] - expected[k]) <= 1e-3);
  }
}

TEST_CASE("g2 gaps become empty CSV fields and JSON nulls", "[scenario]") {
  auto cfg = defaults_for(Scenario::g2);
  cfg.envelope.kind = homsim::spectral::EnvelopeKind::unity;
  cfg.tau = {-1.0, 1.0, 3};
  cfg.nodes = 21;
  const auto out = run_scenario(cfg);
  const auto& table = table_named(out, "g2");
  REQUIRE(table.rows.size() == 3);
  CHECK_FALSE(table.rows[1][2].has_value());
  CHECK(table.rows[1][3].has_value());

  const auto csv = to_csv(out, table);
  const auto row_start = csv.find("\n0,");
  REQUIRE(row_start != std::string::npos);
  const auto row = csv.substr(row_start + 1, csv.find('\n', row_start + 1) - row_start - 1);
  CHECK(std::count(row.begin(), row.end(), ',') == 3);
  CHECK(row.find(",,") != std::string::npos);
  const auto js = json::parse(to_json(out, table));
  CHECK(js["rows"][1][2].is_null());
  CHECK(js["rows"][1][3].is_number());
}

TEST_CASE("reruns write byte-identical files", "[scenario]") {
  for (auto scenario : {Scenario::dip, Scenario::maps, Scenario::intensities, Scenario::filtered,
                        Scenario::g2, Scenario::dephasing, Scenario::classical}) {
    for (auto format : {OutputFormat::csv, OutputFormat::json}) {
      auto cfg = small(scenario);
      cfg.seed = 987654321;
      cfg.swap = homsim::sources::SwapMode::bernoulli;
      cfg.scheme = homsim::spectral::GridScheme::monte_carlo;
      cfg.zeta = homsim::sources::ZetaModel::uniform(0.5);
      cfg.zeta_sampling = homsim::sources::ZetaSampling::random;
      const auto a = write_output(run_scenario(cfg, 1), format, scratch_dir("rerun_a"));
      const auto first = [&] {
        std::vector<std::string> bytes;
        for (const auto& p : a) bytes.push_back(slurp(p));
        return bytes;
      }();
      const auto b = write_output(run_scenario(cfg, 3), format, scratch_dir("rerun_b"));
      REQUIRE(a.size() == b.size());
      for (std::size_t k = 0; k < b.size(); ++k) {
        CHECK(a[k].filename() == b[k].filename());
        CHECK(first[k] == slurp(b[k]));
      }
    }
  }
}

TEST_CASE("a filter that removes every node is a runtime error", "[scenario]") {
  auto cfg = defaults_for(Scenario::filtered);
  cfg.nodes = 2;
  cfg.filter_span = 0.5;
  CHECK_THROWS_AS(run_scenario(cfg), homsim::spectral::EmptyGridError);
}

#ifdef HOMSIM_EXE
namespace {

int run_cli(const std::string& args, const fs::path& dir) {
  const std::string command = std::string("\"") + HOMSIM_EXE + "\" " + args + " --out \"" +
                              dir.string() + "\" > \"" + (dir / "stdout.txt").string() + "\" 2> \"" +
                              (dir / "stderr.txt").string() + "\"";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command line exit codes", "[scenario][cli]") {
  const auto dir = scratch_dir("cli");

  CHECK(run_cli("dip --nodes 41", dir) == 0);
  CHECK(fs::exists(dir / "dip.csv"));
  CHECK(slurp(dir / "stdout.txt").find("dip.csv") != std::string::npos);

  CHECK(run_cli("dephasing --format json --nodes 41", dir) == 0);
  CHECK(fs::exists(dir / "dephasing.json"));
  CHECK(fs::exists(dir / "dephasing_curves.json"));

  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"zeta": {"uniform": 4.0}})";
  }
  CHECK(run_cli("dip --config \"" + (dir / "bad.json").string() + "\"", dir) == 2);
  const auto err = json::parse(slurp(dir / "stderr.txt"));
  CHECK(err["error"] == "config");
  CHECK(err["key"] == "zeta");

  CHECK(run_cli("dip --nodes 1", dir) == 2);
  CHECK(run_cli("dip --swap sometimes", dir) == 2);
  CHECK(run_cli("nonsense", dir) == 2);
  CHECK(run_cli("", dir) == 2);
  CHECK(run_cli("dip --config \"" + (dir / "missing.json").string() + "\"", dir) == 2);

  {
    std::ofstream cfg(dir / "empty_filter.json");
    cfg << R"({"nodes": 2, "filter_span": 0.5})";
  }
  CHECK(run_cli("filtered --config \"" + (dir / "empty_filter.json").string() + "\"", dir) == 3);
  CHECK(json::parse(slurp(dir / "stderr.txt"))["error"] == "runtime");

  {
    std::ofstream cfg(dir / "blank.json");
  }
  CHECK(run_cli("dip --nodes 21 --config \"" + (dir / "blank.json").string() + "\"", dir) == 0);
}
#endif
