#include <chrono>
#include <cmath>

#include "homsim/scenario.hpp"
#include "homsim/seed.hpp"

namespace homsim::scenario {

using correlation::CorrelationResult;
using correlation::TauGrid;

namespace {

// Seed streams; one root seed drives every random choice in a run.
enum Stream : std::uint64_t { kGridStream = 0, kSwapStream = 1, kZetaStream = 2 };

sources::Source make_source(const ScenarioConfig& cfg) {
  if (cfg.source == SourceKind::classical) {
    return sources::ClassicalSource{cfg.phi, cfg.zeta, cfg.delta_s, cfg.delta_i};
  }
  return sources::SpdcSource{cfg.phi_prime, cfg.zeta, cfg.delta, cfg.swap,
                             derive_seed(cfg.seed, kSwapStream)};
}

spectral::DetuningGrid make_grid(const ScenarioConfig& cfg, const sources::Source& src) {
  const auto seed = derive_seed(cfg.seed, kGridStream);
  if (const auto* classical = std::get_if<sources::ClassicalSource>(&src)) {
    return sources::classical_difference_grid(*classical, cfg.span, cfg.nodes, cfg.scheme,
                                              cfg.classical_product, seed);
  }
  return spectral::build_grid({0.0, cfg.delta, cfg.span}, cfg.nodes, cfg.scheme, seed);
}

// filter_span is measured in widths of the ensemble coordinate.
spectral::DetuningGrid make_filtered_grid(const ScenarioConfig& cfg, const sources::Source& src,
                                          const spectral::DetuningGrid& grid) {
  return spectral::filter_grid(grid, cfg.filter_span * sources::envelope_width(src));
}

correlation::EvaluateOptions make_options(const ScenarioConfig& cfg, unsigned threads) {
  correlation::EvaluateOptions options;
  options.ensemble = {cfg.zeta_nodes, cfg.zeta_sampling, derive_seed(cfg.seed, kZetaStream)};
  options.threads = threads;
  return options;
}

TauGrid make_taus(const ScenarioConfig& cfg) {
  return TauGrid::linspace(cfg.tau.min, cfg.tau.max, cfg.tau.points);
}

using Row = std::vector<std::optional<double>>;

Table dip_table(const CorrelationResult& r) {
  Table table{"dip", {"tau", "r_hat", "g2"}, {}};
  for (std::size_t t = 0; t < r.taus.size(); ++t) {
    table.rows.push_back(Row{r.taus[t], r.r_hat[t], r.g2[t]});
  }
  return table;
}

Table maps_table(const CorrelationResult& r) {
  Table table{"maps", {"tau", "delta_f", "r_ab", "i_a", "i_b"}, {}};
  table.rows.reserve(r.r_map.size());
  for (std::size_t t = 0; t < r.taus.size(); ++t) {
    for (std::size_t k = 0; k < r.detunings.size(); ++k) {
      const auto i = r.map_index(t, k);
      table.rows.push_back(Row{r.taus[t], r.detunings[k], r.r_map[i], r.ia_map[i], r.ib_map[i]});
    }
  }
  return table;
}

std::vector<Table> run_tables(const ScenarioConfig& cfg, unsigned threads) {
  const auto src = make_source(cfg);
  const auto grid = make_grid(cfg, src);
  const auto taus = make_taus(cfg);
  const auto options = make_options(cfg, threads);
  const auto& env = cfg.envelope;

  switch (cfg.scenario) {
    case Scenario::dip:
      return {dip_table(correlation::evaluate(src, grid, env, taus, cfg.form, options))};

    case Scenario::maps:
      return {maps_table(correlation::evaluate(src, grid, env, taus, cfg.form, options))};

    case Scenario::intensities: {
      const auto full = correlation::evaluate(src, grid, env, taus, cfg.form, options);
      const auto filtered = correlation::evaluate(src, make_filtered_grid(cfg, src, grid), env,
                                                  taus, cfg.form, options);
      Table table{"intensities",
                  {"tau", "ia_mean_full", "ib_mean_full", "ia_mean_filtered", "ib_mean_filtered"},
                  {}};
      for (std::size_t t = 0; t < taus.values.size(); ++t) {
        table.rows.push_back(Row{taus.values[t], full.ia_mean[t], full.ib_mean[t],
                                 filtered.ia_mean[t], filtered.ib_mean[t]});
      }
      return {table};
    }

    case Scenario::filtered: {
      const auto r = correlation::evaluate(src, make_filtered_grid(cfg, src, grid), env, taus,
                                           cfg.form, options);
      Table table{"filtered", {"tau", "ia_mean", "ib_mean", "visibility", "r_hat"}, {}};
      for (std::size_t t = 0; t < taus.values.size(); ++t) {
        table.rows.push_back(Row{taus.values[t], r.ia_mean[t], r.ib_mean[t], r.visibility[t], r.r_hat[t]});
      }
      return {table};
    }

    case Scenario::g2: {
      auto direct = std::get<sources::SpdcSource>(src);
      auto randomized = direct;
      direct.swap = sources::SwapMode::off;
      if (randomized.swap == sources::SwapMode::off) {
        randomized.swap = sources::SwapMode::exact_half;
      }
      const auto no_swap = correlation::evaluate(direct, grid, env, taus, cfg.form, options);
      const auto swapped = correlation::evaluate(randomized, grid, env, taus, cfg.form, options);
      Table table{"g2", {"tau", "r_hat", "g2_no_swap", "g2_swap"}, {}};
      for (std::size_t t = 0; t < taus.values.size(); ++t) {
        table.rows.push_back(Row{taus.values[t], swapped.r_hat[t], no_swap.g2[t], swapped.g2[t]});
      }
      return {table};
    }

    case Scenario::dephasing: {
      const auto curves = correlation::dephasing_sweep(src, cfg.zeta_halfwidths, grid, env, taus,
                                                       cfg.form, options);
      const auto at_zero = correlation::dephasing_sweep(src, cfg.zeta_halfwidths, grid, env,
                                                        TauGrid{{0.0}}, cfg.form, options);
      Table summary{"dephasing", {"zeta_halfwidth", "r_hat_zero"}, {}};
      for (const auto& point : at_zero) {
        summary.rows.push_back(Row{point.halfwidth, point.result.r_hat[0]});
      }
      Table per_width{"dephasing_curves", {"zeta_halfwidth", "tau", "r_hat"}, {}};
      for (const auto& point : curves) {
        for (std::size_t t = 0; t < point.result.taus.size(); ++t) {
          per_width.rows.push_back(Row{point.halfwidth, point.result.taus[t], point.result.r_hat[t]});
        }
      }
      return {summary, per_width};
    }

    case Scenario::classical: {
      const auto r = correlation::classical_baseline(std::get<sources::ClassicalSource>(src), grid,
                                                     env, taus, cfg.form, options);
      Table table{"classical", {"tau", "r_hat", "ia_mean", "ib_mean", "g2"}, {}};
      for (std::size_t t = 0; t < taus.values.size(); ++t) {
        table.rows.push_back(Row{taus.values[t], r.r_hat[t], r.ia_mean[t], r.ib_mean[t], r.g2[t]});
      }
      return {table};
    }
  }
  return {};
}

}  // namespace

ScenarioOutput run_scenario(const ScenarioConfig& cfg, unsigned threads) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();

  ScenarioOutput output;
  output.metadata = {
      {"tool", "homsim"},
      {"version", kToolVersion},
      {"scenario", to_string(cfg.scenario)},
      {"seed", cfg.seed},
      {"config", serialize(cfg)},
  };
  output.tables = run_tables(cfg, threads);
  output.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return output;
}

}  // namespace homsim::scenario
