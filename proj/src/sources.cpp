#include "homsim/sources.hpp"

#include "homsim/seed.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace homsim::sources {

using spectral::DetuningGrid;
using spectral::DetuningNode;
using spectral::GridScheme;

void ZetaModel::validate() const {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("zeta must be finite");
  }
  if (kind == ZetaKind::uniform && (value < 0.0 || value > std::numbers::pi)) {
    throw std::invalid_argument("uniform zeta half-width must lie in [0, pi], got " +
                                std::to_string(value));
  }
}

double ClassicalSource::difference_width() const {
  return std::hypot(width_signal, width_idler);
}

void ClassicalSource::validate() const {
  if (!std::isfinite(phi)) {
    throw std::invalid_argument("phi must be finite");
  }
  if (!(width_signal > 0.0) || !(width_idler > 0.0)) {
    throw std::invalid_argument("laser widths must be positive");
  }
  zeta.validate();
}

void SpdcSource::validate() const {
  if (!std::isfinite(phi_prime)) {
    throw std::invalid_argument("phi_prime must be finite");
  }
  if (!(width > 0.0)) {
    throw std::invalid_argument("pair distribution width must be positive");
  }
  zeta.validate();
}

void validate(const Source& src) {
  std::visit([](const auto& s) { s.validate(); }, src);
}

double envelope_width(const Source& src) {
  if (const auto* classical = std::get_if<ClassicalSource>(&src)) {
    return classical->difference_width();
  }
  return std::get<SpdcSource>(src).width;
}

const ZetaModel& zeta_of(const Source& src) {
  return std::visit([](const auto& s) -> const ZetaModel& { return s.zeta; }, src);
}

Source with_zeta(Source src, ZetaModel zeta) {
  std::visit([&](auto& s) { s.zeta = zeta; }, src);
  return src;
}

double classical_phase(const ClassicalSource& src, double detuning_is, double zeta, double tau) {
  return src.phi + zeta - detuning_is * tau;
}

double spdc_phase(const SpdcSource& src, double detuning, double zeta, double tau, int sign) {
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("spdc_phase: sign must be +1 or -1");
  }
  const double direct = src.phi_prime + zeta - 2.0 * detuning * tau;
  return sign > 0 ? direct : direct + std::numbers::pi;
}

namespace {

struct ZetaDraw {
  double value;
  double share;
};

std::vector<ZetaDraw> zeta_draws(const ZetaModel& zeta, const EnsembleOptions& options) {
  if (zeta.kind == ZetaKind::fixed) {
    return {{zeta.value, 1.0}};
  }
  const double a = zeta.value;
  if (a == 0.0) {
    return {{0.0, 1.0}};
  }
  const std::size_t m = options.zeta_nodes;
  if (m == 0) {
    throw std::invalid_argument("zeta_nodes must be positive");
  }
  std::vector<ZetaDraw> draws(m);
  const double share = 1.0 / static_cast<double>(m);
  if (options.zeta_sampling == ZetaSampling::midpoint) {
    for (std::size_t k = 0; k < m; ++k) {
      draws[k] = {-a + (2.0 * static_cast<double>(k) + 1.0) * a / static_cast<double>(m), share};
    }
  } else {
    std::mt19937_64 rng(options.zeta_seed);
    std::uniform_real_distribution<double> draw(-a, a);
    for (auto& d : draws) {
      d = {draw(rng), share};
    }
  }
  return draws;
}

std::vector<DetuningNode> product_nodes(const DetuningGrid& signal, const DetuningGrid& idler) {
  std::vector<DetuningNode> nodes;
  nodes.reserve(signal.size() * idler.size());
  for (const auto& s : signal.nodes) {
    for (const auto& i : idler.nodes) {
      nodes.push_back({i.detuning - s.detuning, s.weight * i.weight});
    }
  }
  return nodes;
}

std::vector<DetuningNode> paired_nodes(const DetuningGrid& signal, const DetuningGrid& idler) {
  std::vector<DetuningNode> nodes;
  nodes.reserve(signal.size());
  for (std::size_t k = 0; k < signal.size(); ++k) {
    nodes.push_back({idler.nodes[k].detuning - signal.nodes[k].detuning,
                     1.0 / static_cast<double>(signal.size())});
  }
  return nodes;
}

}  // namespace

DetuningGrid classical_difference_grid(const ClassicalSource& src, double span_halfwidth,
                                       std::size_t n, GridScheme scheme, bool product,
                                       std::uint64_t seed) {
  src.validate();
  if (!product) {
    return spectral::build_grid({0.0, src.difference_width(), span_halfwidth}, n, scheme, seed);
  }
  const auto signal = spectral::build_grid({0.0, src.width_signal, span_halfwidth}, n, scheme,
                                          derive_seed(seed, 0));
  const auto idler = spectral::build_grid({0.0, src.width_idler, span_halfwidth}, n, scheme,
                                         derive_seed(seed, 1));
  DetuningGrid grid;
  grid.scheme = scheme;
  grid.seed = scheme == GridScheme::monte_carlo ? seed : 0;
  grid.nodes = scheme == GridScheme::grid ? product_nodes(signal, idler) : paired_nodes(signal, idler);
  return grid;
}

std::vector<PhaseSample> sample_ensemble(const Source& src, const DetuningGrid& grid,
                                         const spectral::Envelope& env, double tau,
                                         const EnsembleOptions& options) {
  if (grid.empty()) {
    throw spectral::EmptyGridError("sample_ensemble: detuning grid is empty");
  }
  validate(src);
  env.validate();

  const auto draws = zeta_draws(zeta_of(src), options);
  const double width = envelope_width(src);
  std::vector<PhaseSample> samples;

  if (const auto* classical = std::get_if<ClassicalSource>(&src)) {
    samples.reserve(grid.size() * draws.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& node = grid.nodes[k];
      const double g = spectral::envelope_value(env, node.detuning, width);
      for (const auto& d : draws) {
        samples.push_back({classical_phase(*classical, node.detuning, d.value, tau), g,
                           node.weight * d.share, 1, k, d.share});
      }
    }
    return samples;
  }

  const auto& spdc = std::get<SpdcSource>(src);
  const std::size_t branches = spdc.swap == SwapMode::exact_half ? 2 : 1;
  samples.reserve(grid.size() * draws.size() * branches);
  // Bernoulli signs depend only on the seed and the (node, zeta) order, so
  // every tau sees the same assignment.
  std::mt19937_64 swap_rng(spdc.swap_seed);
  std::bernoulli_distribution coin(0.5);

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& node = grid.nodes[k];
    const double g = spectral::envelope_value(env, node.detuning, width);
    for (const auto& d : draws) {
      switch (spdc.swap) {
        case SwapMode::exact_half:
          for (int sign : {1, -1}) {
            samples.push_back({spdc_phase(spdc, node.detuning, d.value, tau, sign), g,
                               0.5 * node.weight * d.share, sign, k, 0.5 * d.share});
          }
          break;
        case SwapMode::bernoulli: {
          const int sign = coin(swap_rng) ? -1 : 1;
          samples.push_back({spdc_phase(spdc, node.detuning, d.value, tau, sign), g,
                             node.weight * d.share, sign, k, d.share});
          break;
        }
        case SwapMode::off:
          samples.push_back({spdc_phase(spdc, node.detuning, d.value, tau, 1), g,
                             node.weight * d.share, 1, k, d.share});
          break;
      }
    }
  }
  return samples;
}

}  // namespace homsim::sources
