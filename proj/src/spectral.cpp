#include "homsim/spectral.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace homsim::spectral {

void SpectralProfile::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("spectral width must be positive and finite");
  }
  if (!(span_halfwidth > 0.0) || !std::isfinite(span_halfwidth)) {
    throw std::invalid_argument("span half-width must be positive and finite");
  }
}

void Envelope::validate() const {
  if (exponent != 1 && exponent != 2) {
    throw std::invalid_argument("envelope exponent must be 1 or 2, got " +
                                std::to_string(exponent));
  }
}

double gaussian_density(double detuning, double width) {
  if (!(width > 0.0)) {
    throw std::invalid_argument("gaussian_density: width must be positive");
  }
  const double z = detuning / width;
  return std::exp(-0.5 * z * z) / (width * std::sqrt(2.0 * std::numbers::pi));
}

double envelope_value(const Envelope& env, double detuning, double width) {
  if (env.kind == EnvelopeKind::unity) {
    return 1.0;
  }
  const double z = detuning / width;
  return std::exp(-0.5 * z * z);
}

namespace {

void normalize(std::vector<DetuningNode>& nodes) {
  double total = 0.0;
  for (const auto& node : nodes) {
    total += node.weight;
  }
  for (auto& node : nodes) {
    node.weight /= total;
  }
}

std::vector<DetuningNode> uniform_nodes(const SpectralProfile& profile, std::size_t n) {
  const double half = profile.span_halfwidth * profile.width;
  std::vector<DetuningNode> nodes(n);
  // Fill the negative half and mirror it so that +-x are bit-identical.
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double x = -half + 2.0 * half * static_cast<double>(k) / static_cast<double>(n - 1);
    nodes[k].detuning = x;
    nodes[n - 1 - k].detuning = -x;
  }
  if (n % 2 == 1) {
    nodes[n / 2].detuning = 0.0;
  }
  for (auto& node : nodes) {
    node.weight = gaussian_density(node.detuning, profile.width);
  }
  normalize(nodes);
  return nodes;
}

std::vector<DetuningNode> sampled_nodes(const SpectralProfile& profile, std::size_t n,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> draw(0.0, profile.width);
  const double half = profile.span_halfwidth * profile.width;
  std::vector<DetuningNode> nodes;
  nodes.reserve(n);
  while (nodes.size() < n) {
    const double x = draw(rng);
    if (std::abs(x) <= half) {
      nodes.push_back({x, 1.0 / static_cast<double>(n)});
    }
  }
  return nodes;
}

}  // namespace

DetuningGrid build_grid(const SpectralProfile& profile, std::size_t n, GridScheme scheme,
                        std::uint64_t seed) {
  profile.validate();
  if (n < 2) {
    throw std::invalid_argument("build_grid: need at least 2 nodes, got " + std::to_string(n));
  }
  DetuningGrid grid;
  grid.scheme = scheme;
  grid.seed = scheme == GridScheme::monte_carlo ? seed : 0;
  grid.nodes = scheme == GridScheme::grid ? uniform_nodes(profile, n)
                                          : sampled_nodes(profile, n, seed);
  return grid;
}

DetuningGrid filter_grid(const DetuningGrid& grid, double half_span) {
  if (!(half_span > 0.0)) {
    throw std::invalid_argument("filter_grid: half_span must be positive");
  }
  DetuningGrid out;
  out.scheme = grid.scheme;
  out.seed = grid.seed;
  bool removed = false;
  for (const auto& node : grid.nodes) {
    if (std::abs(node.detuning) <= half_span) {
      out.nodes.push_back(node);
    } else {
      removed = true;
    }
  }
  if (out.nodes.empty()) {
    throw EmptyGridError("filter_grid: no detuning nodes within +-" + std::to_string(half_span));
  }
  if (!removed) {
    return grid;
  }
  normalize(out.nodes);
  return out;
}

}  // namespace homsim::spectral
