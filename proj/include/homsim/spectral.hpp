#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace homsim::spectral {

/// Gaussian photon distribution over detuning. `width` is the standard
/// deviation; the sampled range is +-span_halfwidth * width.
struct SpectralProfile {
  double center = 0.0;
  double width = 1.0;
  double span_halfwidth = 2.0;

  void validate() const;
  bool operator==(const SpectralProfile&) const = default;
};

enum class EnvelopeKind { gaussian_peak_one, unity };

struct Envelope {
  EnvelopeKind kind = EnvelopeKind::gaussian_peak_one;
  int exponent = 1;  // 1 or 2, applied by the coincidence integrand

  void validate() const;
  bool operator==(const Envelope&) const = default;
};

enum class GridScheme { grid, monte_carlo };

struct DetuningNode {
  double detuning = 0.0;
  double weight = 0.0;
  bool operator==(const DetuningNode&) const = default;
};

struct DetuningGrid {
  std::vector<DetuningNode> nodes;
  GridScheme scheme = GridScheme::grid;
  std::uint64_t seed = 0;

  bool empty() const { return nodes.empty(); }
  std::size_t size() const { return nodes.size(); }
  bool operator==(const DetuningGrid&) const = default;
};

/// Raised when a filter or an ensemble leaves no detuning nodes.
class EmptyGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double gaussian_density(double detuning, double width);

/// Fringe visibility G(detuning) in [0, 1], peak-normalized.
double envelope_value(const Envelope& env, double detuning, double width);

/// Uniform nodes over the profile span weighted by the Gaussian density
/// (grid), or n seeded Gaussian draws rejected outside the span with equal
/// weights (monte_carlo). Weights sum to 1.
DetuningGrid build_grid(const SpectralProfile& profile, std::size_t n, GridScheme scheme,
                        std::uint64_t seed = 0);

/// Drops nodes with |detuning| > half_span and renormalizes.
DetuningGrid filter_grid(const DetuningGrid& grid, double half_span);

}  // namespace homsim::spectral
