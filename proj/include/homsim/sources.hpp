#pragma once

#include <cstdint>
#include <numbers>
#include <variant>
#include <vector>

#include "homsim/spectral.hpp"

namespace homsim::sources {

enum class ZetaKind { fixed, uniform };

/// Per-pair initial phase difference. `fixed` pins every pair to `value`;
/// `uniform` spreads it over [-value, +value] with value <= pi.
struct ZetaModel {
  ZetaKind kind = ZetaKind::fixed;
  double value = 0.0;

  static ZetaModel fixed(double zeta) { return {ZetaKind::fixed, zeta}; }
  static ZetaModel uniform(double halfwidth) { return {ZetaKind::uniform, halfwidth}; }

  void validate() const;
  bool operator==(const ZetaModel&) const = default;
};

/// Two independent lasers. Only the detuning difference idler - signal
/// enters the interference phase.
struct ClassicalSource {
  double phi = 0.0;
  ZetaModel zeta;
  double width_signal = 1.0;
  double width_idler = 1.0;

  double difference_width() const;
  void validate() const;
  bool operator==(const ClassicalSource&) const = default;
};

enum class SwapMode { exact_half, bernoulli, off };

/// Symmetrically detuned pairs (+-detuning) with intrinsic phase phi_prime.
struct SpdcSource {
  double phi_prime = std::numbers::pi / 2;
  ZetaModel zeta;
  double width = 1.0;
  SwapMode swap = SwapMode::exact_half;
  std::uint64_t swap_seed = 0;

  void validate() const;
  bool operator==(const SpdcSource&) const = default;
};

using Source = std::variant<ClassicalSource, SpdcSource>;

void validate(const Source& src);

/// Width used for the envelope G of the ensemble coordinate.
double envelope_width(const Source& src);

const ZetaModel& zeta_of(const Source& src);
Source with_zeta(Source src, ZetaModel zeta);

struct PhaseSample {
  double theta = 0.0;
  double visibility = 1.0;  // G(detuning), exponent not applied
  double weight = 0.0;
  int sign = 1;
  std::size_t node = 0;     // index into the detuning grid
  double node_share = 1.0;  // fraction of the node's weight carried by this sample
};

enum class ZetaSampling { midpoint, random };

struct EnsembleOptions {
  std::size_t zeta_nodes = 128;
  ZetaSampling zeta_sampling = ZetaSampling::midpoint;
  std::uint64_t zeta_seed = 0;

  bool operator==(const EnsembleOptions&) const = default;
};

double classical_phase(const ClassicalSource& src, double detuning_is, double zeta, double tau);

/// phi' + zeta - 2 detuning tau on the direct branch. The swapped branch
/// (sign = -1) exchanges signal and idler roles, which adds pi to the phase:
/// the port intensities trade places and cos^2 is unchanged.
double spdc_phase(const SpdcSource& src, double detuning, double zeta, double tau, int sign);

/// Detuning-difference grid for the classical model. Collapsed mode builds a
/// single grid with width sqrt(ws^2 + wi^2); product mode combines two
/// per-laser grids (full product for the grid scheme, element-wise pairing
/// for monte_carlo).
spectral::DetuningGrid classical_difference_grid(const ClassicalSource& src, double span_halfwidth,
                                                 std::size_t n, spectral::GridScheme scheme,
                                                 bool product, std::uint64_t seed = 0);

/// One sample per (node, zeta draw, swap branch); weights sum to 1.
/// Throws spectral::EmptyGridError for an empty grid.
std::vector<PhaseSample> sample_ensemble(const Source& src, const spectral::DetuningGrid& grid,
                                         const spectral::Envelope& env, double tau,
                                         const EnsembleOptions& options = {});

}  // namespace homsim::sources
