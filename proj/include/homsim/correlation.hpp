#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "homsim/sources.hpp"
#include "homsim/spectral.hpp"

namespace homsim::correlation {

enum class CoincidenceForm {
  paper,    // cos^2(theta) * g^p
  product,  // i_a * i_b = 1 - sin^2(theta) * g^2
};

/// Delay times in units of 1/width; strictly increasing.
struct TauGrid {
  std::vector<double> values;

  static TauGrid linspace(double first, double last, std::size_t points);
  void validate() const;
  bool contains(double tau) const;
};

/// Ensemble averages over a tau grid. Maps are row-major, one row per tau and
/// one column per detuning node (the node-conditional average over zeta draws
/// and swap branches).
struct CorrelationResult {
  std::vector<double> taus;
  std::vector<double> detunings;
  std::vector<double> r_map;
  std::vector<double> ia_map;
  std::vector<double> ib_map;
  std::vector<double> ia_mean;
  std::vector<double> ib_mean;
  std::vector<double> r_hat;
  std::vector<double> visibility;  // <g sin(theta)>; i_a = 1 - V, i_b = 1 + V
  std::vector<std::optional<double>> g2;  // nullopt where a port mean vanishes

  std::size_t map_index(std::size_t tau_index, std::size_t node) const {
    return tau_index * detunings.size() + node;
  }
};

struct EvaluateOptions {
  sources::EnsembleOptions ensemble;
  unsigned threads = 1;  // 0 = hardware concurrency
};

double coincidence_integrand(double theta, double visibility, CoincidenceForm form, int exponent);

CorrelationResult evaluate(const sources::Source& src, const spectral::DetuningGrid& grid,
                           const spectral::Envelope& env, const TauGrid& taus,
                           CoincidenceForm form = CoincidenceForm::paper,
                           const EvaluateOptions& options = {});

struct DephasingPoint {
  double halfwidth;
  CorrelationResult result;
};

/// Re-runs `evaluate` with a uniform zeta spread of each half-width in [0, pi].
std::vector<DephasingPoint> dephasing_sweep(const sources::Source& src,
                                            std::span<const double> halfwidths,
                                            const spectral::DetuningGrid& grid,
                                            const spectral::Envelope& env, const TauGrid& taus,
                                            CoincidenceForm form = CoincidenceForm::paper,
                                            const EvaluateOptions& options = {});

CorrelationResult classical_baseline(const sources::ClassicalSource& src,
                                     const spectral::DetuningGrid& grid,
                                     const spectral::Envelope& env, const TauGrid& taus,
                                     CoincidenceForm form = CoincidenceForm::paper,
                                     const EvaluateOptions& options = {});

/// 0 maps to std::thread::hardware_concurrency(), never less than 1.
unsigned resolve_threads(unsigned requested);

}  // namespace homsim::correlation
