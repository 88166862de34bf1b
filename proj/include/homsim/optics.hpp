#pragma once

#include <complex>

namespace homsim::optics {

// Field amplitude in units where |E|^2 is intensity in units of I_0.
using ComplexAmp = std::complex<double>;

struct FieldPair {
  ComplexAmp signal;
  ComplexAmp idler;

  double total_intensity() const { return std::norm(signal) + std::norm(idler); }
  bool operator==(const FieldPair&) const = default;
};

struct OutputFields {
  ComplexAmp port_a;
  ComplexAmp port_b;

  double total_intensity() const { return std::norm(port_a) + std::norm(port_b); }
  bool operator==(const OutputFields&) const = default;
};

struct PortIntensities {
  double a = 0.0;
  double b = 0.0;
};

/// Path phase on the idler arm: diag(1, e^{i phi}).
/// Throws std::invalid_argument when phi is not finite.
FieldPair phase_element(const FieldPair& pair, double phi);

/// Lossless 50/50 splitter (1/sqrt2) [[1, i], [i, 1]].
OutputFields beam_split(const FieldPair& pair);

PortIntensities port_intensities(const OutputFields& out);

/// Port intensities for two equal-amplitude inputs with total relative phase
/// theta and fringe visibility g:
///   i_a = i0 (1 - g sin theta),  i_b = i0 (1 + g sin theta).
/// Throws std::invalid_argument for g outside [0, 1] or i0 <= 0.
PortIntensities closed_form_intensities(double theta, double visibility, double i0 = 1.0);

}  // namespace homsim::optics
