#include "homsim/optics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace homsim::optics {

namespace {
constexpr ComplexAmp kI{0.0, 1.0};
}

FieldPair phase_element(const FieldPair& pair, double phi) {
  if (!std::isfinite(phi)) {
    throw std::invalid_argument("phase_element: phase must be finite");
  }
  return {pair.signal, pair.idler * std::polar(1.0, phi)};
}

OutputFields beam_split(const FieldPair& pair) {
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  return {(pair.signal + kI * pair.idler) * inv_sqrt2,
          (kI * pair.signal + pair.idler) * inv_sqrt2};
}

PortIntensities port_intensities(const OutputFields& out) {
  return {std::norm(out.port_a), std::norm(out.port_b)};
}

PortIntensities closed_form_intensities(double theta, double visibility, double i0) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("closed_form_intensities: visibility must lie in [0, 1], got " +
                                std::to_string(visibility));
  }
  if (!(i0 > 0.0)) {
    throw std::invalid_argument("closed_form_intensities: i0 must be positive");
  }
  // Snapping i_a onto multiples of ulp(2 i0) makes 2 i0 - i_a representable,
  // so i_a + i_b == 2 i0 holds bit for bit. Costs at most half an ulp of 2 i0.
  const double total = 2.0 * i0;
  const double quantum = std::ldexp(1.0, std::ilogb(total) - std::numeric_limits<double>::digits + 1);
  const double ia = std::nearbyint(i0 * (1.0 - std::sin(theta) * visibility) / quantum) * quantum;
  return {ia, total - ia};
}

}  // namespace homsim::optics
