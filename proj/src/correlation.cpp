#include "homsim/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "homsim/optics.hpp"

namespace homsim::correlation {

namespace {
// A port mean below this (in units of I_0) makes g2 a no-count gap.
constexpr double kDegenerateMean = 1e-12;
}  // namespace

TauGrid TauGrid::linspace(double first, double last, std::size_t points) {
  if (points == 0) {
    throw std::invalid_argument("tau grid needs at least one point");
  }
  TauGrid grid;
  grid.values.resize(points);
  if (points == 1) {
    grid.values[0] = first;
    return grid;
  }
  const double span = last - first;
  for (std::size_t k = 0; k < points; ++k) {
    grid.values[k] = first + span * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  grid.values.back() = last;
  return grid;
}

void TauGrid::validate() const {
  if (values.empty()) {
    throw std::invalid_argument("tau grid is empty");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw std::invalid_argument("tau grid contains a non-finite value");
    }
    if (k > 0 && !(values[k] > values[k - 1])) {
      throw std::invalid_argument("tau grid must be strictly increasing");
    }
  }
}

bool TauGrid::contains(double tau) const {
  return std::find(values.begin(), values.end(), tau) != values.end();
}

double coincidence_integrand(double theta, double visibility, CoincidenceForm form, int exponent) {
  if (form == CoincidenceForm::product) {
    const double s = std::sin(theta) * visibility;
    return 1.0 - s * s;
  }
  const double c = std::cos(theta);
  const double gp = exponent == 2 ? visibility * visibility : visibility;
  return c * c * gp;
}

unsigned resolve_threads(unsigned requested) {
  if (requested == 0) {
    requested = std::thread::hardware_concurrency();
  }
  return std::max(1u, requested);
}

namespace {

// Fills row `t` of `out`. Each row is reduced serially in sample order, so
// results do not depend on how rows are spread across threads.
void evaluate_row(const sources::Source& src, const spectral::DetuningGrid& grid,
                  const spectral::Envelope& env, CoincidenceForm form,
                  const sources::EnsembleOptions& ensemble, std::size_t t,
                  CorrelationResult& out) {
  const double tau = out.taus[t];
  const auto samples = sources::sample_ensemble(src, grid, env, tau, ensemble);

  double w_sum = 0.0, a_sum = 0.0, b_sum = 0.0, ab_sum = 0.0;
  double r_sum = 0.0, norm_sum = 0.0, v_sum = 0.0;
  const std::size_t row = out.map_index(t, 0);

  for (const auto& s : samples) {
    const auto [ia, ib] = optics::closed_form_intensities(s.theta, s.visibility);
    const double r = coincidence_integrand(s.theta, s.visibility, form, env.exponent);
    const double norm = form == CoincidenceForm::product
                            ? 1.0
                            : (env.exponent == 2 ? s.visibility * s.visibility : s.visibility);
    w_sum += s.weight;
    a_sum += s.weight * ia;
    b_sum += s.weight * ib;
    ab_sum += s.weight * ia * ib;
    r_sum += s.weight * r;
    norm_sum += s.weight * norm;
    v_sum += s.weight * std::sin(s.theta) * s.visibility;

    out.r_map[row + s.node] += s.node_share * r;
    out.ia_map[row + s.node] += s.node_share * ia;
    out.ib_map[row + s.node] += s.node_share * ib;
  }

  if (!(norm_sum > 0.0)) {
    throw std::runtime_error("evaluate: ensemble has zero total visibility");
  }
  const double ia_mean = a_sum / w_sum;
  const double ib_mean = b_sum / w_sum;
  out.ia_mean[t] = ia_mean;
  out.ib_mean[t] = ib_mean;
  out.r_hat[t] = r_sum / norm_sum;
  out.visibility[t] = v_sum / w_sum;
  if (ia_mean < kDegenerateMean || ib_mean < kDegenerateMean) {
    out.g2[t] = std::nullopt;
  } else {
    out.g2[t] = (ab_sum / w_sum) / (ia_mean * ib_mean);
  }
}

}  // namespace

CorrelationResult evaluate(const sources::Source& src, const spectral::DetuningGrid& grid,
                           const spectral::Envelope& env, const TauGrid& taus,
                           CoincidenceForm form, const EvaluateOptions& options) {
  if (grid.empty()) {
    throw spectral::EmptyGridError("evaluate: detuning grid is empty");
  }
  taus.validate();
  sources::validate(src);
  env.validate();

  CorrelationResult out;
  out.taus = taus.values;
  out.detunings.reserve(grid.size());
  for (const auto& node : grid.nodes) {
    out.detunings.push_back(node.detuning);
  }
  const std::size_t rows = out.taus.size();
  const std::size_t cells = rows * grid.size();
  out.r_map.assign(cells, 0.0);
  out.ia_map.assign(cells, 0.0);
  out.ib_map.assign(cells, 0.0);
  out.ia_mean.assign(rows, 0.0);
  out.ib_mean.assign(rows, 0.0);
  out.r_hat.assign(rows, 0.0);
  out.visibility.assign(rows, 0.0);
  out.g2.assign(rows, std::nullopt);

  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(options.threads), rows));
  if (threads <= 1) {
    for (std::size_t t = 0; t < rows; ++t) {
      evaluate_row(src, grid, env, form, options.ensemble, t, out);
    }
    return out;
  }

  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < rows; t += threads) {
            evaluate_row(src, grid, env, form, options.ensemble, t, out);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return out;
}

std::vector<DephasingPoint> dephasing_sweep(const sources::Source& src,
                                            std::span<const double> halfwidths,
                                            const spectral::DetuningGrid& grid,
                                            const spectral::Envelope& env, const TauGrid& taus,
                                            CoincidenceForm form, const EvaluateOptions& options) {
  for (double a : halfwidths) {
    if (!(a >= 0.0 && a <= std::numbers::pi)) {
      throw std::invalid_argument("dephasing_sweep: half-width must lie in [0, pi], got " +
                                  std::to_string(a));
    }
  }
  std::vector<DephasingPoint> points;
  points.reserve(halfwidths.size());
  for (double a : halfwidths) {
    const auto spread = sources::with_zeta(src, sources::ZetaModel::uniform(a));
    points.push_back({a, evaluate(spread, grid, env, taus, form, options)});
  }
  return points;
}

CorrelationResult classical_baseline(const sources::ClassicalSource& src,
                                     const spectral::DetuningGrid& grid,
                                     const spectral::Envelope& env, const TauGrid& taus,
                                     CoincidenceForm form, const EvaluateOptions& options) {
  return evaluate(sources::Source{src}, grid, env, taus, form, options);
}

}  // namespace homsim::correlation
