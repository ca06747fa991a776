#include "pcap/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "pcap/level_quantities.hpp"

namespace pcap {

double capacity_flux(const Field& field, double t) {
  const Params& params = field.params();
  const double p = params.p();
  const LevelSet level = extract_level(field, t);
  const double flux = surface_integral(level, [p](const LevelPoint& pt) { return std::pow(pt.sample.grad_norm, p - 1.0); });
  return flux / (std::pow(params.decay_exponent(), p - 1.0) * params.sphere_area());
}

FarFieldEstimate capacity_farfield(const Field& field) {
  require_solved(field);
  const SolverOptions defaults;
  const FarFit fit =
      fit_far_amplitude(field.mesh(), field.values(), field.params(), defaults.fit_inner, defaults.fit_outer);
  FarFieldEstimate est;
  est.value = std::pow(fit.amplitude, field.params().p() - 1.0);
  est.rel_rms = fit.rel_rms;
  est.warning = fit.rel_rms > kFarFitWarning;
  return est;
}

CapacityEstimate capacity_consensus(const Field& field) {
  CapacityEstimate est;
  est.flux = capacity_flux(field, 0.5);
  est.energy = energy(field);
  const FarFieldEstimate far = capacity_farfield(field);
  est.farfield = far.value;
  est.farfield_warning = far.warning;
  est.consensus = (est.flux + est.energy + est.farfield) / 3.0;
  const double v[3] = {est.flux, est.energy, est.farfield};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) est.spread = std::max(est.spread, std::abs(v[i] - v[j]) / est.consensus);
  }
  est.spread_warning = est.spread > kSpreadWarning;
  est.n = field.params().n();
  est.p = field.params().p();
  est.body = field.body().spec();
  return est;
}

nlohmann::json to_json(const CapacityEstimate& est) {
  return nlohmann::json{{"flux", est.flux},
                        {"energy", est.energy},
                        {"farfield", est.farfield},
                        {"consensus", est.consensus},
                        {"spread", est.spread},
                        {"p", est.p},
                        {"n", est.n},
                        {"body", est.body},
                        {"farfield_warning", est.farfield_warning},
                        {"spread_warning", est.spread_warning},
                        {"reference", "flux"}};
}

}  // namespace pcap
