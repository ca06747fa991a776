#pragma once

#include <string>

#include "json.hpp"
#include "pcap/params.hpp"
#include "pcap/solver.hpp"

namespace pcap {

/// Relative rms of u |x|^a over the fit annulus above which the far-field
/// estimate is flagged.
inline constexpr double kFarFitWarning = 1e-2;
/// Spread above which a consensus is flagged (not fatal).
inline constexpr double kSpreadWarning = 3e-2;

/// Flux of |Du|^{p-1} through {u = t}, normalized by the ball flux.
double capacity_flux(const Field& field, double t = 0.5);

struct FarFieldEstimate {
  double value = 0.0;    // fit^{p-1}
  double rel_rms = 0.0;  // residual of the constant fit
  bool warning = false;
};
FarFieldEstimate capacity_farfield(const Field& field);

struct CapacityEstimate {
  double flux = 0.0;
  double energy = 0.0;
  double farfield = 0.0;
  double consensus = 0.0;  // arithmetic mean
  double spread = 0.0;     // max pairwise |a - b| / consensus
  bool farfield_warning = false;
  bool spread_warning = false;
  int n = 3;
  double p = 2.0;
  std::string body;
};
CapacityEstimate capacity_consensus(const Field& field);

/// Flux estimate: the reference value handed to the inequality checks.
inline double reference_capacity(const CapacityEstimate& est) { return est.flux; }

nlohmann::json to_json(const CapacityEstimate& est);

}  // namespace pcap
