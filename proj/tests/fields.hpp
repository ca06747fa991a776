#pragma once

#include <map>
#include <string>
#include <utility>

#include "pcap/solver.hpp"

// Solved fields shared by the tests of one binary. coarsen multiplies the
// default mesh spacing.
inline const pcap::Field& cached_field(const std::string& body, double p, double coarsen = 1.0) {
  static std::map<std::tuple<std::string, double, double>, pcap::Field> cache;
  const auto key = std::make_tuple(body, p, coarsen);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const pcap::Body b = pcap::Body::parse(body);
    pcap::SolverOptions opts;
    // default spacing is half_length / 200
    if (coarsen != 1.0) opts.mesh.target_h = coarsen * b.half_length() / 200.0;
    it = cache.emplace(key, pcap::solve(b, pcap::Params(3, p), opts)).first;
  }
  return it->second;
}
