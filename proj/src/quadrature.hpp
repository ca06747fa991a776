#pragma once

#include <array>
#include <cstddef>

#include <boost/math/quadrature/gauss.hpp>

namespace pcap::detail {

// Gauss-Legendre rule mapped to [0, 1]; nodes in increasing order.
template <std::size_t N>
struct UnitGauss {
  std::array<double, N> x;
  std::array<double, N> w;
};

template <std::size_t N>
const UnitGauss<N>& unit_gauss() {
  static const UnitGauss<N> rule = [] {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    UnitGauss<N> out{};
    // boost stores the nonnegative half (with 0 first for odd N).
    std::size_t idx = 0;
    for (std::size_t i = ab.size(); i-- > 0;) {
      if (ab[i] == 0.0) continue;
      out.x[idx] = 0.5 * (1.0 - ab[i]);
      out.w[idx] = 0.5 * wt[i];
      ++idx;
    }
    if (N % 2 == 1) {
      out.x[idx] = 0.5;
      out.w[idx] = 0.5 * wt[0];
      ++idx;
    }
    for (std::size_t i = 0; i < ab.size(); ++i) {
      if (ab[i] == 0.0) continue;
      out.x[idx] = 0.5 * (1.0 + ab[i]);
      out.w[idx] = 0.5 * wt[i];
      ++idx;
    }
    return out;
  }();
  return rule;
}

}  // namespace pcap::detail
