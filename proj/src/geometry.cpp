#include "pcap/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "pcap/error.hpp"
#include "pcap/io.hpp"
#include "quadrature.hpp"

namespace pcap {
namespace {

constexpr int kTableIntervals = 4096;
constexpr int kIntegralPanels = 256;
constexpr double kPi = std::numbers::pi;

std::vector<double> parse_numbers(const std::string& body, const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const char* first = text.data() + start;
    const char* last = text.data() + end;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (first == last || ec != std::errc() || ptr != last) {
      throw ConfigError("bad number '" + std::string(first, last) + "' in body spec '" + body + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(what) + " must be positive and finite, got " + format_double(v));
  }
}

}  // namespace

Body::Body(BodyKind kind, double a, double c, double m) : kind_(kind), a_(a), c_(c), m_(m) {
  require_positive(a, "semi-axis a");
  require_positive(c, "semi-axis c");
  if (!(m >= 2.0 && m <= 8.0)) {
    throw ParameterError("superellipsoid exponent must lie in [2, 8], got " + format_double(m));
  }
  const auto& g = detail::unit_gauss<8>();
  s_table_.assign(kTableIntervals + 1, 0.0);
  const double dphi = kPi / kTableIntervals;
  for (int i = 0; i < kTableIntervals; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < 8; ++k) acc += g.w[k] * at((i + g.x[k]) * dphi).speed;
    s_table_[i + 1] = s_table_[i] + acc * dphi;
  }
  area_ = surface_integral([](const ProfilePoint&) { return 1.0; });
}

Body Body::ball(double radius) {
  require_positive(radius, "ball radius");
  return Body(BodyKind::Ball, radius, radius, 2.0);
}

Body Body::spheroid(double a, double c) { return Body(BodyKind::Spheroid, a, c, 2.0); }

Body Body::superellipsoid(double a, double c, double m) {
  return Body(BodyKind::Superellipsoid, a, c, m);
}

Body Body::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("body spec '" + spec + "' must look like ball:R, spheroid:a,c or superell:a,c,m");
  }
  const std::string kind = spec.substr(0, colon);
  const auto values = parse_numbers(spec, spec.substr(colon + 1));
  try {
    if (kind == "ball" && values.size() == 1) return ball(values[0]);
    if (kind == "spheroid" && values.size() == 2) return spheroid(values[0], values[1]);
    if (kind == "superell" && values.size() == 3) {
      return superellipsoid(values[0], values[1], values[2]);
    }
  } catch (const ParameterError& e) {
    throw ConfigError("body spec '" + spec + "': " + e.what());
  }
  throw ConfigError("unrecognized body spec '" + spec + "'");
}

std::string Body::spec() const {
  switch (kind_) {
    case BodyKind::Ball:
      return "ball:" + format_double(a_);
    case BodyKind::Spheroid:
      return "spheroid:" + format_double(a_) + "," + format_double(c_);
    case BodyKind::Superellipsoid:
      return "superell:" + format_double(a_) + "," + format_double(c_) + "," + format_double(m_);
  }
  return {};
}

double Body::circumradius() const { return std::max(a_, c_); }

Body Body::scaled(double lambda) const {
  require_positive(lambda, "scale factor");
  return Body(kind_, lambda * a_, lambda * c_, m_);
}

std::array<double, 3> Body::polar_radius(double phi) const {
  if (kind_ == BodyKind::Ball) return {a_, 0.0, 0.0};
  const double m = m_;
  const double s = std::sin(phi);
  const double co = std::cos(phi);
  const double sa = std::abs(s) / a_;
  const double cc = std::abs(co) / c_;
  const double sgn_c = co < 0.0 ? -1.0 : 1.0;
  const double A = std::pow(sa, m);
  const double B = std::pow(cc, m);
  const double A1 = m * std::pow(sa, m - 1.0) * (co / a_);
  const double B1 = -m * std::pow(cc, m - 1.0) * sgn_c * (s / c_);
  const double A2 = m * (m - 1.0) * std::pow(sa, m - 2.0) * co * co / (a_ * a_) - m * A;
  const double B2 = m * (m - 1.0) * std::pow(cc, m - 2.0) * s * s / (c_ * c_) - m * B;
  const double G = A + B;
  const double G1 = A1 + B1;
  const double G2 = A2 + B2;
  const double rho = std::pow(G, -1.0 / m);
  const double rho1 = -(1.0 / m) * std::pow(G, -1.0 / m - 1.0) * G1;
  const double rho2 = -(1.0 / m) * ((-1.0 / m - 1.0) * std::pow(G, -1.0 / m - 2.0) * G1 * G1 +
                                    std::pow(G, -1.0 / m - 1.0) * G2);
  return {rho, rho1, rho2};
}

ProfilePoint Body::at(double phi) const {
  const auto [rho, rho1, rho2] = polar_radius(phi);
  const double s = std::sin(phi);
  const double co = std::cos(phi);
  ProfilePoint pt;
  pt.phi = phi;
  pt.rho = rho;
  pt.r = std::max(0.0, rho * s);
  pt.z = rho * co;
  const double speed = std::sqrt(rho * rho + rho1 * rho1);
  pt.speed = speed;
  pt.normal = {(rho * s - rho1 * co) / speed, (rho1 * s + rho * co) / speed};
  pt.kappa_meridian = (rho * rho + 2.0 * rho1 * rho1 - rho * rho2) / (speed * speed * speed);
  pt.kappa_hoop = pt.r > 0.0 ? pt.normal[0] / pt.r : pt.kappa_meridian;
  pt.H = pt.kappa_meridian + pt.kappa_hoop;
  return pt;
}

double Body::arclength_at(double phi) const {
  phi = std::clamp(phi, 0.0, kPi);
  const double dphi = kPi / kTableIntervals;
  const int i = std::min(kTableIntervals - 1, static_cast<int>(phi / dphi));
  const double lo = i * dphi;
  const double len = phi - lo;
  if (len <= 0.0) return s_table_[i];
  const auto& g = detail::unit_gauss<8>();
  double acc = 0.0;
  for (std::size_t k = 0; k < 8; ++k) acc += g.w[k] * at(lo + g.x[k] * len).speed;
  return s_table_[i] + acc * len;
}

double Body::phi_at_arclength(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= s_table_.back()) return kPi;
  const auto it = std::upper_bound(s_table_.begin(), s_table_.end(), s);
  const int i = static_cast<int>(it - s_table_.begin()) - 1;
  const double dphi = kPi / kTableIntervals;
  double lo = i * dphi;
  double hi = lo + dphi;
  double phi = lo + dphi * (s - s_table_[i]) / (s_table_[i + 1] - s_table_[i]);
  for (int iter = 0; iter < 30; ++iter) {
    const double f = arclength_at(phi) - s;
    if (f > 0.0) hi = phi; else lo = phi;
    double next = phi - f / at(phi).speed;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - phi) < 1e-15) return next;
    phi = next;
  }
  return phi;
}

std::vector<double> Body::arclength_breaks(int panels) const {
  std::vector<double> breaks(panels + 1);
  const double L = half_length();
  breaks[0] = 0.0;
  breaks[panels] = kPi;
  for (int i = 1; i < panels; ++i) breaks[i] = phi_at_arclength(L * i / panels);
  return breaks;
}

double Body::surface_integral(const std::function<double(const ProfilePoint&)>& f) const {
  const double dphi = kPi / kIntegralPanels;
  const auto& g = detail::unit_gauss<8>();
  // Uniform-in-phi panels are used here: the arclength table may not
  // exist yet when the constructor computes the area.
  double total = 0.0;
  for (int i = 0; i < kIntegralPanels; ++i) {
    for (std::size_t k = 0; k < 8; ++k) {
      const ProfilePoint pt = at((i + g.x[k]) * dphi);
      total += g.w[k] * dphi * 2.0 * kPi * pt.r * pt.speed * f(pt);
    }
  }
  return total;
}

std::vector<BoundarySample> sample_boundary(const Body& body, int count) {
  if (count < 16) throw ParameterError("sample_boundary needs count >= 16");
  const int panels = (count + 3) / 4;
  const auto breaks = body.arclength_breaks(panels);
  const auto& g = detail::unit_gauss<4>();
  std::vector<BoundarySample> out;
  out.reserve(4 * panels);
  for (int i = 0; i < panels; ++i) {
    const double lo = breaks[i];
    const double len = breaks[i + 1] - lo;
    for (std::size_t k = 0; k < 4; ++k) {
      const ProfilePoint pt = body.at(lo + g.x[k] * len);
      BoundarySample smp;
      smp.phi = pt.phi;
      smp.position = {pt.r, pt.z};
      smp.normal = pt.normal;
      smp.H = pt.H;
      smp.weight = g.w[k] * len * 2.0 * kPi * pt.r * pt.speed;
      out.push_back(smp);
    }
  }
  return out;
}

double willmore_functional(const Body& body) {
  return body.surface_integral([](const ProfilePoint& pt) { return 0.25 * pt.H * pt.H; });
}

double minkowski_mean(const Body& body) {
  return body.surface_integral([](const ProfilePoint& pt) { return 0.5 * pt.H; }) / body.area();
}

}  // namespace pcap
