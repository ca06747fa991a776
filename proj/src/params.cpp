#include "pcap/params.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "pcap/error.hpp"
#include "pcap/io.hpp"

namespace pcap {

Params::Params(int n, double p) : n_(n), p_(p) {
  if (n < 3) {
    throw ParameterError("dimension n must be an integer >= 3, got " + std::to_string(n));
  }
  if (!(p > 1.0 && p < n)) {
    throw ParameterError("exponent p must satisfy 1 < p < n (n = " + std::to_string(n) +
                         "), got p = " + format_double(p));
  }
  sphere_area_ = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

QExponent QExponent::finite(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) {
    throw ParameterError("q must be >= 1 (or inf), got " + format_double(q));
  }
  return QExponent(q);
}

QExponent QExponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  double q = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, q);
  if (ec != std::errc() || ptr != last) {
    throw ParameterError("cannot parse q exponent '" + text + "'");
  }
  return finite(q);
}

double QExponent::value() const {
  if (infinite_) throw ParameterError("q = inf has no finite value");
  return q_;
}

std::string QExponent::str() const { return infinite_ ? "inf" : format_double(q_); }

double lambda_threshold(const Params& params) {
  const double n = params.n();
  const double p = params.p();
  return 1.0 + (n - p) / ((p - 1.0) * (n - 1.0));
}

bool in_lambda(const Params& params, const QExponent& q) {
  if (q.is_infinite()) return true;
  return q.value() >= lambda_threshold(params);
}

}  // namespace pcap
