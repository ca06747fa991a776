#pragma once

#include <string>

namespace pcap {

/// Dimension and p-Laplace exponent, validated at construction (n >= 3,
/// 1 < p < n), together with the constants every other module derives from
/// them.
class Params {
 public:
  Params(int n, double p);

  int n() const { return n_; }
  double p() const { return p_; }

  /// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
  double sphere_area() const { return sphere_area_; }

  /// (n-p)/(p-1): decay exponent of the capacitary potential of a ball.
  double decay_exponent() const { return (n_ - p_) / (p_ - 1.0); }

  /// (n-1)/(n-p): exponent of u in the sup-quantity |Du| / u^{(n-1)/(n-p)}.
  double sup_weight_exponent() const { return (n_ - 1.0) / (n_ - p_); }

  friend bool operator==(const Params&, const Params&) = default;

 private:
  int n_;
  double p_;
  double sphere_area_;
};

/// Exponent q in [1, inf) or the distinguished value infinity.
class QExponent {
 public:
  static QExponent finite(double q);
  static QExponent infinity() { return QExponent(); }
  /// Accepts a decimal number or "inf".
  static QExponent parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  /// Finite value; throws ParameterError for infinity.
  double value() const;
  std::string str() const;

  friend bool operator==(const QExponent&, const QExponent&) = default;

 private:
  QExponent() : infinite_(true), q_(0.0) {}
  QExponent(double q) : infinite_(false), q_(q) {}
  bool infinite_;
  double q_;
};

/// 1 + (n-p)/((p-1)(n-1)); the smallest finite q of the monotonicity region.
double lambda_threshold(const Params& params);

/// True iff q is infinite or q >= lambda_threshold(params).
bool in_lambda(const Params& params, const QExponent& q);

}  // namespace pcap
