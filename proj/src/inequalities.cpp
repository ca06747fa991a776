#include "pcap/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "pcap/error.hpp"
#include "pcap/io.hpp"

namespace pcap {
namespace {

InequalityReport make_report(std::string name, CheckKind kind, double lhs, double rhs, double tol, bool ball) {
  InequalityReport r;
  r.name = std::move(name);
  r.kind = kind;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tol = tol;
  r.pass = r.slack >= -tol;
  r.equality_expected = ball;
  if (ball) r.equality_ok = std::abs(r.slack) <= kEqualityFactor * tol;
  r.indeterminate = !ball && std::abs(r.slack) <= tol;
  return r;
}

// Evaluates f on the boundary |Du| values and on the values shifted by the
// per-sample extrapolation gap; the half-range is the error of f.
struct Perturbed {
  double value = 0.0;
  double error = 0.0;
};
Perturbed with_grad_error(const BoundaryData& data, const std::function<double(const std::vector<double>&)>& f) {
  std::vector<double> g, lo, hi;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const double gn = data.samples[i].grad_norm;
    g.push_back(gn);
    lo.push_back(std::max(0.0, gn - data.grad_error[i]));
    hi.push_back(gn + data.grad_error[i]);
  }
  const double a = f(lo), b = f(hi);
  return {f(g), 0.5 * std::abs(b - a)};
}

double boundary_integral(const BoundaryData& data, const std::function<double(std::size_t)>& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) total += data.samples[i].weight * f(i);
  return total;
}

double area(const BoundaryData& data) { return data.body.area(); }

double finite_q(const QExponent& q) {
  if (q.is_infinite()) throw ParameterError("finite exponent required");
  return q.value();
}

void require_lambda(const BoundaryData& data, const QExponent& q) {
  if (!in_lambda(data.params, q)) {
    throw ParameterError("(p, q) = (" + format_double(data.params.p()) + ", " + q.str() +
                         ") is outside the monotone range");
  }
}

}  // namespace

BoundaryData boundary_data(const Field& field, const Field* coarse) {
  require_solved(field);
  const int count = default_boundary_count(field);
  BoundaryData data{field.params(), field.body(), boundary_field_samples(field, count), {}, 0.0, 0.0, false};
  for (const auto& s : data.samples) data.grad_error.push_back(std::abs(s.grad_norm - s.grad_norm_alt));
  const CapacityEstimate est = capacity_consensus(field);
  data.capacity = reference_capacity(est);
  data.capacity_error = est.spread * est.consensus;
  if (coarse) {
    require_solved(*coarse);
    if (coarse->params().p() != field.params().p() || coarse->params().n() != field.params().n() ||
        coarse->body().spec() != field.body().spec()) {
      throw StateError("coarse companion field does not match the field");
    }
    // Same count gives the same boundary points.
    const auto cs = boundary_field_samples(*coarse, count);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      data.grad_error[i] = std::max(data.grad_error[i], std::abs(data.samples[i].grad_norm - cs[i].grad_norm));
    }
    data.capacity_error += std::abs(data.capacity - reference_capacity(capacity_consensus(*coarse)));
  }
  data.ball = field.body().kind() == BodyKind::Ball;
  return data;
}

InequalityReport check_overdetermined(const BoundaryData& data) {
  const double n = data.params.n(), p = data.params.p();
  const double c = (p - 1.0) / (n - p);
  double worst = 0.0, err = 0.0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    const double r = std::abs(c * s.grad_norm - s.H / (n - 1.0));
    if (r >= worst) {
      worst = r;
      err = c * data.grad_error[i];
    }
  }
  InequalityReport r = make_report("overdetermined", CheckKind::Rigidity, worst, 0.0, err, data.ball);
  // Off balls the residual is expected to be strictly positive.
  if (!data.ball) r.pass = worst > err;
  return r;
}

InequalityReport check_neumann_lq(const BoundaryData& data, const QExponent& q) {
  require_lambda(data, q);
  const double n = data.params.n(), p = data.params.p();
  const double c = (n - p) / ((p - 1.0) * (n - 1.0));
  if (q.is_infinite()) {
    const Perturbed lhs = with_grad_error(data, [](const std::vector<double>& g) {
      return *std::max_element(g.begin(), g.end());
    });
    double hmax = 0.0;
    for (const auto& s : data.samples) hmax = std::max(hmax, s.H);
    const double rhs = c * hmax;
    auto r = make_report("neumann_linf", CheckKind::Theorem, lhs.value, rhs, lhs.error + kGeometricQuadrature * rhs,
                         data.ball);
    r.q = q.str();
    return r;
  }
  const double k = (p - 1.0) * finite_q(q);
  const Perturbed lhs = with_grad_error(data, [&](const std::vector<double>& g) {
    return std::pow(boundary_integral(data, [&](std::size_t i) { return std::pow(g[i], k); }), 1.0 / k);
  });
  const double rhs =
      c * std::pow(boundary_integral(data, [&](std::size_t i) { return std::pow(data.samples[i].H, k); }), 1.0 / k);
  auto r = make_report("neumann_lq", CheckKind::Theorem, lhs.value, rhs, lhs.error + kGeometricQuadrature * rhs,
                       data.ball);
  r.q = q.str();
  return r;
}

InequalityReport check_capacity_local(const BoundaryData& data, const QExponent& q) {
  require_lambda(data, q);
  const double n = data.params.n(), p = data.params.p();
  const double scale = area(data) / data.params.sphere_area();
  double rhs;
  std::string name;
  if (q.is_infinite()) {
    double hmax = 0.0;
    for (const auto& s : data.samples) hmax = std::max(hmax, s.H);
    rhs = scale * std::pow(hmax / (n - 1.0), p - 1.0);
    name = "capacity_local_inf";
  } else {
    const double qv = finite_q(q);
    const double mean = data.body.surface_integral([&](const ProfilePoint& pt) {
      return std::pow(pt.H / (n - 1.0), (p - 1.0) * qv);
    }) / area(data);
    rhs = scale * std::pow(mean, 1.0 / qv);
    name = "capacity_local";
  }
  auto r = make_report(name, CheckKind::Theorem, data.capacity, rhs,
                       data.capacity_error + kGeometricQuadrature * rhs, data.ball);
  r.q = q.str();
  return r;
}

InequalityReport check_capacity_willmore(const BoundaryData& data) {
  const double n = data.params.n(), p = data.params.p();
  const double mean = data.body.surface_integral([&](const ProfilePoint& pt) {
    return std::pow(pt.H / (n - 1.0), n - 1.0);
  }) / area(data);
  // The area ratio carries the 1/(p-1) power; without it the two sides
  // scale differently unless p = 2.
  const double rhs = std::pow(area(data) / data.params.sphere_area(), 1.0 / (p - 1.0)) * std::pow(mean, 1.0 / (n - 1.0));
  const double lhs = std::pow(data.capacity, 1.0 / (p - 1.0));
  const double err = lhs * data.capacity_error / data.capacity / (p - 1.0);
  auto r = make_report("capacity_willmore", CheckKind::Theorem, lhs, rhs, err + kGeometricQuadrature * rhs, data.ball);
  r.q = format_double((n - 1.0) / (p - 1.0));
  return r;
}

InequalityReport check_capacity_global(const BoundaryData& data, const QExponent& q) {
  require_lambda(data, q);
  const double n = data.params.n(), p = data.params.p();
  const double qv = finite_q(q);
  const double k = qv * (p - 1.0);
  const double e = (k - (n - 1.0)) / (n - p);
  const double mean = data.body.surface_integral([&](const ProfilePoint& pt) {
    return std::pow(pt.H / (n - 1.0), k);
  }) / area(data);
  const double lhs = data.params.sphere_area() / area(data);
  const double rhs = std::pow(data.capacity, e) * mean;
  const double err = rhs * std::abs(e) * data.capacity_error / data.capacity;
  auto r = make_report("capacity_global", CheckKind::Theorem, lhs, rhs, err + kGeometricQuadrature * rhs, data.ball);
  r.q = q.str();
  return r;
}

InequalityReport check_willmore(const Body& body) {
  const double lhs = 4.0 * std::numbers::pi;
  const double rhs = willmore_functional(body);
  return make_report("willmore", CheckKind::Theorem, lhs, rhs, kGeometricQuadrature * rhs,
                     body.kind() == BodyKind::Ball);
}

InequalityReport check_minkowski(const Body& body) {
  const double lhs = std::sqrt(4.0 * std::numbers::pi / body.area());
  const double rhs = minkowski_mean(body);
  return make_report("minkowski", CheckKind::Theorem, lhs, rhs, kGeometricQuadrature * rhs,
                     body.kind() == BodyKind::Ball);
}

std::vector<InequalityReport> check_sup_chain(const BoundaryData& data) {
  const double n = data.params.n(), p = data.params.p();
  const double c = (p - 1.0) / (n - p);
  const Perturbed mid = with_grad_error(data, [&](const std::vector<double>& g) {
    return c * *std::max_element(g.begin(), g.end());
  });
  double hmax = 0.0;
  for (const auto& s : data.samples) hmax = std::max(hmax, s.H);
  const double top = hmax / (n - 1.0);
  const double bottom = std::pow(1.0 / data.capacity, 1.0 / (n - p));
  const double bottom_err = bottom * data.capacity_error / data.capacity / (n - p);
  return {make_report("sup_chain_capacity", CheckKind::Theorem, bottom, mid.value, bottom_err + mid.error, data.ball),
          make_report("sup_chain_curvature", CheckKind::Theorem, mid.value, top,
                      mid.error + kGeometricQuadrature * top, data.ball)};
}

std::vector<InequalityReport> check_pinching(const BoundaryData& data) {
  const double n = data.params.n(), p = data.params.p();
  const Perturbed sup_grad = with_grad_error(data, [](const std::vector<double>& g) {
    return *std::max_element(g.begin(), g.end());
  });
  const double bound = (n - p) / (p - 1.0) * std::pow(data.params.sphere_area() / area(data), 1.0 / (n - 1.0));
  double hmax = 0.0;
  for (const auto& s : data.samples) hmax = std::max(hmax, s.H);
  const double cap_bound = std::pow(1.0 / data.capacity, 1.0 / (n - p));
  const double cap_err = cap_bound * data.capacity_error / data.capacity / (n - p);
  return {make_report("pinching_normal_derivative", CheckKind::Rigidity, sup_grad.value, bound,
                      sup_grad.error + kGeometricQuadrature * bound, data.ball),
          make_report("pinching_mean_curvature", CheckKind::Rigidity, hmax / (n - 1.0), cap_bound,
                      cap_err + kGeometricQuadrature * hmax, data.ball)};
}

std::vector<InequalityReport> run_geometric(const Body& body) {
  return {check_willmore(body), check_minkowski(body)};
}

std::vector<InequalityReport> run_all(const Field& field, const std::vector<QExponent>& q_list, const Field* coarse) {
  const BoundaryData data = boundary_data(field, coarse);
  std::vector<InequalityReport> out;
  out.push_back(check_overdetermined(data));
  for (const auto& q : q_list) {
    if (!in_lambda(data.params, q)) continue;
    out.push_back(check_neumann_lq(data, q));
    out.push_back(check_capacity_local(data, q));
    if (!q.is_infinite()) out.push_back(check_capacity_global(data, q));
  }
  out.push_back(check_capacity_willmore(data));
  for (auto& r : check_sup_chain(data)) out.push_back(std::move(r));
  for (auto& r : check_pinching(data)) out.push_back(std::move(r));
  for (auto& r : run_geometric(field.body())) out.push_back(std::move(r));
  return out;
}

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j{{"name", r.name},
                   {"kind", r.kind == CheckKind::Theorem ? "theorem" : "rigidity"},
                   {"lhs", r.lhs},
                   {"rhs", r.rhs},
                   {"slack", r.slack},
                   {"tol", r.tol},
                   {"pass", r.pass},
                   {"equality_expected", r.equality_expected},
                   {"equality_ok", r.equality_ok},
                   {"indeterminate", r.indeterminate}};
  if (!r.q.empty()) j["q"] = r.q;
  return j;
}

nlohmann::json to_json(const std::vector<InequalityReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

std::string reports_csv(const std::vector<InequalityReport>& reports) {
  CsvTable table({"name", "lhs", "rhs", "slack", "tol", "pass"});
  for (const auto& r : reports) {
    const std::string name = r.q.empty() ? r.name : r.name + "[q=" + r.q + "]";
    table.add_row({csv_cell(name), csv_cell(r.lhs), csv_cell(r.rhs), csv_cell(r.slack), csv_cell(r.tol),
                   csv_cell(r.pass)});
  }
  return table.str();
}

}  // namespace pcap
