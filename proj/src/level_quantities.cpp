#include "pcap/level_quantities.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "pcap/error.hpp"
#include "pcap/io.hpp"

namespace pcap {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct Segment {
  EdgeKey ends[2];
};

// Trapezoid weights 2 pi r ds along one polyline.
void trapezoid_weights(std::vector<LevelPoint>& pts, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) pts[i].weight = 0.0;
  for (std::size_t i = begin; i + 1 < end; ++i) {
    const auto& a = pts[i].sample.position;
    const auto& b = pts[i + 1].sample.position;
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    pts[i].weight += 0.5 * kTwoPi * a[0] * len;
    pts[i + 1].weight += 0.5 * kTwoPi * b[0] * len;
  }
}

double coarse_integral(const std::vector<LevelPoint>& pts, const std::vector<double>& f) {
  // Trapezoid rule on every other node (endpoints kept).
  if (pts.size() < 3) return 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pts.size(); i += 2) idx.push_back(i);
  if (idx.back() != pts.size() - 1) idx.push_back(pts.size() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    const auto& a = pts[idx[k]].sample.position;
    const auto& b = pts[idx[k + 1]].sample.position;
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    total += 0.5 * kTwoPi * len * (a[0] * f[idx[k]] + b[0] * f[idx[k + 1]]);
  }
  return total;
}

LevelSet boundary_level(const Field& field) {
  LevelSet level;
  level.t = 1.0;
  level.on_boundary = true;
  const auto samples = boundary_field_samples(field, default_boundary_count(field));
  double area = 0.0;
  for (const auto& b : samples) {
    LevelPoint pt;
    pt.sample.position = b.position;
    pt.sample.u = 1.0;
    pt.sample.grad = {-b.grad_norm * b.normal[0], 0.0, -b.grad_norm * b.normal[1]};
    pt.sample.grad_norm = b.grad_norm;
    pt.sample.H_level = b.H_field;
    pt.H = b.H;
    pt.H_gap = std::abs(b.H_field - b.H);
    pt.weight = b.weight;
    area += b.weight;
    level.points.push_back(pt);
  }
  level.area_error = std::abs(area - field.body().area());
  return level;
}

std::vector<double> values_of(const LevelSet& level, const std::function<double(const LevelPoint&)>& f) {
  std::vector<double> v;
  v.reserve(level.points.size());
  for (const auto& p : level.points) v.push_back(f(p));
  return v;
}

double parse_number(const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("bad number '" + text + "' in t-grid spec");
  }
  return v;
}

}  // namespace

LevelRange level_range(const Field& field) {
  require_solved(field);
  const auto& mesh = field.mesh();
  const auto& u = field.values();
  LevelRange range;
  double far = 0.0;
  double first = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const int k = mesh.layer_of(static_cast<int>(i));
    if (mesh.tags(static_cast<int>(i)) & kOuter) far = std::max(far, u[i]);
    if (k == 1) first = std::max(first, u[i]);
  }
  range.t_min = 1.5 * far;
  range.t_max = first;
  return range;
}

LevelSet extract_level(const Field& field, double t) {
  require_solved(field);
  if (t == 1.0) return boundary_level(field);
  const LevelRange range = level_range(field);
  if (!(t > range.t_min && t < range.t_max)) {
    throw RangeError("level t = " + format_double(t) + " outside the representable range (" +
                     format_double(range.t_min) + ", " + format_double(range.t_max) + ")");
  }
  const auto& mesh = field.mesh();
  const auto& u = field.values();

  std::vector<Segment> segments;
  std::map<EdgeKey, std::vector<int>> by_edge;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto& tri = mesh.triangle(static_cast<int>(e));
    bool above[3];
    int count = 0;
    for (int a = 0; a < 3; ++a) {
      above[a] = u[tri[a]] >= t;
      count += above[a];
    }
    if (count == 0 || count == 3) continue;
    Segment seg;
    int found = 0;
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3;
      if (above[a] != above[b]) seg.ends[found++] = edge_key(tri[a], tri[b]);
    }
    const int id = static_cast<int>(segments.size());
    segments.push_back(seg);
    by_edge[seg.ends[0]].push_back(id);
    by_edge[seg.ends[1]].push_back(id);
  }
  if (segments.empty()) throw RangeError("level t = " + format_double(t) + " does not cross the mesh");

  LevelSet level;
  level.t = t;
  std::vector<char> used(segments.size(), 0);
  auto crossing = [&](const EdgeKey& k) {
    const double lam = (t - u[k.first]) / (u[k.second] - u[k.first]);
    if (mesh.tags(k.first) & kInner || mesh.tags(k.second) & kInner) level.boundary_layer = true;
    LevelPoint pt;
    pt.sample = sample_on_edge(field, k.first, k.second, lam);
    pt.sample.u = t;
    pt.H = mean_curvature_pharmonic(pt.sample, field.params());
    pt.H_gap = std::abs(pt.H - pt.sample.H_level);
    return pt;
  };
  auto edge_z = [&](const EdgeKey& k) { return 0.5 * (mesh.z(k.first) + mesh.z(k.second)); };

  // Open chains start at edges used by a single segment; take the highest first.
  std::vector<EdgeKey> starts;
  for (const auto& [key, segs] : by_edge) {
    if (segs.size() == 1) starts.push_back(key);
  }
  std::stable_sort(starts.begin(), starts.end(),
                   [&](const EdgeKey& a, const EdgeKey& b) { return edge_z(a) > edge_z(b); });
  auto walk = [&](EdgeKey key, int seg) {
    const std::size_t begin = level.points.size();
    level.points.push_back(crossing(key));
    const EdgeKey first = key;
    while (seg >= 0 && !used[seg]) {
      used[seg] = 1;
      const Segment& s = segments[seg];
      key = s.ends[0] == key ? s.ends[1] : s.ends[0];
      level.points.push_back(crossing(key));
      int next = -1;
      for (int cand : by_edge[key]) {
        if (!used[cand]) next = cand;
      }
      seg = next;
      if (key == first) break;
    }
    const auto& a = level.points[begin].sample.position;
    const auto& b = level.points.back().sample.position;
    if (a[0] != 0.0 || b[0] != 0.0) level.closed_to_axis = false;
    trapezoid_weights(level.points, begin, level.points.size());
  };
  for (const auto& key : starts) {
    const int seg = by_edge[key][0];
    if (!used[seg]) walk(key, seg);
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (!used[s]) {
      level.closed_to_axis = false;
      walk(segments[s].ends[0], static_cast<int>(s));
    }
  }
  const std::vector<double> ones(level.points.size(), 1.0);
  level.area_error = std::abs(surface_integral(level, ones) - coarse_integral(level.points, ones)) / 3.0;
  return level;
}

double surface_integral(const LevelSet& level, const std::function<double(const LevelPoint&)>& f) {
  double total = 0.0;
  for (const auto& p : level.points) total += p.weight * f(p);
  return total;
}

double surface_integral(const LevelSet& level, const std::vector<double>& values) {
  if (values.size() != level.points.size()) throw DomainError("integrand size does not match level set");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) total += level.points[i].weight * values[i];
  return total;
}

double surface_integral_error(const LevelSet& level, const std::function<double(const LevelPoint&)>& f) {
  if (level.on_boundary) {
    const double area = surface_integral(level, [](const LevelPoint&) { return 1.0; });
    return level.area_error / std::max(area, 1e-300) * std::abs(surface_integral(level, f));
  }
  const auto v = values_of(level, f);
  return std::abs(surface_integral(level, v) - coarse_integral(level.points, v)) / 3.0;
}

double v_prefactor(const Params& params, double t, double q, double C_p) {
  const double n = params.n();
  const double p = params.p();
  return std::pow(C_p / std::pow(t, p - 1.0), (n - 1.0) * (q - 1.0) / (n - p));
}

double V_qp(const Field& field, const LevelSet& level, double q, double C_p) {
  if (!(q >= 1.0)) throw ParameterError("V_qp needs q >= 1");
  const double p = field.params().p();
  const double e = q * (p - 1.0);
  const double I = surface_integral(level, [e](const LevelPoint& pt) { return std::pow(pt.sample.grad_norm, e); });
  return v_prefactor(field.params(), level.t, q, C_p) * I;
}

double V_qp(const Field& field, double t, double q, double C_p) {
  return V_qp(field, extract_level(field, t), q, C_p);
}

SupResult V_inf(const Field& field, const LevelSet& level) {
  const Params& params = field.params();
  SupResult best;
  double sup = -1.0;
  for (const auto& pt : level.points) {
    if (pt.sample.grad_norm > sup) {
      sup = pt.sample.grad_norm;
      best.point = pt.sample.position;
      best.sample = pt.sample;
      best.bracket = level_bracket(pt, params);
      best.bracket_tol = 3.0 * pt.H_gap;
    }
  }
  best.value = std::pow(level.t, -params.sup_weight_exponent()) * sup;
  return best;
}

SupResult V_inf(const Field& field, double t) { return V_inf(field, extract_level(field, t)); }

double level_bracket(const PointSample& s, const Params& params) {
  const double n = params.n();
  const double p = params.p();
  return s.H_level - (n - 1.0) * (p - 1.0) / (n - p) * s.grad_norm / s.u;
}

double level_bracket(const LevelPoint& pt, const Params& params) {
  PointSample s = pt.sample;
  s.H_level = pt.H;
  return level_bracket(s, params);
}

double dV_boundary(const Field& field, const LevelSet& level, double q, double C_p) {
  if (q == 1.0) return 0.0;
  const Params& params = field.params();
  const double e = q * (params.p() - 1.0) - 1.0;
  const double I = surface_integral(level, [&](const LevelPoint& pt) {
    return std::pow(pt.sample.grad_norm, e) * level_bracket(pt, params);
  });
  return (q - 1.0) * v_prefactor(params, level.t, q, C_p) * I;
}

double dV_boundary_floor(const Field& field, const LevelSet& level, double q, double C_p) {
  const Params& params = field.params();
  const double e = q * (params.p() - 1.0) - 1.0;
  const double I = surface_integral(level, [&](const LevelPoint& pt) {
    return std::pow(pt.sample.grad_norm, e) * pt.H_gap;
  });
  return std::abs(q - 1.0) * v_prefactor(params, level.t, q, C_p) * I;
}

double dV_boundary(const Field& field, double t, double q, double C_p) {
  return dV_boundary(field, extract_level(field, t), q, C_p);
}

double psi_parameter(const Params& params, double t) {
  const double n = params.n();
  const double p = params.p();
  return -((n - 2.0) * (p - 1.0) / (n - p)) * std::log(t);
}

double psi_from_V(const Params& params, double V, double q, double C_p) {
  const double n = params.n();
  const double p = params.p();
  const double k = (n - 2.0) * (p - 1.0) / (n - p);
  return V * std::pow(k, q * (p - 1.0)) * std::pow(C_p, -(n - 1.0) * (q - 1.0) / (n - p));
}

double psi_transform(const Field& field, double t, double q, double C_p) {
  return psi_from_V(field.params(), V_qp(field, t, q, C_p), q, C_p);
}

std::vector<double> default_tgrid(const Field& field, int count) {
  const LevelRange range = level_range(field);
  const double lo = 2.0 * range.t_min;
  const double hi = std::min(0.95, 0.999 * range.t_max);
  if (!(lo < hi) || count < 2) {
    throw RangeError("empty default t-grid: 2 t_min = " + format_double(lo) + " >= " + format_double(hi));
  }
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[i] = std::exp(std::log(hi) + (std::log(lo) - std::log(hi)) * i / (count - 1));
  }
  return grid;
}

std::vector<double> parse_tgrid(const Field& field, const std::string& spec) {
  if (spec.empty() || spec == "auto") return default_tgrid(field);
  if (spec.rfind("auto:", 0) == 0) return default_tgrid(field, static_cast<int>(parse_number(spec.substr(5))));
  std::vector<double> values;
  std::string body = spec.rfind("log:", 0) == 0 ? spec.substr(4) : spec;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find(',', start);
    if (end == std::string::npos) end = body.size();
    values.push_back(parse_number(body.substr(start, end - start)));
    start = end + 1;
  }
  std::vector<double> grid;
  if (spec.rfind("log:", 0) == 0) {
    if (values.size() != 3 || values[2] < 2 || !(values[0] > 0.0) || !(values[1] > 0.0)) {
      throw ConfigError("t-grid spec log:a,b,N needs 0 < a, b and N >= 2");
    }
    const double hi = std::max(values[0], values[1]);
    const double lo = std::min(values[0], values[1]);
    const int n = static_cast<int>(values[2]);
    for (int i = 0; i < n; ++i) grid.push_back(std::exp(std::log(hi) + (std::log(lo) - std::log(hi)) * i / (n - 1)));
  } else {
    grid = values;
    std::sort(grid.begin(), grid.end(), std::greater<>());
  }
  return grid;
}

namespace {

struct FdResult {
  double value = 0.0;
  double truncation = 0.0;
  double noise = 0.0;
};

// Fourth-order centered difference from steps d and 2d. The noise level of V
// comes from the five-point fourth difference (the residual of a cubic fit).
FdResult centered_difference(const std::function<double(double)>& V, double t, double d) {
  const double vm2 = V(t - 2.0 * d), vm1 = V(t - d), v0 = V(t), vp1 = V(t + d), vp2 = V(t + 2.0 * d);
  const double f1 = (vp1 - vm1) / (2.0 * d);
  const double f2 = (vp2 - vm2) / (4.0 * d);
  const double sigma = std::abs(vm2 - 4.0 * vm1 + 6.0 * v0 - 4.0 * vp1 + vp2) / std::sqrt(70.0);
  // 0.95 / d is the l2 norm of the stencil weights.
  return {(4.0 * f1 - f2) / 3.0, std::abs(f1 - f2) / 3.0, 3.0 * 0.95 * sigma / d};
}

// Fills the derivative comparison columns of a finite-q row.
void derivative_check(const Field& field, const Field* coarse, const LevelSet& level, double q, double C_p,
                      ProfileRow& row) {
  constexpr double kStep = 0.05;
  constexpr double kMinStep = 0.02;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double t = level.t;
  LevelRange range = level_range(field);
  if (coarse != nullptr) {
    const LevelRange rc = level_range(*coarse);
    range.t_min = std::max(range.t_min, rc.t_min);
    range.t_max = std::min(range.t_max, rc.t_max);
  }
  const double room = std::min(range.t_max - t, t - range.t_min) / 2.0;
  const double d = std::min(kStep * t, 0.999 * room);

  const double floor_h = dV_boundary_floor(field, level, q, C_p);
  row.dV_boundary_cmp = row.dV_boundary;
  row.dV_floor = floor_h;
  if (d < kMinStep * t) {
    row.dV_fd = row.dV_fd_cmp = nan;
    return;
  }
  auto V_fine = [&](double s) { return V_qp(field, s, q, C_p); };
  const FdResult fine = centered_difference(V_fine, t, d);
  row.dV_fd = fine.value;
  row.dV_fd_cmp = fine.value;
  // Quadrature noise of V amplified by the stencil.
  const double noise = 3.0 * row.quad_error / d;
  row.dV_floor += fine.truncation + fine.noise + noise;
  if (coarse == nullptr) return;

  // O(h^2) extrapolation on both sides; the floor gets the two-grid
  // convergence index (safety factor 3) of each instead of the curvature gap.
  auto V_coarse = [&](double s) { return V_qp(*coarse, s, q, C_p); };
  const FdResult rough = centered_difference(V_coarse, t, d);
  const double dVb_coarse = dV_boundary(*coarse, extract_level(*coarse, t), q, C_p);
  row.dV_boundary_cmp = row.dV_boundary + (row.dV_boundary - dVb_coarse) / 3.0;
  row.dV_fd_cmp = fine.value + (fine.value - rough.value) / 3.0;
  row.dV_floor = std::abs(row.dV_boundary - dVb_coarse) + std::abs(fine.value - rough.value) + fine.truncation +
                 rough.truncation + (4.0 * fine.noise + rough.noise) / 3.0 + noise;
}

}  // namespace

MonotoneProfile sweep(const Field& field, const QExponent& q, const std::vector<double>& tgrid, double C_p,
                      const Field* coarse, double monotone_rel) {
  require_solved(field);
  for (std::size_t i = 1; i < tgrid.size(); ++i) {
    if (!(tgrid[i] < tgrid[i - 1])) throw RangeError("t-grid must be strictly decreasing");
  }
  const Params& params = field.params();
  MonotoneProfile prof{params, q, 0.0, false, {}};
  prof.C_p = C_p;
  prof.lambda = in_lambda(params, q);
  const bool inf = q.is_infinite();
  const double qv = inf ? 0.0 : q.value();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double psi_inf_scale = (params.n() - 2.0) * (params.p() - 1.0) / (params.n() - params.p());

  const LevelSet boundary = extract_level(field, 1.0);
  prof.V_inf_at_one = V_inf(field, boundary).value;
  prof.V_at_one = inf ? prof.V_inf_at_one : V_qp(field, boundary, qv, C_p);

  double quad_max = 0.0;
  for (double t : tgrid) {
    const LevelSet level = extract_level(field, t);
    ProfileRow row;
    row.t = t;
    row.s = psi_parameter(params, t);
    row.V_inf = V_inf(field, level).value;
    row.boundary_layer = level.boundary_layer;
    if (inf) {
      row.V = row.V_inf;
      row.Psi = psi_inf_scale * row.V_inf;
      row.dV_boundary = row.dV_fd = nan;
      row.dV_boundary_cmp = row.dV_fd_cmp = nan;
    } else {
      const double e = qv * (params.p() - 1.0);
      row.V = V_qp(field, level, qv, C_p);
      row.Psi = psi_from_V(params, row.V, qv, C_p);
      row.dV_boundary = dV_boundary(field, level, qv, C_p);
      row.quad_error = v_prefactor(params, t, qv, C_p) *
                       surface_integral_error(level, [e](const LevelPoint& pt) { return std::pow(pt.sample.grad_norm, e); });
      derivative_check(field, coarse, level, qv, C_p, row);
    }
    quad_max = std::max(quad_max, row.quad_error);
    prof.rows.push_back(row);
  }

  const std::size_t m = prof.rows.size();
  prof.tolerance = std::max(monotone_rel * std::abs(prof.V_at_one), 3.0 * quad_max);
  prof.tolerance_inf = monotone_rel * std::abs(prof.V_inf_at_one);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    // Rows run towards smaller t; V(t_i) should not fall below V(t_{i+1}).
    const double step = prof.rows[i].V - prof.rows[i + 1].V;
    const double step_inf = prof.rows[i].V_inf - prof.rows[i + 1].V_inf;
    prof.max_increase = std::max(prof.max_increase, step);
    prof.max_increase_inf = std::max(prof.max_increase_inf, step_inf);
    const bool ok = step >= -prof.tolerance && step_inf >= -prof.tolerance_inf;
    prof.rows[i].monotone_ok = ok;
    if (step < -prof.tolerance) prof.monotone_ok = false;
    if (step_inf < -prof.tolerance_inf) prof.monotone_inf_ok = false;
  }
  return prof;
}

std::string profile_csv(const MonotoneProfile& profile) {
  CsvTable table({"t", "s", "V", "Psi", "V_inf", "dV_boundary", "dV_fd", "in_lambda", "monotone_ok"});
  for (const auto& row : profile.rows) {
    table.add_row({csv_cell(row.t), csv_cell(row.s), csv_cell(row.V), csv_cell(row.Psi), csv_cell(row.V_inf),
                   csv_cell(row.dV_boundary), csv_cell(row.dV_fd), csv_cell(profile.lambda),
                   csv_cell(row.monotone_ok)});
  }
  return table.str();
}

DerivativeAgreement derivative_agreement(const MonotoneProfile& profile, double rel_tol) {
  DerivativeAgreement out;
  for (const auto& row : profile.rows) {
    if (!std::isfinite(row.dV_fd_cmp) || !std::isfinite(row.dV_floor)) continue;
    if (std::abs(row.dV_fd_cmp) <= row.dV_floor) {
      ++out.below_floor;
      continue;
    }
    ++out.compared;
    const double rel = std::abs(row.dV_boundary_cmp - row.dV_fd_cmp) / std::abs(row.dV_fd_cmp);
    out.worst = std::max(out.worst, rel);
    if (rel <= rel_tol) ++out.agreeing;
  }
  return out;
}

BraceTerms brace_terms(const PointSample& s, const Params& params, double q) {
  const double n = params.n(), p = params.p();
  const HessianSplit h = split_hessian(s);
  BraceTerms b;
  b.traceless = h.traceless_T_sq;
  b.tangential = (q * (p - 1.0) - 1.0) * h.tangential_grad_sq;
  const double br = mean_curvature_pharmonic(s, params) - (n - 1.0) * (p - 1.0) / (n - p) * dlog_norm(s);
  b.bracket = (q - 1.0 - (n - p) / ((p - 1.0) * (n - 1.0))) * s.grad_norm * s.grad_norm * br * br;
  return b;
}

BraceSummary brace_summary(const Field& field, const std::vector<std::array<double, 2>>& points, double q,
                           double rel_tol) {
  require_solved(field);
  BraceSummary out;
  for (const auto& x : points) {
    const PointSample s = sample_at(field, x[0], x[1]);
    const BraceTerms b = brace_terms(s, field.params(), q);
    const double scale = split_hessian(s).hess_sq;
    ++out.count;
    if (b.nonnegative(rel_tol * scale)) ++out.nonnegative;
    out.worst = std::min({out.worst, b.traceless / scale, b.tangential / scale, b.bracket / scale});
  }
  return out;
}

}  // namespace pcap
