#include "pcap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include "json.hpp"
#include "pcap/capacity.hpp"
#include "pcap/conformal.hpp"
#include "pcap/error.hpp"
#include "pcap/inequalities.hpp"
#include "pcap/io.hpp"
#include "pcap/level_quantities.hpp"

namespace pcap {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

// Collects artifacts and timings; write() must be the last file written.
class Manifest {
 public:
  Manifest(const RunConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {
    std::filesystem::create_directories(cfg.out);
  }

  void text(const std::string& name, const std::string& content) {
    write_text_file(cfg_.out / name, content);
    files_.push_back(name);
  }
  void track(const std::string& name) { files_.push_back(name); }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

  void solver(const Field& field, const std::string& role) {
    const auto& d = field.diagnostics();
    solvers_[role] = json{{"nodes", field.mesh().node_count()},
                          {"h", field.mesh().h()},
                          {"r_far", field.mesh().r_far()},
                          {"stages", d.stages},
                          {"newton_iterations", d.newton_iterations},
                          {"picard_iterations", d.picard_iterations},
                          {"closure_passes", d.closure_passes},
                          {"eps", d.eps},
                          {"residual", d.residual},
                          {"closure_change", d.closure_change},
                          {"fit_residual", d.fit_residual}};
  }
  void time(const std::string& phase, Clock::time_point start) {
    timings_[phase] = std::chrono::duration<double>(Clock::now() - start).count();
  }
  void set(const std::string& key, json value) { extra_[key] = std::move(value); }

  void write() {
    json j{{"tool", "pcap"},
           {"version", tool_version()},
           {"command", command_},
           {"config", to_json(cfg_)},
           {"solver", solvers_},
           {"artifacts", files_},
           {"timings_s", timings_}};
    for (auto& [k, v] : extra_.items()) j[k] = v;
    write_text_file(cfg_.out / "manifest.json", j.dump(2) + "\n");
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  std::vector<std::string> files_;
  json solvers_ = json::object();
  json timings_ = json::object();
  json extra_ = json::object();
};

struct Fields {
  Field fine;
  std::optional<Field> coarse;
};

Fields fields_for(const RunConfig& cfg, Manifest& m) {
  auto start = Clock::now();
  Fields f{acquire_field(cfg), std::nullopt};
  m.time(cfg.field.empty() ? "solve" : "load", start);
  m.solver(f.fine, "field");
  if (cfg.companion) {
    start = Clock::now();
    f.coarse = companion_field(f.fine);
    m.time("companion", start);
    m.solver(*f.coarse, "companion");
  }
  return f;
}

std::string q_tag(const QExponent& q) { return q.is_infinite() ? "inf" : format_double(q.value()); }

// Runs job(i) for i in [0, count) on up to worker_count() threads; results
// land in index order, so the outputs do not depend on scheduling.
template <class T, class F>
std::vector<T> parallel_map(int count, F job) {
  std::vector<T> out;
  out.reserve(count);
  const int workers = std::min(worker_count(), std::max(count, 1));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) out.push_back(job(i));
    return out;
  }
  for (int begin = 0; begin < count; begin += workers) {
    std::vector<std::future<T>> batch;
    for (int i = begin; i < std::min(count, begin + workers); ++i) batch.push_back(std::async(std::launch::async, job, i));
    for (auto& fut : batch) out.push_back(fut.get());
  }
  return out;
}

}  // namespace

std::string tool_version() { return PCAP_VERSION; }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e)) return kExitConfig;
  if (dynamic_cast<const ArtifactError*>(&e) || dynamic_cast<const StateError*>(&e)) return kExitArtifact;
  return kExitFailure;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PCAP_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("PCAP_THREADS must be a positive integer, got '") + env + "'");
    }
    if (n < 1) throw ConfigError("PCAP_THREADS must be a positive integer");
  }
  return std::max(n, 1);
}

Field acquire_field(const RunConfig& cfg) {
  if (!cfg.field.empty()) return load_field(cfg.field);
  SolverOptions opts;
  opts.mesh = cfg.mesh;
  return solve(Body::parse(cfg.body), cfg.params(), opts);
}

Field companion_field(const Field& field) {
  require_solved(field);
  SolverOptions opts;
  opts.mesh = field.mesh().options();
  opts.mesh.target_h = 2.0 * field.mesh().h();
  return solve(field.body(), field.params(), opts);
}

int cmd_solve(const RunConfig& cfg) {
  Manifest m(cfg, "solve");
  auto start = Clock::now();
  const Field field = acquire_field(cfg);
  m.time("solve", start);
  m.solver(field, "field");
  save_field(field, cfg.out / "field.csv");
  m.track("field.csv");
  m.text("solver.json", json{{"energy_history", field.diagnostics().energy_history},
                             {"far_amplitude", field.far_amplitude()}}
                            .dump(2) + "\n");
  m.write();
  std::cout << "solved " << field.body().spec() << " p=" << format_double(field.params().p()) << " nodes "
            << field.mesh().node_count() << " residual " << field.diagnostics().residual << "\n";
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
  Manifest m(cfg, "sweep");
  const Fields f = fields_for(cfg, m);
  const double C_p = reference_capacity(capacity_consensus(f.fine));
  const auto tgrid = parse_tgrid(f.fine, cfg.tgrid);
  const Field* coarse = f.coarse ? &*f.coarse : nullptr;
  const auto start = Clock::now();
  const auto profiles = parallel_map<MonotoneProfile>(static_cast<int>(cfg.q.size()), [&](int i) {
    return sweep(f.fine, cfg.q[i], tgrid, C_p, coarse, cfg.monotone_rel);
  });
  m.time("sweep", start);
  int code = kExitOk;
  json summary = json::array();
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& prof = profiles[i];
    const std::string tag = q_tag(cfg.q[i]);
    if (cfg.wants("csv")) m.text("profile_q" + tag + ".csv", profile_csv(prof));
    const DerivativeAgreement agree = derivative_agreement(prof, cfg.derivative_rel);
    const bool asserted = prof.lambda;
    const bool ok = !asserted || (prof.monotone_ok && prof.monotone_inf_ok);
    if (!ok) code = kExitCheck;
    summary.push_back(json{{"q", tag},
                           {"lambda", prof.lambda},
                           {"monotone_ok", prof.monotone_ok},
                           {"monotone_inf_ok", prof.monotone_inf_ok},
                           {"tolerance", prof.tolerance},
                           {"max_increase", prof.max_increase},
                           {"max_increase_inf", prof.max_increase_inf},
                           {"derivative_compared", agree.compared},
                           {"derivative_agreeing", agree.agreeing},
                           {"derivative_worst", agree.worst}});
    std::cout << "q=" << tag << " lambda=" << (prof.lambda ? "true" : "false")
              << " monotone_ok=" << (prof.monotone_ok ? "true" : "false")
              << " monotone_inf_ok=" << (prof.monotone_inf_ok ? "true" : "false") << " derivative "
              << agree.agreeing << "/" << agree.compared << "\n";
  }
  if (cfg.wants("json")) m.json_file("sweep.json", json{{"capacity", C_p}, {"tgrid", tgrid}, {"profiles", summary}});
  m.write();
  return code;
}

int cmd_check(const RunConfig& cfg) {
  Manifest m(cfg, "check");
  const Fields f = fields_for(cfg, m);
  const auto start = Clock::now();
  const auto reports = run_all(f.fine, cfg.q, f.coarse ? &*f.coarse : nullptr);
  m.time("check", start);
  if (cfg.wants("json")) m.json_file("inequalities.json", to_json(reports));
  if (cfg.wants("csv")) m.text("inequalities.csv", reports_csv(reports));
  int failed = 0;
  for (const auto& r : reports) {
    if (r.kind == CheckKind::Theorem && !r.pass) ++failed;
  }
  m.set("theorem_failures", failed);
  m.write();
  std::cout << reports.size() << " checks, " << failed << " theorem-direction failures\n";
  return failed ? kExitCheck : kExitOk;
}

int cmd_identities(const RunConfig& cfg) {
  Manifest m(cfg, "identities");
  auto samples = radial_identity_grid();
  const auto perturbed = radial_perturbation_grid();
  int failed = 0;
  for (const auto& s : samples) failed += s.relative() >= 1e-10;
  for (const auto& s : perturbed) failed += s.relative() <= 1e-6;
  samples.insert(samples.end(), perturbed.begin(), perturbed.end());
  if (cfg.numeric && cfg.field.empty()) {
    std::cerr << "warning: numeric identities need --field; writing the analytic table only\n";
  } else if (!cfg.field.empty()) {
    const Field field = load_field(cfg.field);
    m.solver(field, "field");
    for (const auto& x : interior_points(field.body())) {
      IdentitySample s = kato_identity_residual(field.params(), sample_at(field, x[0], x[1]));
      s.name = "kato_field";
      samples.push_back(s);
    }
  }
  if (cfg.wants("csv")) m.text("identities.csv", identities_csv(samples));
  if (cfg.wants("json")) {
    json arr = json::array();
    for (const auto& s : samples) {
      arr.push_back(json{{"name", s.name}, {"n", s.n}, {"p", s.p}, {"r", s.r}, {"residual", s.residual},
                         {"scale", s.scale}, {"relative", s.relative()}});
    }
    m.json_file("identities.json", arr);
  }
  m.set("analytic_failures", failed);
  m.write();
  std::cout << samples.size() << " identity samples, " << failed << " analytic failures\n";
  return failed ? kExitCheck : kExitOk;
}

int cmd_capacity(const RunConfig& cfg) {
  Manifest m(cfg, "capacity");
  const Field field = [&] {
    const auto start = Clock::now();
    Field fl = acquire_field(cfg);
    m.time(cfg.field.empty() ? "solve" : "load", start);
    return fl;
  }();
  m.solver(field, "field");
  const CapacityEstimate est = capacity_consensus(field);
  m.json_file("capacity.json", to_json(est));
  m.write();
  std::cout << "capacity " << format_double(est.consensus) << " spread " << est.spread
            << (est.spread_warning || est.farfield_warning ? " (warning)" : "") << "\n";
  return kExitOk;
}

}  // namespace pcap
