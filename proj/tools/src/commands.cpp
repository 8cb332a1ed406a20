#include "commands.hpp"

#include <chrono>
#include <charconv>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <cbfed/diagnostics.hpp>
#include <cbfed/error.hpp>
#include <cbfed/law.hpp>
#include <cbfed/regularization.hpp>
#include <cbfed/solver.hpp>
#include <cbfed/spectral.hpp>

#include "config_loader.hpp"

#ifndef CBFED_VERSION
#define CBFED_VERSION "0.0.0"
#endif

namespace cbfed::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
    text_ += '\n';
  }
  void write(const fs::path& p) const { std::ofstream(p, std::ios::binary) << text_; }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  std::string text_;
};

struct Run {
  const LoadedConfig& cfg;
  fs::path dir;
  std::vector<std::string> files;
  std::vector<std::string> failed;
  std::ostream& log;

  fs::path path(const std::string& rel) {
    files.push_back(rel);
    const auto p = dir / rel;
    fs::create_directories(p.parent_path());
    return p;
  }
  void check(bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  }
  void report(const std::string& name, json body) {
    body["study"] = name;
    body["config_hash"] = cfg.hash;
    body["pass"] = failed.empty();
    std::ofstream(path("reports/" + name + ".json")) << body.dump(2) << '\n';
  }
};

void require_complete(const RunResult& res) {
  if (res.trajectory.blowup) {
    throw BlowUpError(res.trajectory.blowup->t, res.trajectory.blowup->norm_h);
  }
}

void cmd_simulate(Run& run) {
  const auto& sim = run.cfg.sim;
  const GalerkinSolver solver(sim);
  const auto res = solver.integrate();
  res.ledger.write_csv(run.path("ledger.csv"));
  Csv index({"step", "t", "file"});
  const auto stride = static_cast<std::size_t>(sim.snapshot_stride());
  for (std::size_t i = 0; i < res.trajectory.states.size(); ++i) {
    const double t = res.trajectory.times[i];
    const auto step = std::min<std::size_t>(i * stride, sim.steps());
    const std::string file = "snapshots/state_" + std::to_string(step) + ".json";
    write_snapshot(run.path(file), res.trajectory.states[i]);
    index.row(step, t, file);
  }
  index.write(run.path("snapshots/index.csv"));
  require_complete(res);

  const auto& y = res.trajectory.final_state;
  run.check(y.divergence_defect() <= 1e-10, "final state divergence-free");
  run.check(y.reality_defect() <= 1e-10, "final state real");
  bool nonneg = true;
  for (const auto& r : res.ledger.rows) {
    nonneg = nonneg && r.E_H2 >= 0.0 && r.E_V2 >= 0.0 && r.E_Lr >= 0.0 && r.E_Lq >= 0.0 &&
             r.chi_H2 >= 0.0 && r.E_L4 >= 0.0;
  }
  run.check(nonneg, "ledger norms non-negative");
  run.log << "simulate: " << res.ledger.rows.size() << " ledger rows, |y(T)|_H^2 = "
          << res.ledger.rows.back().E_H2 << '\n';
}

void cmd_law_inspect(Run& run) {
  const auto& sim = run.cfg.sim;
  json laws = json::array();
  for (std::size_t c = 0; c < sim.laws.size(); ++c) {
    const auto& law = sim.laws[c];
    const auto reg = mollify(law, sim.epsilon, sim.mollifier, 5.0);
    Csv csv({"xi", "theta", "theta_eps", "env_lower", "env_upper", "clarke_lower", "clarke_upper",
             "j"});
    for (int i = 0; i <= 1000; ++i) {
      const double xi = (i - 500) / 100.0;
      const auto env = envelopes(law, xi, sim.epsilon);
      const auto cl = clarke_interval(law, xi);
      csv.row(xi, law(xi), (*reg)(xi), env.lower, env.upper, cl.lower, cl.upper,
              potential_j(law, xi));
    }
    csv.write(run.path(sim.laws.size() == 1 ? "law_inspect.csv"
                                            : "law_inspect_" + std::to_string(c) + ".csv"));
    const auto h = verify_hypotheses(law);
    const auto& sc = reg->sign_constants();
    run.check(h.all_pass(), "hypotheses of law " + std::to_string(c));
    json k = nullptr;
    if (h.K_ok) k = *h.K_ok;
    laws.push_back({
        {"name", law.metadata().name},
        {"hypotheses",
         {{"bounded", h.bounded},
          {"sup_abs", h.sup_abs},
          {"growth", h.growth},
          {"growth_excess", h.growth_excess},
          {"sign_pattern", h.sign_pattern},
          {"sign_violation", h.sign_violation},
          {"K_hat", h.K_hat},
          {"K_ok", k}}},
        {"sign_constants", {{"c1", sc.c1}, {"c2", sc.c2}, {"c1_base", sc.c1_base}}},
        {"table", {{"half_width", reg->half_width()}, {"spacing", reg->spacing()}}},
    });
  }
  run.report("law-inspect", {{"tables", {{"laws", laws}}}});
}

json energy_tables(const EnergyBalanceReport& eb) {
  return {{"max_abs", eb.max_abs},
          {"relative", eb.relative},
          {"tolerance", eb.tolerance},
          {"initial_energy", eb.initial_energy},
          {"advisory", eb.advisory}};
}

void cmd_energy_report(Run& run) {
  const auto& sim = run.cfg.sim;
  const GalerkinSolver solver(sim);
  const auto res = solver.integrate();
  require_complete(res);
  const auto eb = energy_balance_residual(res.ledger, sim, run.cfg.study.energy_tolerance);
  const auto ap = apriori_margin(res.ledger, sim, solver.laws());
  const auto sel = selection_bound(res.ledger, sim);
  if (!eb.advisory) run.check(eb.pass, "energy balance");
  run.check(ap.pass, "a-priori bound");
  run.check(sel.pass, "selection bound");

  json sweep = json::array();
  for (double amp : run.cfg.study.forcing_sweep) {
    auto c = sim;
    c.forcing.amplitude = amp;
    if (c.forcing.kind == "zero") c.forcing.kind = sim.dim == 2 ? "taylor_green" : "kolmogorov";
    const GalerkinSolver s(c);
    const auto r = s.integrate();
    require_complete(r);
    const auto a = apriori_margin(r.ledger, c, s.laws());
    run.check(a.pass, "a-priori bound at forcing amplitude " + num(amp));
    sweep.push_back({{"amplitude", amp}, {"min_margin", a.min_margin}, {"tolerance", a.tolerance},
                     {"pass", a.pass}});
  }

  Csv csv({"t", "residual", "apriori_lhs", "apriori_rhs", "apriori_margin"});
  for (std::size_t i = 0; i < eb.t.size(); ++i) {
    csv.row(eb.t[i], eb.residual[i], ap.lhs[i], ap.rhs[i], ap.margin[i]);
  }
  csv.write(run.path("reports/energy-report.csv"));
  res.ledger.write_csv(run.path("ledger.csv"));
  run.log << "energy-report: residual " << eb.relative << " of |y0|^2, a-priori margin "
          << ap.min_margin << '\n';
  run.report("energy-report",
             {{"flags",
               {{"energy_balance", eb.pass},
                {"advisory", eb.advisory},
                {"apriori", ap.pass},
                {"selection", sel.pass}}},
              {"tables",
               {{"energy_balance", energy_tables(eb)},
                {"apriori",
                 {{"kappa", ap.kappa},
                  {"kappa_term", ap.kappa_term},
                  {"sign_term", ap.sign_term},
                  {"min_margin", ap.min_margin},
                  {"tolerance", ap.tolerance},
                  {"sweep", sweep}}},
                {"selection", {{"lhs", sel.lhs}, {"rhs", sel.rhs}}}}},
              {"csv", {"reports/energy-report.csv"}}});
}

void cmd_hvi_check(Run& run) {
  const GalerkinSolver solver(run.cfg.sim);
  const auto rep = hvi_check(solver, run.cfg.study.hvi_samples);
  run.check(rep.pass, "hvi margin >= -gap");
  Csv csv({"t", "field", "margin", "gap", "env_gap", "time_error", "pass"});
  for (const auto& r : rep.rows) csv.row(r.t, r.field, r.margin, r.gap, r.env_gap, r.time_error, r.pass);
  csv.write(run.path("reports/hvi-check.csv"));
  run.log << "hvi-check: " << rep.rows.size() << " samples, " << rep.violations
          << " violations, worst margin " << rep.worst_margin << '\n';
  run.report("hvi-check", {{"flags", {{"margin", rep.pass}}},
                           {"tables",
                            {{"worst_margin", rep.worst_margin},
                             {"max_gap", rep.max_gap},
                             {"max_env_gap", rep.max_env_gap},
                             {"max_time_error", rep.max_time_error},
                             {"violations", rep.violations},
                             {"samples", rep.rows.size()}}},
                           {"csv", {"reports/hvi-check.csv"}}});
}

json contraction_json(const ContractionReport& r) {
  return {{"delta", r.delta},
          {"pass", r.pass},
          {"identical", r.identical},
          {"max_ratio", r.max_ratio},
          {"w_T", r.w.back()},
          {"log_envelope_T", r.log_envelope.back()}};
}

void cmd_uniqueness(Run& run) {
  const auto& sim = run.cfg.sim;
  const auto c = gronwall_constants(sim);
  const auto pert = contraction_study(sim, run.cfg.study.uniqueness_delta);
  const auto same = contraction_study(sim, 0.0);
  run.check(pert.pass, "w <= Gronwall envelope");
  run.check(same.pass && same.identical, "delta = 0 reproduces the run");
  Csv csv({"t", "w", "log_envelope"});
  for (std::size_t i = 0; i < pert.t.size(); ++i) csv.row(pert.t[i], pert.w[i], pert.log_envelope[i]);
  csv.write(run.path("reports/uniqueness.csv"));
  run.log << "uniqueness: regime " << to_string(c.regime) << ", rate " << c.rate()
          << ", max w/envelope " << pert.max_ratio << '\n';
  run.report("uniqueness",
             {{"flags", {{"envelope", pert.pass}, {"zero_delta_identical", same.identical}}},
              {"tables",
               {{"constants",
                 {{"regime", to_string(c.regime)},
                  {"varrho", c.varrho},
                  {"K", c.K},
                  {"linear_alpha", c.linear_alpha},
                  {"l4_coefficient", c.l4_coefficient},
                  {"rate", c.rate()},
                  {"duplicated_varrho", c.duplicated_varrho}}},
                {"runs", {contraction_json(pert), contraction_json(same)}}}},
              {"csv", {"reports/uniqueness.csv"}}});
}

void cmd_converge(Run& run, int threads) {
  const auto rep = convergence_study(run.cfg.sim, run.cfg.study.ladders, threads);
  run.check(rep.pass, "Cauchy trend");
  json tables = json::array();
  Csv csv({"parameter", "from", "to", "distance"});
  for (const auto& t : rep.tables) {
    json rate = nullptr;
    if (t.rate) rate = *t.rate;
    tables.push_back({{"parameter", t.parameter},
                      {"values", t.values},
                      {"distances", t.distances},
                      {"cauchy_trend", t.cauchy_trend},
                      {"rate", rate}});
    for (std::size_t i = 0; i < t.distances.size(); ++i) {
      csv.row(t.parameter, t.values[i], t.values[i + 1], t.distances[i]);
    }
  }
  csv.write(run.path("reports/converge.csv"));
  run.log << "converge: " << rep.tables.size() << " ladders\n";
  run.report("converge", {{"flags", {{"cauchy_trend", rep.pass}}},
                          {"tables", {{"ladders", tables}, {"sample_times", rep.sample_times.size()}}},
                          {"csv", {"reports/converge.csv"}}});
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

json failure(int code, const std::string& kind, const std::string& message, const Options& opts,
             const std::string& hash) {
  json f{{"status", code}, {"kind", kind}, {"message", message}, {"command", opts.command}};
  f["config_hash"] = hash.empty() ? json(nullptr) : json(hash);
  return f;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate",   "law-inspect", "energy-report",
                                              "hvi-check",  "uniqueness",  "converge"};
  return names;
}

int execute(const Options& opts, std::ostream& log, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  fs::path fail_dir = opts.out;
  std::string hash;
  json fail;
  int code = kPass;
  try {
    if (std::find(command_names().begin(), command_names().end(), opts.command) ==
        command_names().end()) {
      throw ConfigError("unknown command '" + opts.command + "'");
    }
    const auto cfg = load_config(opts.config, opts.overrides);
    hash = cfg.hash;
    for (const auto& w : command_warnings(cfg, opts.command)) err << "warning: " << w << '\n';
    Run run{cfg, opts.out / cfg.hash, {}, {}, log};
    fs::create_directories(run.dir);
    fail_dir = run.dir;
    fs::remove(run.dir / "failure.json");
    std::ofstream(run.path("config.toml")) << write_config_toml(cfg, run.dir);
    auto write_manifest = [&] {
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      auto files = run.files;
      files.push_back("manifest.json");
      json m{{"config_hash", cfg.hash},
             {"command", opts.command},
             {"config", cfg.resolved},
             {"tool_version", CBFED_VERSION},
             {"started_utc", utc_now()},
             {"wall_clock_seconds", wall},
             {"files", files},
             {"rerun", "cbfed " + opts.command + " --config config.toml"}};
      std::ofstream(run.dir / "manifest.json") << m.dump(2) << '\n';
    };
    try {
      if (opts.command == "simulate") cmd_simulate(run);
      if (opts.command == "law-inspect") cmd_law_inspect(run);
      if (opts.command == "energy-report") cmd_energy_report(run);
      if (opts.command == "hvi-check") cmd_hvi_check(run);
      if (opts.command == "uniqueness") cmd_uniqueness(run);
      if (opts.command == "converge") cmd_converge(run, opts.threads);
    } catch (...) {
      write_manifest();
      throw;
    }
    write_manifest();
    log << "run directory: " << run.dir.string() << '\n';
    if (!run.failed.empty()) {
      code = kInvariantFailure;
      fail = failure(code, "invariant_failure", "contracted invariants failed", opts, hash);
      fail["failed_checks"] = run.failed;
    }
  } catch (const BlowUpError& e) {
    code = kBlowUp;
    fail = failure(code, "blow_up", e.what(), opts, hash);
    fail["t"] = e.time();
    fail["norm_h"] = e.norm_h();
  } catch (const RegimeError& e) {
    code = kConfigError;
    fail = failure(code, "regime_error", e.what(), opts, hash);
  } catch (const ConfigError& e) {
    code = kConfigError;
    fail = failure(code, "config_error", e.what(), opts, hash);
  } catch (const LawError& e) {
    code = kConfigError;
    fail = failure(code, "law_error", e.what(), opts, hash);
  } catch (const ResolutionError& e) {
    code = kConfigError;
    fail = failure(code, "resolution_error", e.what(), opts, hash);
  } catch (const Error& e) {
    code = kInvariantFailure;
    fail = failure(code, "numerical_error", e.what(), opts, hash);
  } catch (const std::exception& e) {
    code = kInternal;
    fail = failure(code, "internal_error", e.what(), opts, hash);
  }
  if (code != kPass) {
    std::error_code ec;
    fs::create_directories(fail_dir, ec);
    std::ofstream(fail_dir / "failure.json") << fail.dump(2) << '\n';
    err << fail.dump() << '\n';
  }
  return code;
}

}  // namespace cbfed::cli
