#include "driver.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qst/analysis.hpp"
#include "qst/config.hpp"
#include "qst/error.hpp"
#include "qst/parametrix.hpp"

namespace qst {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

// Only generated_at varies between runs with identical inputs.
json header(const std::string& command, const CommandOptions& opts) {
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return {{"tool", "qst"},
          {"version", kVersion},
          {"command", command},
          {"config", opts.config_path.empty() ? "<defaults>" : opts.config_path},
          {"seed", opts.seed},
          {"generated_at", stamp}};
}

ExperimentConfig resolve(const CommandOptions& opts) {
  ExperimentConfig cfg = opts.config_path.empty() ? ExperimentConfig{} : load_config(opts.config_path);
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  if (!opts.m_override.empty()) cfg.m_list = opts.m_override;
  if (opts.k_max) {
    if (*opts.k_max < 1) fail(ErrorCode::Argument, "--kmax must be >= 1");
    cfg.truncation.k_max = *opts.k_max;
  }
  return cfg;
}

SolveOptions solve_options(const ExperimentConfig& cfg) {
  SolveOptions s;
  s.tail.tol = cfg.truncation.tol_prod;
  return s;
}

std::string write_file(const ExperimentConfig& cfg, const std::string& name,
                       const std::string& body) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  const fs::path path = fs::path(cfg.out_dir) / name;
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << body;
  return path.string();
}

void emit_json(CommandOutcome& o, const ExperimentConfig& cfg, const CommandOptions& opts,
               const std::string& name) {
  if (opts.write_files && cfg.wants("json")) o.files.push_back(write_file(cfg, name, o.report.dump(2) + "\n"));
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config:
    case ErrorCode::Io:
    case ErrorCode::Argument:
      return 2;
    default:
      return 1;
  }
}

json check_json(const HypothesisCheck& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"witness", c.witness}};
}

// Seeded rhs of length k_max for one mode; the stream depends only on
// (seed, m, n).
RhsPair fixture(ModeIndex mode, std::int64_t len, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(mode.m), static_cast<std::uint32_t>(mode.n)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> r1(len), r2(len);
  for (auto& v : r1) v = u(rng);
  for (auto& v : r2) v = u(rng);
  return make_rhs(mode, std::move(r1), std::move(r2), u(rng));
}

std::vector<std::pair<ModeIndex, RhsPair>> read_rhs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read rhs file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("rhs file is not valid JSON: ") + e.what());
  }
  const json& list = j.is_object() && j.contains("modes") ? j.at("modes") : j;
  if (!list.is_array()) fail(ErrorCode::Config, "rhs file: expected a list of modes");
  std::vector<std::pair<ModeIndex, RhsPair>> out;
  for (const json& e : list) {
    try {
      const ModeIndex mode{e.at("m").get<int>(), e.at("n").get<int>()};
      if (mode.n < 0) fail(ErrorCode::Config, "rhs file: n must be >= 0");
      auto r1 = e.at("r1").get<std::vector<double>>();
      auto r2 = e.at("r2").get<std::vector<double>>();
      const double q0 = e.value("q0", 0.0);
      if (r1.size() != r2.size()) fail(ErrorCode::Config, "rhs file: r1 and r2 lengths differ at mode " + to_string(mode));
      out.emplace_back(mode, make_rhs(mode, std::move(r1), std::move(r2), q0));
    } catch (const json::exception& ex) {
      fail(ErrorCode::Config, std::string("rhs file: malformed entry: ") + ex.what());
    }
  }
  return out;
}

std::string annotate(const ModeIndex& mode, const std::string& msg) {
  const std::string tag = "mode " + to_string(mode);
  return msg.rfind(tag, 0) == 0 ? msg : tag + ": " + msg;
}

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

}  // namespace

json hs_json(const HsReport& r) {
  const std::vector<std::string> head = hs_csv_header();
  const std::vector<std::string> cells = hs_csv_row(r);
  json row = json::object();
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (cells[i].empty()) continue;
    if (head[i].rfind("pass_", 0) == 0) row[head[i]] = cells[i] == "1";
    else row[head[i]] = std::stod(cells[i]);
  }
  row["m"] = r.mode.m;
  row["n"] = r.mode.n;
  row["k_max"] = r.k_max;
  json fub = json::array();
  for (const FubiniPair& f : r.fubini)
    fub.push_back({{"pair", f.name}, {"x", f.x}, {"y", f.y}, {"rel_diff", f.rel_diff},
                   {"diagonal", f.diagonal}, {"corrected_rel_diff", f.corrected_rel_diff}});
  row["fubini"] = fub;
  return row;
}

CommandOptions options_from_json(const json& j) {
  CommandOptions o;
  if (j.is_null()) return o;
  if (!j.is_object()) fail(ErrorCode::Argument, "options must be a JSON object");
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "config") o.config_path = v.get<std::string>();
      else if (k == "out") o.out_dir = v.get<std::string>();
      else if (k == "seed") o.seed = v.get<std::uint64_t>();
      else if (k == "modes") o.m_override = v.get<std::vector<int>>();
      else if (k == "kmax") o.k_max = v.get<std::int64_t>();
      else if (k == "rhs") o.rhs_path = v.get<std::string>();
      else if (k == "write_files") o.write_files = v.get<bool>();
      else fail(ErrorCode::Argument, "unknown option '" + k + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Argument, std::string("bad option value: ") + e.what());
  }
  return o;
}

CommandOutcome cmd_validate(const CommandOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  CommandOutcome o;
  json checks = json::array();
  bool ok = true;
  ProbeGrid probe;
  probe.n_max = std::max(probe.n_max, *std::max_element(cfg.n_list.begin(), cfg.n_list.end()) + 1);
  probe.k_max = std::max(probe.k_max, cfg.truncation.k_max);
  for (const HypothesisCheck& c : validate_hypotheses(cfg.families.w, cfg.families.c, probe).checks) {
    checks.push_back(check_json(c));
    ok = ok && c.passed;
  }
  for (const HypothesisCheck& c : validate_boundary_rule(cfg.rule, cfg.m_list)) {
    checks.push_back(check_json(c));
    ok = ok && c.passed;
  }
  o.report = {{"header", header("validate", opts)}, {"checks", checks}, {"passed", ok}};
  o.exit_code = ok ? 0 : 1;
  if (!ok)
    for (const json& c : checks)
      if (!c["passed"].get<bool>()) {
        o.message = c["name"].get<std::string>() + ": " + c["witness"].get<std::string>();
        break;
      }
  emit_json(o, cfg, opts, "validate.json");
  return o;
}

CommandOutcome cmd_solve(const CommandOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  const std::int64_t K = cfg.truncation.k_max;
  const double tol = cfg.truncation.tol_residual;
  std::vector<std::pair<ModeIndex, RhsPair>> work;
  if (!opts.rhs_path.empty()) {
    work = read_rhs_file(opts.rhs_path);
  } else {
    for (const ModeIndex& mode : cfg.modes()) work.emplace_back(mode, fixture(mode, K, opts.seed));
  }

  CommandOutcome o;
  json modes = json::array();
  json failures = json::array();
  double worst = 0.0;
  for (const auto& [mode, r] : work) {
    json rec = {{"m", mode.m}, {"n", mode.n}};
    try {
      const std::int64_t len = static_cast<std::int64_t>(r.r1.values.size());
      if (len > K)
        fail(ErrorCode::Range, "rhs length " + std::to_string(len) + " exceeds k_max " + std::to_string(K));
      const KernelSolution sol = solve_kernel(mode, cfg.families, K, cfg.rule, solve_options(cfg));
      // Shorter right-hand sides are zero-extended to the full truncation.
      RhsPair padded = r;
      padded.r1.values.resize(K, 0.0);
      padded.r2.values.resize(K, 0.0);
      const ParametrixResult q = apply_Q(sol, cfg.families, padded);
      const WeightFamily& w = cfg.families.w;
      const RhsPair back = apply_A(mode, cfg.families, q.h);
      const double rn = norm(padded, w);
      const double residual = relative(norm(back - padded, w), rn);

      const BoundaryData bd = choose_K_infinity(mode, cfg.rule);
      const OracleResult ora = oracle_solve(mode, cfg.families, padded, bd, sol.tail);
      const double hn = norm(ora.h, w);
      const double oracle_diff = relative(norm(q.h - ora.h, w), hn);
      const double bres = relative(q.boundary_residual,
                                   norm2(q.h_inf) * norm2(sol.K_inf));

      rec["status"] = "ok";
      rec["tau"] = sol.tau;
      rec["beta"] = q.beta;
      rec["residual_right_inverse"] = residual;
      rec["residual_oracle"] = oracle_diff;
      rec["boundary_residual"] = bres;
      rec["g"] = q.h.g.values;
      rec["f"] = q.h.f.values;
      worst = std::max({worst, residual, oracle_diff, bres});
      if (!(residual <= tol && oracle_diff <= tol && bres <= tol)) {
        std::ostringstream os;
        os << "mode " << to_string(mode) << ": residuals above tol_residual " << tol
           << " (right-inverse " << residual << ", oracle " << oracle_diff << ", boundary "
           << bres << ")";
        rec["status"] = "violation";
        failures.push_back(os.str());
      }
    } catch (const Error& e) {
      const std::string msg = annotate(mode, e.what());
      rec["status"] = "error";
      rec["error"] = msg;
      failures.push_back(msg);
    }
    modes.push_back(std::move(rec));
  }
  o.report = {{"header", header("solve", opts)},
              {"k_max", K},
              {"tol_residual", tol},
              {"source", opts.rhs_path.empty() ? "fixture" : opts.rhs_path},
              {"worst_residual", worst},
              {"failures", failures},
              {"modes", modes}};
  o.exit_code = failures.empty() ? 0 : 1;
  if (!failures.empty()) o.message = failures.front().get<std::string>();
  emit_json(o, cfg, opts, "solve.json");
  return o;
}

CommandOutcome cmd_scan(const CommandOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  ScanOptions so;
  so.k_max = cfg.truncation.k_max;
  so.rule = cfg.rule;
  so.solve = solve_options(cfg);
  const DecayTable table = decay_scan(cfg.modes(), cfg.families, so);

  CommandOutcome o;
  json rows = json::array();
  std::vector<std::string> findings;
  for (const HsReport& r : table.rows) {
    rows.push_back(hs_json(r));
    if (!r.bounds_pass()) findings.push_back("mode " + to_string(r.mode) + ": HS bound exceeded");
  }

  json lemma = json::array();
  std::int64_t violations = 0;
  for (const ModeIndex& mode : cfg.modes()) {
    if (mode.m == 0) continue;
    const KernelSolution sol = solve_kernel(mode, cfg.families, cfg.truncation.k_max, cfg.rule, so.solve);
    const LemmaReport rep = verify_lemma_suite(sol, cfg.families, cfg.truncation.lemma_slack);
    violations += rep.total_violations();
    json clauses = json::array();
    for (const ClauseResult& c : rep.clauses) {
      json cj = {{"name", c.name}, {"checked", c.checked}, {"violations", c.violations},
                 {"worst_margin", c.worst_margin}};
      if (c.violations > 0) {
        cj["first_violation_k"] = c.first_violation_k;
        cj["counterexample"] = c.counterexample;
        findings.push_back("mode " + to_string(mode) + ": " + c.name + " at k = " +
                           std::to_string(c.first_violation_k) + ": " + c.counterexample);
      }
      clauses.push_back(std::move(cj));
    }
    lemma.push_back({{"m", mode.m}, {"n", mode.n}, {"violations", rep.total_violations()},
                     {"clauses", clauses}});
  }

  auto env = [](const Envelope& e) {
    return json{{"keys", e.keys}, {"values", e.values}, {"nonincreasing", e.nonincreasing}};
  };
  o.report = {{"header", header("scan", opts)},
              {"k_max", cfg.truncation.k_max},
              {"proxy_definition", "sqrt(sum of squared kernel HS norms) / |tau|; m = 0: sqrt(hs_Z^2 + hs_W^2)"},
              {"rows", rows},
              {"envelope_along_m", env(table.along_m)},
              {"envelope_along_n", env(table.along_n)},
              {"lemma_suite", {{"slack", cfg.truncation.lemma_slack},
                               {"total_violations", violations},
                               {"modes", lemma}}},
              {"findings", findings}};
  o.exit_code = findings.empty() ? 0 : 1;
  if (!findings.empty()) o.message = findings.front();
  if (opts.write_files && cfg.wants("csv")) {
    std::ostringstream csv;
    write_csv(csv, table);
    o.files.push_back(write_file(cfg, "hs_table.csv", csv.str()));
  }
  emit_json(o, cfg, opts, "scan.json");
  return o;
}

CommandOutcome cmd_dump(const CommandOptions& opts) {
  const ExperimentConfig cfg = resolve(opts);
  CommandOutcome o;
  json modes = json::array();
  for (const ModeIndex& mode : cfg.modes()) {
    const SolveOptions so = solve_options(cfg);
    const TransferProduct tp = limit_product(mode, cfg.families, cfg.truncation.k_max, so.tail);
    const KernelSolution sol = solve_kernel(mode, cfg.families, cfg.truncation.k_max, cfg.rule, so);
    const std::vector<double> wr = wronskian_residuals(sol);
    json transfer = json::array();
    for (std::int64_t k = 0; k < cfg.truncation.k_max; ++k) {
      const Mat2& C = tp.factors[k];
      const Mat2& P = tp.partials[k];
      transfer.push_back({{"k", k}, {"C", {C.a, C.b, C.c, C.d}}, {"P", {P.a, P.b, P.c, P.d}}});
    }
    json solution = json::array();
    for (std::int64_t k = 0; k <= sol.k_max; ++k)
      solution.push_back({{"k", k},
                          {"I1", sol.I[k].x},
                          {"I2", sol.I[k].y},
                          {"K1", sol.K[k].x},
                          {"K2", sol.K[k].y},
                          {"wronskian_residual", wr[k]}});
    const Mat2& L = tp.limit;
    const Mat2& T = tp.tail;
    json entry = {{"m", mode.m},
                  {"n", mode.n},
                  {"limit", {L.a, L.b, L.c, L.d}},
                  {"tail", {T.a, T.b, T.c, T.d}},
                  {"limit_rel_error", tp.limit_rel_error},
                  {"tau", sol.tau},
                  {"epsilon", sol.epsilon.value},
                  {"transfer", transfer},
                  {"solution", solution}};
    if (opts.write_files && cfg.wants("json")) {
      json doc = {{"header", header("dump", opts)}, {"mode", entry}};
      o.files.push_back(write_file(cfg, "dump_" + std::to_string(mode.m) + "_" +
                                            std::to_string(mode.n) + ".json",
                                   doc.dump(2) + "\n"));
    }
    modes.push_back(std::move(entry));
  }
  o.report = {{"header", header("dump", opts)}, {"modes", modes}};
  return o;
}

CommandOutcome run_command(const std::string& name, const CommandOptions& opts) {
  try {
    if (name == "validate") return cmd_validate(opts);
    if (name == "solve") return cmd_solve(opts);
    if (name == "scan") return cmd_scan(opts);
    if (name == "dump") return cmd_dump(opts);
    fail(ErrorCode::Argument, "unknown command '" + name + "'");
  } catch (const Error& e) {
    CommandOutcome o;
    o.exit_code = exit_code_for(e.code());
    o.message = e.what();
    o.report = {{"header", header(name, opts)},
                {"error", {{"code", to_string(e.code())}, {"message", e.what()}}}};
    return o;
  } catch (const std::exception& e) {
    CommandOutcome o;
    o.exit_code = 1;
    o.message = e.what();
    o.report = {{"header", header(name, opts)},
                {"error", {{"code", "internal"}, {"message", e.what()}}}};
    return o;
  }
}

}  // namespace qst
