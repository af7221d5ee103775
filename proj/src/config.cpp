#include "qst/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "qst/error.hpp"

namespace qst {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::Config, msg); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) bad(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key + ": wrong type");
  }
}

void positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) bad(name + " must be a positive number");
}

std::vector<std::vector<double>> read_table(const json& j, const std::string& where) {
  std::vector<std::vector<double>> t;
  try {
    t = j.get<std::vector<std::vector<double>>>();
  } catch (const json::exception&) {
    bad(where + ": expected a list of numeric rows");
  }
  return t;
}

WeightFamily read_weights(const json& j) {
  only_keys(j, "weights", {"kind", "lambda", "p", "q", "table"});
  std::string kind = "power";
  PowerLaw law;
  read(j, "kind", "weights", kind);
  read(j, "lambda", "weights", law.lambda);
  read(j, "p", "weights", law.p);
  read(j, "q", "weights", law.q);
  if (kind == "power") {
    if (j.contains("table")) bad("weights.table requires weights.kind = \"table\"");
    return WeightFamily::power(law.lambda, law.p, law.q);
  }
  if (kind == "table") {
    if (!j.contains("table")) bad("weights.table missing");
    return WeightFamily::tabulated(read_table(j.at("table"), "weights.table"), law);
  }
  bad("weights.kind must be \"power\" or \"table\"");
}

CoefficientFamily read_coeffs(const json& j) {
  only_keys(j, "coeffs", {"kind", "t1", "t2", "kappa", "table"});
  std::string kind = "geometric_gap";
  GapLaw gap;
  double kappa = 2.0;
  read(j, "kind", "coeffs", kind);
  read(j, "t1", "coeffs", gap.t1);
  read(j, "t2", "coeffs", gap.t2);
  read(j, "kappa", "coeffs", kappa);
  if (kind == "unit") return CoefficientFamily::unit(kappa);
  if (kind == "geometric_gap") return CoefficientFamily::geometric_gap(gap.t1, gap.t2, kappa);
  if (kind == "table") {
    if (!j.contains("table")) bad("coeffs.table missing");
    const json& t = j.at("table");
    only_keys(t, "coeffs.table", {"c1", "c2"});
    if (!t.contains("c1") || !t.contains("c2")) bad("coeffs.table needs c1 and c2");
    return CoefficientFamily::tabulated(read_table(t.at("c1"), "coeffs.table.c1"),
                                        read_table(t.at("c2"), "coeffs.table.c2"), gap, kappa);
  }
  bad("coeffs.kind must be \"unit\", \"geometric_gap\" or \"table\"");
}

BoundaryRule read_boundary(const json& j) {
  only_keys(j, "boundary", {"rule", "custom"});
  BoundaryRule rule;
  std::string name = "default";
  read(j, "rule", "boundary", name);
  if (name == "default") {
    if (j.contains("custom")) bad("boundary.custom requires boundary.rule = \"custom\"");
    return rule;
  }
  if (name != "custom") bad("boundary.rule must be \"default\" or \"custom\"");
  rule.kind = BoundaryRule::Kind::Custom;
  if (!j.contains("custom") || !j.at("custom").is_array()) bad("boundary.custom must be a list");
  for (const json& e : j.at("custom")) {
    only_keys(e, "boundary.custom[]", {"m", "k1", "k2"});
    if (!e.contains("m") || !e.contains("k1") || !e.contains("k2"))
      bad("boundary.custom entries need m, k1, k2");
    int m = 0;
    Vec2 v;
    read(e, "m", "boundary.custom[]", m);
    read(e, "k1", "boundary.custom[]", v.x);
    read(e, "k2", "boundary.custom[]", v.y);
    if (!rule.custom.emplace(m, v).second) bad("boundary.custom lists m = " + std::to_string(m) + " twice");
  }
  return rule;
}

}  // namespace

std::vector<ModeIndex> ExperimentConfig::modes() const {
  std::vector<ModeIndex> out;
  for (int m : m_list)
    for (int n : n_list) out.push_back({m, n});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool ExperimentConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(root, "config", {"weights", "coeffs", "boundary", "grid", "truncation", "output"});

  ExperimentConfig cfg;
  if (root.contains("weights")) cfg.families.w = read_weights(root.at("weights"));
  if (root.contains("coeffs")) cfg.families.c = read_coeffs(root.at("coeffs"));
  if (root.contains("boundary")) cfg.rule = read_boundary(root.at("boundary"));

  if (root.contains("grid")) {
    const json& g = root.at("grid");
    only_keys(g, "grid", {"m_list", "n_list"});
    read(g, "m_list", "grid", cfg.m_list);
    read(g, "n_list", "grid", cfg.n_list);
  }
  if (cfg.m_list.empty() || cfg.n_list.empty()) bad("grid must be nonempty");
  for (int n : cfg.n_list)
    if (n < 0) bad("grid.n_list entries must be >= 0");

  if (root.contains("truncation")) {
    const json& t = root.at("truncation");
    only_keys(t, "truncation", {"k_max", "tol_prod", "tol_tail", "tol_residual", "lemma_slack"});
    Truncation& tr = cfg.truncation;
    read(t, "k_max", "truncation", tr.k_max);
    read(t, "tol_prod", "truncation", tr.tol_prod);
    read(t, "tol_tail", "truncation", tr.tol_tail);
    read(t, "tol_residual", "truncation", tr.tol_residual);
    read(t, "lemma_slack", "truncation", tr.lemma_slack);
  }
  const Truncation& tr = cfg.truncation;
  if (tr.k_max < 1) bad("truncation.k_max must be >= 1");
  positive(tr.tol_prod, "truncation.tol_prod");
  positive(tr.tol_tail, "truncation.tol_tail");
  positive(tr.tol_residual, "truncation.tol_residual");
  if (!(tr.lemma_slack >= 0.0)) bad("truncation.lemma_slack must be >= 0");

  if (root.contains("output")) {
    const json& o = root.at("output");
    only_keys(o, "output", {"dir", "formats"});
    read(o, "dir", "output", cfg.out_dir);
    read(o, "formats", "output", cfg.formats);
    for (const std::string& f : cfg.formats)
      if (f != "csv" && f != "json") bad("output.formats accepts \"csv\" and \"json\"");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string default_config_json() {
  const ExperimentConfig d;
  json j = {
      {"weights", {{"kind", "power"}, {"lambda", 1.0}, {"p", 1.0}, {"q", 2.0}}},
      {"coeffs", {{"kind", "geometric_gap"}, {"t1", 0.5}, {"t2", 0.5}, {"kappa", 2.0}}},
      {"boundary", {{"rule", "default"}}},
      {"grid", {{"m_list", d.m_list}, {"n_list", d.n_list}}},
      {"truncation",
       {{"k_max", d.truncation.k_max},
        {"tol_prod", d.truncation.tol_prod},
        {"tol_tail", d.truncation.tol_tail},
        {"tol_residual", d.truncation.tol_residual},
        {"lemma_slack", d.truncation.lemma_slack}}},
      {"output", {{"dir", d.out_dir}, {"formats", d.formats}}},
  };
  return j.dump(2);
}

}  // namespace qst
