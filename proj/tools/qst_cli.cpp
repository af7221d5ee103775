// Command-line driver over the C API.
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qst/qst.h"

namespace {

constexpr int kUsage = 2;

std::vector<int> parse_modes(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int m = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument(item);
    out.push_back(m);
  }
  if (out.empty()) throw std::invalid_argument(text);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode-by-mode solver and diagnostics for the quantum solid torus Dirac operator"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", qst_version());

  std::string config, out, modes, rhs;
  std::optional<long long> kmax;
  unsigned long long seed = 1;
  bool print_json = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment config (JSON)");
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "seed for right-hand side fixtures");
    sub->add_option("--modes", modes, "comma-separated m values (overrides grid.m_list)");
    sub->add_option("--kmax", kmax, "truncation index (overrides truncation.k_max)");
    sub->add_flag("--json", print_json, "print the report JSON on stdout");
  };
  CLI::App* validate = app.add_subcommand("validate", "check the weight, coefficient and boundary hypotheses");
  CLI::App* solve = app.add_subcommand("solve", "apply the parametrix to each mode and compare with the direct solve");
  CLI::App* scan = app.add_subcommand("scan", "Hilbert-Schmidt tables, decay envelopes and the I/K inequality suite");
  CLI::App* dump = app.add_subcommand("dump", "per-mode transfer and kernel tables");
  for (CLI::App* s : {validate, solve, scan, dump}) common(s);
  solve->add_option("--rhs", rhs, "right-hand sides (JSON list of {m, n, r1, r2, q0})");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  nlohmann::json opts = {{"seed", seed}};
  if (!config.empty()) opts["config"] = config;
  if (!out.empty()) opts["out"] = out;
  if (kmax) opts["kmax"] = *kmax;
  if (!rhs.empty()) opts["rhs"] = rhs;
  if (!modes.empty()) {
    try {
      opts["modes"] = parse_modes(modes);
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --modes expects integers separated by commas, got '%s'\n", modes.c_str());
      return kUsage;
    }
  }

  const std::string command = app.get_subcommands().front()->get_name();
  int exit_code = kUsage;
  char* report = nullptr;
  const qst_status st = qst_command(command.c_str(), opts.dump().c_str(), &exit_code, &report);
  if (st != QST_OK) {
    std::fprintf(stderr, "error: %s\n", qst_last_error());
    return kUsage;
  }
  const nlohmann::json rep = nlohmann::json::parse(report);
  qst_string_free(report);

  if (print_json) std::printf("%s\n", rep.dump(2).c_str());
  for (const auto& f : rep.value("files", nlohmann::json::array()))
    std::fprintf(stderr, "wrote %s\n", f.get<std::string>().c_str());
  if (rep.contains("message"))
    std::fprintf(stderr, "%s: %s\n", exit_code == 0 ? "note" : "error",
                 rep["message"].get<std::string>().c_str());
  std::fprintf(stderr, "%s: %s\n", command.c_str(), exit_code == 0 ? "ok" : "failed");
  return exit_code;
}
