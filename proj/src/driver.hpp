#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qst {

struct CommandOptions {
  std::string config_path;  // empty: built-in defaults
  std::optional<std::string> out_dir;
  std::uint64_t seed = 1;
  std::vector<int> m_override;
  std::optional<std::int64_t> k_max;
  std::string rhs_path;  // solve only; empty: seeded fixture
  bool write_files = true;
};

// Exit codes: 0 success, 1 mathematical violation, 2 usage/config error.
struct CommandOutcome {
  int exit_code = 0;
  nlohmann::json report;
  std::string message;
  std::vector<std::string> files;
};

struct HsReport;
nlohmann::json hs_json(const HsReport& r);

CommandOptions options_from_json(const nlohmann::json& j);

CommandOutcome cmd_validate(const CommandOptions& opts);
CommandOutcome cmd_solve(const CommandOptions& opts);
CommandOutcome cmd_scan(const CommandOptions& opts);
CommandOutcome cmd_dump(const CommandOptions& opts);

CommandOutcome run_command(const std::string& name, const CommandOptions& opts);

}  // namespace qst
