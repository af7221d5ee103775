#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qst/solutions.hpp"

namespace qst {

struct Truncation {
  std::int64_t k_max = 128;
  double tol_prod = 1e-12;      // transfer tail extrapolation
  double tol_tail = 1e-12;      // s(n), J, epsilon series
  double tol_residual = 1e-9;   // solve acceptance
  double lemma_slack = 1e-14;
};

struct ExperimentConfig {
  Families families;
  BoundaryRule rule;
  std::vector<int> m_list = {0, 1, -1, 2, -2, 4, -4, 8, -8, 16, -16, 32, -32};
  std::vector<int> n_list = {0, 1, 2, 4, 8, 16};
  Truncation truncation;
  std::string out_dir = "qst-out";
  std::vector<std::string> formats = {"csv", "json"};

  std::vector<ModeIndex> modes() const;  // m_list x n_list, sorted
  bool wants(const std::string& format) const;
};

// Keys: weights.{kind, lambda, p, q, table}, coeffs.{kind, t1, t2, kappa,
// table.{c1, c2}}, boundary.{rule, custom[{m, k1, k2}]}, grid.{m_list,
// n_list}, truncation.{k_max, tol_prod, tol_tail, tol_residual,
// lemma_slack}, output.{dir, formats}. Missing keys keep their defaults,
// unknown keys are rejected with ErrorCode::Config.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

std::string default_config_json();

}  // namespace qst
