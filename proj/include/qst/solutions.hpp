#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qst/transfer.hpp"

namespace qst {

// Rule producing K(inf) per mode. The default is (sgn(m)/(1+m^2), 1).
struct BoundaryRule {
  enum class Kind { Default, Custom };
  Kind kind = Kind::Default;
  std::map<int, Vec2> custom;  // keyed by m, shared by every level n

  std::string describe() const;
};

struct BoundaryData {
  Vec2 k_inf;
  std::string rule;
};

// Throws ErrorCode::BoundaryRule naming the violated sign condition.
void check_sign_conditions(ModeIndex mode, const Vec2& k_inf);

BoundaryData choose_K_infinity(ModeIndex mode, const BoundaryRule& rule = {});

// Sign conditions for every listed m plus the decay condition: the ratio
// |K1(inf)/K2(inf)| must be nonincreasing in |m|.
std::vector<HypothesisCheck> validate_boundary_rule(const BoundaryRule& rule,
                                                    const std::vector<int>& m_values);

struct KernelSolution {
  ModeIndex mode;
  std::int64_t k_max = 0;
  std::vector<Vec2> I;  // k = 0..k_max
  std::vector<Vec2> K;
  Vec2 I_inf, K_inf;
  double tau = 0.0;
  SeriesValue epsilon;
  std::vector<double> det_ratio;  // prod_{i<k} c2(i)/c1(i), k = 0..k_max
  Mat2 tail;                      // prod_{i >= k_max} C(i)
  double limit_error = 0.0;       // transfer extrapolation estimate
  double tail_sum_bound = 0.0;    // sum_{k >= k_max} ||C(k) - I||_1
  double K_tail_error = 0.0;      // induced error on K(k_max)
};

std::vector<Vec2> compute_I(ModeIndex mode, const Families& fam, std::int64_t k_max);
// Backward recursion from K(k_max) = tail^{-1} K(inf).
std::vector<Vec2> compute_K(const TransferProduct& tp, const Families& fam,
                            const BoundaryData& bd, double tol = 1e-12);
double tau(const KernelSolution& sol);
SeriesValue epsilon(ModeIndex mode, const Families& fam, double tol = 1e-12);

struct SolveOptions {
  TailOptions tail;
  double tau_floor = 1e-300;
};

KernelSolution solve_kernel(ModeIndex mode, const Families& fam, std::int64_t k_max,
                            const BoundaryRule& rule = {},
                            const SolveOptions& opts = {});

// Relative Wronskian defect |<K,I^perp> - tau prod c2/c1| / |tau prod c2/c1|.
std::vector<double> wronskian_residuals(const KernelSolution& sol);

struct ClauseResult {
  std::string name;
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  double worst_margin = 0.0;  // min over k of (rhs - lhs) / scale
  std::int64_t first_violation_k = -1;
  std::string counterexample;
};

struct LemmaReport {
  ModeIndex mode;
  std::vector<ClauseResult> clauses;
  std::int64_t total_violations() const;
};

// Checks the positivity, monotonicity, epsilon, summation and product
// estimates for the I and K solutions at every k <= k_max. For m < 0 the
// mirror (I1, -I2, -K1, K2) of the m > 0 statements is checked.
LemmaReport verify_lemma_suite(const KernelSolution& sol, const Families& fam,
                               double slack = 1e-14);

}  // namespace qst
