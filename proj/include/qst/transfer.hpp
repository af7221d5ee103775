#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "qst/mat2.hpp"
#include "qst/weights.hpp"

namespace qst {

struct ModeIndex {
  int m = 0;
  int n = 0;
  auto operator<=>(const ModeIndex&) const = default;
};

std::string to_string(const ModeIndex& mode);

inline constexpr double kSingularFloor = 1e-300;

// A(k+1) = [[a_{n+1}(k) c1(k), 0], [m, a_n(k+1)]]
Mat2 build_A(ModeIndex mode, std::int64_t k, const Families& fam);
// C(k) with A(k+1) C(k) = B(k)
Mat2 build_C(ModeIndex mode, std::int64_t k, const Families& fam);
// B(k) = [[a_{n+1}(k), -m], [0, a_n(k+1) c2(k)]], the coefficient of h(k)
// in the k-th pair of scalar equations.
Mat2 build_B(ModeIndex mode, std::int64_t k, const Families& fam);

Mat2 invert(const Mat2& m, double floor = kSingularFloor);

struct TailOptions {
  double tol = 1e-12;
  std::int64_t anchor_min = 1024;
  int max_levels = 12;
};

struct TransferProduct {
  ModeIndex mode;
  std::int64_t truncation_index = 0;  // K
  std::vector<Mat2> factors;          // C(k), k < K
  std::vector<Mat2> partials;         // P(k) = C(k-1)...C(0), k <= K
  // prod_{i >= K} C(i), read right to left, so limit = tail * P(K).
  Mat2 tail;
  Mat2 limit;
  // Rigorous upper bound for sum_{k >= K} ||C(k) - I||_1.
  double tail_sum_bound = 0.0;
  // Extrapolation error estimate for `tail`, entrywise norm.
  double limit_error = 0.0;
  double limit_rel_error = 0.0;  // same, relative to the far product
  std::int64_t anchor = 0;
  int levels = 0;
  double J1 = 1.0, J2 = 1.0;
};

// Partial products up to K plus the remaining infinite product. The far
// tail beyond a fixed anchor is obtained by Richardson extrapolation over
// doubling truncation lengths, using the power-law exponents of the weights.
TransferProduct limit_product(ModeIndex mode, const Families& fam,
                              std::int64_t K, const TailOptions& opts = {});

struct StructureReport {
  std::vector<HypothesisCheck> checks;
  double F0 = 0, F1 = 0, F2 = 0, F3 = 0;
  bool all_passed() const;
};

StructureReport structure_check(const TransferProduct& tp, double tol = 1e-10);

}  // namespace qst
