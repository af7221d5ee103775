#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qst/solutions.hpp"

namespace qst {

// A Fubini pair (X, Y) of squared HS norms. `diagonal` is the k = i term the
// two triangles do not share; `corrected` compares X and Y once it is moved
// to the side that lacks it.
struct FubiniPair {
  std::string name;
  double x = 0.0;
  double y = 0.0;
  double rel_diff = 0.0;
  double diagonal = 0.0;
  double corrected_rel_diff = 0.0;
};

// Squared HS norms of the kernel operators of one mode, truncated to
// k, i <= k_max, with tail envelopes and the closed-form bounds. Index
// [a-1][b-1] holds the (alpha, beta) kernel. For m = 0 only Z and W apply.
struct HsReport {
  ModeIndex mode;
  std::int64_t k_max = 0;
  bool has_xy = false;

  double hs_X[2][2] = {}, hs_Y[2][2] = {};
  double tail_X[2][2] = {}, tail_Y[2][2] = {};
  double bound_X[2][2] = {}, bound_Y[2][2] = {};
  bool pass_X[2][2] = {}, pass_Y[2][2] = {};

  double hs_Z = 0.0, tail_Z = 0.0, bound_Z = 0.0;
  double hs_W = 0.0, tail_W = 0.0, bound_W = 0.0;
  bool pass_Z = true, pass_W = true;

  double epsilon = 0.0, s_n = 0.0, s_n1 = 0.0, tau = 0.0, ratio = 0.0, kappa = 0.0;
  std::vector<FubiniPair> fubini;

  // HS proxy of the mode parametrix: root-sum-of-squares of the kernel norms
  // including the 1/tau prefactor (Z and W for m = 0).
  double proxy = 0.0;

  bool bounds_pass() const;
  double worst_fubini(bool corrected) const;
};

inline constexpr double kBoundSlack = 1e-10;

HsReport hs_norms(const KernelSolution& sol, const Families& fam, double tol = 1e-12);

struct Envelope {
  std::vector<int> keys;        // |m| or n, ascending
  std::vector<double> values;   // max proxy over the other axis
  bool nonincreasing = false;
};

struct DecayTable {
  std::vector<HsReport> rows;   // ordered by (m, n)
  Envelope along_m, along_n;
  bool all_bounds_pass() const;
};

struct ScanOptions {
  std::int64_t k_max = 128;
  BoundaryRule rule;
  SolveOptions solve;
  int threads = 0;  // 0: hardware concurrency
};

DecayTable decay_scan(const std::vector<ModeIndex>& modes, const Families& fam,
                      const ScanOptions& opts = {});

Envelope envelope_along_m(const std::vector<HsReport>& rows);
Envelope envelope_along_n(const std::vector<HsReport>& rows);

std::vector<std::string> hs_csv_header();
std::vector<std::string> hs_csv_row(const HsReport& r);
void write_csv(std::ostream& os, const DecayTable& table);

}  // namespace qst
