#pragma once

#include <cstdint>
#include <vector>

#include "qst/solutions.hpp"

namespace qst {

// Sequence in l^2_{a_level}; entry k is weighted by a_level(k + offset).
struct WeightedSeq {
  std::vector<double> values;
  int level = 0;
  int offset = 0;

  double norm(const WeightFamily& w) const;
};

// Right-hand side of one mode system: r1(k) = p_{m,n+1}(k), r2(k) = -q_{m,n}(k+1)
// for k < K, and the regularity datum q0 = a_n(0) f(0) + m g(0).
struct RhsPair {
  WeightedSeq r1;
  WeightedSeq r2;
  double q0 = 0.0;
};

// Unknowns of one mode: g = g_{m,n} (level n), f = f_{m,n+1} (level n+1).
struct ModePair {
  WeightedSeq g;
  WeightedSeq f;
};

RhsPair make_rhs(ModeIndex mode, std::vector<double> r1, std::vector<double> r2, double q0);
ModePair make_pair(ModeIndex mode, std::vector<double> g, std::vector<double> f);

double norm(const RhsPair& r, const WeightFamily& w);
double norm(const ModePair& h, const WeightFamily& w);
RhsPair operator-(const RhsPair& a, const RhsPair& b);
ModePair operator-(const ModePair& a, const ModePair& b);

struct ParametrixResult {
  ModePair h;
  double beta = 0.0;
  double boundary_residual = 0.0;
  Vec2 h_inf;
  std::vector<double> e1, e2;
};

// output(k) = A(k+1)[h(k+1) - C(k)h(k)], k < K, and q0 = a_n(0) f(0) + m g(0).
RhsPair apply_A(ModeIndex mode, const Families& fam, const ModePair& h);

// W is the m = 0 backward operator acting on r1:
// W p(k) = -sum_{i>=k} prod_{j=k}^{i-1} c1(j) p(i)/a_{n+1}(i).
enum class Kernel { X, Y, Z, W };

// Kernel sums in natural indexing. X, Y read level n-1+beta and write
// level n-1+alpha; Z reads level n, writes n+1; W reads n+1, writes n.
WeightedSeq apply_XYZ(Kernel kind, int alpha, int beta, const KernelSolution& sol,
                      const Families& fam, const WeightedSeq& r);

ParametrixResult apply_Q(const KernelSolution& sol, const Families& fam, const RhsPair& r);

// Variation of constants with explicit partial products; a secondary path
// used to cross-check apply_Q on short truncations.
ModePair apply_Q_variation(const KernelSolution& sol, const Families& fam, const RhsPair& r);

struct BoundaryFit {
  double residual = 0.0;
  double beta = 0.0;
  Vec2 h_inf;
};

// The limit h(inf) = tail * h(K) is compared with K(inf):
// residual |g(inf) K2(inf) - f(inf) K1(inf)|, beta by projection on K(inf).
BoundaryFit boundary_residual(const ModePair& h, const KernelSolution& sol);

struct OracleResult {
  ModePair h;
  double sigma_min = 0.0;  // of the row-equilibrated system, when requested
  double sigma_max = 0.0;
};

// Dense direct solve of the K block rows, the regularity row and the
// boundary row <tail h(K), K(inf)^perp> = 0.
OracleResult oracle_solve(ModeIndex mode, const Families& fam, const RhsPair& r,
                          const BoundaryData& bd, const Mat2& tail,
                          bool singular_values = false);

struct NullspaceReport {
  double sigma_max = 0.0;
  double sigma_min = 0.0;  // smallest of the 2K+1 singular values
  double cosine_with_I = 0.0;
};

// Drops the boundary row: the remaining homogeneous system has full row rank
// and its null vector should be I.
NullspaceReport oracle_nullspace(const KernelSolution& sol, const Families& fam);

}  // namespace qst
