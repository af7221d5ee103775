#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qst/parametrix.hpp"

namespace qst {

enum class Sector { Positive };

struct ModeFields {
  std::vector<double> g;  // g_{m,n}, level n
  std::vector<double> f;  // f_{m,n+1}, level n+1
};

// Positive-sector Fourier data of F = (f, g): entries keyed by (m, n) carry
// the pair (g_{m,n}, f_{m,n+1}). Images of D use the same layout with
// q_{m,n} in the g slot and p_{m,n+1} in the f slot.
struct FourierField {
  Sector sector = Sector::Positive;
  std::map<ModeIndex, ModeFields> entries;
};

double h0_norm(const FourierField& field, const WeightFamily& w);

// Coefficient sequences of one H_0 element, keyed by (m, power of U).
using H0Series = std::map<ModeIndex, std::vector<double>>;

H0Series delta0(const H0Series& x, const Families& fam);
H0Series delta1(const H0Series& x);
H0Series delta2(const H0Series& x, const Families& fam);

// Per-mode RhsPair from an image field: r1 = p, r2(k) = -q(k+1), q0 = -q(0).
RhsPair rhs_from_image(ModeIndex mode, const ModeFields& image);
ModeFields image_from_rhs(const RhsPair& r);

// D through the delta operators: (delta1 f + delta0 g, delta2 f - delta1 g).
// Every entry of the input must have g and f of equal length K+1; the image
// carries q of length K+1 and p of length K.
FourierField apply_D(const FourierField& field, const Families& fam);
// Same image assembled mode by mode from apply_A.
FourierField apply_D_matrix(const FourierField& field, const Families& fam);

struct GlobalSolveOptions {
  SolveOptions solve;
};

// Per-mode parametrix over the support of an image field; each mode uses
// k_max = length of its q sequence - 1. Errors carry the failing mode.
FourierField apply_Q_global(const FourierField& image, const Families& fam,
                            const BoundaryRule& rule, const GlobalSolveOptions& opts = {});

struct TruncatedAlgebraRep {
  int K_rep = 0;
  int L_rep = 0;
  double theta = 0.0;  // fraction of a full turn
  Eigen::MatrixXcd U, V, Kop, Lop;

  static TruncatedAlgebraRep build(int K_rep, int L_rep, double theta);
  Eigen::Index index(int k, int l) const { return k * (2 * L_rep + 1) + (l + L_rep); }
  Eigen::Index dim() const { return (K_rep + 1) * (2 * L_rep + 1); }
  // e^{-2 pi i l theta}, with the angle reduced in extended precision
  std::complex<double> phase(int l) const;
};

struct AlgebraFinding {
  std::string check;
  bool passed = true;
  double value = 0.0;
  std::string detail;
};

struct AlgebraReport {
  std::vector<AlgebraFinding> findings;
  bool all_passed() const;
};

struct AlgebraOptions {
  int polynomials = 20;
  int trace_samples = 100;
  int degree = 2;  // max |m| and n in test polynomials
  std::uint64_t seed = 1;
};

AlgebraReport algebra_sanity(const TruncatedAlgebraRep& rep, const AlgebraOptions& opts = {});

}  // namespace qst
