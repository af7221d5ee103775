#include "qst/dirac.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "qst/error.hpp"

namespace qst {

double h0_norm(const FourierField& field, const WeightFamily& w) {
  double s = 0.0;
  for (const auto& [mode, e] : field.entries) {
    for (std::size_t k = 0; k < e.g.size(); ++k) s += e.g[k] * e.g[k] / w(mode.n, k);
    for (std::size_t k = 0; k < e.f.size(); ++k) s += e.f[k] * e.f[k] / w(mode.n + 1, k);
  }
  return std::sqrt(s);
}

H0Series delta1(const H0Series& x) {
  H0Series out = x;
  for (auto& [key, v] : out)
    for (double& e : v) e *= key.m;
  return out;
}

// Positive-sector part of delta0: coefficient at level l+1 is -Bbar_l x_l,
// Bbar_l h(k) = a_{l+1}(k)(h(k) - c_{1,l}(k) h(k+1)).
H0Series delta0(const H0Series& x, const Families& fam) {
  H0Series out;
  for (const auto& [key, v] : x) {
    if (v.size() < 2) continue;
    const int l = key.n;
    std::vector<double> r(v.size() - 1);
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
      r[k] = -fam.w(l + 1, k) * (v[k] - fam.c.c1(l, k) * v[k + 1]);
    out[{key.m, l + 1}] = std::move(r);
  }
  return out;
}

// Positive-sector part of delta2: coefficient at level l-1 is -B_{l-1} x_l,
// B_n h(k) = a_n(k)(h(k) - c_{2,n}(k-1) h(k-1)) with h(-1) = 0.
H0Series delta2(const H0Series& x, const Families& fam) {
  H0Series out;
  for (const auto& [key, v] : x) {
    if (key.n < 1) continue;
    const int n = key.n - 1;
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double prev = k > 0 ? fam.c.c2(n, k - 1) * v[k - 1] : 0.0;
      r[k] = -fam.w(n, k) * (v[k] - prev);
    }
    out[{key.m, n}] = std::move(r);
  }
  return out;
}

namespace {

H0Series combine(const H0Series& a, const H0Series& b, double sb) {
  H0Series out = a;
  for (const auto& [key, v] : b) {
    auto it = out.find(key);
    if (it == out.end()) {
      std::vector<double> w = v;
      for (double& e : w) e *= sb;
      out[key] = std::move(w);
      continue;
    }
    auto& dst = it->second;
    dst.resize(std::min(dst.size(), v.size()));
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += sb * v[k];
  }
  return out;
}

void check_entry(const ModeIndex& mode, const ModeFields& e) {
  if (mode.n < 0) fail(ErrorCode::Argument, "mode level must be >= 0");
  if (e.g.size() != e.f.size() || e.g.size() < 2) {
    std::ostringstream os;
    os << "mode " << to_string(mode) << ": g and f must have equal length >= 2";
    fail(ErrorCode::Argument, os.str());
  }
}

}  // namespace

RhsPair rhs_from_image(ModeIndex mode, const ModeFields& image) {
  if (image.g.size() != image.f.size() + 1 || image.f.empty())
    fail(ErrorCode::Argument,
         "mode " + to_string(mode) + ": image needs q of length K+1 and p of length K");
  std::vector<double> r2(image.f.size());
  for (std::size_t k = 0; k < r2.size(); ++k) r2[k] = -image.g[k + 1];
  return make_rhs(mode, image.f, std::move(r2), -image.g[0]);
}

ModeFields image_from_rhs(const RhsPair& r) {
  ModeFields out;
  out.f = r.r1.values;
  out.g.resize(r.r2.values.size() + 1);
  out.g[0] = -r.q0;
  for (std::size_t k = 0; k < r.r2.values.size(); ++k) out.g[k + 1] = -r.r2.values[k];
  return out;
}

FourierField apply_D(const FourierField& field, const Families& fam) {
  H0Series f, g;
  for (const auto& [mode, e] : field.entries) {
    check_entry(mode, e);
    f[{mode.m, mode.n + 1}] = e.f;
    g[mode] = e.g;
  }
  const H0Series first = combine(delta1(f), delta0(g, fam), 1.0);
  const H0Series second = combine(delta2(f, fam), delta1(g), -1.0);
  FourierField out;
  for (const auto& [mode, e] : field.entries) {
    ModeFields img;
    img.g = second.at(mode);
    img.f = first.at({mode.m, mode.n + 1});
    out.entries[mode] = std::move(img);
  }
  return out;
}

FourierField apply_D_matrix(const FourierField& field, const Families& fam) {
  FourierField out;
  for (const auto& [mode, e] : field.entries) {
    check_entry(mode, e);
    out.entries[mode] = image_from_rhs(apply_A(mode, fam, make_pair(mode, e.g, e.f)));
  }
  return out;
}

FourierField apply_Q_global(const FourierField& image, const Families& fam,
                            const BoundaryRule& rule, const GlobalSolveOptions& opts) {
  FourierField out;
  for (const auto& [mode, e] : image.entries) {
    try {
      const RhsPair r = rhs_from_image(mode, e);
      const std::int64_t K = static_cast<std::int64_t>(e.f.size());
      const KernelSolution sol = solve_kernel(mode, fam, K, rule, opts.solve);
      const ParametrixResult res = apply_Q(sol, fam, r);
      out.entries[mode] = {res.h.g.values, res.h.f.values};
    } catch (const Error& err) {
      const std::string tag = "mode " + to_string(mode);
      const std::string what = err.what();
      if (what.rfind(tag, 0) == 0) throw;
      throw Error(err.code(), tag + ": " + what);
    }
  }
  return out;
}

std::complex<double> TruncatedAlgebraRep::phase(int l) const {
  const long double x = static_cast<long double>(l) * static_cast<long double>(theta);
  const long double r = x - std::nearbyint(x);
  const long double ang = -2.0L * 3.141592653589793238462643383279502884L * r;
  return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

TruncatedAlgebraRep TruncatedAlgebraRep::build(int K_rep, int L_rep, double theta) {
  if (K_rep < 1 || L_rep < 1) fail(ErrorCode::Argument, "representation cutoffs must be >= 1");
  TruncatedAlgebraRep rep;
  rep.K_rep = K_rep;
  rep.L_rep = L_rep;
  rep.theta = theta;
  const Eigen::Index N = rep.dim();
  rep.U = Eigen::MatrixXcd::Zero(N, N);
  rep.V = Eigen::MatrixXcd::Zero(N, N);
  rep.Kop = Eigen::MatrixXcd::Zero(N, N);
  rep.Lop = Eigen::MatrixXcd::Zero(N, N);
  for (int k = 0; k <= K_rep; ++k)
    for (int l = -L_rep; l <= L_rep; ++l) {
      const Eigen::Index i = rep.index(k, l);
      if (k < K_rep) rep.U(rep.index(k + 1, l), i) = rep.phase(l);
      if (l < L_rep) rep.V(rep.index(k, l + 1), i) = 1.0;
      rep.Kop(i, i) = k;
      rep.Lop(i, i) = l;
    }
  return rep;
}

bool AlgebraReport::all_passed() const {
  for (const auto& f : findings)
    if (!f.passed) return false;
  return true;
}

namespace {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

struct Term {
  int m = 0;
  int n = 0;
  bool plus = true;
  std::vector<Cplx> coeff;  // coefficient function on k = 0..K_rep
};

CMat power(const CMat& A, int e) {
  CMat out = CMat::Identity(A.rows(), A.cols());
  for (int i = 0; i < e; ++i) out = A * out;
  return out;
}

// Powers U^n, (U*)^n and V^m, |m| <= 2 degree, built once.
struct PowerTable {
  std::vector<CMat> U, Ustar, Vpos, Vneg;
  std::vector<CMat> VU, VUstar;  // V^m U^n and V^m U*^n, m in [-degree, degree], n in [0, degree]
  int degree;

  PowerTable(const TruncatedAlgebraRep& rep, int deg) : degree(deg) {
    for (int e = 0; e <= 2 * degree; ++e) {
      U.push_back(power(rep.U, e));
      Ustar.push_back(power(rep.U.adjoint(), e));
      Vpos.push_back(power(rep.V, e));
      Vneg.push_back(power(rep.V.adjoint(), e));
    }
    for (int m = -degree; m <= degree; ++m)
      for (int n = 0; n <= degree; ++n) {
        VU.push_back(V(m) * U[n]);
        VUstar.push_back(V(m) * Ustar[n]);
      }
  }
  const CMat& V(int m) const { return m >= 0 ? Vpos[m] : Vneg[-m]; }
  std::size_t slot(int m, int n) const {
    return static_cast<std::size_t>((m + degree) * (degree + 1) + n);
  }
};

// X * f(K), i.e. column i scaled by f(k(i))
CMat times_diag(const TruncatedAlgebraRep& rep, CMat X, const std::vector<Cplx>& f) {
  for (int k = 0; k <= rep.K_rep; ++k)
    for (int l = -rep.L_rep; l <= rep.L_rep; ++l) X.col(rep.index(k, l)) *= f[k];
  return X;
}

// f(K) * X, i.e. row i scaled by f(k(i))
CMat diag_times(const TruncatedAlgebraRep& rep, const std::vector<Cplx>& f, CMat X) {
  for (int k = 0; k <= rep.K_rep; ++k)
    for (int l = -rep.L_rep; l <= rep.L_rep; ++l) X.row(rep.index(k, l)) *= f[k];
  return X;
}

CMat diag_of(const TruncatedAlgebraRep& rep, const std::vector<Cplx>& f) {
  return times_diag(rep, CMat::Identity(rep.dim(), rep.dim()), f);
}

CMat assemble(const TruncatedAlgebraRep& rep, const PowerTable& pw,
              const std::vector<Term>& terms) {
  CMat a = CMat::Zero(rep.dim(), rep.dim());
  for (const Term& t : terms) {
    if (t.plus)
      a += times_diag(rep, pw.VU[pw.slot(t.m, t.n)], t.coeff);
    else
      a += diag_times(rep, t.coeff, pw.VUstar[pw.slot(t.m, t.n)]);
  }
  return a;
}

// Coefficient functions constant from k0 on, as required of polynomial elements.
std::vector<Cplx> eventually_constant(std::mt19937_64& rng, int K_rep, int k0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Cplx> f(K_rep + 1);
  const Cplx tail{u(rng), u(rng)};
  for (int k = 0; k <= K_rep; ++k) f[k] = k < k0 ? Cplx{u(rng), u(rng)} : tail;
  return f;
}

std::vector<Term> random_polynomial(std::mt19937_64& rng, int K_rep, int degree, int k0) {
  std::vector<Term> terms;
  std::bernoulli_distribution keep(0.5);
  for (int m = -degree; m <= degree; ++m)
    for (int n = 0; n <= degree; ++n) {
      if (keep(rng)) terms.push_back({m, n, true, eventually_constant(rng, K_rep, k0)});
      if (n >= 1 && keep(rng)) terms.push_back({m, n, false, eventually_constant(rng, K_rep, k0)});
    }
  if (terms.empty()) terms.push_back({0, 0, true, eventually_constant(rng, K_rep, k0)});
  return terms;
}

double interior_residual(const TruncatedAlgebraRep& rep, const CMat& D, int margin) {
  double worst = 0.0;
  for (int k = margin; k <= rep.K_rep - margin; ++k)
    for (int l = -rep.L_rep + margin; l <= rep.L_rep - margin; ++l)
      for (int k2 = margin; k2 <= rep.K_rep - margin; ++k2)
        for (int l2 = -rep.L_rep + margin; l2 <= rep.L_rep - margin; ++l2)
          worst = std::max(worst, std::abs(D(rep.index(k, l), rep.index(k2, l2))));
  return worst;
}

}  // namespace

AlgebraReport algebra_sanity(const TruncatedAlgebraRep& rep, const AlgebraOptions& opts) {
  AlgebraReport report;
  std::mt19937_64 rng(opts.seed);
  const int d = opts.degree;
  if (rep.K_rep < 2 * d + 2 || rep.L_rep < 2 * d + 1)
    fail(ErrorCode::Argument, "representation cutoffs too small for the test degree");
  const PowerTable pw(rep, d);

  {
    // VU = e^{2 pi i theta} UV away from the truncation edge
    const Cplx rot = std::conj(rep.phase(1));
    const CMat D = rep.V * rep.U - rot * (rep.U * rep.V);
    const double res = interior_residual(rep, D, 1);
    std::ostringstream os;
    os << "theta = " << rep.theta;
    report.findings.push_back({"commutation_VU", res <= 1e-15, res, os.str()});
    if (rep.theta == 0.0) {
      const double c = interior_residual(rep, rep.V * rep.U - rep.U * rep.V, 1);
      report.findings.push_back({"commutation_theta0_exact", c == 0.0, c, "U and V commute"});
    }
  }

  {
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
      std::vector<Cplx> f = eventually_constant(rng, rep.K_rep + 1, rep.K_rep + 2);
      std::vector<Cplx> fk(f.begin(), f.end() - 1), fk1(f.begin() + 1, f.end());
      const CMat FK = diag_of(rep, fk), FK1 = diag_of(rep, fk1);
      worst = std::max(worst, interior_residual(rep, FK * rep.U - rep.U * FK1, 1));
      worst = std::max(worst, interior_residual(rep, FK * rep.V - rep.V * FK, 1));
    }
    report.findings.push_back({"diagonal_commutation", worst == 0.0, worst,
                               "f(K)U = U f(K+1), f(K)V = V f(K)"});
  }

  {
    // Roundtrip: build from coefficients, extract with
    // f+_{m,n}(k) = <e_{k,0}, (U*)^n V^{-m} a e_{k,0}>,
    // f-_{m,n}(k) = <e_{k,0}, a U^n V^{-m} e_{k,0}>.
    double worst_plus = 0.0, worst_minus = 0.0;
    for (int s = 0; s < opts.polynomials; ++s) {
      const std::vector<Term> terms = random_polynomial(rng, rep.K_rep, d, 3);
      const CMat a = assemble(rep, pw, terms);
      for (int m = -d; m <= d; ++m)
        for (int n = 0; n <= d; ++n) {
          const Term* tp = nullptr;
          const Term* tm = nullptr;
          for (const Term& t : terms)
            if (t.m == m && t.n == n) (t.plus ? tp : tm) = &t;
          for (int k = 0; k + n <= rep.K_rep; ++k) {
            const Eigen::Index i = rep.index(k, 0);
            const Eigen::VectorXcd col = pw.Ustar[n] * (pw.V(-m) * a.col(i));
            const Cplx want_p = tp ? tp->coeff[k] : Cplx{};
            worst_plus = std::max(worst_plus, std::abs(col(i) - want_p));
            if (n >= 1) {
              const Eigen::VectorXcd probe = pw.U[n] * pw.V(-m).col(i);
              const Cplx got = (a.row(i) * probe)(0);
              const Cplx want_m = tm ? tm->coeff[k] : Cplx{};
              worst_minus = std::max(worst_minus, std::abs(got - want_m));
            }
          }
        }
    }
    std::ostringstream os;
    os << opts.polynomials << " random polynomial elements, degree " << d;
    report.findings.push_back({"fourier_roundtrip_positive", worst_plus == 0.0, worst_plus, os.str()});
    // Negative coefficients pass through |e^{-2 pi i l theta}|^2, equal to 1
    // only up to rounding.
    report.findings.push_back({"fourier_roundtrip_negative", worst_minus <= 8 * d * 1.2e-16,
                               worst_minus, os.str()});
  }

  {
    // |tau(ab)| <= ||a|| tau(b* b)^{1/2}, tau(x) = sum_k <e_{k,0}, x e_{k,0}>
    double worst = 0.0;
    const int k0 = rep.K_rep / 2 - d;
    for (int s = 0; s < opts.trace_samples; ++s) {
      auto interior = [&](std::vector<Term> terms) {
        for (Term& t : terms)
          for (int k = 0; k <= rep.K_rep; ++k)
            if (k >= k0) t.coeff[k] = 0.0;
        return terms;
      };
      const CMat a = assemble(rep, pw, interior(random_polynomial(rng, rep.K_rep, d, k0)));
      const CMat b = assemble(rep, pw, interior(random_polynomial(rng, rep.K_rep, d, k0)));
      Cplx tab{};
      double tbb = 0.0;
      for (int k = 0; k <= rep.K_rep; ++k) {
        const Eigen::Index i = rep.index(k, 0);
        tab += (a.row(i) * b.col(i)).value();
        tbb += b.col(i).squaredNorm();
      }
      const double lhs = std::abs(tab);
      // Power iteration on a*a under-estimates ||a||, which only tightens the check.
      Eigen::VectorXcd v = Eigen::VectorXcd::Ones(rep.dim()).normalized();
      double opnorm = 0.0;
      for (int it = 0; it < 60; ++it) {
        const Eigen::VectorXcd w = a.adjoint() * (a * v);
        const double nw = w.norm();
        if (nw == 0.0) break;
        opnorm = std::sqrt(nw);
        v = w / nw;
      }
      const double rhs = opnorm * std::sqrt(tbb);
      worst = std::max(worst, rhs > 0 ? lhs / rhs : 0.0);
    }
    std::ostringstream os;
    os << opts.trace_samples << " samples, worst |tau(ab)| / (||a|| tau(b*b)^1/2)";
    report.findings.push_back({"trace_inequality", worst <= 1.0 + 1e-12, worst, os.str()});
  }
  return report;
}

}  // namespace qst
