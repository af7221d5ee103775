#include "qst/parametrix.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "qst/error.hpp"

namespace qst {

double WeightedSeq::norm(const WeightFamily& w) const {
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    s += values[k] * values[k] / w(level, static_cast<std::int64_t>(k) + offset);
  return std::sqrt(s);
}

RhsPair make_rhs(ModeIndex mode, std::vector<double> r1, std::vector<double> r2, double q0) {
  RhsPair r;
  r.r1 = {std::move(r1), mode.n + 1, 0};
  r.r2 = {std::move(r2), mode.n, 1};
  r.q0 = q0;
  return r;
}

ModePair make_pair(ModeIndex mode, std::vector<double> g, std::vector<double> f) {
  return {{std::move(g), mode.n, 0}, {std::move(f), mode.n + 1, 0}};
}

double norm(const RhsPair& r, const WeightFamily& w) {
  const double a = r.r1.norm(w), b = r.r2.norm(w);
  const double c = r.q0 / std::sqrt(w(r.r2.level, 0));
  return std::sqrt(a * a + b * b + c * c);
}

double norm(const ModePair& h, const WeightFamily& w) {
  return std::hypot(h.g.norm(w), h.f.norm(w));
}

namespace {

WeightedSeq minus(const WeightedSeq& a, const WeightedSeq& b) {
  if (a.level != b.level || a.offset != b.offset || a.values.size() != b.values.size())
    fail(ErrorCode::TagMismatch, "sequences differ in weight tag or length");
  WeightedSeq out = a;
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] -= b.values[k];
  return out;
}

double at(const std::vector<double>& v, std::int64_t k) {
  return k >= 0 && static_cast<std::size_t>(k) < v.size() ? v[k] : 0.0;
}

}  // namespace

RhsPair operator-(const RhsPair& a, const RhsPair& b) {
  return {minus(a.r1, b.r1), minus(a.r2, b.r2), a.q0 - b.q0};
}

ModePair operator-(const ModePair& a, const ModePair& b) {
  return {minus(a.g, b.g), minus(a.f, b.f)};
}

RhsPair apply_A(ModeIndex mode, const Families& fam, const ModePair& h) {
  if (h.g.level != mode.n || h.f.level != mode.n + 1)
    fail(ErrorCode::TagMismatch, "apply_A expects g at level n and f at level n+1");
  if (h.g.values.size() != h.f.values.size() || h.g.values.empty())
    fail(ErrorCode::Argument, "apply_A expects g and f of equal, nonzero length");
  const std::int64_t K = static_cast<std::int64_t>(h.g.values.size()) - 1;
  std::vector<double> r1(K), r2(K);
  for (std::int64_t k = 0; k < K; ++k) {
    const Vec2 cur{h.g.values[k], h.f.values[k]};
    const Vec2 next{h.g.values[k + 1], h.f.values[k + 1]};
    const Vec2 out = build_A(mode, k, fam) * (next - build_C(mode, k, fam) * cur);
    r1[k] = out.x;
    r2[k] = out.y;
  }
  const double q0 = fam.w(mode.n, 0) * h.f.values[0] + mode.m * h.g.values[0];
  return make_rhs(mode, std::move(r1), std::move(r2), q0);
}

WeightedSeq apply_XYZ(Kernel kind, int alpha, int beta, const KernelSolution& sol,
                      const Families& fam, const WeightedSeq& r) {
  const int n = sol.mode.n;
  const std::int64_t K = sol.k_max;
  if (static_cast<std::int64_t>(r.values.size()) > K + 1)
    fail(ErrorCode::Argument, "input longer than the kernel tables");
  std::vector<double> out(K + 1, 0.0);
  auto mismatch = [&](int want) {
    if (r.level != want || r.offset != 0) {
      std::ostringstream os;
      os << "kernel input tagged a_" << r.level << " (offset " << r.offset
         << "), expected a_" << want;
      fail(ErrorCode::TagMismatch, os.str());
    }
  };

  if (kind == Kernel::Z) {
    mismatch(n);
    double z = 0.0;
    for (std::int64_t k = 0; k <= K; ++k) {
      z = (k > 0 ? fam.c.c2(n, k - 1) * z : 0.0) + at(r.values, k) / fam.w(n, k);
      out[k] = z;
    }
    return {std::move(out), n + 1, 0};
  }
  if (kind == Kernel::W) {
    mismatch(n + 1);
    double z = 0.0;
    for (std::int64_t k = K; k >= 0; --k) {
      z = fam.c.c1(n, k) * z - at(r.values, k) / fam.w(n + 1, k);
      out[k] = z;
    }
    return {std::move(out), n, 0};
  }

  if ((alpha != 1 && alpha != 2) || (beta != 1 && beta != 2))
    fail(ErrorCode::Argument, "kernel indices must be 1 or 2");
  mismatch(n - 1 + beta);
  const int in_level = n - 1 + beta;
  // weight(i) = prod_{j<i} (c1/c2) * S_beta(i) / a_{in_level}(i), S = K for X, I for Y
  auto weight = [&](std::int64_t i) {
    const Vec2& s = kind == Kernel::X ? sol.K[i] : sol.I[i];
    const double comp = beta == 1 ? s.x : s.y;
    return comp / sol.det_ratio[i] / fam.w(in_level, i);
  };
  auto outer = [&](std::int64_t k) {
    const Vec2& s = kind == Kernel::X ? sol.I[k] : sol.K[k];
    return alpha == 1 ? s.x : s.y;
  };
  if (kind == Kernel::X) {
    // beta = 1: i >= k+1; beta = 2: i >= k
    double acc = 0.0;
    for (std::int64_t k = K; k >= 0; --k) {
      if (beta == 2) acc += weight(k) * at(r.values, k);
      out[k] = outer(k) * acc;
      if (beta == 1) acc += weight(k) * at(r.values, k);
    }
  } else {
    // beta = 1: i <= k; beta = 2: i <= k-1
    double acc = 0.0;
    for (std::int64_t k = 0; k <= K; ++k) {
      if (beta == 1) acc += weight(k) * at(r.values, k);
      out[k] = outer(k) * acc;
      if (beta == 2) acc += weight(k) * at(r.values, k);
    }
  }
  return {std::move(out), n - 1 + alpha, 0};
}

namespace {

// p = r1 at level n+1; q(0) = -q0, q(i) = -r2(i-1) at level n.
void natural_rhs(const KernelSolution& sol, const RhsPair& r, WeightedSeq& p, WeightedSeq& q) {
  const int n = sol.mode.n;
  if (r.r1.level != n + 1 || r.r2.level != n || r.r1.offset != 0 || r.r2.offset != 1)
    fail(ErrorCode::TagMismatch, "right-hand side tags do not match the mode");
  if (r.r1.values.size() != r.r2.values.size() ||
      static_cast<std::int64_t>(r.r1.values.size()) > sol.k_max)
    fail(ErrorCode::Argument, "right-hand side length must be equal and <= k_max");
  p = {r.r1.values, n + 1, 0};
  q = {std::vector<double>(r.r2.values.size() + 1), n, 0};
  q.values[0] = -r.q0;
  for (std::size_t i = 0; i < r.r2.values.size(); ++i) q.values[i + 1] = -r.r2.values[i];
}

}  // namespace

ParametrixResult apply_Q(const KernelSolution& sol, const Families& fam, const RhsPair& r) {
  const ModeIndex mode = sol.mode;
  const std::int64_t K = sol.k_max;
  WeightedSeq p, q;
  natural_rhs(sol, r, p, q);

  ParametrixResult res;
  std::vector<double> g(K + 1), f(K + 1);
  if (mode.m == 0) {
    WeightedSeq rho = q;
    for (double& v : rho.values) v = -v;
    const WeightedSeq fz = apply_XYZ(Kernel::Z, 0, 0, sol, fam, rho);
    const WeightedSeq gw = apply_XYZ(Kernel::W, 0, 0, sol, fam, p);
    g = gw.values;
    f = fz.values;
  } else {
    const double inv = 1.0 / sol.tau;
    auto add = [&](std::vector<double>& dst, const WeightedSeq& s) {
      for (std::int64_t k = 0; k <= K; ++k) dst[k] += s.values[k];
    };
    add(g, apply_XYZ(Kernel::X, 1, 2, sol, fam, p));
    add(g, apply_XYZ(Kernel::Y, 1, 2, sol, fam, p));
    add(g, apply_XYZ(Kernel::X, 1, 1, sol, fam, q));
    add(g, apply_XYZ(Kernel::Y, 1, 1, sol, fam, q));
    add(f, apply_XYZ(Kernel::X, 2, 2, sol, fam, p));
    add(f, apply_XYZ(Kernel::Y, 2, 2, sol, fam, p));
    add(f, apply_XYZ(Kernel::X, 2, 1, sol, fam, q));
    add(f, apply_XYZ(Kernel::Y, 2, 1, sol, fam, q));
    for (std::int64_t k = 0; k <= K; ++k) {
      g[k] *= inv;
      f[k] *= inv;
    }
  }

  // Coefficients of h = e1 I + e2 K.
  res.e1.assign(K + 1, 0.0);
  res.e2.assign(K + 1, 0.0);
  {
    const int n = mode.n;
    auto wq = [&](std::int64_t i, const Vec2& s) {
      return s.x * at(q.values, i) / sol.det_ratio[i] / fam.w(n, i);
    };
    auto wp = [&](std::int64_t i, const Vec2& s) {
      return s.y * at(p.values, i) / sol.det_ratio[i] / fam.w(n + 1, i);
    };
    double acc = 0.0;
    for (std::int64_t k = K; k >= 0; --k) {
      acc += wp(k, sol.K[k]);
      res.e1[k] = acc / sol.tau;
      acc += wq(k, sol.K[k]);
    }
    acc = 0.0;
    for (std::int64_t k = 0; k <= K; ++k) {
      acc += wq(k, sol.I[k]);
      res.e2[k] = acc / sol.tau;
      acc += wp(k, sol.I[k]);
    }
  }

  res.h = make_pair(mode, std::move(g), std::move(f));
  const BoundaryFit fit = boundary_residual(res.h, sol);
  res.beta = fit.beta;
  res.boundary_residual = fit.residual;
  res.h_inf = fit.h_inf;
  return res;
}

ModePair apply_Q_variation(const KernelSolution& sol, const Families& fam, const RhsPair& r) {
  const ModeIndex mode = sol.mode;
  const std::int64_t K = sol.k_max;
  const std::int64_t len = static_cast<std::int64_t>(r.r1.values.size());
  std::vector<Mat2> P(K + 1);
  P[0] = Mat2::identity();
  for (std::int64_t k = 0; k < K; ++k) P[k + 1] = build_C(mode, k, fam) * P[k];
  // v(i) = P(i)^{-1} A(i)^{-1} r(i); A(0)^{-1} r(0) := (0, q0/a_n(0))
  std::vector<Vec2> cum(K + 1);
  Vec2 acc{0.0, r.q0 / fam.w(mode.n, 0)};
  cum[0] = acc;
  for (std::int64_t i = 1; i <= K; ++i) {
    if (i - 1 < len) {
      const Vec2 ri{r.r1.values[i - 1], r.r2.values[i - 1]};
      acc = acc + invert(P[i]) * (invert(build_A(mode, i - 1, fam)) * ri);
    }
    cum[i] = acc;
  }
  const double alpha = dot(cum[K], perp(sol.K[0])) / sol.tau;
  std::vector<double> g(K + 1), f(K + 1);
  for (std::int64_t k = 0; k <= K; ++k) {
    const Vec2 h = P[k] * cum[k] + alpha * sol.I[k];
    g[k] = h.x;
    f[k] = h.y;
  }
  return make_pair(mode, std::move(g), std::move(f));
}

BoundaryFit boundary_residual(const ModePair& h, const KernelSolution& sol) {
  BoundaryFit fit;
  const std::int64_t K = static_cast<std::int64_t>(h.g.values.size()) - 1;
  if (K != sol.k_max) fail(ErrorCode::Argument, "boundary residual needs h on 0..k_max");
  fit.h_inf = sol.tail * Vec2{h.g.values[K], h.f.values[K]};
  const Vec2& k = sol.K_inf;
  fit.residual = std::abs(fit.h_inf.x * k.y - fit.h_inf.y * k.x);
  fit.beta = dot(fit.h_inf, k) / dot(k, k);
  return fit;
}

namespace {

Eigen::MatrixXd assemble(ModeIndex mode, const Families& fam, std::int64_t K) {
  const std::int64_t N = 2 * (K + 1);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  const double m = mode.m;
  for (std::int64_t k = 0; k < K; ++k) {
    const double an1 = fam.w(mode.n + 1, k);
    const double an = fam.w(mode.n, k + 1);
    const double c1 = fam.c.c1(mode.n, k);
    const double c2 = fam.c.c2(mode.n, k);
    const std::int64_t g0 = 2 * k, f0 = 2 * k + 1, g1 = 2 * k + 2, f1 = 2 * k + 3;
    M(2 * k, g1) = an1 * c1;
    M(2 * k, g0) = -an1;
    M(2 * k, f0) = m;
    M(2 * k + 1, g1) = m;
    M(2 * k + 1, f1) = an;
    M(2 * k + 1, f0) = -an * c2;
  }
  M(2 * K, 0) = m;
  M(2 * K, 1) = fam.w(mode.n, 0);
  return M;
}

}  // namespace

OracleResult oracle_solve(ModeIndex mode, const Families& fam, const RhsPair& r,
                          const BoundaryData& bd, const Mat2& tail, bool singular_values) {
  const std::int64_t len = static_cast<std::int64_t>(r.r1.values.size());
  const std::int64_t K = len;
  if (K < 1) fail(ErrorCode::Argument, "oracle needs at least one block row");
  Eigen::MatrixXd M = assemble(mode, fam, K);
  const std::int64_t N = M.rows();
  const Vec2 w = transpose(tail) * perp(bd.k_inf);
  M(N - 1, 2 * K) = w.x;
  M(N - 1, 2 * K + 1) = w.y;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
  for (std::int64_t k = 0; k < K; ++k) {
    b(2 * k) = r.r1.values[k];
    b(2 * k + 1) = r.r2.values[k];
  }
  b(2 * K) = r.q0;
  for (std::int64_t i = 0; i < N; ++i) {
    const double s = M.row(i).cwiseAbs().maxCoeff();
    M.row(i) /= s;
    b(i) /= s;
  }
  OracleResult res;
  if (singular_values) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    res.sigma_max = sv(0);
    res.sigma_min = sv(sv.size() - 1);
    if (!(res.sigma_min > 0.0)) {
      std::ostringstream os;
      os << "oracle system singular for mode " << to_string(mode)
         << ", smallest singular value " << res.sigma_min;
      fail(ErrorCode::Singular, os.str());
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::VectorXd x = lu.solve(b);
  // one step of iterative refinement
  x += lu.solve(b - M * x);
  std::vector<double> g(K + 1), f(K + 1);
  for (std::int64_t k = 0; k <= K; ++k) {
    g[k] = x(2 * k);
    f[k] = x(2 * k + 1);
  }
  res.h = make_pair(mode, std::move(g), std::move(f));
  return res;
}

NullspaceReport oracle_nullspace(const KernelSolution& sol, const Families& fam) {
  const std::int64_t K = sol.k_max;
  Eigen::MatrixXd M = assemble(sol.mode, fam, K).topRows(2 * K + 1);
  for (std::int64_t i = 0; i < M.rows(); ++i) M.row(i) /= M.row(i).cwiseAbs().maxCoeff();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  NullspaceReport rep;
  rep.sigma_max = sv(0);
  rep.sigma_min = sv(sv.size() - 1);
  const Eigen::VectorXd v = svd.matrixV().col(M.cols() - 1);
  Eigen::VectorXd I(M.cols());
  for (std::int64_t k = 0; k <= K; ++k) {
    I(2 * k) = sol.I[k].x;
    I(2 * k + 1) = sol.I[k].y;
  }
  rep.cosine_with_I = std::abs(v.dot(I)) / (v.norm() * I.norm());
  return rep;
}

}  // namespace qst
