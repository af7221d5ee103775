#include "qst/transfer.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

#include "qst/error.hpp"

namespace qst {

std::string to_string(const ModeIndex& mode) {
  std::ostringstream os;
  os << "(" << mode.m << "," << mode.n << ")";
  return os.str();
}

Mat2 build_A(ModeIndex mode, std::int64_t k, const Families& fam) {
  const double an1 = fam.w(mode.n + 1, k);
  return {an1 * fam.c.c1(mode.n, k), 0.0, static_cast<double>(mode.m),
          fam.w(mode.n, k + 1)};
}

Mat2 build_B(ModeIndex mode, std::int64_t k, const Families& fam) {
  return {fam.w(mode.n + 1, k), -static_cast<double>(mode.m), 0.0,
          fam.w(mode.n, k + 1) * fam.c.c2(mode.n, k)};
}

Mat2 build_C(ModeIndex mode, std::int64_t k, const Families& fam) {
  const double m = mode.m;
  const double an1 = fam.w(mode.n + 1, k);      // a_{n+1}(k)
  const double an = fam.w(mode.n, k + 1);       // a_n(k+1)
  const double c1 = fam.c.c1(mode.n, k);
  const double c2 = fam.c.c2(mode.n, k);
  return {1.0 / c1, -m / (an1 * c1), -m / (an * c1),
          c2 + m * m / (an * an1 * c1)};
}

Mat2 invert(const Mat2& m, double floor) {
  const double det = m.det();
  if (!(std::abs(det) > floor) || !std::isfinite(det)) {
    std::ostringstream os;
    os << "matrix determinant " << det << " below singularity floor " << floor;
    fail(ErrorCode::Singular, os.str());
  }
  const double s = 1.0 / det;
  return {s * m.d, -s * m.b, -s * m.c, s * m.a};
}

namespace {

std::vector<double> richardson_exponents(double q, int count) {
  std::vector<double> out;
  for (int a = 1; a <= count; ++a)
    for (int b = 0; b <= count; ++b) out.push_back(a * (q - 1.0) + b);
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double g : out)
    if (uniq.empty() || g - uniq.back() > 1e-9) uniq.push_back(g);
  uniq.resize(std::min<std::size_t>(uniq.size(), count));
  return uniq;
}

std::int64_t geometric_cutoff(double t) {
  if (t <= 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(std::log(1e-18) / std::log(t)));
}

// Bound for sum_{k >= M} ||C(k) - I||_1 once M is past every table.
double far_tail_sum(ModeIndex mode, const Families& fam, std::int64_t M) {
  const double t1 = fam.c.kind() == CoefficientFamily::Kind::Unit ? 0.0 : fam.c.tail_t(1);
  const double t2 = fam.c.kind() == CoefficientFamily::Kind::Unit ? 0.0 : fam.c.tail_t(2);
  const double g1 = std::pow(t1, static_cast<double>(M) + 1.0);
  const double g2 = std::pow(t2, static_cast<double>(M) + 1.0);
  const double cmin = 1.0 - g1;
  const double m = std::abs(static_cast<double>(mode.m));
  const double w_up = weight_tail_sum(fam.w, mode.n + 1, M - 1);
  const double w_lo = weight_tail_sum(fam.w, mode.n, M);
  double s = 0.0;
  if (t1 > 0.0) s += g1 / ((1.0 - t1) * cmin);
  if (t2 > 0.0) s += g2 / (1.0 - t2);
  s += m / cmin * (w_up + w_lo) + m * m / cmin * w_up * w_lo;
  return s;
}

}  // namespace

TransferProduct limit_product(ModeIndex mode, const Families& fam,
                              std::int64_t K, const TailOptions& opts) {
  if (K < 0) fail(ErrorCode::Argument, "truncation index must be >= 0");
  if (mode.n < 0) fail(ErrorCode::Argument, "mode level n must be >= 0");
  TransferProduct tp;
  tp.mode = mode;
  tp.truncation_index = K;
  tp.J1 = eval_J(fam.c, 1, mode.n, opts.tol).value;
  tp.J2 = eval_J(fam.c, 2, mode.n, opts.tol).value;

  tp.factors.reserve(K);
  tp.partials.reserve(K + 1);
  tp.partials.push_back(Mat2::identity());
  for (std::int64_t k = 0; k < K; ++k) {
    tp.factors.push_back(build_C(mode, k, fam));
    tp.partials.push_back(tp.factors.back() * tp.partials.back());
  }

  std::int64_t anchor = std::max(K, opts.anchor_min);
  anchor = std::max(anchor, fam.w.table_length(mode.n) + 1);
  anchor = std::max(anchor, fam.w.table_length(mode.n + 1) + 1);
  anchor = std::max(anchor, fam.c.table_length(1, mode.n));
  anchor = std::max(anchor, fam.c.table_length(2, mode.n));
  if (fam.c.kind() != CoefficientFamily::Kind::Unit) {
    anchor = std::max(anchor, geometric_cutoff(fam.c.tail_t(1)));
    anchor = std::max(anchor, geometric_cutoff(fam.c.tail_t(2)));
  }
  tp.anchor = anchor;

  Mat2 head = Mat2::identity();  // C(anchor-1)...C(K)
  double explicit_sum = 0.0;
  for (std::int64_t k = K; k < anchor; ++k) {
    const Mat2 C = build_C(mode, k, fam);
    explicit_sum += norm1(C - Mat2::identity());
    head = C * head;
  }
  tp.tail_sum_bound = explicit_sum + far_tail_sum(mode, fam, anchor);

  // S_j = C(L_j - 1)...C(anchor), L_j = anchor 2^j; S_j -> T(anchor) with an
  // error expansion in powers L_j^{-gamma}.
  const auto gamma = richardson_exponents(fam.w.tail().q, opts.max_levels);
  std::vector<std::vector<Mat2>> R;
  Mat2 S = Mat2::identity();
  std::int64_t L = anchor;
  Mat2 best = S;
  double err = std::numeric_limits<double>::infinity();
  int levels = 0;
  for (int j = 0; j <= opts.max_levels; ++j) {
    if (j > 0) {
      const std::int64_t next = 2 * L;
      for (std::int64_t k = L; k < next; ++k) S = build_C(mode, k, fam) * S;
      L = next;
    }
    std::vector<Mat2> row{S};
    for (int s = 1; s <= j; ++s) {
      const double f = 1.0 / (std::pow(2.0, gamma[s - 1]) - 1.0);
      const Mat2& cur = row[s - 1];
      const Mat2& prev = R[j - 1][s - 1];
      row.push_back({cur.a + f * (cur.a - prev.a), cur.b + f * (cur.b - prev.b),
                     cur.c + f * (cur.c - prev.c), cur.d + f * (cur.d - prev.d)});
    }
    R.push_back(row);
    levels = j;
    if (j >= 2) {
      const Mat2& now = R[j][j];
      const double diff = norm1(now - R[j - 1][j - 1]);
      best = now;
      err = diff;
      if (diff <= 0.1 * opts.tol * norm1(now)) break;
    }
  }
  if (!(err <= opts.tol * norm1(best))) {
    std::ostringstream os;
    os << "transfer tail for mode " << to_string(mode)
       << " not converged: extrapolation difference " << err;
    fail(ErrorCode::Convergence, os.str());
  }
  tp.levels = levels;
  tp.tail = best * head;
  tp.limit_error = err * norm1(head);
  tp.limit_rel_error = err / norm1(best);
  tp.limit = tp.tail * tp.partials.back();
  return tp;
}

bool StructureReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

StructureReport structure_check(const TransferProduct& tp, double tol) {
  StructureReport rep;
  const Mat2& L = tp.limit;
  const double m = tp.mode.m;
  auto add = [&](std::string name, bool ok, double lhs, double rhs) {
    std::ostringstream os;
    os.precision(17);
    os << lhs << " vs " << rhs;
    rep.checks.push_back({std::move(name), ok, os.str()});
  };
  const double ratio = tp.J2 / tp.J1;
  // ad - bc cancels badly once the limit entries grow with |m|; the product
  // structure gives the determinant factor by factor instead.
  double det = tp.tail.det();
  for (const Mat2& C : tp.factors) det *= C.det();
  add("det_limit_equals_J2_over_J1", std::abs(det - ratio) <= tol * ratio,
      det, ratio);
  if (tp.mode.m == 0) {
    add("offdiag_zero", L.b == 0.0 && L.c == 0.0, L.b, L.c);
    return rep;
  }
  rep.F0 = L.a - 1.0 / tp.J1;
  rep.F1 = -L.b / m;
  rep.F2 = -L.c / m;
  rep.F3 = L.d - tp.J2;
  const double scale = norm1(L);
  add("F0_nonnegative", rep.F0 >= -tol * scale, rep.F0, 0.0);
  add("F3_nonnegative", rep.F3 >= -tol * scale, rep.F3, 0.0);
  const double sg = m > 0 ? 1.0 : -1.0;
  add("offdiag_sign", -sg * L.b > 0.0 && -sg * L.c > 0.0, L.b, L.c);
  const double rel = (m * m * rep.F1 * rep.F2 - rep.F0 * tp.J2) / (1.0 / tp.J1 + rep.F0);
  const double rel_scale = (m * m * std::abs(rep.F1 * rep.F2) +
                            std::abs(rep.F0) * tp.J2) /
                               (1.0 / tp.J1 + rep.F0) +
                           std::abs(rep.F3);
  add("F3_relation", std::abs(rep.F3 - rel) <= tol * rel_scale, rep.F3, rel);
  return rep;
}

}  // namespace qst
