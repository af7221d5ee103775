#include "qst/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qst/error.hpp"

namespace qst {

std::string BoundaryRule::describe() const {
  if (kind == Kind::Default) return "default: K(inf) = (sgn(m)/(1+m^2), 1)";
  std::ostringstream os;
  os << "custom table (" << custom.size() << " entries)";
  return os.str();
}

void check_sign_conditions(ModeIndex mode, const Vec2& k) {
  std::ostringstream os;
  os.precision(17);
  if (!std::isfinite(k.x) || !std::isfinite(k.y)) {
    os << "mode " << to_string(mode) << ": K(inf) not finite";
    fail(ErrorCode::BoundaryRule, os.str());
  }
  if (mode.m > 0 && !(k.x > 0.0 && k.y > 0.0)) {
    os << "mode " << to_string(mode)
       << ": condition 1 violated (m > 0 requires K1(inf) > 0 and K2(inf) > 0), got ("
       << k.x << ", " << k.y << ")";
    fail(ErrorCode::BoundaryRule, os.str());
  }
  if (mode.m < 0 && !(k.x < 0.0 && k.y > 0.0)) {
    os << "mode " << to_string(mode)
       << ": condition 2 violated (m < 0 requires K1(inf) < 0 and K2(inf) > 0), got ("
       << k.x << ", " << k.y << ")";
    fail(ErrorCode::BoundaryRule, os.str());
  }
  if (mode.m == 0 && !(k.x == 0.0 && k.y != 0.0)) {
    os << "mode " << to_string(mode)
       << ": condition 3 violated (m = 0 requires K1(inf) = 0 and K2(inf) != 0), got ("
       << k.x << ", " << k.y << ")";
    fail(ErrorCode::BoundaryRule, os.str());
  }
}

BoundaryData choose_K_infinity(ModeIndex mode, const BoundaryRule& rule) {
  BoundaryData bd;
  bd.rule = rule.describe();
  if (rule.kind == BoundaryRule::Kind::Default) {
    const double m = mode.m;
    const double sg = mode.m > 0 ? 1.0 : (mode.m < 0 ? -1.0 : 0.0);
    bd.k_inf = {sg / (1.0 + m * m), 1.0};
  } else {
    auto it = rule.custom.find(mode.m);
    if (it == rule.custom.end())
      fail(ErrorCode::BoundaryRule,
           "mode " + to_string(mode) + ": custom boundary table has no entry for m");
    bd.k_inf = it->second;
  }
  check_sign_conditions(mode, bd.k_inf);
  return bd;
}

std::vector<HypothesisCheck> validate_boundary_rule(const BoundaryRule& rule,
                                                    const std::vector<int>& m_values) {
  std::vector<HypothesisCheck> out;
  {
    HypothesisCheck c{"boundary.sign_conditions", true, "all listed m conform"};
    for (int m : m_values) {
      try {
        (void)choose_K_infinity({m, 0}, rule);
      } catch (const Error& e) {
        c.passed = false;
        c.witness = e.what();
        break;
      }
    }
    out.push_back(c);
  }
  {
    HypothesisCheck c{"boundary.ratio_decay", true, ""};
    std::vector<std::pair<int, double>> ratios;
    for (int m : m_values) {
      if (m == 0) continue;
      try {
        const Vec2 k = choose_K_infinity({m, 0}, rule).k_inf;
        ratios.push_back({std::abs(m), std::abs(k.x / k.y)});
      } catch (const Error&) {
      }
    }
    std::sort(ratios.begin(), ratios.end());
    std::ostringstream os;
    for (std::size_t i = 1; i < ratios.size(); ++i)
      if (ratios[i].first > ratios[i - 1].first && ratios[i].second > ratios[i - 1].second) {
        c.passed = false;
        os << "|K1/K2|(inf) increases from |m| = " << ratios[i - 1].first << " to "
           << ratios[i].first;
        break;
      }
    if (c.passed) {
      os << "|K1/K2|(inf) nonincreasing in |m|";
      if (!ratios.empty()) os << ", " << ratios.back().second << " at |m| = " << ratios.back().first;
    }
    c.witness = os.str();
    out.push_back(c);
  }
  return out;
}

std::vector<Vec2> compute_I(ModeIndex mode, const Families& fam, std::int64_t k_max) {
  if (k_max < 1) fail(ErrorCode::Argument, "k_max must be >= 1");
  std::vector<Vec2> I;
  I.reserve(k_max + 1);
  I.push_back({-1.0, mode.m / fam.w(mode.n, 0)});
  for (std::int64_t k = 0; k < k_max; ++k) {
    const Vec2 next = build_C(mode, k, fam) * I.back();
    if (!std::isfinite(next.x) || !std::isfinite(next.y)) {
      std::ostringstream os;
      os << "I overflows at k = " << k + 1 << " for mode " << to_string(mode)
         << "; reduce k_max or rescale (tau-normalized quantities are scale free)";
      fail(ErrorCode::Range, os.str());
    }
    I.push_back(next);
  }
  return I;
}

std::vector<Vec2> compute_K(const TransferProduct& tp, const Families& fam,
                            const BoundaryData& bd, double tol) {
  (void)fam;
  if (!(tp.limit_rel_error <= tol)) {
    std::ostringstream os;
    os << "transfer tail error " << tp.limit_rel_error << " above tolerance " << tol;
    fail(ErrorCode::Convergence, os.str());
  }
  const std::int64_t K = tp.truncation_index;
  std::vector<Vec2> out(K + 1);
  out[K] = invert(tp.tail) * bd.k_inf;
  for (std::int64_t k = K - 1; k >= 0; --k) out[k] = invert(tp.factors[k]) * out[k + 1];
  return out;
}

double tau(const KernelSolution& sol) {
  const Vec2& K = sol.K.front();
  const Vec2& I = sol.I.front();
  return K.x * I.y - K.y * I.x;
}

SeriesValue epsilon(ModeIndex mode, const Families& fam, double tol) {
  const SeriesValue s = eval_s(fam.w, mode.n, tol);
  if (mode.m == 0) return s;
  const double m2 = static_cast<double>(mode.m) * mode.m;
  const PowerLaw& law = fam.w.tail();
  const double sn = law.lambda * std::pow(mode.n + 1.0, law.p);
  const double sn1 = law.lambda * std::pow(mode.n + 2.0, law.p);
  const std::int64_t k0 =
      std::max(fam.w.table_length(mode.n), fam.w.table_length(mode.n + 1));
  constexpr std::int64_t kMaxTerms = 100000000;
  double sum = 0.0;
  double bound = std::numeric_limits<double>::infinity();
  std::int64_t k = 0;
  for (;; ++k) {
    if (k >= k0 && k % 64 == 0) {
      // m^2 / (a_n (m^2 + a_n a_{n+1})) <= m^2 / (a_n^2 a_{n+1}) under the tail law
      const double kk = static_cast<double>(k);
      const double b_cubic = m2 / (sn * sn * sn1) * std::pow(kk, 1.0 - 3.0 * law.q) /
                             (3.0 * law.q - 1.0);
      const double b_plain = weight_tail_sum(fam.w, mode.n, k - 1);
      bound = std::min(k == 0 ? b_plain : b_cubic, b_plain);
      if (bound <= tol) break;
      if (k >= kMaxTerms) fail(ErrorCode::Convergence, "epsilon tail not certified");
    }
    const double an = fam.w(mode.n, k);
    const double an1 = fam.w(mode.n + 1, k);
    sum += m2 / (an * (m2 + an * an1));
  }
  SeriesValue out;
  out.value = s.value - sum;
  out.truncation_index = k;
  out.tail_bound = bound + s.tail_bound;
  return out;
}

KernelSolution solve_kernel(ModeIndex mode, const Families& fam, std::int64_t k_max,
                            const BoundaryRule& rule, const SolveOptions& opts) {
  const TransferProduct tp = limit_product(mode, fam, k_max, opts.tail);
  const BoundaryData bd = choose_K_infinity(mode, rule);
  KernelSolution sol;
  sol.mode = mode;
  sol.k_max = k_max;
  sol.I = compute_I(mode, fam, k_max);
  sol.K = compute_K(tp, fam, bd, opts.tail.tol);
  sol.K_inf = bd.k_inf;
  sol.I_inf = tp.tail * sol.I.back();
  sol.tail = tp.tail;
  sol.limit_error = tp.limit_error;
  sol.tail_sum_bound = tp.tail_sum_bound;
  const Mat2 tinv = invert(tp.tail);
  sol.K_tail_error = tp.limit_error * norm1(tinv) * norm1(tinv) *
                     (std::abs(bd.k_inf.x) + std::abs(bd.k_inf.y));
  sol.det_ratio.resize(k_max + 1);
  sol.det_ratio[0] = 1.0;
  for (std::int64_t k = 0; k < k_max; ++k)
    sol.det_ratio[k + 1] = sol.det_ratio[k] * fam.c.c2(mode.n, k) / fam.c.c1(mode.n, k);
  sol.tau = tau(sol);
  const Vec2& K0 = sol.K.front();
  const Vec2& I0 = sol.I.front();
  const double scale = std::abs(K0.x * I0.y) + std::abs(K0.y * I0.x);
  if (!(std::abs(sol.tau) > opts.tau_floor) || !(std::abs(sol.tau) > 1e-14 * scale)) {
    std::ostringstream os;
    os << "mode " << to_string(mode) << ": degenerate pairing tau = " << sol.tau;
    fail(ErrorCode::DegeneratePairing, os.str());
  }
  sol.epsilon = epsilon(mode, fam, opts.tail.tol);
  return sol;
}

std::vector<double> wronskian_residuals(const KernelSolution& sol) {
  std::vector<double> out(sol.k_max + 1);
  for (std::int64_t k = 0; k <= sol.k_max; ++k) {
    const double expect = sol.tau * sol.det_ratio[k];
    const double got = dot(sol.K[k], perp(sol.I[k]));
    out[k] = std::abs(got - expect) / std::abs(expect);
  }
  return out;
}

std::int64_t LemmaReport::total_violations() const {
  std::int64_t v = 0;
  for (const auto& c : clauses) v += c.violations;
  return v;
}

namespace {

class Clause {
 public:
  Clause(std::string name, double slack) : slack_(slack) { res_.name = std::move(name); }

  // Records lhs < rhs (strict) or lhs <= rhs at index k.
  void less(std::int64_t k, double lhs, double rhs, bool strict) {
    ++res_.checked;
    const double scale = std::max(std::abs(lhs) + std::abs(rhs), 1e-300);
    const double margin = (rhs - lhs) / scale;
    if (res_.checked == 1 || margin < res_.worst_margin) res_.worst_margin = margin;
    const double allowed = rhs + slack_ * scale;
    const bool ok = strict ? lhs < allowed : lhs <= allowed;
    if (!ok) {
      if (res_.violations == 0) {
        std::ostringstream os;
        os.precision(17);
        os << "k = " << k << ": " << lhs << (strict ? " >= " : " > ") << rhs;
        res_.first_violation_k = k;
        res_.counterexample = os.str();
      }
      ++res_.violations;
    }
  }
  void positive(std::int64_t k, double v) { less(k, 0.0, v, true); }
  ClauseResult result() const { return res_; }

 private:
  double slack_;
  ClauseResult res_;
};

}  // namespace

LemmaReport verify_lemma_suite(const KernelSolution& sol, const Families& fam,
                               double slack) {
  if (sol.mode.m == 0)
    fail(ErrorCode::Argument, "lemma suite applies to m != 0");
  LemmaReport rep;
  rep.mode = sol.mode;
  const int n = sol.mode.n;
  const std::int64_t N = sol.k_max;
  const double am = std::abs(static_cast<double>(sol.mode.m));
  const double sg = sol.mode.m > 0 ? 1.0 : -1.0;
  // Mirror onto the m > 0 sign pattern.
  std::vector<double> i1(N + 1), i2(N + 1), k1(N + 1), k2(N + 1);
  for (std::int64_t k = 0; k <= N; ++k) {
    i1[k] = -sol.I[k].x;
    i2[k] = sg * sol.I[k].y;
    k1[k] = sg * sol.K[k].x;
    k2[k] = sol.K[k].y;
  }
  const double tau = sol.tau;
  const double eps = sol.epsilon.value;
  const double ratio = std::abs(sol.K_inf.x / sol.K_inf.y);
  auto c1 = [&](std::int64_t k) { return fam.c.c1(n, k); };
  auto c2 = [&](std::int64_t k) { return fam.c.c2(n, k); };

  Clause pos_i1("positivity: -I1 > 0", slack), pos_i2("positivity: I2 > 0", slack),
      pos_k1("positivity: K1 > 0", slack), pos_k2("positivity: K2 > 0", slack);
  for (std::int64_t k = 0; k <= N; ++k) {
    pos_i1.positive(k, i1[k]);
    pos_i2.positive(k, i2[k]);
    pos_k1.positive(k, k1[k]);
    pos_k2.positive(k, k2[k]);
  }

  Clause mono_i1("monotonicity: -I1(k) < -I1(k+1)", slack), mono_i2("monotonicity: I2(k) < I2(k+1)/c2(k)", slack),
      mono_k1("monotonicity: K1(k+1) < K1(k)/c1(k)", slack), mono_k2("monotonicity: K2(k+1) < K2(k)", slack);
  Clause eps_i("epsilon: I2(k) <= |m| eps (-I1(k+1))", slack),
      eps_k("epsilon: K1(k+1) <= |m| (eps + |K1/K2|(inf)) K2(k)", slack);
  for (std::int64_t k = 0; k < N; ++k) {
    mono_i1.less(k, i1[k], i1[k + 1], true);
    mono_i2.less(k, i2[k], i2[k + 1] / c2(k), true);
    mono_k1.less(k, k1[k + 1], k1[k] / c1(k), true);
    mono_k2.less(k, k2[k + 1], k2[k], true);
    eps_i.less(k, i2[k], am * eps * i1[k + 1], false);
    eps_k.less(k, k1[k + 1], am * (eps + ratio) * k2[k], false);
  }

  // Truncated tails of the two summation estimates, by suffix sums.
  Clause sum_1("summation: sum_{i>k} prod c1 K2(i-1)/a_{n+1}(i-1) <= prod c1 K1(k)/|m|", slack),
      sum_2("summation: sum_{i>k} K1(i)/a_n(i) <= K2(k)/|m|", slack);
  {
    std::vector<double> pc1(N + 1);  // prod_{j<k} c1(j)
    pc1[0] = 1.0;
    for (std::int64_t k = 0; k < N; ++k) pc1[k + 1] = pc1[k] * c1(k);
    double s1 = 0.0, s2 = 0.0;
    for (std::int64_t k = N - 1; k >= 0; --k) {
      // term i = k+1 uses index i-1 = k with prod_{j <= k-1} c1 = pc1[k]
      s1 += pc1[k] * k2[k] / fam.w(n + 1, k);
      s2 += k1[k + 1] / fam.w(n, k + 1);
      sum_1.less(k, s1, pc1[k] * k1[k] / am, false);
      sum_2.less(k, s2, k2[k] / am, false);
    }
  }

  Clause prod_1("product: K1(k) I2(k) <= tau prod c2/c1", slack),
      prod_2("product: -K2(k) I1(k) <= tau prod c2/c1", slack),
      prod_3("product: -I1(k+1) K2(k) <= tau/c1(k) prod c2/c1", slack),
      prod_4("product: I2(k) K1(k+1) <= tau/c1(k) prod c2/c1", slack);
  for (std::int64_t k = 0; k <= N; ++k) {
    const double bound = tau * sol.det_ratio[k];
    prod_1.less(k, k1[k] * i2[k], bound, false);
    prod_2.less(k, k2[k] * i1[k], bound, false);
    if (k < N) {
      prod_3.less(k, i1[k + 1] * k2[k], bound / c1(k), false);
      prod_4.less(k, i2[k] * k1[k + 1], bound / c1(k), false);
    }
  }

  for (const Clause* c : {&pos_i1, &pos_i2, &pos_k1, &pos_k2, &mono_i1, &mono_i2, &mono_k1,
                          &mono_k2, &eps_i, &eps_k, &sum_1, &sum_2, &prod_1, &prod_2, &prod_3,
                          &prod_4})
    rep.clauses.push_back(c->result());
  return rep;
}

}  // namespace qst
