#include "qst/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <ostream>
#include <thread>

#include "qst/error.hpp"

namespace qst {

namespace {

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

double comp(const Vec2& v, int idx) { return idx == 1 ? v.x : v.y; }

// HS^2 of the X or Y kernel (alpha, beta) on k, i <= K.
// X: sum_k I_a(k)^2/a(k) sum_{i in R} Pi(i)^2 K_b(i)^2 / a(i), R = {i > k} (b=1), {i >= k} (b=2)
// Y: sum_k K_a(k)^2/a(k) sum_{i in R} Pi(i)^2 I_b(i)^2 / a(i), R = {i <= k} (b=1), {i < k} (b=2)
double hs_xy(bool is_x, int alpha, int beta, const KernelSolution& sol, const Families& fam) {
  const int n = sol.mode.n;
  const std::int64_t K = sol.k_max;
  const int out_level = n - 1 + alpha;
  const int in_level = n - 1 + beta;
  auto inner = [&](std::int64_t i) {
    const double pi = 1.0 / sol.det_ratio[i];
    const double s = comp(is_x ? sol.K[i] : sol.I[i], beta);
    return pi * pi * s * s / fam.w(in_level, i);
  };
  auto outer = [&](std::int64_t k) {
    const double s = comp(is_x ? sol.I[k] : sol.K[k], alpha);
    return s * s / fam.w(out_level, k);
  };
  double total = 0.0, acc = 0.0;
  if (is_x) {
    for (std::int64_t k = K; k >= 0; --k) {
      if (beta == 2) acc += inner(k);
      total += outer(k) * acc;
      if (beta == 1) acc += inner(k);
    }
  } else {
    for (std::int64_t k = 0; k <= K; ++k) {
      if (beta == 1) acc += inner(k);
      total += outer(k) * acc;
      if (beta == 2) acc += inner(k);
    }
  }
  return total;
}

// sum_k S_a(k)^2 T_b(k)^2 Pi(k)^2 / (a_level(k))^2 on the diagonal
double diagonal(int idx, const KernelSolution& sol, const Families& fam) {
  const int level = sol.mode.n - 1 + idx;
  double d = 0.0;
  for (std::int64_t k = 0; k <= sol.k_max; ++k) {
    const double pi = 1.0 / sol.det_ratio[k];
    const double a = fam.w(level, k);
    const double v = comp(sol.I[k], idx) * comp(sol.K[k], idx) * pi / a;
    d += v * v;
  }
  return d;
}

}  // namespace

bool HsReport::bounds_pass() const {
  if (!pass_Z || !pass_W) return false;
  if (!has_xy) return true;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      if (!pass_X[a][b] || !pass_Y[a][b]) return false;
  return true;
}

double HsReport::worst_fubini(bool corrected) const {
  double w = 0.0;
  for (const FubiniPair& f : fubini) w = std::max(w, corrected ? f.corrected_rel_diff : f.rel_diff);
  return w;
}

HsReport hs_norms(const KernelSolution& sol, const Families& fam, double tol) {
  const ModeIndex mode = sol.mode;
  const int n = mode.n;
  const std::int64_t K = sol.k_max;
  HsReport r;
  r.mode = mode;
  r.k_max = K;
  r.s_n = eval_s(fam.w, n, tol).value;
  r.s_n1 = eval_s(fam.w, n + 1, tol).value;
  r.kappa = fam.c.kappa();
  r.tau = sol.tau;
  r.epsilon = sol.epsilon.value;
  r.ratio = sol.K_inf.y != 0.0 ? std::abs(sol.K_inf.x / sol.K_inf.y) : 0.0;
  const double wt_n = weight_tail_sum(fam.w, n, K);
  const double wt_n1 = weight_tail_sum(fam.w, n + 1, K);

  if (mode.m == 0) {
    // Z: sum_k 1/a_{n+1}(k) sum_{i<=k} (prod_{j=i}^{k-1} c2)^2 / a_n(i)
    // W: sum_k 1/a_n(k) sum_{i>=k} (prod_{j=k}^{i-1} c1)^2 / a_{n+1}(i)
    double z = 0.0, acc = 0.0;
    for (std::int64_t k = 0; k <= K; ++k) {
      if (k > 0) {
        const double c = fam.c.c2(n, k - 1);
        acc *= c * c;
      }
      acc += 1.0 / fam.w(n, k);
      z += acc / fam.w(n + 1, k);
    }
    double w = 0.0, outer_n = 0.0;
    acc = 0.0;
    for (std::int64_t k = K; k >= 0; --k) {
      if (k < K) {
        const double c = fam.c.c1(n, k);
        acc *= c * c;
      }
      acc += 1.0 / fam.w(n + 1, k);
      w += acc / fam.w(n, k);
      outer_n += 1.0 / fam.w(n, k);
    }
    r.hs_Z = z;
    r.tail_Z = r.s_n * wt_n1;
    r.bound_Z = r.s_n * r.s_n1;
    r.pass_Z = z + r.tail_Z <= r.bound_Z * (1.0 + kBoundSlack);
    r.hs_W = w;
    r.tail_W = outer_n * wt_n1 + wt_n * r.s_n1;
    r.bound_W = r.s_n * r.s_n1;
    r.pass_W = w + r.tail_W <= r.bound_W * (1.0 + kBoundSlack);
    r.proxy = std::sqrt(z + w);
    return r;
  }

  r.has_xy = true;
  const double t2k = r.tau * r.tau * r.kappa;
  const double coef[2] = {t2k * (r.epsilon + r.ratio), t2k * r.epsilon};
  const double s_alpha[2] = {r.s_n, r.s_n1};
  const double wt_alpha[2] = {wt_n, wt_n1};

  // Envelope for i > K: |K_b(i)| <= ||K(K)||_inf e^S and |Pi(i)| <= |Pi(K)| / prod_{j>=K} c2.
  const Vec2& KK = sol.K.back();
  const double k_env = std::max(std::abs(KK.x), std::abs(KK.y)) * std::exp(sol.tail_sum_bound);
  const double pi_env = 1.0 / std::abs(sol.det_ratio.back()) /
                        coefficient_tail_product(fam.c, 2, n, K);
  const double inner_env = k_env * k_env * pi_env * pi_env;

  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      r.hs_X[a - 1][b - 1] = hs_xy(true, a, b, sol, fam);
      r.hs_Y[a - 1][b - 1] = hs_xy(false, a, b, sol, fam);
      r.bound_X[a - 1][b - 1] = coef[a - 1] * s_alpha[a - 1];
      r.bound_Y[a - 1][b - 1] = coef[b - 1] * s_alpha[b - 1];
    }
  for (int a = 1; a <= 2; ++a) {
    double outer_sum = 0.0;
    for (std::int64_t k = 0; k <= K; ++k) {
      const double s = comp(sol.I[k], a);
      outer_sum += s * s / fam.w(n - 1 + a, k);
    }
    for (int b = 1; b <= 2; ++b)
      r.tail_X[a - 1][b - 1] =
          coef[a - 1] * wt_alpha[a - 1] + outer_sum * inner_env * wt_alpha[b - 1];
  }
  // Y^{ab} covers the same triangle as X^{ba}.
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) r.tail_Y[a][b] = r.tail_X[b][a];

  double sum_sq = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      r.pass_X[a][b] = r.hs_X[a][b] + r.tail_X[a][b] <= r.bound_X[a][b] * (1.0 + kBoundSlack);
      r.pass_Y[a][b] = r.hs_Y[a][b] + r.tail_Y[a][b] <= r.bound_Y[a][b] * (1.0 + kBoundSlack);
      sum_sq += r.hs_X[a][b] + r.hs_Y[a][b];
    }
  r.proxy = std::sqrt(sum_sq) / std::abs(r.tau);

  const double d11 = diagonal(1, sol, fam);
  const double d22 = diagonal(2, sol, fam);
  auto pair = [&](std::string name, double x, double y, double d, double xc, double yc) {
    return FubiniPair{std::move(name), x, y, rel(x, y), d, rel(xc, yc)};
  };
  r.fubini.push_back(pair("X11=Y11", r.hs_X[0][0], r.hs_Y[0][0], d11,
                          r.hs_X[0][0] + d11, r.hs_Y[0][0]));
  r.fubini.push_back(pair("X22=Y22", r.hs_X[1][1], r.hs_Y[1][1], d22,
                          r.hs_X[1][1], r.hs_Y[1][1] + d22));
  r.fubini.push_back(pair("X12=Y21", r.hs_X[0][1], r.hs_Y[1][0], 0.0,
                          r.hs_X[0][1], r.hs_Y[1][0]));
  r.fubini.push_back(pair("X21=Y12", r.hs_X[1][0], r.hs_Y[0][1], 0.0,
                          r.hs_X[1][0], r.hs_Y[0][1]));
  return r;
}

bool DecayTable::all_bounds_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const HsReport& r) { return r.bounds_pass(); });
}

namespace {

Envelope envelope(const std::vector<HsReport>& rows, bool by_m) {
  std::map<int, double> best;
  for (const HsReport& r : rows) {
    const int key = by_m ? std::abs(r.mode.m) : r.mode.n;
    auto [it, fresh] = best.emplace(key, r.proxy);
    if (!fresh) it->second = std::max(it->second, r.proxy);
  }
  Envelope e;
  for (const auto& [k, v] : best) {
    e.keys.push_back(k);
    e.values.push_back(v);
  }
  e.nonincreasing = std::is_sorted(e.values.rbegin(), e.values.rend());
  return e;
}

}  // namespace

Envelope envelope_along_m(const std::vector<HsReport>& rows) { return envelope(rows, true); }
Envelope envelope_along_n(const std::vector<HsReport>& rows) { return envelope(rows, false); }

DecayTable decay_scan(const std::vector<ModeIndex>& modes, const Families& fam,
                      const ScanOptions& opts) {
  std::vector<ModeIndex> order = modes;
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  DecayTable table;
  table.rows.resize(order.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(order.size(), opts.threads > 0 ? opts.threads : hw);
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < order.size(); i += workers) {
        try {
          const KernelSolution sol = solve_kernel(order[i], fam, opts.k_max, opts.rule, opts.solve);
          table.rows[i] = hs_norms(sol, fam, opts.solve.tail.tol);
        } catch (const Error& e) {
          const std::string tag = "mode " + to_string(order[i]);
          const std::string msg = e.what();
          throw Error(e.code(), msg.rfind(tag, 0) == 0 ? msg : tag + ": " + msg);
        }
      }
    }));
  for (auto& j : jobs) j.get();

  table.along_m = envelope_along_m(table.rows);
  table.along_n = envelope_along_n(table.rows);
  return table;
}

std::vector<std::string> hs_csv_header() {
  std::vector<std::string> h = {"m", "n", "k_max"};
  for (const char* kind : {"X", "Y"})
    for (int a = 1; a <= 2; ++a)
      for (int b = 1; b <= 2; ++b) {
        const std::string base = std::string(kind) + std::to_string(a) + std::to_string(b);
        h.push_back("hs_" + base);
        h.push_back("tail_" + base);
        h.push_back("bound_" + base);
        h.push_back("pass_" + base);
      }
  for (const char* kind : {"Z", "W"}) {
    const std::string base = kind;
    h.push_back("hs_" + base);
    h.push_back("tail_" + base);
    h.push_back("bound_" + base);
    h.push_back("pass_" + base);
  }
  for (const char* c : {"epsilon", "s_n", "s_n1", "tau", "ratio", "kappa", "proxy",
                        "fubini_worst", "fubini_worst_corrected"})
    h.emplace_back(c);
  return h;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> hs_csv_row(const HsReport& r) {
  std::vector<std::string> row = {std::to_string(r.mode.m), std::to_string(r.mode.n),
                                  std::to_string(r.k_max)};
  auto cell = [&](bool present, double hs, double tail, double bound, bool pass) {
    if (!present) {
      row.insert(row.end(), 4, "");
      return;
    }
    row.push_back(num(hs));
    row.push_back(num(tail));
    row.push_back(num(bound));
    row.push_back(pass ? "1" : "0");
  };
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      cell(r.has_xy, r.hs_X[a][b], r.tail_X[a][b], r.bound_X[a][b], r.pass_X[a][b]);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      cell(r.has_xy, r.hs_Y[a][b], r.tail_Y[a][b], r.bound_Y[a][b], r.pass_Y[a][b]);
  cell(!r.has_xy, r.hs_Z, r.tail_Z, r.bound_Z, r.pass_Z);
  cell(!r.has_xy, r.hs_W, r.tail_W, r.bound_W, r.pass_W);
  for (double v : {r.epsilon, r.s_n, r.s_n1, r.tau, r.ratio, r.kappa, r.proxy})
    row.push_back(num(v));
  row.push_back(r.has_xy ? num(r.worst_fubini(false)) : "");
  row.push_back(r.has_xy ? num(r.worst_fubini(true)) : "");
  return row;
}

void write_csv(std::ostream& os, const DecayTable& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(hs_csv_header());
  for (const HsReport& r : table.rows) line(hs_csv_row(r));
}

}  // namespace qst
