#include "qst/weights.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qst/error.hpp"

namespace qst {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::HypothesisViolation: return "hypothesis violation";
    case ErrorCode::Convergence: return "convergence failure";
    case ErrorCode::Singular: return "singular matrix";
    case ErrorCode::DegeneratePairing: return "degenerate pairing";
    case ErrorCode::TagMismatch: return "weight tag mismatch";
    case ErrorCode::Range: return "range error";
    case ErrorCode::BoundaryRule: return "boundary rule rejected";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Argument: return "invalid argument";
  }
  return "unknown error";
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

double level_scale(const PowerLaw& law, int n) {
  return law.lambda * std::pow(static_cast<double>(n) + 1.0, law.p);
}

}  // namespace

WeightFamily WeightFamily::power(double lambda, double p, double q) {
  if (!std::isfinite(lambda) || !std::isfinite(p) || !std::isfinite(q))
    fail(ErrorCode::Argument, "weight parameters must be finite");
  WeightFamily w;
  w.kind_ = Kind::Power;
  w.tail_ = {lambda, p, q};
  w.integer_q_ = (q == std::floor(q) && q >= 0 && q <= 16);
  w.iq_ = w.integer_q_ ? static_cast<int>(q) : 0;
  w.scale_.resize(65);
  for (int n = 0; n < 65; ++n) w.scale_[n] = level_scale(w.tail_, n);
  return w;
}

WeightFamily WeightFamily::tabulated(std::vector<std::vector<double>> table,
                                     PowerLaw tail) {
  WeightFamily w = power(tail.lambda, tail.p, tail.q);
  w.kind_ = Kind::Tabulated;
  w.table_ = std::move(table);
  return w;
}

std::int64_t WeightFamily::table_length(int n) const {
  if (n < 0 || static_cast<std::size_t>(n) >= table_.size()) return 0;
  return static_cast<std::int64_t>(table_[n].size());
}

double WeightFamily::operator()(int n, std::int64_t k) const {
  if (n >= 0 && static_cast<std::size_t>(n) < table_.size() &&
      k < static_cast<std::int64_t>(table_[n].size()))
    return table_[n][k];
  const double x = static_cast<double>(k) + 1.0;
  const double radial = integer_q_ ? ipow(x, iq_) : std::pow(x, tail_.q);
  const double scale = n >= 0 && static_cast<std::size_t>(n) < scale_.size()
                           ? scale_[n]
                           : level_scale(tail_, n);
  return scale * radial;
}

CoefficientFamily CoefficientFamily::unit(double kappa) {
  CoefficientFamily c;
  c.kind_ = Kind::Unit;
  c.kappa_ = kappa;
  return c;
}

CoefficientFamily CoefficientFamily::geometric_gap(double t1, double t2,
                                                   double kappa) {
  if (!(t1 >= 0 && t1 < 1) || !(t2 >= 0 && t2 < 1))
    fail(ErrorCode::Argument, "geometric-gap parameters must lie in [0,1)");
  CoefficientFamily c;
  c.kind_ = Kind::GeometricGap;
  c.tail_ = {t1, t2};
  c.kappa_ = kappa;
  auto unit_from = [](double t) -> std::int64_t {
    if (t == 0.0) return 0;
    return static_cast<std::int64_t>(std::ceil(std::log(0.25 * kEps) / std::log(t)));
  };
  c.unit_from1_ = unit_from(t1);
  c.unit_from2_ = unit_from(t2);
  return c;
}

CoefficientFamily CoefficientFamily::tabulated(
    std::vector<std::vector<double>> table1,
    std::vector<std::vector<double>> table2, GapLaw tail, double kappa) {
  CoefficientFamily c = geometric_gap(tail.t1, tail.t2, kappa);
  c.kind_ = Kind::Tabulated;
  c.table1_ = std::move(table1);
  c.table2_ = std::move(table2);
  return c;
}

std::int64_t CoefficientFamily::table_length(int i, int n) const {
  const auto& t = i == 1 ? table1_ : table2_;
  if (n < 0 || static_cast<std::size_t>(n) >= t.size()) return 0;
  return static_cast<std::int64_t>(t[n].size());
}

double CoefficientFamily::operator()(int i, int n, std::int64_t k) const {
  if (kind_ == Kind::Unit) return 1.0;
  const auto& t = i == 1 ? table1_ : table2_;
  if (n >= 0 && static_cast<std::size_t>(n) < t.size() &&
      k < static_cast<std::int64_t>(t[n].size()))
    return t[n][k];
  const double base = tail_t(i);
  if (base == 0.0 || k >= (i == 1 ? unit_from1_ : unit_from2_)) return 1.0;
  // t^(k+1) underflows harmlessly to 0 for large k.
  return 1.0 - std::pow(base, static_cast<double>(k) + 1.0);
}

SeriesValue eval_s(const WeightFamily& w, int n, double tol) {
  (void)tol;  // closed forms below are exact up to rounding
  const PowerLaw& law = w.tail();
  if (!(law.q > 1.0)) {
    std::ostringstream os;
    os << "s(" << n << ") divergent: tail exponent q = " << law.q
       << " <= 1";
    fail(ErrorCode::HypothesisViolation, os.str());
  }
  const double scale = level_scale(law, n);
  if (!(scale > 0.0))
    fail(ErrorCode::HypothesisViolation, "weight scale must be positive");
  const double zeta = std::riemann_zeta(law.q);
  const std::int64_t k0 = w.table_length(n);
  SeriesValue out;
  out.truncation_index = k0;
  if (k0 == 0) {
    out.value = zeta / scale;
    out.tail_bound = 4 * kEps * out.value;
    return out;
  }
  double head = 0.0;
  for (std::int64_t k = 0; k < k0; ++k) {
    const double a = w(n, k);
    if (!(a > 0.0))
      fail(ErrorCode::HypothesisViolation, "tabulated weight not positive");
    head += 1.0 / a;
  }
  // sum_{j > k0} j^{-q} = zeta(q) - sum_{j <= k0} j^{-q}
  double partial = 0.0;
  for (std::int64_t j = k0; j >= 1; --j)
    partial += std::pow(static_cast<double>(j), -law.q);
  const double tail = (zeta - partial) / scale;
  out.value = head + tail;
  out.tail_bound = 4 * kEps * (head + (zeta + partial) / scale);
  return out;
}

SeriesValue eval_J(const CoefficientFamily& c, int i, int n, double tol) {
  if (i != 1 && i != 2) fail(ErrorCode::Argument, "coefficient index must be 1 or 2");
  SeriesValue out;
  if (c.kind() == CoefficientFamily::Kind::Unit) {
    out.value = 1.0;
    return out;
  }
  double log_sum = 0.0;
  std::int64_t k = 0;
  const std::int64_t k0 = c.table_length(i, n);
  for (; k < k0; ++k) {
    const double v = c(i, n, k);
    if (!(v > 0.0))
      fail(ErrorCode::HypothesisViolation, "coefficient not positive");
    log_sum += std::log(v);
  }
  const double t = c.tail_t(i);
  double bound = 0.0;
  if (t > 0.0) {
    constexpr std::int64_t kMaxTerms = 100000000;
    for (;;) {
      const double tk = std::pow(t, static_cast<double>(k) + 1.0);
      bound = tk / ((1.0 - t) * (1.0 - tk));
      if (bound < tol) break;
      if (k >= kMaxTerms)
        fail(ErrorCode::Convergence, "coefficient product tail not certified");
      log_sum += std::log1p(-tk);
      ++k;
    }
  }
  out.value = std::exp(log_sum);
  out.truncation_index = k;
  // Longer truncations lie in [value * exp(-bound), value].
  out.tail_bound = out.value * -std::expm1(-bound);
  if (!(out.value > tol)) {
    std::ostringstream os;
    os << "J_" << i << "(" << n << ") collapses to 0 (" << out.value << ")";
    fail(ErrorCode::HypothesisViolation, os.str());
  }
  return out;
}

double weight_tail_sum(const WeightFamily& w, int n, std::int64_t K) {
  const PowerLaw& law = w.tail();
  if (!(law.q > 1.0)) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::int64_t k = K + 1;
  const std::int64_t k0 = w.table_length(n);
  for (; k < k0; ++k) sum += 1.0 / w(n, k);
  if (k == 0) return sum + eval_s(w, n).value;
  // (k+1)^{-q} <= integral of x^{-q} over [k, k+1]
  const double scale = level_scale(law, n);
  sum += std::pow(static_cast<double>(k), 1.0 - law.q) / ((law.q - 1.0) * scale);
  return sum * (1.0 + 8 * kEps);
}

double coefficient_tail_product(const CoefficientFamily& c, int i, int n,
                                std::int64_t K) {
  if (c.kind() == CoefficientFamily::Kind::Unit) return 1.0;
  double log_sum = 0.0;
  std::int64_t k = K;
  const std::int64_t k0 = c.table_length(i, n);
  for (; k < k0; ++k) log_sum += std::log(c(i, n, k));
  const double t = c.tail_t(i);
  if (t > 0.0) {
    const double tk = std::pow(t, static_cast<double>(k) + 1.0);
    log_sum -= tk / ((1.0 - t) * (1.0 - tk));
  }
  return std::exp(log_sum) * (1.0 - 8 * kEps);
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

ValidationReport validate_hypotheses(const WeightFamily& w,
                                     const CoefficientFamily& c,
                                     const ProbeGrid& probe) {
  ValidationReport report;
  auto add = [&](std::string name, bool ok, std::string witness) {
    report.checks.push_back({std::move(name), ok, std::move(witness)});
  };

  {
    bool ok = w.tail().lambda > 0.0;
    std::ostringstream os;
    if (!ok) os << "lambda = " << w.tail().lambda << " <= 0";
    for (int n = 0; ok && n <= probe.n_max; ++n)
      for (std::int64_t k = 0; ok && k <= probe.k_max; ++k) {
        const double a = w(n, k);
        if (!(a > 0.0) || !std::isfinite(a)) {
          ok = false;
          os << "a_" << n << "(" << k << ") = " << a;
        }
      }
    for (std::size_t n = 0; ok && n < w.table().size(); ++n)
      for (std::size_t k = 0; ok && k < w.table()[n].size(); ++k)
        if (!(w.table()[n][k] > 0.0)) {
          ok = false;
          os << "table a_" << n << "(" << k << ") = " << w.table()[n][k];
        }
    if (ok) os << "a_n(k) > 0 for n <= " << probe.n_max << ", k <= " << probe.k_max;
    add("weights.positive", ok, os.str());
  }

  bool s_ok = w.tail().q > 1.0;
  {
    std::ostringstream os;
    if (s_ok)
      os << "tail exponent q = " << w.tail().q << " > 1";
    else
      os << "s(n) divergent: tail exponent q = " << w.tail().q << " <= 1";
    add("weights.s_finite", s_ok, os.str());
  }

  {
    std::ostringstream os;
    bool ok = s_ok && w.tail().p > 0.0;
    if (!s_ok) {
      os << "not evaluated: s(n) divergent";
    } else if (!(w.tail().p > 0.0)) {
      os << "s(n) does not tend to 0: mode exponent p = " << w.tail().p;
    } else {
      double prev = eval_s(w, 0).value;
      for (int n = 1; ok && n <= probe.n_max; ++n) {
        const double cur = eval_s(w, n).value;
        if (!(cur < prev)) {
          ok = false;
          os << "s(" << n << ") = " << cur << " >= s(" << n - 1 << ") = " << prev;
        }
        prev = cur;
      }
      if (ok) os << "s decreasing on n <= " << probe.n_max << ", s(" << probe.n_max << ") = " << prev;
    }
    add("weights.s_decreasing_to_zero", ok, os.str());
  }

  {
    std::ostringstream os;
    bool ok = c.kappa() >= 1.0;
    if (!ok) os << "kappa = " << c.kappa() << " < 1";
    const double lo = 1.0 / c.kappa();
    for (int i = 1; ok && i <= 2; ++i)
      for (int n = 0; ok && n <= probe.n_max; ++n)
        for (std::int64_t k = 0; ok && k <= probe.k_max; ++k) {
          const double v = c(i, n, k);
          if (!(v >= lo && v <= 1.0)) {
            ok = false;
            os << "c_" << i << "," << n << "(" << k << ") = " << v
               << " outside [1/kappa, 1] = [" << lo << ", 1]";
          }
        }
    if (ok) os << "1/kappa = " << lo << " <= c <= 1 on the probe grid";
    add("coeffs.kappa_bracket", ok, os.str());
  }

  {
    std::ostringstream os;
    bool ok = true;
    for (int i = 1; ok && i <= 2; ++i)
      for (int n = 0; ok && n <= probe.n_max; ++n) {
        try {
          (void)eval_J(c, i, n);
        } catch (const Error& e) {
          ok = false;
          os << e.what();
        }
      }
    if (ok) os << "J_1(0) = " << eval_J(c, 1, 0).value << ", J_2(0) = " << eval_J(c, 2, 0).value;
    add("coeffs.products_nonzero", ok, os.str());
  }
  return report;
}

}  // namespace qst
