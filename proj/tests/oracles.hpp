// Independent reference computations for the unit tests. Nothing here calls
// into the library's numerics except the family evaluators a_n(k), c_i(k).
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qst/weights.hpp"

namespace oracle {

using LMat = std::array<long double, 4>;  // row-major

inline LMat mul(const LMat& x, const LMat& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
          x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
}

// C(k) written out from its entries.
inline LMat transfer_factor(const qst::Families& f, int m, int n, std::int64_t k) {
  const long double c1 = f.c.c1(n, k), c2 = f.c.c2(n, k);
  const long double an1 = f.w(n + 1, k), an = f.w(n, k + 1);
  return {1.0L / c1, -m / (an1 * c1), -m / (an * c1), c2 + (long double)m * m / (an * an1 * c1)};
}

// Neville extrapolation to h = 0 of samples (h_j, y_j).
inline long double neville(std::vector<long double> h, std::vector<long double> y) {
  const std::size_t n = h.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i)
      y[i] = (h[i + level] * y[i] - h[i] * y[i + 1]) / (h[i + level] - h[i]);
  return y[0];
}

// prod_{k>=0} C(k) from brute-force partial products at N = 2^lo .. 2^hi,
// extrapolated entrywise in h = 1/N.
inline LMat limit_product(const qst::Families& f, int m, int n, int lo = 11, int hi = 16) {
  std::vector<long double> h;
  std::array<std::vector<long double>, 4> y;
  LMat P = {1, 0, 0, 1};
  std::int64_t k = 0;
  for (int e = lo; e <= hi; ++e) {
    const std::int64_t N = std::int64_t{1} << e;
    for (; k < N; ++k) P = mul(transfer_factor(f, m, n, k), P);
    h.push_back(1.0L / N);
    for (int i = 0; i < 4; ++i) y[i].push_back(P[i]);
  }
  LMat L;
  for (int i = 0; i < 4; ++i) L[i] = neville(h, y[i]);
  return L;
}

// sum_{k>=0} 1/(k+1)^2 by direct summation plus the Euler-Maclaurin tail.
inline long double basel(std::int64_t N = 4000) {
  long double s = 0;
  for (std::int64_t j = N; j >= 1; --j) s += 1.0L / ((long double)j * j);
  const long double x = N;
  return s + 1 / x - 1 / (2 * x * x) + 1 / (6 * x * x * x) - 1 / (30 * x * x * x * x * x);
}

// prod_{k>=0} (1 - t^(k+1)) by direct multiplication until the factors are 1.
inline long double q_pochhammer(long double t) {
  long double p = 1, tk = t;
  for (int k = 0; k < 400 && tk > 0; ++k, tk *= t) p *= 1 - tk;
  return p;
}

// epsilon(m, n) = sum_k 1 / (a_n(k) + m^2 / a_{n+1}(k)) for the power family
// a_n(k) = lambda (n+1)^p (k+1)^2: partial sum plus the midpoint-rule tail
// of the leading 1/a_n term.
inline long double epsilon_power(const qst::Families& f, int m, int n, std::int64_t N = 200000) {
  long double s = 0;
  for (std::int64_t k = N; k >= 0; --k) {
    const long double an = f.w(n, k), an1 = f.w(n + 1, k);
    s += 1.0L / (an + (long double)m * m / an1);
  }
  const long double scale = f.w(n, 0);  // lambda (n+1)^p
  return s + 1.0L / (scale * (N + 1.5L));
}

}  // namespace oracle
