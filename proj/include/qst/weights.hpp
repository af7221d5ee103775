#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qst {

// a_n(k) = lambda (n+1)^p (k+1)^q
struct PowerLaw {
  double lambda = 1.0;
  double p = 1.0;
  double q = 2.0;
};

class WeightFamily {
 public:
  enum class Kind { Power, Tabulated };

  static WeightFamily power(double lambda, double p, double q);
  // table[n][k] overrides the tail law where present.
  static WeightFamily tabulated(std::vector<std::vector<double>> table,
                                PowerLaw tail);

  double operator()(int n, std::int64_t k) const;

  Kind kind() const { return kind_; }
  const PowerLaw& tail() const { return tail_; }
  const std::vector<std::vector<double>>& table() const { return table_; }
  // First k from which a_n(k) follows the tail law.
  std::int64_t table_length(int n) const;

 private:
  Kind kind_ = Kind::Power;
  PowerLaw tail_;
  std::vector<std::vector<double>> table_;
  bool integer_q_ = true;
  int iq_ = 2;
  std::vector<double> scale_;  // lambda (n+1)^p for small n
};

// Geometric tail c(k) = 1 - t^(k+1); t = 0 gives the unit sequence.
struct GapLaw {
  double t1 = 0.5;
  double t2 = 0.5;
};

class CoefficientFamily {
 public:
  enum class Kind { Unit, GeometricGap, Tabulated };

  static CoefficientFamily unit(double kappa = 1.0);
  static CoefficientFamily geometric_gap(double t1, double t2, double kappa);
  // table_i[n][k] for i = 1, 2; beyond the table the gap law applies.
  static CoefficientFamily tabulated(std::vector<std::vector<double>> table1,
                                     std::vector<std::vector<double>> table2,
                                     GapLaw tail, double kappa);

  double operator()(int i, int n, std::int64_t k) const;
  double c1(int n, std::int64_t k) const { return (*this)(1, n, k); }
  double c2(int n, std::int64_t k) const { return (*this)(2, n, k); }

  Kind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  const GapLaw& tail() const { return tail_; }
  double tail_t(int i) const { return i == 1 ? tail_.t1 : tail_.t2; }
  std::int64_t table_length(int i, int n) const;

 private:
  Kind kind_ = Kind::Unit;
  GapLaw tail_{0.0, 0.0};
  double kappa_ = 1.0;
  // Beyond these k the gap t^(k+1) is below half an ulp of 1.
  std::int64_t unit_from1_ = 0, unit_from2_ = 0;
  std::vector<std::vector<double>> table1_, table2_;
};

struct Families {
  WeightFamily w = WeightFamily::power(1.0, 1.0, 2.0);
  CoefficientFamily c = CoefficientFamily::geometric_gap(0.5, 0.5, 2.0);
};

struct SeriesValue {
  double value = 0.0;
  std::int64_t truncation_index = 0;
  double tail_bound = 0.0;
};

SeriesValue eval_s(const WeightFamily& w, int n, double tol = 1e-12);
SeriesValue eval_J(const CoefficientFamily& c, int i, int n,
                   double tol = 1e-12);

// Upper bound for sum_{k > K} 1/a_n(k).
double weight_tail_sum(const WeightFamily& w, int n, std::int64_t K);
// Lower bound for prod_{k >= K} c_{i,n}(k).
double coefficient_tail_product(const CoefficientFamily& c, int i, int n,
                                std::int64_t K);

struct HypothesisCheck {
  std::string name;
  bool passed = true;
  std::string witness;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;
  bool all_passed() const;
};

struct ProbeGrid {
  int n_max = 16;
  std::int64_t k_max = 256;
};

ValidationReport validate_hypotheses(const WeightFamily& w,
                                     const CoefficientFamily& c,
                                     const ProbeGrid& probe = {});

}  // namespace qst
