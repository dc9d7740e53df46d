#ifndef HYPERCONV_FIT_HPP
#define HYPERCONV_FIT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "hyperconv/constants.hpp"
#include "hyperconv/summation.hpp"

namespace hyperconv {

// Routes a (kind, method) pair to its engine. Identity applies to gcd forms
// and the plain Piltz sum; Series to the lcm forms.
SummatoryResult evaluate_sum(const ConvoluteKind& kind, double x, SumMethod method,
                             const TruncationConfig& cfg, const PrimeTable& table);

struct SampleGrid {
  ConvoluteKind kind;
  SumMethod method = SumMethod::Enumerate;
  std::vector<double> xs;      // strictly increasing
  std::vector<double> values;  // S(x), rounded to double for fitting
};

SampleGrid sample_grid(const ConvoluteKind& kind, double x_min, double x_max, int count,
                       SumMethod method, const TruncationConfig& cfg, const PrimeTable& table);

// Main-term degree dictated by the asymptotic shape of each family:
// k-1 for the gcd forms and A_r lcm forms, 2k-1 for tau of the lcm.
int prescribed_degree(const ConvoluteKind& kind);

// Piltz error exponents: theta_2 = 1/2, theta_k = (k-1)/(k+1) for k >= 3.
double theta_reference(int k);
// The gcd main-term route only needs theta_k >= 1/k; the lcm routes need
// theta_k >= 1/2. Both floors, for reporting.
double theta_floor_gcd(int k);
double theta_floor_lcm();

struct FitReport {
  double scale_exponent = 1.0;
  int degree = 1;
  std::vector<double> coefficients;  // c_j multiplies (log x)^j
  std::optional<double> leading_reference;
  std::vector<double> residuals;  // S(x_i) - x_i^scale * fit(log x_i)
  std::optional<double> error_slope;
  bool condition_warning = false;
  double condition_estimate = 0.0;

  double eval_log_poly(double logx) const;
};

// Least squares of S(x)/x^scale against 1, log x, ..., (log x)^degree. The
// basis is centered and scaled before solving; coefficients are mapped back.
FitReport fit_main_term(const SampleGrid& grid, double scale_exponent, int degree);

// Report with externally supplied coefficients c_0..c_d (for residual
// analysis against a known main term rather than a fitted one).
FitReport manual_fit_report(const SampleGrid& grid, double scale_exponent,
                            const std::vector<double>& coefficients);

struct RatioPoint {
  double x;
  double ratio;
};

struct RatioReport {
  std::vector<RatioPoint> points;  // ratio = S(x) (k-1)! / (x (log x)^(k-1))
  double reference = 0.0;
  double final_deviation = 0.0;
  bool diverging = false;  // ratio keeps growing: degree mismatch
};

RatioReport wintner_ratio_report(const SampleGrid& grid, int k, const ConstantResult& reference);

struct SlopeReport {
  double slope = 0.0;
  int points_used = 0;
  int points_dropped = 0;
  bool at_rounding_floor = false;
};

// Slope of log|residual| against log x; residuals at the double rounding
// floor are dropped.
SlopeReport error_exponent_report(const SampleGrid& grid, const FitReport& fitted);

}  // namespace hyperconv

#endif  // HYPERCONV_FIT_HPP
