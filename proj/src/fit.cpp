#include "hyperconv/fit.hpp"

#include <algorithm>
#include <cmath>

namespace hyperconv {

SummatoryResult evaluate_sum(const ConvoluteKind& kind, double x, SumMethod method,
                             const TruncationConfig& cfg, const PrimeTable& table) {
  kind.validate();
  switch (method) {
    case SumMethod::Enumerate:
      return hyper_sum_enumerate(kind, x, table);
    case SumMethod::Sieve:
      return sieve_convolute_prefix(kind, x, table);
    case SumMethod::Identity: {
      if (kind.form == ConvoluteForm::GcdOf) return hyper_sum_gcd_identity(kind.f, kind.k, x, table);
      if (kind.form == ConvoluteForm::PlainTauK) {
        SummatoryResult res;
        res.x = x;
        res.kind = kind;
        res.method = SumMethod::Identity;
        res.value = piltz_summatory(kind.k, x);
        res.terms_used = uint64_t(std::max(0.0, std::floor(x)));
        return res;
      }
      throw domain_error("evaluate_sum: no identity engine for lcm forms");
    }
    case SumMethod::Series: {
      if (kind.form != ConvoluteForm::LcmOf)
        throw domain_error("evaluate_sum: series engine applies to lcm forms");
      if (kind.f.tag == Fn::Tau)
        return hyper_sum_lcm_series(LcmCoeffMode::tau_mode(), kind.k, x, cfg, table);
      auto cls = kind.f.ar_class();
      if (!cls) throw domain_error("evaluate_sum: series needs tau or an A_r function");
      return hyper_sum_lcm_series(LcmCoeffMode::ar_class(kind.f, cls->r), kind.k, x, cfg, table);
    }
  }
  throw domain_error("evaluate_sum: unknown method");
}

SampleGrid sample_grid(const ConvoluteKind& kind, double x_min, double x_max, int count,
                       SumMethod method, const TruncationConfig& cfg, const PrimeTable& table) {
  if (!(x_min >= 1.0) || !(x_min < x_max)) throw domain_error("sample_grid: need 1 <= x_min < x_max");
  if (count < 2) throw domain_error("sample_grid: need at least 2 points");
  SampleGrid grid;
  grid.kind = kind;
  grid.method = method;
  double ratio = std::log(x_max / x_min) / (count - 1);
  double prev = 0.0;
  for (int i = 0; i < count; ++i) {
    double x = std::floor(x_min * std::exp(ratio * i));
    if (i == count - 1) x = std::floor(x_max);
    if (x <= prev) x = prev + 1.0;  // geometric spacing collapsed; keep strict
    prev = x;
    SummatoryResult s = evaluate_sum(kind, x, method, cfg, table);
    grid.xs.push_back(x);
    grid.values.push_back(s.value.is_exact() ? to_double(s.value.exact()) : s.value.approx());
  }
  return grid;
}

int prescribed_degree(const ConvoluteKind& kind) {
  if (kind.form == ConvoluteForm::LcmOf && kind.f.tag == Fn::Tau) return 2 * kind.k - 1;
  return kind.k - 1;
}

double theta_reference(int k) {
  if (k < 2) throw domain_error("theta_reference: k must be >= 2");
  if (k == 2) return 0.5;
  return double(k - 1) / double(k + 1);
}

double theta_floor_gcd(int k) { return 1.0 / double(k); }

double theta_floor_lcm() { return 0.5; }

double FitReport::eval_log_poly(double logx) const {
  double acc = 0.0;
  for (size_t j = coefficients.size(); j-- > 0;) acc = acc * logx + coefficients[j];
  return acc;
}

namespace {

// Gaussian elimination with partial pivoting on the (small) normal equations.
std::vector<double> solve_normal(std::vector<std::vector<double>> a, std::vector<double> b,
                                 double* condition) {
  size_t n = b.size();
  double max_pivot = 0.0, min_pivot = HUGE_VAL;
  for (size_t col = 0; col < n; ++col) {
    size_t best = col;
    for (size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
    }
    std::swap(a[col], a[best]);
    std::swap(b[col], b[best]);
    double piv = a[col][col];
    if (piv == 0.0) throw domain_error("fit_main_term: singular normal equations");
    max_pivot = std::max(max_pivot, std::abs(piv));
    min_pivot = std::min(min_pivot, std::abs(piv));
    for (size_t r = col + 1; r < n; ++r) {
      double m = a[r][col] / piv;
      if (m == 0.0) continue;
      for (size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (size_t r = n; r-- > 0;) {
    double s = b[r];
    for (size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  *condition = max_pivot / min_pivot;
  return x;
}

}  // namespace

FitReport fit_main_term(const SampleGrid& grid, double scale_exponent, int degree) {
  size_t n = grid.xs.size();
  if (degree < 0) throw domain_error("fit_main_term: degree must be >= 0");
  if (int(n) < degree + 2) throw domain_error("fit_main_term: need degree + 2 points");

  std::vector<double> logs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    logs[i] = std::log(grid.xs[i]);
    ys[i] = grid.values[i] / std::pow(grid.xs[i], scale_exponent);
  }
  double mean = 0.0;
  for (double l : logs) mean += l;
  mean /= double(n);
  double spread = *std::max_element(logs.begin(), logs.end()) -
                  *std::min_element(logs.begin(), logs.end());
  if (spread <= 0.0) throw domain_error("fit_main_term: degenerate grid");

  size_t m = size_t(degree) + 1;
  std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
  std::vector<double> atb(m, 0.0);
  std::vector<double> row(m);
  for (size_t i = 0; i < n; ++i) {
    double u = (logs[i] - mean) / spread;
    row[0] = 1.0;
    for (size_t j = 1; j < m; ++j) row[j] = row[j - 1] * u;
    for (size_t a = 0; a < m; ++a) {
      for (size_t b = 0; b < m; ++b) ata[a][b] += row[a] * row[b];
      atb[a] += row[a] * ys[i];
    }
  }

  FitReport rep;
  rep.scale_exponent = scale_exponent;
  rep.degree = degree;
  std::vector<double> cu = solve_normal(std::move(ata), std::move(atb), &rep.condition_estimate);
  rep.condition_warning = rep.condition_estimate > 1e12;

  // Map c~_j u^j back to powers of L: u = (L - mean)/spread.
  rep.coefficients.assign(m, 0.0);
  for (size_t j = 0; j < m; ++j) {
    double base = cu[j] / std::pow(spread, double(j));
    double binom = 1.0;
    for (size_t i = 0; i <= j; ++i) {
      if (i > 0) binom = binom * double(j - i + 1) / double(i);
      rep.coefficients[i] += base * binom * std::pow(-mean, double(j - i));
    }
  }

  rep.residuals.resize(n);
  for (size_t i = 0; i < n; ++i) {
    rep.residuals[i] =
        grid.values[i] - std::pow(grid.xs[i], scale_exponent) * rep.eval_log_poly(logs[i]);
  }
  return rep;
}

FitReport manual_fit_report(const SampleGrid& grid, double scale_exponent,
                            const std::vector<double>& coefficients) {
  if (coefficients.empty()) throw domain_error("manual_fit_report: no coefficients");
  FitReport rep;
  rep.scale_exponent = scale_exponent;
  rep.degree = int(coefficients.size()) - 1;
  rep.coefficients = coefficients;
  rep.residuals.resize(grid.xs.size());
  for (size_t i = 0; i < grid.xs.size(); ++i) {
    rep.residuals[i] = grid.values[i] - std::pow(grid.xs[i], scale_exponent) *
                                            rep.eval_log_poly(std::log(grid.xs[i]));
  }
  return rep;
}

RatioReport wintner_ratio_report(const SampleGrid& grid, int k, const ConstantResult& reference) {
  if (grid.xs.empty()) throw domain_error("wintner_ratio_report: empty grid");
  if (k < 2) throw domain_error("wintner_ratio_report: k must be >= 2");
  double kfact = 1.0;
  for (int i = 2; i <= k - 1; ++i) kfact *= i;

  RatioReport rep;
  rep.reference = reference.value;
  for (size_t i = 0; i < grid.xs.size(); ++i) {
    double lx = std::log(grid.xs[i]);
    double ratio = grid.values[i] * kfact / (grid.xs[i] * std::pow(lx, double(k - 1)));
    rep.points.push_back({grid.xs[i], ratio});
  }
  rep.final_deviation = std::abs(rep.points.back().ratio - reference.value);

  bool increasing = true;
  for (size_t i = 1; i < rep.points.size(); ++i) {
    if (rep.points[i].ratio <= rep.points[i - 1].ratio) {
      increasing = false;
      break;
    }
  }
  rep.diverging = increasing && rep.points.size() >= 3 &&
                  rep.points.back().ratio > 2.0 * std::abs(reference.value);
  return rep;
}

SlopeReport error_exponent_report(const SampleGrid& grid, const FitReport& fitted) {
  size_t n = grid.xs.size();
  if (n < 6) throw domain_error("error_exponent_report: need at least 6 points");
  if (fitted.residuals.size() != n)
    throw domain_error("error_exponent_report: fit does not match grid");

  double vmax = 0.0;
  for (double v : grid.values) vmax = std::max(vmax, std::abs(v));
  double floor = vmax * 1e-14;  // double rounding scale of S itself

  SlopeReport rep;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double r = std::abs(fitted.residuals[i]);
    if (r <= floor) {
      ++rep.points_dropped;
      continue;
    }
    double lx = std::log(grid.xs[i]);
    double ly = std::log(r);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++rep.points_used;
  }
  if (rep.points_used < 2) {
    rep.at_rounding_floor = true;
    rep.slope = 0.0;
    return rep;
  }
  double denom = rep.points_used * sxx - sx * sx;
  rep.slope = (rep.points_used * sxy - sx * sy) / denom;
  return rep;
}

}  // namespace hyperconv
