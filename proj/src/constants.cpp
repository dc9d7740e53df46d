#include "hyperconv/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hyperconv {

namespace {

double factorial_d(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Gamma(a+1, z) for integer a >= 0: a! e^-z sum_{i<=a} z^i / i!.
double upper_gamma_int(int a, double z) {
  double s = 0.0, zi = 1.0, fi = 1.0;
  for (int i = 0; i <= a; ++i) {
    if (i > 0) {
      zi *= z;
      fi *= i;
    }
    s += zi / fi;
  }
  return factorial_d(a) * std::exp(-z) * s;
}

// int_N^inf t^-(1+b) (1 + ln t)^a dt, b > 0, integer a >= 0.
double tail_integral_logpow(double N, double b, int a) {
  if (b <= 0.0) throw domain_error("tail_integral_logpow: divergent");
  double z = b * (1.0 + std::log(N));
  return std::exp(b) * upper_gamma_int(a, z) / std::pow(b, a + 1);
}

void require_table(const PrimeTable& table, uint64_t limit, const char* who) {
  if (table.limit < limit)
    throw domain_error(std::string(who) + ": prime table smaller than prime_limit");
}

}  // namespace

ConstantResult zeta_value(double s, const EulerConfig& cfg) {
  if (s <= 1.0) throw domain_error("zeta_value: s must be > 1");
  uint64_t N = std::max<uint64_t>(cfg.prime_limit, 64);
  KahanSum sum;
  for (uint64_t n = 1; n <= N; ++n) sum.add(std::pow(double(n), -s));
  double upper = std::pow(double(N), 1.0 - s) / (s - 1.0);
  double lower = std::pow(double(N + 1), 1.0 - s) / (s - 1.0);
  ConstantResult r;
  r.value = sum.value() + 0.5 * (upper + lower);
  r.tail_bound = 0.5 * (upper - lower) + 1e-15 * sum.value();
  r.terms = N;
  return r;
}

ConstantResult gcd_prime_constant(const FunctionId& f, int k, const EulerConfig& cfg,
                                  const PrimeTable& table) {
  if (k < 2) throw domain_error("gcd_prime_constant: k must be >= 2");
  if (f.tag != Fn::Log && f.tag != Fn::SmallOmega && f.tag != Fn::BigOmega)
    throw domain_error("gcd_prime_constant: defined for log, omega, bigomega only");
  uint64_t L = cfg.prime_limit;
  require_table(table, L, "gcd_prime_constant");

  KahanSum sum;
  uint64_t terms = 0;
  for (uint32_t p : table.primes) {
    if (p > L) break;
    double pk = std::pow(double(p), double(k));
    switch (f.tag) {
      case Fn::Log: sum.add(std::log(double(p)) / (pk - 1.0)); break;
      case Fn::SmallOmega: sum.add(1.0 / pk); break;
      default: sum.add(1.0 / (pk - 1.0)); break;
    }
    ++terms;
  }
  // Termwise comparison with n-sums past L; 1/(n^k - 1) <= c / n^k.
  double c = 1.0 / (1.0 - std::pow(double(L), -double(k)));
  double tail;
  if (f.tag == Fn::Log)
    tail = c * tail_integral_logpow(double(L), double(k - 1), 1);
  else if (f.tag == Fn::SmallOmega)
    tail = std::pow(double(L), 1.0 - k) / (k - 1);
  else
    tail = c * std::pow(double(L), 1.0 - k) / (k - 1);

  ConstantResult r;
  r.value = sum.value();
  r.tail_bound = tail + 1e-15 * std::abs(sum.value());
  r.terms = terms;
  return r;
}

namespace {

// Upper bound on sum_{n>N} |f(n)| / n^k for each supported tag.
double wintner_tail(const FunctionId& f, int k, uint64_t N, double zeta_k_upper) {
  double Nd = double(N);
  double b = double(k) - 1.0;
  switch (f.tag) {
    case Fn::One:
    case Fn::Mobius:
      return std::pow(Nd, -b) / b;
    case Fn::Log:
    case Fn::Lambda:
      return tail_integral_logpow(Nd, b, 1);
    case Fn::SmallOmega:
    case Fn::BigOmega:
      return tail_integral_logpow(Nd, b, 1) / std::log(2.0);
    case Fn::Tau:
      return (std::pow(2.0, k - 1) * (std::log(Nd) + 1.0) + zeta_k_upper) * std::pow(Nd, -b) / b;
    case Fn::TauK: {
      // Some coordinate exceeds N^(1/j) whenever the product exceeds N.
      int j = f.k;
      if (j <= 1) return std::pow(Nd, -b) / b;
      double M = std::floor(std::pow(Nd, 1.0 / j));
      if (M < 2) return std::pow(zeta_k_upper, j);  // no useful bound; still finite
      return j * std::pow(zeta_k_upper, j - 1) * (std::pow(M, -double(k)) + std::pow(M, -b) / b);
    }
    case Fn::IdPow:
    case Fn::PhiPow: {
      double bb = double(k) - f.r - 1.0;
      return std::pow(Nd, -bb) / bb;
    }
    case Fn::SigmaPow: {
      double bb = double(k) - f.r - 1.0;
      return tail_integral_logpow(Nd, bb, int(std::ceil(f.r)));
    }
  }
  throw domain_error("wintner_tail: unsupported tag");
}

}  // namespace

ConstantResult wintner_gcd_constant(const FunctionId& f, int k, const EulerConfig& cfg,
                                    const PrimeTable& table) {
  if (k < 2) throw domain_error("wintner_gcd_constant: k must be >= 2");
  if ((f.tag == Fn::IdPow || f.tag == Fn::SigmaPow || f.tag == Fn::PhiPow) && f.r >= double(k) - 1.0)
    throw domain_error("wintner_gcd_constant: sum f(n)/n^k diverges for r >= k-1");
  uint64_t N = cfg.prime_limit;
  require_table(table, N, "wintner_gcd_constant");

  ConstantResult z = zeta_value(double(k), cfg);
  FnTable ft = build_fn_table(f, N, table);
  KahanSum sum;
  for (uint64_t n = 1; n <= N; ++n) {
    double fv = ft.exact ? double(ft.ints[n]) : ft.floats[n];
    sum.add(fv * std::pow(double(n), -double(k)));
  }
  double tail_f = wintner_tail(f, k, N, z.value + z.tail_bound);

  ConstantResult r;
  r.value = sum.value() / z.value;
  r.tail_bound = (tail_f + std::abs(r.value) * z.tail_bound) / (z.value - z.tail_bound) +
                 1e-14 * std::abs(r.value);
  r.terms = N;
  return r;
}

namespace {

// Layered local sum: S_p = sum_m fs(m) p^-m g_m with sigma_m = sum_{v<=m} w^v,
// g_m = (sigma_m^k - sigma_{m-1}^k) / w^m, and fs(m) = f(p^m) / p^(rm) kept
// scaled so nothing overflows. Returns (1-1/p)^zeta_pow * S_p.
template <typename ScaledF>
double layered_local_factor(ScaledF&& fs, double r, int k, int zeta_pow, uint64_t p, int cap) {
  double q = 1.0 / double(p);
  double w = std::pow(double(p), -(r + 1.0));
  double sigma_prev = 0.0, sigma = 1.0;  // sigma_{-1}, sigma_0
  double wm = 1.0;                       // w^m
  double pm = 1.0;                       // p^-m
  double S = fs(0);                      // m = 0 term: sigma_0^k - 0 = 1
  for (int m = 1; m <= cap; ++m) {
    wm *= w;
    pm *= q;
    sigma_prev = sigma;
    sigma += wm;
    // (sigma^k - sigma_prev^k) / w^m, expanded to stay well-conditioned:
    double g = 0.0, binom = 1.0, wpow = 1.0;
    for (int j = 1; j <= k; ++j) {
      binom = binom * (k - j + 1) / j;
      g += binom * wpow * std::pow(sigma_prev, k - j);
      wpow *= wm;
    }
    S += fs(m) * pm * g;
  }
  return std::pow(1.0 - q, zeta_pow) * S;
}

struct EulerTailParams {
  double a_coeff;  // |eps_p| <= a p^-3/2 + b p^-2 past the prime limit
  double b_coeff;
  double growth;       // fs(m) <= growth for m past the cap (constant case)
  bool linear_growth;  // fs(m) <= m + 1 instead
};

ConstantResult euler_product_layered(const std::function<double(uint64_t, int)>& scaled_f, double r,
                                     int k, int zeta_pow, const EulerTailParams& tp,
                                     const EulerConfig& cfg, const PrimeTable& table) {
  uint64_t L = cfg.prime_limit;
  int cap = cfg.exponent_cap;
  double prod = 1.0;
  double rel_err = 0.0;  // sum of relative perturbations from capped exponents
  uint64_t terms = 0;
  double sigma_inf_bound = 1.0 / (1.0 - std::pow(2.0, -(r + 1.0)));

  for (uint32_t p : table.primes) {
    if (p > L) break;
    auto fs = [&](int m) { return scaled_f(p, m); };
    double local = layered_local_factor(fs, r, k, zeta_pow, p, cap);
    prod *= local;
    ++terms;

    // Exponent-cap remainder: sum_{m>cap} fs(m) p^-m g_m.
    double q = 1.0 / double(p);
    double geom = std::pow(q, cap + 1) / (1.0 - q);
    double fs_tail = tp.linear_growth ? (cap + 2.0) / (1.0 - q) : tp.growth;
    double cap_tail = fs_tail * double(k) * std::pow(sigma_inf_bound, k - 1) * geom *
                      std::pow(1.0 - q, zeta_pow);
    rel_err += cap_tail / std::max(std::abs(local), 0.5);
  }
  require_table(table, L, "euler_product");

  // Prime tail: |prod_{p>L} (1 + eps_p) - 1| <= exp(sum |eps_p|) - 1.
  double Ld = double(L);
  double eps_sum = tp.a_coeff * 2.0 / std::sqrt(Ld) + tp.b_coeff / Ld;

  ConstantResult res;
  res.value = prod;
  res.tail_bound =
      std::abs(prod) * (std::expm1(rel_err + eps_sum)) + 1e-13 * std::abs(prod);
  res.terms = terms;
  return res;
}

}  // namespace

namespace detail {

double euler_local_factor_C(const FunctionId& f, double r, int k, uint64_t p, int cap) {
  auto fs = [&](int m) {
    // f(p^m) / p^(rm)
    if (m == 0) return 1.0;
    switch (f.tag) {
      case Fn::IdPow: return 1.0;
      case Fn::SigmaPow: {
        double ratio = (1.0 - std::pow(double(p), -(m + 1.0))) / (1.0 - 1.0 / double(p));
        return std::pow(ratio, f.r);
      }
      case Fn::PhiPow: return std::pow(1.0 - 1.0 / double(p), f.r);
      default: throw domain_error("euler_local_factor_C: f must be in A_r");
    }
  };
  return layered_local_factor(fs, r, k, k, p, cap);
}

double euler_local_factor_D(int k, uint64_t p, int cap) {
  auto fs = [](int m) { return double(m + 1); };
  return layered_local_factor(fs, 0.0, k, 2 * k, p, cap);
}

}  // namespace detail

ConstantResult euler_product_C(const FunctionId& f, double r, int k, const EulerConfig& cfg,
                               const PrimeTable& table) {
  if (k < 2) throw domain_error("euler_product_C: k must be >= 2");
  auto cls = f.ar_class();
  if (!cls) throw domain_error("euler_product_C: " + f.name() + " is outside the A_r class");
  if (cls->r != r) throw domain_error("euler_product_C: r does not match the function");
  if (r < 0.0) throw domain_error("euler_product_C: r must be >= 0");

  EulerTailParams tp;
  tp.a_coeff = (double(k) + std::pow(2.0, k)) * cls->c1;
  tp.b_coeff = double(k) * k + std::pow(2.0, k) * (2.0 + k) + double(k) * std::pow(2.0, k) * cls->c2;
  tp.growth = std::max(1.0, cls->c2);
  tp.linear_growth = false;

  auto scaled = [f](uint64_t p, int m) {
    if (m == 0) return 1.0;
    switch (f.tag) {
      case Fn::IdPow: return 1.0;
      case Fn::SigmaPow: {
        double ratio = (1.0 - std::pow(double(p), -(m + 1.0))) / (1.0 - 1.0 / double(p));
        return std::pow(ratio, f.r);
      }
      case Fn::PhiPow: return std::pow(1.0 - 1.0 / double(p), f.r);
      default: return 1.0;
    }
  };
  return euler_product_layered(scaled, r, k, k, tp, cfg, table);
}

ConstantResult euler_product_D(int k, const EulerConfig& cfg, const PrimeTable& table) {
  if (k < 2) throw domain_error("euler_product_D: k must be >= 2");
  EulerTailParams tp;
  tp.a_coeff = 0.0;
  tp.b_coeff = 4.0 * k * k + 3.0 * std::pow(4.0, k) + 3.0 * (std::pow(2.0, k + 1) + 6.0 * k * std::pow(2.0, k));
  tp.growth = 0.0;
  tp.linear_growth = true;
  auto scaled = [](uint64_t, int m) { return double(m + 1); };
  return euler_product_layered(scaled, 0.0, k, 2 * k, tp, cfg, table);
}

int128 eulerian_number(int t, int m) {
  if (t < 1) throw domain_error("eulerian_number: t must be >= 1");
  if (m < 0 || m > t - 1) return 0;
  return eulerian_row(t)[size_t(m)];
}

std::vector<int128> eulerian_row(int t) {
  if (t < 1) throw domain_error("eulerian_row: t must be >= 1");
  if (t > 33) throw overflow_error("eulerian_row: exceeds 128 bits");
  std::vector<int128> row{1};  // t = 1
  for (int n = 2; n <= t; ++n) {
    std::vector<int128> next(size_t(n), 0);
    for (int m = 0; m < n; ++m) {
      int128 a = (m < n - 1 && m < int(row.size())) ? row[size_t(m)] : 0;
      int128 b = (m >= 1 && m - 1 < int(row.size())) ? row[size_t(m) - 1] : 0;
      next[size_t(m)] = checked_add(checked_mul(int128(m + 1), a), checked_mul(int128(n - m), b));
    }
    row = std::move(next);
  }
  return row;
}

ConstantResult b_constant(int k, int t, const EulerConfig& cfg, const PrimeTable& table) {
  if (k < 3) throw domain_error("b_constant: the prime sums need k >= 3");
  if (t < 1) throw domain_error("b_constant: t must be >= 1");
  uint64_t L = cfg.prime_limit;
  require_table(table, L, "b_constant");
  std::vector<int128> row = eulerian_row(t);

  KahanSum total;
  double tail = 0.0;
  uint64_t terms = 0;
  double denom_bound = 1.0 / std::pow(1.0 - std::pow(2.0, -double(k)), t + 1);
  for (int m = 0; m <= t - 1; ++m) {
    double weight = to_double(row[size_t(m)]);
    KahanSum inner;
    for (uint32_t p : table.primes) {
      if (p > L) break;
      double pk = std::pow(double(p), -double(k));
      double term = std::pow(std::log(double(p)), t + 1) * std::pow(pk, m + 1) /
                    std::pow(1.0 - pk, t + 1);
      inner.add(term);
      ++terms;
    }
    total.add(weight * inner.value());
    tail += weight * denom_bound * tail_integral_logpow(double(L), double(k) * (m + 1) - 1.0, t + 1);
  }
  ConstantResult r;
  r.value = total.value();
  r.tail_bound = tail + 1e-14 * std::abs(total.value());
  r.terms = terms;
  return r;
}

}  // namespace hyperconv
