#ifndef HYPERCONV_CONSTANTS_HPP
#define HYPERCONV_CONSTANTS_HPP

#include <cstdint>
#include <vector>

#include "hyperconv/arith.hpp"

namespace hyperconv {

struct EulerConfig {
  uint64_t prime_limit = 100000;
  int exponent_cap = 40;
  double tail_tolerance = 1e-9;
};

// value carries a certified window: the target constant lies within
// tail_bound of value, by the truncation bounds baked into each evaluator.
struct ConstantResult {
  double value = 0.0;
  double tail_bound = 0.0;
  uint64_t terms = 0;
};

// Prime-sum constants of the gcd main terms:
//   log:      sum_p log p / (p^k - 1)
//   omega:    sum_p p^-k
//   bigomega: sum_p 1 / (p^k - 1)
ConstantResult gcd_prime_constant(const FunctionId& f, int k, const EulerConfig& cfg,
                                  const PrimeTable& table);

// (1/zeta(k)) sum_{n<=N} f(n)/n^k. The 1/(k-1)! of the mean-value statement
// is left to callers. Divergent pairings (e.g. id^r with r >= k-1) are
// rejected.
ConstantResult wintner_gcd_constant(const FunctionId& f, int k, const EulerConfig& cfg,
                                    const PrimeTable& table);

// Euler product over p of (1-1/p)^k sum f(p^max(nu)) / p^((r+1) sum nu),
// evaluated by layering the k-fold sum on max(nu) = m. Requires f in A_r.
ConstantResult euler_product_C(const FunctionId& f, double r, int k, const EulerConfig& cfg,
                               const PrimeTable& table);

// Same layering with f(p^m) = m + 1, r = 0 and zeta-square local factors:
// product over p of (1-1/p)^(2k) sum (max(nu)+1) / p^(sum nu).
ConstantResult euler_product_D(int k, const EulerConfig& cfg, const PrimeTable& table);

// Classical Eulerian numbers <t m>; rows up to t = 33 before 128-bit overflow.
int128 eulerian_number(int t, int m);
std::vector<int128> eulerian_row(int t);  // coefficients of psi_{t-1}

// b_{k,t} = sum_m <t m> sum_p (log p)^(t+1) p^(-k(m+1)) / (1-p^-k)^(t+1);
// the prime sums converge only for k >= 3.
ConstantResult b_constant(int k, int t, const EulerConfig& cfg, const PrimeTable& table);

// Direct summation of zeta(s) with a bracketed integral tail.
ConstantResult zeta_value(double s, const EulerConfig& cfg);

namespace detail {
// Single local factor of the layered Euler products; exposed for the
// cross-checks against literal k-fold sums.
double euler_local_factor_C(const FunctionId& f, double r, int k, uint64_t p, int cap);
double euler_local_factor_D(int k, uint64_t p, int cap);
}  // namespace detail

}  // namespace hyperconv

#endif  // HYPERCONV_CONSTANTS_HPP
