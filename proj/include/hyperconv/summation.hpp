#ifndef HYPERCONV_SUMMATION_HPP
#define HYPERCONV_SUMMATION_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "hyperconv/convolute.hpp"

namespace hyperconv {

enum class SumMethod { Enumerate, Sieve, Identity, Series };

std::string method_name(SumMethod m);

struct SummatoryResult {
  double x = 0.0;
  ConvoluteKind kind;
  SumMethod method = SumMethod::Enumerate;
  ScalarValue value;
  uint64_t terms_used = 0;
  std::optional<double> truncation_bound;  // Series only; 0 when complete
};

struct TruncationConfig {
  uint64_t coordinate_cap = UINT64_MAX;
  double tail_tolerance = 1e-9;
};

// T_k(x) = sum_{n<=x} tau_k(n), exact. k=1 is floor(x), k=2 the hyperbola
// method, k>=3 a recursion over the O(sqrt x) distinct quotient values with a
// per-call cache.
ScalarValue piltz_summatory(int k, double x);

// sum_{j<=x} j^r tau_k(j); exact for integer r (sieved), float otherwise.
ScalarValue weighted_piltz_summatory(int k, double r, double x);

// Region semantics shared by all engines: a tuple belongs iff the product of
// its entries is <= floor(x); x < 1 gives the empty sum.
SummatoryResult hyper_sum_enumerate(const ConvoluteKind& kind, double x, const PrimeTable& table);

// Pointwise table of the convolute on 1..floor(x) plus a prefix sum.
// Multiplicative f lifts over the SPF sieve; SmallOmega/BigOmega under GcdOf
// go through a prime-power scan of the divisor identity. Log is rejected.
SummatoryResult sieve_convolute_prefix(const ConvoluteKind& kind, double x, const PrimeTable& table);

// sum_{d <= x^(1/k)} (mu*f)(d) T_k(x / d^k); d ranges over primes (SmallOmega)
// or prime powers (Log, BigOmega) where the transform is so supported.
SummatoryResult hyper_sum_gcd_identity(const FunctionId& f, int k, double x,
                                       const PrimeTable& table);

// LCM sums through the remainder coefficients: coefficient tuples are drawn
// by nondecreasing product from a priority queue, each weighted by the
// matching Piltz prefix sum. The support {prod d <= x} is finite, so the
// method is exact unless coordinate_cap prunes it.
SummatoryResult hyper_sum_lcm_series(const LcmCoeffMode& mode, int k, double x,
                                     const TruncationConfig& cfg, const PrimeTable& table);

}  // namespace hyperconv

#endif  // HYPERCONV_SUMMATION_HPP
