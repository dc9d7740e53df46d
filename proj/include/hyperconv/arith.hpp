#ifndef HYPERCONV_ARITH_HPP
#define HYPERCONV_ARITH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperconv/scalar.hpp"

namespace hyperconv {

// Smallest-prime-factor sieve plus prime list. Built once, then read-only.
struct PrimeTable {
  uint64_t limit = 0;
  std::vector<uint32_t> primes;
  std::vector<uint32_t> spf;  // spf[n] for 2 <= n <= limit; spf[0] = spf[1] = 0

  bool is_prime(uint64_t n) const;
};

PrimeTable build_prime_table(uint64_t limit);

struct PrimePower {
  uint64_t p;
  uint32_t e;
  bool operator==(const PrimePower&) const = default;
};

struct Factorization {
  uint64_t n = 1;
  std::vector<PrimePower> parts;  // ascending primes, exponents >= 1

  uint64_t recompose() const;
};

// Works past table.limit: trial division by the sieved primes, then a
// deterministic Miller-Rabin check on the cofactor.
Factorization factorize(uint64_t n, const PrimeTable& table);

enum class Fn {
  One,
  Log,
  SmallOmega,
  BigOmega,
  Tau,
  TauK,
  Mobius,
  Lambda,
  IdPow,
  SigmaPow,
  PhiPow,
};

struct ArClassInfo {
  double r;
  double c1;  // |f(p) - p^r| <= c1 * p^(r - 1/2)
  double c2;  // |f(p^v)| <= c2 * p^(v r), v >= 2
};

// One-variable arithmetic function selector. `r` applies to the power
// families, `k` to TauK.
struct FunctionId {
  Fn tag = Fn::One;
  double r = 0.0;
  int k = 0;

  static FunctionId one() { return {Fn::One}; }
  static FunctionId log() { return {Fn::Log}; }
  static FunctionId small_omega() { return {Fn::SmallOmega}; }
  static FunctionId big_omega() { return {Fn::BigOmega}; }
  static FunctionId tau() { return {Fn::Tau}; }
  static FunctionId tau_k(int k) { return {Fn::TauK, 0.0, k}; }
  static FunctionId mobius() { return {Fn::Mobius}; }
  static FunctionId lambda() { return {Fn::Lambda}; }
  static FunctionId id_pow(double r) { return {Fn::IdPow, r}; }
  static FunctionId sigma_pow(double r) { return {Fn::SigmaPow, r}; }
  static FunctionId phi_pow(double r) { return {Fn::PhiPow, r}; }

  bool integer_valued() const;
  bool multiplicative() const;
  std::optional<ArClassInfo> ar_class() const;
  std::string name() const;

  bool operator==(const FunctionId&) const = default;
};

ScalarValue eval_f(const FunctionId& f, const Factorization& fac);
ScalarValue eval_f(const FunctionId& f, uint64_t n, const PrimeTable& table);

// Value of f at a prime power p^e (e >= 0).
ScalarValue eval_f_prime_power(const FunctionId& f, uint64_t p, uint32_t e);

// (mu * f)(n). Closed forms are used where the transform collapses:
// Log -> von Mangoldt, SmallOmega -> prime indicator, BigOmega -> prime
// power indicator, IdPow(1) -> Euler phi.
ScalarValue mobius_transform_point(const FunctionId& f, uint64_t n, const PrimeTable& table);

// Piltz divisor function: ordered k-tuples with product n, via per-prime
// binomial counts C(e + k - 1, k - 1).
ScalarValue tau_k_point(int k, const Factorization& fac);
ScalarValue tau_k_point(int k, uint64_t n, const PrimeTable& table);

int mobius_point(const Factorization& fac);
uint64_t euler_phi(const Factorization& fac);
int128 sigma_sum(const Factorization& fac);

int128 binomial(uint64_t n, uint64_t k);
uint64_t integer_nth_root(uint64_t n, int k);

// Pointwise table of f on 1..n, sieved with the SPF array (requires
// table.limit >= n). Integer-valued f fills `ints`, otherwise `floats`.
struct FnTable {
  std::vector<int64_t> ints;
  std::vector<double> floats;
  bool exact = false;
};
FnTable build_fn_table(const FunctionId& f, uint64_t n, const PrimeTable& table);

}  // namespace hyperconv

#endif  // HYPERCONV_ARITH_HPP
