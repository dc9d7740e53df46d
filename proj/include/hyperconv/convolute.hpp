#ifndef HYPERCONV_CONVOLUTE_HPP
#define HYPERCONV_CONVOLUTE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyperconv/arith.hpp"

namespace hyperconv {

enum class ConvoluteForm { GcdOf, LcmOf, PlainTauK };

// The k-variable function whose convolute we sum: f(gcd), f(lcm), or the
// constant-one function (whose convolute is the Piltz function tau_k).
struct ConvoluteKind {
  ConvoluteForm form = ConvoluteForm::GcdOf;
  FunctionId f;
  int k = 2;

  static ConvoluteKind gcd_of(FunctionId f, int k) { return {ConvoluteForm::GcdOf, f, k}; }
  static ConvoluteKind lcm_of(FunctionId f, int k) { return {ConvoluteForm::LcmOf, f, k}; }
  static ConvoluteKind plain_tau_k(int k) { return {ConvoluteForm::PlainTauK, FunctionId::one(), k}; }

  void validate() const;
  std::string name() const;
};

using TupleIndex = std::vector<uint64_t>;

// Visits every ordered k-tuple with product n exactly once, in lexicographic
// order of the divisor chain. The span is only valid during the callback.
void ordered_factorizations(uint64_t n, int k, const PrimeTable& table,
                            const std::function<void(std::span<const uint64_t>)>& visit);

std::vector<TupleIndex> collect_ordered_factorizations(uint64_t n, int k, const PrimeTable& table);

// Sum of f(gcd) / f(lcm) over the ordered factorizations of n.
ScalarValue convolute_gcd(const FunctionId& f, int k, uint64_t n, const PrimeTable& table);
ScalarValue convolute_lcm(const FunctionId& f, int k, uint64_t n, const PrimeTable& table);

// Same value as convolute_gcd through the divisor identity
// sum over d^k | n of (mu*f)(d) tau_k(n / d^k).
ScalarValue convolute_gcd_identity(const FunctionId& f, int k, uint64_t n, const PrimeTable& table);

// Coefficient family used to rewrite f(lcm) sums as weighted Piltz sums.
// ArClass inverts the k-fold zeta(s_i - r) factors of the lcm Dirichlet
// series; Tau inverts zeta^2(s_i).
struct LcmCoeffMode {
  enum class Kind { ArClass, Tau } kind = Kind::Tau;
  FunctionId f;  // ArClass only; must carry an ar_class()
  double r = 0.0;

  static LcmCoeffMode ar_class(FunctionId f, double r) { return {Kind::ArClass, f, r}; }
  static LcmCoeffMode tau_mode() { return {Kind::Tau, FunctionId::tau(), 0.0}; }

  void validate() const;
  std::string name() const;
};

// h_{f,k} (ArClass) or g_k (Tau) at a coordinate tuple. Multiplicative over
// the primes of the tuple; evaluated prime-locally.
ScalarValue lcm_remainder_coeff(const LcmCoeffMode& mode, int k, std::span<const uint64_t> tuple,
                                const PrimeTable& table);

// Literal coordinate-wise divisor sum; test oracle for the prime-local path.
ScalarValue lcm_remainder_coeff_literal(const LcmCoeffMode& mode, int k,
                                        std::span<const uint64_t> tuple, const PrimeTable& table);

// lhs = f(lcm tuple) (or tau(lcm tuple)); rhs re-assembles it from the
// remainder coefficients over all coordinate-wise splittings j_i d_i = n_i.
std::pair<ScalarValue, ScalarValue> verify_lcm_reconstruction(const LcmCoeffMode& mode, int k,
                                                              std::span<const uint64_t> tuple,
                                                              const PrimeTable& table);

namespace detail {
// Allocation-free coefficient evaluation for the inner loops of the series
// engine and the reconstruction sweeps.
struct CoeffValue {
  bool exact = true;
  int128 i = 0;
  double d = 0.0;
};
CoeffValue lcm_coeff_fast(const LcmCoeffMode& mode, int k, const uint64_t* tuple,
                          const PrimeTable& table);
}  // namespace detail

}  // namespace hyperconv

#endif  // HYPERCONV_CONVOLUTE_HPP
