#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "hyperconv/fit.hpp"
#include "hyperconv/summation.hpp"
#include "oracles.hpp"

using namespace hyperconv;

namespace {
const PrimeTable& table() {
  static PrimeTable t = build_prime_table(200000);
  return t;
}

const TruncationConfig kFullCfg;

// S(x) by the literal region recursion over the oracle tuple lists.
double brute_hyper_sum(const ConvoluteKind& kind, uint64_t X) {
  double total = 0.0;
  for (uint64_t n = 1; n <= X; ++n) {
    for (const auto& t : oracle::tuples_with_product(n, kind.k)) {
      if (kind.form == ConvoluteForm::PlainTauK) {
        total += 1.0;
      } else {
        uint64_t arg =
            kind.form == ConvoluteForm::GcdOf ? oracle::gcd_tuple(t) : oracle::lcm_tuple(t);
        total += eval_f(kind.f, arg, table()).approx();
      }
    }
  }
  return total;
}
}  // namespace

TEST_CASE("piltz reference values") {
  CHECK(piltz_summatory(2, 10).exact() == 27);
  CHECK(piltz_summatory(3, 5).exact() == 16);
  CHECK(piltz_summatory(4, 0.5).exact() == 0);
  CHECK(piltz_summatory(1, 9.7).exact() == 9);
  CHECK_THROWS_AS(piltz_summatory(0, 10), domain_error);
  CHECK_THROWS_AS(piltz_summatory(2, -1.0), domain_error);
}

TEST_CASE("piltz equals the tau_k prefix sums") {
  for (int k = 1; k <= 5; ++k) {
    FnTable tk = build_fn_table(FunctionId::tau_k(k), 3000, table());
    int128 prefix = 0;
    for (uint64_t x = 1; x <= 3000; ++x) {
      prefix += int128(tk.ints[x]);
      if (piltz_summatory(k, double(x)).exact() != prefix) {
        CAPTURE(k);
        CAPTURE(x);
        REQUIRE(piltz_summatory(k, double(x)).exact() == prefix);
      }
    }
  }
}

TEST_CASE("piltz sampled against prefix sums up to 1e5") {
  for (int k = 2; k <= 5; ++k) {
    FnTable tk = build_fn_table(FunctionId::tau_k(k), 100000, table());
    int128 prefix = 0;
    uint64_t next_check = 1;
    for (uint64_t x = 1; x <= 100000; ++x) {
      prefix += int128(tk.ints[x]);
      if (x == next_check || x == 100000) {
        CHECK(piltz_summatory(k, double(x)).exact() == prefix);
        next_check = next_check * 9 / 8 + 1;
      }
    }
  }
}

TEST_CASE("weighted piltz reference values") {
  CHECK(weighted_piltz_summatory(2, 1, 4).exact() == 23);
  CHECK(weighted_piltz_summatory(2, 0, 10).exact() == 27);
  CHECK(weighted_piltz_summatory(4, 1, 1).exact() == 1);
  CHECK(weighted_piltz_summatory(2, 1.5, 4).is_exact() == false);
  CHECK(weighted_piltz_summatory(2, 1.5, 4).approx() ==
        doctest::Approx(1 + std::pow(2, 1.5) * 2 + std::pow(3, 1.5) * 2 + 8.0 * 3));
}

TEST_CASE("weighted piltz respects the memory cap") {
  uint64_t old = memory_cap_mb();
  set_memory_cap_mb(1);
  CHECK_THROWS_AS(weighted_piltz_summatory(2, 1, 5e7), resource_error);
  set_memory_cap_mb(old);
}

TEST_CASE("enumerate engine reference values") {
  SummatoryResult a =
      hyper_sum_enumerate(ConvoluteKind::gcd_of(FunctionId::id_pow(1), 2), 6, table());
  CHECK(a.value.exact() == 15);
  CHECK(a.terms_used == 14);
  SummatoryResult b =
      hyper_sum_enumerate(ConvoluteKind::lcm_of(FunctionId::id_pow(1), 2), 4, table());
  CHECK(b.value.exact() == 21);
  SummatoryResult c = hyper_sum_enumerate(ConvoluteKind::gcd_of(FunctionId::tau(), 3), 0.9, table());
  CHECK(c.value.exact() == 0);
}

TEST_CASE("sieve engine reference values") {
  CHECK(sieve_convolute_prefix(ConvoluteKind::gcd_of(FunctionId::tau(), 2), 4, table())
            .value.exact() == 9);
  // f == 1 collapses to sum of tau(n) for n <= 4: 1 + 2 + 2 + 3
  CHECK(sieve_convolute_prefix(ConvoluteKind::lcm_of(FunctionId::one(), 2), 4, table())
            .value.exact() == 8);
  CHECK(sieve_convolute_prefix(ConvoluteKind::gcd_of(FunctionId::mobius(), 2), 4, table())
            .value.exact() == 6);
  CHECK_THROWS_AS(sieve_convolute_prefix(ConvoluteKind::gcd_of(FunctionId::log(), 2), 10, table()),
                  domain_error);
  CHECK_THROWS_AS(
      sieve_convolute_prefix(ConvoluteKind::lcm_of(FunctionId::small_omega(), 2), 10, table()),
      domain_error);
}

TEST_CASE("identity engine reference values") {
  CHECK(hyper_sum_gcd_identity(FunctionId::id_pow(1), 2, 6, table()).value.exact() == 15);
  CHECK(hyper_sum_gcd_identity(FunctionId::small_omega(), 3, 7, table()).value.exact() == 0);
  CHECK(hyper_sum_gcd_identity(FunctionId::big_omega(), 2, 4, table()).value.exact() == 1);
}

TEST_CASE("series engine reference values") {
  SummatoryResult a = hyper_sum_lcm_series(LcmCoeffMode::tau_mode(), 2, 4, kFullCfg, table());
  CHECK(a.value.exact() == 17);  // matches the lcm[tau] enumeration at x = 4
  CHECK(a.truncation_bound.has_value());
  CHECK(*a.truncation_bound == 0.0);
  SummatoryResult b = hyper_sum_lcm_series(LcmCoeffMode::ar_class(FunctionId::id_pow(1), 1), 2, 4,
                                           kFullCfg, table());
  CHECK(b.value.exact() == 21);
  SummatoryResult c = hyper_sum_lcm_series(LcmCoeffMode::tau_mode(), 3, 0.5, kFullCfg, table());
  CHECK(c.value.exact() == 0);
}

TEST_CASE("series coordinate cap flags the truncation with a sound bound") {
  TruncationConfig capped;
  capped.coordinate_cap = 2;
  for (uint64_t x : {50ull, 100ull, 400ull}) {
    SummatoryResult full = hyper_sum_lcm_series(LcmCoeffMode::tau_mode(), 2, double(x), kFullCfg, table());
    SummatoryResult part = hyper_sum_lcm_series(LcmCoeffMode::tau_mode(), 2, double(x), capped, table());
    CHECK_FALSE(part.value.is_exact());
    REQUIRE(part.truncation_bound.has_value());
    CHECK(*part.truncation_bound > 0.0);
    double missing = std::abs(to_double(full.value.exact()) - part.value.approx());
    CHECK(missing <= *part.truncation_bound);
  }
}

TEST_CASE("engines match the literal oracle at small x") {
  std::vector<ConvoluteKind> kinds = {
      ConvoluteKind::gcd_of(FunctionId::tau(), 2), ConvoluteKind::gcd_of(FunctionId::mobius(), 3),
      ConvoluteKind::lcm_of(FunctionId::id_pow(1), 2), ConvoluteKind::plain_tau_k(3)};
  for (const auto& kind : kinds) {
    for (uint64_t x : {1ull, 7ull, 30ull, 60ull}) {
      double want = brute_hyper_sum(kind, x);
      CHECK(to_double(hyper_sum_enumerate(kind, double(x), table()).value.exact()) == want);
    }
  }
}

TEST_CASE("cross-engine agreement, mini version") {
  std::vector<FunctionId> fs = {FunctionId::one(),       FunctionId::id_pow(1),
                                FunctionId::tau(),       FunctionId::small_omega(),
                                FunctionId::big_omega(), FunctionId::mobius()};
  for (int k = 2; k <= 3; ++k) {
    for (const auto& f : fs) {
      ConvoluteKind kind = ConvoluteKind::gcd_of(f, k);
      for (uint64_t x = 1; x <= 300; ++x) {
        int128 a = hyper_sum_enumerate(kind, double(x), table()).value.exact();
        int128 b = sieve_convolute_prefix(kind, double(x), table()).value.exact();
        int128 c = hyper_sum_gcd_identity(f, k, double(x), table()).value.exact();
        if (a != b || a != c) {
          CAPTURE(f.name());
          CAPTURE(k);
          CAPTURE(x);
          REQUIRE(a == b);
          REQUIRE(a == c);
        }
      }
    }
    ConvoluteKind logkind = ConvoluteKind::gcd_of(FunctionId::log(), k);
    for (uint64_t x = 1; x <= 300; ++x) {
      double a = hyper_sum_enumerate(logkind, double(x), table()).value.approx();
      double c = hyper_sum_gcd_identity(FunctionId::log(), k, double(x), table()).value.approx();
      CHECK(a == doctest::Approx(c).epsilon(1e-9));
    }
    for (auto f : {FunctionId::tau(), FunctionId::id_pow(1)}) {
      ConvoluteKind kind = ConvoluteKind::lcm_of(f, k);
      for (uint64_t x = 1; x <= 300; ++x) {
        int128 a = hyper_sum_enumerate(kind, double(x), table()).value.exact();
        int128 b = sieve_convolute_prefix(kind, double(x), table()).value.exact();
        int128 c = evaluate_sum(kind, double(x), SumMethod::Series, kFullCfg, table()).value.exact();
        if (a != b || a != c) {
          CAPTURE(f.name());
          CAPTURE(k);
          CAPTURE(x);
          REQUIRE(a == b);
          REQUIRE(a == c);
        }
      }
    }
    // plain tau_k region counts
    ConvoluteKind plain = ConvoluteKind::plain_tau_k(k);
    for (uint64_t x = 1; x <= 300; ++x) {
      int128 a = hyper_sum_enumerate(plain, double(x), table()).value.exact();
      int128 b = sieve_convolute_prefix(plain, double(x), table()).value.exact();
      int128 c = piltz_summatory(k, double(x)).exact();
      CHECK(a == b);
      CHECK(a == c);
    }
  }
}

TEST_CASE("summatory results are nondecreasing in x for nonnegative f") {
  std::vector<ConvoluteKind> kinds = {ConvoluteKind::gcd_of(FunctionId::tau(), 2),
                                      ConvoluteKind::lcm_of(FunctionId::id_pow(1), 3),
                                      ConvoluteKind::gcd_of(FunctionId::small_omega(), 2)};
  for (const auto& kind : kinds) {
    int128 prev = 0;
    for (uint64_t x = 1; x <= 200; ++x) {
      int128 cur = hyper_sum_enumerate(kind, double(x), table()).value.exact();
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("T_2 residual stays below a sqrt(x) envelope") {
  // gamma by Euler-Maclaurin on the harmonic sum
  const uint64_t N = 1000000;
  double h = 0.0;
  for (uint64_t n = 1; n <= N; ++n) h += 1.0 / double(n);
  double gamma = h - std::log(double(N)) - 0.5 / double(N) + 1.0 / (12.0 * double(N) * double(N));
  double worst = 0.0;
  for (double x = 1e3; x <= 1.05e7; x *= 1.7) {
    uint64_t X = uint64_t(x);
    double t2 = to_double(piltz_summatory(2, double(X)).exact());
    double main = double(X) * (std::log(double(X)) + 2.0 * gamma - 1.0);
    worst = std::max(worst, std::abs(t2 - main) / std::sqrt(double(X)));
  }
  CHECK(worst > 0.0);
  CHECK(worst < 1.0);  // observed constant is well below 1
}

TEST_CASE("engine preconditions") {
  PrimeTable tiny = build_prime_table(50);
  CHECK_THROWS_AS(hyper_sum_enumerate(ConvoluteKind::gcd_of(FunctionId::tau(), 2), 100, tiny),
                  domain_error);
  CHECK_THROWS_AS(sieve_convolute_prefix(ConvoluteKind::gcd_of(FunctionId::tau(), 2), 100, tiny),
                  domain_error);
  CHECK_THROWS_AS(
      hyper_sum_lcm_series(LcmCoeffMode::tau_mode(), 2, 100, kFullCfg, tiny), domain_error);
  CHECK_THROWS_AS(evaluate_sum(ConvoluteKind::lcm_of(FunctionId::tau(), 2), 50, SumMethod::Identity,
                               kFullCfg, tiny),
                  domain_error);
  CHECK_THROWS_AS(evaluate_sum(ConvoluteKind::gcd_of(FunctionId::tau(), 2), 30, SumMethod::Series,
                               kFullCfg, tiny),
                  domain_error);
  CHECK_THROWS_AS(
      evaluate_sum(ConvoluteKind::lcm_of(FunctionId::log(), 2), 30, SumMethod::Series, kFullCfg, tiny),
      domain_error);
}

TEST_CASE("zero region gives the zero of the right exactness") {
  SummatoryResult a = hyper_sum_enumerate(ConvoluteKind::gcd_of(FunctionId::log(), 2), 0.3, table());
  CHECK_FALSE(a.value.is_exact());
  CHECK(a.value.approx() == 0.0);
  SummatoryResult b = hyper_sum_enumerate(ConvoluteKind::gcd_of(FunctionId::tau(), 2), 0.3, table());
  CHECK(b.value.is_exact());
  CHECK(b.value.exact() == 0);
}
