#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>

#include "doctest.h"
#include "hyperconv/constants.hpp"
#include "oracles.hpp"

using namespace hyperconv;

namespace {
constexpr double kPi = 3.14159265358979323846;

const PrimeTable& table() {
  static PrimeTable t = build_prime_table(2000000);
  return t;
}

EulerConfig cfg_with(uint64_t prime_limit) {
  EulerConfig cfg;
  cfg.prime_limit = prime_limit;
  return cfg;
}
}  // namespace

TEST_CASE("zeta reference values") {
  EulerConfig cfg;
  ConstantResult z2 = zeta_value(2, cfg);
  CHECK(std::abs(z2.value - kPi * kPi / 6.0) <= z2.tail_bound + 1e-12);
  CHECK(z2.value == doctest::Approx(1.6449340668).epsilon(1e-9));
  ConstantResult z3 = zeta_value(3, cfg);
  CHECK(z3.value == doctest::Approx(1.2020569032).epsilon(1e-9));
  ConstantResult z20 = zeta_value(20, cfg);
  CHECK(z20.value - 1.0 < std::pow(2.0, -19));
  CHECK(z20.value > 1.0);
  CHECK_THROWS_AS(zeta_value(1.0, cfg), domain_error);
}

TEST_CASE("gcd prime constant: omega is the prime zeta") {
  ConstantResult k2 = gcd_prime_constant(FunctionId::small_omega(), 2, cfg_with(1000000), table());
  // independent oracle: direct sum over a separately sieved prime list
  double direct = 0.0;
  for (uint32_t p : oracle::simple_primes(2000000)) direct += 1.0 / (double(p) * double(p));
  CHECK(std::abs(k2.value - direct) <= k2.tail_bound + 1e-9);
  CHECK(k2.value == doctest::Approx(0.4522474200).epsilon(1e-7));
}

TEST_CASE("gcd prime constant: log case matches -zeta'(2)/zeta(2)") {
  // sum_p log p / (p^2 - 1) = sum_n Lambda(n)/n^2 = -zeta'(2)/zeta(2);
  // evaluate the right side as (sum log n / n^2) / zeta(2) by bracketed sums.
  const uint64_t N = 2000000;
  double s = 0.0;
  for (uint64_t n = 2; n <= N; ++n) s += std::log(double(n)) / (double(n) * double(n));
  double logn = std::log(double(N));
  s += (logn + 1.0) / double(N);  // integral tail of log t / t^2
  double ref = s / (kPi * kPi / 6.0);
  ConstantResult klog = gcd_prime_constant(FunctionId::log(), 2, cfg_with(1000000), table());
  CHECK(std::abs(klog.value - ref) <= klog.tail_bound + 3.0 * (logn + 2.0) / double(N));
  CHECK(klog.value == doctest::Approx(0.5699652925).epsilon(1e-4));
}

TEST_CASE("gcd prime constant: bigomega tail dominance") {
  ConstantResult k10 = gcd_prime_constant(FunctionId::big_omega(), 10, cfg_with(100000), table());
  CHECK(k10.value > 1.0 / 1023.0);
  CHECK(k10.value < 1.0 / 1023.0 + 1e-3);
}

TEST_CASE("gcd prime constant ordering") {
  for (int k = 2; k <= 8; ++k) {
    double w = gcd_prime_constant(FunctionId::small_omega(), k, cfg_with(100000), table()).value;
    double o = gcd_prime_constant(FunctionId::big_omega(), k, cfg_with(100000), table()).value;
    double gap = 2.0 * std::pow(4.0, -k) / (1.0 - std::pow(2.0, -k));
    CHECK(w < o);
    CHECK(o < w + gap);
  }
  CHECK_THROWS_AS(gcd_prime_constant(FunctionId::small_omega(), 1, cfg_with(1000), table()),
                  domain_error);
  CHECK_THROWS_AS(gcd_prime_constant(FunctionId::tau(), 2, cfg_with(1000), table()), domain_error);
}

TEST_CASE("wintner constant reference values") {
  EulerConfig cfg = cfg_with(200000);
  ConstantResult one2 = wintner_gcd_constant(FunctionId::one(), 2, cfg, table());
  CHECK(std::abs(one2.value - 1.0) <= one2.tail_bound);
  ConstantResult tau2 = wintner_gcd_constant(FunctionId::tau(), 2, cfg, table());
  CHECK(std::abs(tau2.value - 1.6449340668) <= tau2.tail_bound + 1e-9);
  ConstantResult id3 = wintner_gcd_constant(FunctionId::id_pow(1), 3, cfg, table());
  CHECK(std::abs(id3.value - 1.3684327776) <= id3.tail_bound + 1e-9);
}

TEST_CASE("wintner divergent pairings rejected") {
  EulerConfig cfg = cfg_with(10000);
  CHECK_THROWS_AS(wintner_gcd_constant(FunctionId::id_pow(1), 2, cfg, table()), domain_error);
  CHECK_THROWS_AS(wintner_gcd_constant(FunctionId::sigma_pow(2), 3, cfg, table()), domain_error);
  CHECK_THROWS_AS(wintner_gcd_constant(FunctionId::one(), 1, cfg, table()), domain_error);
  CHECK_NOTHROW(wintner_gcd_constant(FunctionId::phi_pow(1), 3, cfg, table()));
  CHECK_NOTHROW(wintner_gcd_constant(FunctionId::tau_k(3), 2, cfg, table()));
  CHECK_NOTHROW(wintner_gcd_constant(FunctionId::lambda(), 2, cfg, table()));
}

TEST_CASE("C_2 equals zeta(3)/zeta(2)") {
  EulerConfig cfg = cfg_with(1000000);
  ConstantResult c2 = euler_product_C(FunctionId::id_pow(1), 1, 2, cfg, table());
  ConstantResult z2 = zeta_value(2, cfg), z3 = zeta_value(3, cfg);
  CHECK(std::abs(c2.value - z3.value / z2.value) < 1e-6);
  CHECK(c2.value == doctest::Approx(0.7307629696).epsilon(1e-6));
}

TEST_CASE("C telescopes to 1 for f == 1") {
  ConstantResult c = euler_product_C(FunctionId::id_pow(0), 0, 2, cfg_with(100000), table());
  CHECK(std::abs(c.value - 1.0) <= c.tail_bound + 1e-12);
}

TEST_CASE("C rejects functions outside A_r") {
  EulerConfig cfg = cfg_with(1000);
  CHECK_THROWS_AS(euler_product_C(FunctionId::tau(), 0, 2, cfg, table()), domain_error);
  CHECK_THROWS_AS(euler_product_C(FunctionId::log(), 0, 2, cfg, table()), domain_error);
  CHECK_THROWS_AS(euler_product_C(FunctionId::id_pow(1), 2, 2, cfg, table()), domain_error);
  CHECK_THROWS_AS(euler_product_C(FunctionId::id_pow(1), 1, 1, cfg, table()), domain_error);
}

namespace {
// Literal truncated k-fold local sum: (1-1/p)^zp * sum f(p^max) w^(sum nu).
double literal_local(int k, int zeta_pow, double r, uint64_t p, int cap,
                     const std::function<double(int)>& f_at_exp) {
  double w = std::pow(double(p), -(r + 1.0));
  double total = 0.0;
  std::vector<int> nu(size_t(k), 0);
  while (true) {
    int mx = 0, sum = 0;
    for (int v : nu) {
      mx = std::max(mx, v);
      sum += v;
    }
    total += f_at_exp(mx) * std::pow(w, sum);
    int i = 0;
    while (i < k) {
      if (nu[size_t(i)] < cap) {
        ++nu[size_t(i)];
        break;
      }
      nu[size_t(i)] = 0;
      ++i;
    }
    if (i == k) break;
  }
  return std::pow(1.0 - 1.0 / double(p), zeta_pow) * total;
}
}  // namespace

TEST_CASE("layered local factors equal literal k-fold sums") {
  for (uint32_t p : oracle::simple_primes(50)) {
    for (int k = 2; k <= 3; ++k) {
      int cap = p == 2 ? 26 : 14;
      double lit_c = literal_local(k, k, 1.0, p, cap,
                                   [&](int m) { return std::pow(double(p), double(m)); });
      double lay_c = detail::euler_local_factor_C(FunctionId::id_pow(1), 1, k, p, cap);
      CHECK(lay_c == doctest::Approx(lit_c).epsilon(1e-10));

      double lit_sigma = literal_local(k, k, 1.0, p, cap, [&](int m) {
        double q = 1.0, s = 1.0;
        for (int i = 1; i <= m; ++i) {
          q *= double(p);
          s += q;
        }
        return s;
      });
      double lay_sigma = detail::euler_local_factor_C(FunctionId::sigma_pow(1), 1, k, p, cap);
      CHECK(lay_sigma == doctest::Approx(lit_sigma).epsilon(1e-10));

      double lit_d = literal_local(k, 2 * k, 0.0, p, cap, [&](int m) { return double(m + 1); });
      double lay_d = detail::euler_local_factor_D(k, p, cap);
      CHECK(lay_d == doctest::Approx(lit_d).epsilon(1e-10));
    }
  }
}

TEST_CASE("D local factor at k=1 collapses to 1") {
  for (uint64_t p : {2ull, 3ull, 5ull, 101ull}) {
    CHECK(detail::euler_local_factor_D(1, p, 120) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("D_2 / 3! equals the squarefull product over pi^2") {
  ConstantResult d2 = euler_product_D(2, cfg_with(1000000), table());
  double prod = 1.0;
  for (uint32_t p : oracle::simple_primes(100000)) {
    prod *= 1.0 - 1.0 / ((double(p) + 1.0) * (double(p) + 1.0));
  }
  CHECK(std::abs(d2.value / 6.0 - prod / (kPi * kPi)) < 1e-6);
}

TEST_CASE("D_3 against the literal triple sums") {
  ConstantResult d3 = euler_product_D(3, cfg_with(100000), table());
  double lit = 1.0;
  for (uint32_t p : oracle::simple_primes(100000)) {
    int cap = p == 2 ? 40 : (p == 3 ? 27 : (p < 50 ? 18 : (p < 500 ? 8 : 4)));
    lit *= literal_local(3, 6, 0.0, p, cap, [&](int m) { return double(m + 1); });
  }
  CHECK(d3.value == doctest::Approx(lit).epsilon(1e-8));
  CHECK_THROWS_AS(euler_product_D(1, cfg_with(1000), table()), domain_error);
}

TEST_CASE("eulerian reference values and descent oracle") {
  CHECK(eulerian_number(1, 0) == 1);
  CHECK(eulerian_number(3, 1) == 4);
  CHECK(eulerian_number(4, 2) == 11);
  CHECK(eulerian_number(4, 5) == 0);
  CHECK(eulerian_number(4, -1) == 0);
  CHECK_THROWS_AS(eulerian_number(0, 0), domain_error);
  CHECK_THROWS_AS(eulerian_row(34), overflow_error);
  for (int t = 1; t <= 7; ++t) {
    auto want = oracle::eulerian_by_descents(t);
    auto got = eulerian_row(t);
    REQUIRE(got.size() == size_t(t));
    for (int m = 0; m < t; ++m) {
      CHECK(got[size_t(m)] == int128(want[size_t(m)]));
    }
  }
}

TEST_CASE("eulerian row sums are factorials for t <= 10") {
  int128 fact = 1;
  for (int t = 1; t <= 10; ++t) {
    fact = checked_mul(fact, int128(t));
    int128 sum = 0;
    for (int128 v : eulerian_row(t)) sum = checked_add(sum, v);
    CHECK(sum == fact);
  }
}

TEST_CASE("power series identity via eulerian polynomials") {
  for (int t = 1; t <= 5; ++t) {
    for (double q : {0.5, 1.0 / 3.0, 0.2}) {
      auto row = eulerian_row(t);
      double psi = 0.0;
      for (size_t i = row.size(); i-- > 0;) psi = psi * q + to_double(row[i]);
      double closed = q * psi / std::pow(1.0 - q, t + 1);
      double partial = 0.0;
      const int M = 200;
      for (int m = 1; m <= M; ++m) partial += std::pow(double(m), t) * std::pow(q, m);
      double ratio = std::pow((M + 2.0) / (M + 1.0), t) * q;  // term ratio bound past M
      double tail = std::pow(M + 1.0, t) * std::pow(q, M + 1) / (1.0 - ratio);
      CHECK(std::abs(closed - partial) <= tail + 1e-12 * std::abs(closed));
    }
  }
  // t = 3, q = 1/2: the closed form is exactly 26
  auto row = eulerian_row(3);
  double psi = to_double(row[0]) + 0.5 * to_double(row[1]) + 0.25 * to_double(row[2]);
  CHECK(0.5 * psi / std::pow(0.5, 4) == doctest::Approx(26.0).epsilon(1e-14));
}

TEST_CASE("b constant against the direct double sum") {
  for (auto [k, t] : {std::pair<int, int>{3, 1}, {4, 2}, {3, 2}}) {
    ConstantResult b = b_constant(k, t, cfg_with(100000), table());
    double direct = 0.0;
    for (uint32_t p : oracle::simple_primes(100000)) {
      double lp = std::log(double(p));
      double inner = 0.0;
      double pk = std::pow(double(p), -double(k));
      double term = pk;
      for (int nu = 1; nu <= 300; ++nu) {
        inner += std::pow(double(nu), t) * term;
        term *= pk;
        if (term < 1e-300) break;
      }
      direct += std::pow(lp, t + 1) * inner;
    }
    CHECK(std::abs(b.value - direct) <= b.tail_bound + 1e-10 * std::abs(direct));
  }
  CHECK_THROWS_AS(b_constant(2, 1, cfg_with(1000), table()), domain_error);
  CHECK_THROWS_AS(b_constant(3, 0, cfg_with(1000), table()), domain_error);
}

TEST_CASE("doubling the truncation never moves a constant past its bound") {
  EulerConfig base = cfg_with(100000);
  EulerConfig dbl = base;
  dbl.prime_limit *= 2;
  dbl.exponent_cap *= 2;

  auto check_stable = [&](const ConstantResult& a, const ConstantResult& b) {
    CHECK(std::abs(a.value - b.value) <= a.tail_bound);
  };
  check_stable(gcd_prime_constant(FunctionId::log(), 2, base, table()),
               gcd_prime_constant(FunctionId::log(), 2, dbl, table()));
  check_stable(gcd_prime_constant(FunctionId::small_omega(), 3, base, table()),
               gcd_prime_constant(FunctionId::small_omega(), 3, dbl, table()));
  check_stable(gcd_prime_constant(FunctionId::big_omega(), 2, base, table()),
               gcd_prime_constant(FunctionId::big_omega(), 2, dbl, table()));
  check_stable(wintner_gcd_constant(FunctionId::tau(), 2, base, table()),
               wintner_gcd_constant(FunctionId::tau(), 2, dbl, table()));
  check_stable(wintner_gcd_constant(FunctionId::mobius(), 2, base, table()),
               wintner_gcd_constant(FunctionId::mobius(), 2, dbl, table()));
  check_stable(euler_product_C(FunctionId::id_pow(1), 1, 2, base, table()),
               euler_product_C(FunctionId::id_pow(1), 1, 2, dbl, table()));
  check_stable(euler_product_C(FunctionId::sigma_pow(1), 1, 3, base, table()),
               euler_product_C(FunctionId::sigma_pow(1), 1, 3, dbl, table()));
  check_stable(euler_product_D(2, base, table()), euler_product_D(2, dbl, table()));
  check_stable(euler_product_D(3, base, table()), euler_product_D(3, dbl, table()));
  check_stable(b_constant(3, 1, base, table()), b_constant(3, 1, dbl, table()));
  check_stable(zeta_value(2, base), zeta_value(2, dbl));
}

TEST_CASE("constants demand a sufficient prime table") {
  PrimeTable tiny = build_prime_table(100);
  CHECK_THROWS_AS(gcd_prime_constant(FunctionId::log(), 2, cfg_with(100000), tiny), domain_error);
}
