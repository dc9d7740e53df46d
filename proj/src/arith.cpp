#include "hyperconv/arith.hpp"

#include <algorithm>
#include <cmath>

namespace hyperconv {

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return uint64_t(uint128(a) * b % m);
}

uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1;
  a %= m;
  while (e > 0) {
    if (e & 1u) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1u;
  }
  return r;
}

// Deterministic Miller-Rabin for 64-bit inputs.
bool miller_rabin(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1u) == 0) {
    d >>= 1u;
    ++s;
  }
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_integer_exponent(double r) { return r >= 0.0 && r == std::floor(r) && r <= 64.0; }

}  // namespace

bool PrimeTable::is_prime(uint64_t n) const {
  if (n < 2) return false;
  if (n <= limit) return spf[n] == n;
  return miller_rabin(n);
}

PrimeTable build_prime_table(uint64_t limit) {
  if (limit < 2) throw domain_error("build_prime_table: limit must be >= 2");
  check_allocation((limit + 1) * sizeof(uint32_t) + (limit / 10) * sizeof(uint32_t),
                   "build_prime_table");
  if (limit > UINT32_MAX) throw resource_error("build_prime_table: limit exceeds 32-bit sieve range");

  PrimeTable t;
  t.limit = limit;
  t.spf.assign(limit + 1, 0);
  for (uint64_t i = 2; i <= limit; ++i) {
    if (t.spf[i] == 0) {
      t.spf[i] = uint32_t(i);
      t.primes.push_back(uint32_t(i));
    }
    for (uint32_t p : t.primes) {
      if (p > t.spf[i] || i * p > limit) break;
      t.spf[i * p] = p;
    }
  }
  return t;
}

uint64_t Factorization::recompose() const {
  int128 r = 1;
  for (const auto& pp : parts) r = checked_mul(r, checked_pow(int128(pp.p), pp.e));
  if (r > int128(UINT64_MAX)) throw overflow_error("recompose: exceeds 64 bits");
  return uint64_t(r);
}

Factorization factorize(uint64_t n, const PrimeTable& table) {
  if (n == 0) throw domain_error("factorize: n must be positive");
  Factorization f;
  f.n = n;
  if (n <= table.limit) {
    while (n > 1) {
      uint64_t p = table.spf[n];
      uint32_t e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      f.parts.push_back({p, e});
    }
    return f;
  }
  for (uint32_t p : table.primes) {
    if (uint64_t(p) * p > n) break;
    if (n % p == 0) {
      uint32_t e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      f.parts.push_back({p, e});
    }
  }
  if (n > 1) {
    if (!miller_rabin(n)) {
      throw domain_error("factorize: composite cofactor " + std::to_string(n) +
                         " beyond table limit");
    }
    f.parts.push_back({n, 1});
  }
  std::sort(f.parts.begin(), f.parts.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
  return f;
}

bool FunctionId::integer_valued() const {
  switch (tag) {
    case Fn::Log:
    case Fn::Lambda:
      return false;
    case Fn::IdPow:
    case Fn::SigmaPow:
    case Fn::PhiPow:
      return is_integer_exponent(r);
    default:
      return true;
  }
}

bool FunctionId::multiplicative() const {
  switch (tag) {
    case Fn::Log:
    case Fn::Lambda:
    case Fn::SmallOmega:
    case Fn::BigOmega:
      return false;
    default:
      return true;
  }
}

std::optional<ArClassInfo> FunctionId::ar_class() const {
  // Class membership: f(p) stays within C1 * p^(r-1/2) of p^r and prime-power
  // values within C2 * p^(vr). Constants are deliberately generous; they only
  // feed tail bounds.
  switch (tag) {
    case Fn::IdPow:
      return ArClassInfo{r, 0.0, 1.0};
    case Fn::SigmaPow:
      // sigma(p)^r = (p+1)^r <= p^r (1+1/p)^r; sigma(p^v)^r < (2 p^v)^r.
      return ArClassInfo{r, std::sqrt(2.0) * (std::pow(1.5, r) - 1.0) + 1.0, std::pow(2.0, r)};
    case Fn::PhiPow:
      // phi(p)^r = (p-1)^r; phi(p^v)^r < p^(vr).
      return ArClassInfo{r, std::sqrt(2.0) * (1.0 - std::pow(0.5, r)) + 1.0, 1.0};
    default:
      return std::nullopt;
  }
}

namespace {

std::string pow_name(const char* base, double r) {
  if (r == 1.0) return base;
  char buf[32];
  if (r == std::floor(r))
    std::snprintf(buf, sizeof(buf), "%s^%d", base, int(r));
  else
    std::snprintf(buf, sizeof(buf), "%s^%g", base, r);
  return buf;
}

}  // namespace

std::string FunctionId::name() const {
  switch (tag) {
    case Fn::One: return "one";
    case Fn::Log: return "log";
    case Fn::SmallOmega: return "omega";
    case Fn::BigOmega: return "bigomega";
    case Fn::Tau: return "tau";
    case Fn::TauK: return "tau" + std::to_string(k);
    case Fn::Mobius: return "mobius";
    case Fn::Lambda: return "lambda";
    case Fn::IdPow: return pow_name("id", r);
    case Fn::SigmaPow: return pow_name("sigma", r);
    case Fn::PhiPow: return pow_name("phi", r);
  }
  return "?";
}

int mobius_point(const Factorization& fac) {
  for (const auto& pp : fac.parts) {
    if (pp.e >= 2) return 0;
  }
  return (fac.parts.size() % 2 == 0) ? 1 : -1;
}

uint64_t euler_phi(const Factorization& fac) {
  uint64_t r = 1;
  for (const auto& pp : fac.parts) {
    uint64_t q = pp.p;
    for (uint32_t i = 1; i < pp.e; ++i) q *= pp.p;
    r *= q - q / pp.p;
  }
  return r;
}

int128 sigma_sum(const Factorization& fac) {
  int128 r = 1;
  for (const auto& pp : fac.parts) {
    int128 s = 1, q = 1;
    for (uint32_t i = 1; i <= pp.e; ++i) {
      q = checked_mul(q, int128(pp.p));
      s = checked_add(s, q);
    }
    r = checked_mul(r, s);
  }
  return r;
}

int128 binomial(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  int128 r = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    r = checked_mul(r, int128(n - k + i));
    r /= int128(i);  // product of i consecutive integers is divisible by i!
  }
  return r;
}

uint64_t integer_nth_root(uint64_t n, int k) {
  if (k <= 0) throw domain_error("integer_nth_root: k must be positive");
  if (k == 1 || n <= 1) return n;
  uint64_t r = uint64_t(std::pow(double(n), 1.0 / k));
  auto pow_le = [&](uint64_t b) {
    uint128 v = 1;
    for (int i = 0; i < k; ++i) {
      v *= b;
      if (v > n) return false;
    }
    return true;
  };
  while (r > 0 && !pow_le(r)) --r;
  while (pow_le(r + 1)) ++r;
  return r;
}

ScalarValue eval_f_prime_power(const FunctionId& f, uint64_t p, uint32_t e) {
  if (e == 0) {
    switch (f.tag) {
      case Fn::Log:
      case Fn::Lambda:
        return ScalarValue::from_double(0.0);
      case Fn::SmallOmega:
      case Fn::BigOmega:
        return ScalarValue::from_int(0);
      default:
        return f.integer_valued() ? ScalarValue::from_int(1) : ScalarValue::from_double(1.0);
    }
  }
  switch (f.tag) {
    case Fn::One:
      return ScalarValue::from_int(1);
    case Fn::Log:
      return ScalarValue::from_double(double(e) * std::log(double(p)));
    case Fn::SmallOmega:
      return ScalarValue::from_int(1);
    case Fn::BigOmega:
      return ScalarValue::from_int(e);
    case Fn::Tau:
      return ScalarValue::from_int(e + 1);
    case Fn::TauK:
      if (f.k < 1) throw domain_error("tau_k: k must be >= 1");
      return ScalarValue::from_int(binomial(uint64_t(e) + f.k - 1, f.k - 1));
    case Fn::Mobius:
      return ScalarValue::from_int(e == 1 ? -1 : 0);
    case Fn::Lambda:
      return ScalarValue::from_double(std::log(double(p)));
    case Fn::IdPow: {
      if (is_integer_exponent(f.r))
        return ScalarValue::from_int(checked_pow(int128(p), unsigned(f.r) * e));
      return ScalarValue::from_double(std::pow(double(p), f.r * e));
    }
    case Fn::SigmaPow: {
      int128 q = 1, s = 1;
      for (uint32_t i = 1; i <= e; ++i) {
        q = checked_mul(q, int128(p));
        s = checked_add(s, q);
      }
      if (is_integer_exponent(f.r)) return ScalarValue::from_int(checked_pow(s, unsigned(f.r)));
      return ScalarValue::from_double(std::pow(to_double(s), f.r));
    }
    case Fn::PhiPow: {
      int128 q = 1;
      for (uint32_t i = 1; i < e; ++i) q = checked_mul(q, int128(p));
      int128 phi = checked_mul(q, int128(p - 1));
      if (is_integer_exponent(f.r)) return ScalarValue::from_int(checked_pow(phi, unsigned(f.r)));
      return ScalarValue::from_double(std::pow(to_double(phi), f.r));
    }
  }
  throw domain_error("eval_f_prime_power: unknown tag");
}

ScalarValue eval_f(const FunctionId& f, const Factorization& fac) {
  switch (f.tag) {
    case Fn::One:
      return ScalarValue::from_int(1);
    case Fn::Log:
      return ScalarValue::from_double(std::log(double(fac.n)));
    case Fn::SmallOmega:
      return ScalarValue::from_int(int128(fac.parts.size()));
    case Fn::BigOmega: {
      int64_t s = 0;
      for (const auto& pp : fac.parts) s += pp.e;
      return ScalarValue::from_int(s);
    }
    case Fn::Lambda:
      if (fac.parts.size() == 1) return ScalarValue::from_double(std::log(double(fac.parts[0].p)));
      return ScalarValue::from_double(0.0);
    default: {
      // Multiplicative: product of prime-power values.
      ScalarValue r = eval_f_prime_power(f, 2, 0);
      for (const auto& pp : fac.parts) r *= eval_f_prime_power(f, pp.p, pp.e);
      return r;
    }
  }
}

ScalarValue eval_f(const FunctionId& f, uint64_t n, const PrimeTable& table) {
  if (n == 0) throw domain_error("eval_f: n must be positive");
  return eval_f(f, factorize(n, table));
}

ScalarValue tau_k_point(int k, const Factorization& fac) {
  if (k < 1) throw domain_error("tau_k_point: k must be >= 1");
  int128 r = 1;
  for (const auto& pp : fac.parts) r = checked_mul(r, binomial(uint64_t(pp.e) + k - 1, k - 1));
  return ScalarValue::from_int(r);
}

ScalarValue tau_k_point(int k, uint64_t n, const PrimeTable& table) {
  return tau_k_point(k, factorize(n, table));
}

namespace {

// Generic (mu * f)(n) over the squarefree divisors d | n.
ScalarValue mobius_transform_generic(const FunctionId& f, const Factorization& fac) {
  size_t w = fac.parts.size();
  if (w > 25) throw domain_error("mobius_transform_point: too many prime factors");
  bool exact = f.integer_valued();
  int128 acc_i = 0;
  KahanSum acc_d;
  Factorization cof;
  for (uint32_t mask = 0; mask < (1u << w); ++mask) {
    cof.parts.clear();
    uint64_t m = fac.n;
    int sign = 1;
    for (size_t i = 0; i < w; ++i) {
      PrimePower pp = fac.parts[i];
      if (mask & (1u << i)) {
        sign = -sign;
        m /= pp.p;
        if (--pp.e == 0) continue;
      }
      cof.parts.push_back(pp);
    }
    cof.n = m;
    ScalarValue v = eval_f(f, cof);
    if (exact) {
      acc_i = checked_add(acc_i, sign > 0 ? v.exact() : checked_sub(0, v.exact()));
    } else {
      acc_d.add(sign * v.approx());
    }
  }
  return exact ? ScalarValue::from_int(acc_i) : ScalarValue::from_double(acc_d.value());
}

}  // namespace

ScalarValue mobius_transform_point(const FunctionId& f, uint64_t n, const PrimeTable& table) {
  if (n == 0) throw domain_error("mobius_transform_point: n must be positive");
  Factorization fac = factorize(n, table);
  switch (f.tag) {
    case Fn::One:
      return ScalarValue::from_int(n == 1 ? 1 : 0);
    case Fn::Log:  // mu * log = Lambda
      return eval_f(FunctionId::lambda(), fac);
    case Fn::SmallOmega:
      return ScalarValue::from_int(fac.parts.size() == 1 && fac.parts[0].e == 1 ? 1 : 0);
    case Fn::BigOmega:
      return ScalarValue::from_int(fac.parts.size() == 1 ? 1 : 0);
    case Fn::Tau:  // tau = 1 * 1
      return ScalarValue::from_int(1);
    case Fn::TauK:
      if (f.k >= 2) return tau_k_point(f.k - 1, fac);
      return ScalarValue::from_int(n == 1 ? 1 : 0);
    case Fn::Mobius: {
      // (mu * mu) is multiplicative: -2 at p, 1 at p^2, 0 beyond.
      int128 r = 1;
      for (const auto& pp : fac.parts) {
        if (pp.e == 1)
          r = checked_mul(r, int128(-2));
        else if (pp.e != 2)
          return ScalarValue::from_int(0);
      }
      return ScalarValue::from_int(r);
    }
    case Fn::IdPow:
      if (f.r == 1.0) return ScalarValue::from_int(int128(euler_phi(fac)));
      return mobius_transform_generic(f, fac);
    default:
      return mobius_transform_generic(f, fac);
  }
}

FnTable build_fn_table(const FunctionId& f, uint64_t n, const PrimeTable& table) {
  if (table.limit < n) throw domain_error("build_fn_table: prime table smaller than range");
  FnTable out;
  out.exact = f.integer_valued();
  check_allocation((n + 1) * (out.exact ? sizeof(int64_t) : sizeof(double)) +
                       (n + 1) * (sizeof(uint32_t) + 1),
                   "build_fn_table");

  // cof[n] = n with its spf-power stripped; pe[n] = exponent of spf(n) in n.
  std::vector<uint32_t> cof(n + 1, 1);
  std::vector<uint8_t> pe(n + 1, 0);
  std::vector<uint32_t> ppw(n + 1, 1);
  for (uint64_t i = 2; i <= n; ++i) {
    uint32_t p = table.spf[i];
    uint64_t m = i / p;
    if (m >= 2 && table.spf[m] == p) {
      pe[i] = uint8_t(pe[m] + 1);
      ppw[i] = uint32_t(ppw[m] * p);
      cof[i] = cof[m];
    } else {
      pe[i] = 1;
      ppw[i] = p;
      cof[i] = uint32_t(m);
    }
  }

  if (out.exact) {
    out.ints.assign(n + 1, 0);
    if (n >= 1) out.ints[1] = 1;
    switch (f.tag) {
      case Fn::SmallOmega:
        if (n >= 1) out.ints[1] = 0;
        for (uint64_t i = 2; i <= n; ++i) out.ints[i] = out.ints[cof[i]] + 1;
        break;
      case Fn::BigOmega:
        if (n >= 1) out.ints[1] = 0;
        for (uint64_t i = 2; i <= n; ++i) out.ints[i] = out.ints[cof[i]] + pe[i];
        break;
      default: {
        // Multiplicative lift; prime-power locals memoized per (p, e).
        std::vector<int64_t> local(n + 1, INT64_MIN);
        for (uint64_t i = 2; i <= n; ++i) {
          uint32_t q = ppw[i];
          if (local[q] == INT64_MIN) {
            int128 v = eval_f_prime_power(f, table.spf[i], pe[i]).exact();
            if (v > INT64_MAX || v < INT64_MIN + 1)
              throw overflow_error("build_fn_table: value exceeds 64 bits");
            local[q] = int64_t(v);
          }
          int128 v = checked_mul(int128(out.ints[cof[i]]), int128(local[q]));
          if (v > INT64_MAX || v < INT64_MIN + 1)
            throw overflow_error("build_fn_table: value exceeds 64 bits");
          out.ints[i] = int64_t(v);
        }
        break;
      }
    }
  } else {
    out.floats.assign(n + 1, 0.0);
    switch (f.tag) {
      case Fn::Log:
        for (uint64_t i = 1; i <= n; ++i) out.floats[i] = std::log(double(i));
        break;
      case Fn::Lambda:
        for (uint64_t i = 2; i <= n; ++i)
          out.floats[i] = (cof[i] == 1) ? std::log(double(table.spf[i])) : 0.0;
        break;
      default: {
        if (n >= 1) out.floats[1] = 1.0;
        std::vector<double> local(n + 1, -1.0);
        for (uint64_t i = 2; i <= n; ++i) {
          uint32_t q = ppw[i];
          if (local[q] < 0.0) local[q] = eval_f_prime_power(f, table.spf[i], pe[i]).approx();
          out.floats[i] = out.floats[cof[i]] * local[q];
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace hyperconv
