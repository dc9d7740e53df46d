#include "hyperconv/convolute.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hyperconv {

void ConvoluteKind::validate() const {
  if (k < 2) throw domain_error("ConvoluteKind: k must be >= 2");
  if (k > 8) throw domain_error("ConvoluteKind: k > 8 not supported");
}

std::string ConvoluteKind::name() const {
  switch (form) {
    case ConvoluteForm::GcdOf: return "gcd[" + f.name() + "],k=" + std::to_string(k);
    case ConvoluteForm::LcmOf: return "lcm[" + f.name() + "],k=" + std::to_string(k);
    case ConvoluteForm::PlainTauK: return "tau_k,k=" + std::to_string(k);
  }
  return "?";
}

void LcmCoeffMode::validate() const {
  if (kind == Kind::ArClass) {
    auto cls = f.ar_class();
    if (!cls) throw domain_error("LcmCoeffMode: " + f.name() + " is outside the A_r class");
    if (cls->r != r) throw domain_error("LcmCoeffMode: r does not match the function's exponent");
  }
}

std::string LcmCoeffMode::name() const {
  if (kind == Kind::Tau) return "tau-mode";
  return "ar[" + f.name() + "]";
}

namespace {

struct DivisorSet {
  std::vector<uint64_t> values;               // all divisors of n, ascending
  std::vector<std::vector<uint32_t>> exps;    // matching exponent vectors
  std::vector<uint64_t> primes;
};

DivisorSet divisor_set(const Factorization& fac) {
  DivisorSet ds;
  for (const auto& pp : fac.parts) ds.primes.push_back(pp.p);
  ds.values.push_back(1);
  ds.exps.push_back(std::vector<uint32_t>(fac.parts.size(), 0));
  for (size_t i = 0; i < fac.parts.size(); ++i) {
    size_t old = ds.values.size();
    uint64_t q = 1;
    for (uint32_t e = 1; e <= fac.parts[i].e; ++e) {
      q *= fac.parts[i].p;
      for (size_t j = 0; j < old; ++j) {
        ds.values.push_back(ds.values[j] * q);
        auto ev = ds.exps[j];
        ev[i] = e;
        ds.exps.push_back(std::move(ev));
      }
    }
  }
  std::vector<size_t> order(ds.values.size());
  std::iota(order.begin(), order.end(), size_t(0));
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return ds.values[a] < ds.values[b]; });
  DivisorSet sorted;
  sorted.primes = ds.primes;
  for (size_t idx : order) {
    sorted.values.push_back(ds.values[idx]);
    sorted.exps.push_back(std::move(ds.exps[idx]));
  }
  return sorted;
}

bool fits(const std::vector<uint32_t>& d, const std::vector<uint32_t>& rem) {
  for (size_t i = 0; i < d.size(); ++i) {
    if (d[i] > rem[i]) return false;
  }
  return true;
}

// Walks the divisor-chain tree: pick tuple[level] | remainder, recurse on the
// quotient; the last coordinate absorbs what is left.
template <typename Leaf>
void enumerate_chains(const DivisorSet& ds, int k, int level, std::vector<uint32_t>& rem,
                      uint64_t rem_val, std::vector<uint64_t>& tuple, Leaf&& leaf) {
  if (level == k - 1) {
    tuple[level] = rem_val;
    leaf(tuple);
    return;
  }
  for (size_t i = 0; i < ds.values.size(); ++i) {
    if (ds.values[i] > rem_val) break;
    if (!fits(ds.exps[i], rem)) continue;
    tuple[level] = ds.values[i];
    for (size_t j = 0; j < rem.size(); ++j) rem[j] -= ds.exps[i][j];
    enumerate_chains(ds, k, level + 1, rem, rem_val / ds.values[i], tuple, leaf);
    for (size_t j = 0; j < rem.size(); ++j) rem[j] += ds.exps[i][j];
  }
}

uint64_t lcm_u64(uint64_t a, uint64_t b) {
  uint64_t g = std::gcd(a, b);
  uint128 l = uint128(a / g) * b;
  if (l > UINT64_MAX) throw overflow_error("lcm exceeds 64 bits");
  return uint64_t(l);
}

// Both the gcd and the lcm of a chain tuple divide n, so f only needs to be
// evaluated once per divisor; leaves look the value up by binary search.
struct ConvoluteAccumulator {
  const DivisorSet& ds;
  bool exact;
  int128 acc_i = 0;
  KahanSum acc_d;
  std::vector<int128> vals_i;
  std::vector<double> vals_d;

  ConvoluteAccumulator(const FunctionId& f, const DivisorSet& ds_, const Factorization& fac)
      : ds(ds_) {
    exact = f.integer_valued();
    Factorization dfac;
    for (size_t i = 0; i < ds.values.size(); ++i) {
      dfac.n = ds.values[i];
      dfac.parts.clear();
      for (size_t j = 0; j < ds.primes.size(); ++j) {
        if (ds.exps[i][j] > 0) dfac.parts.push_back({fac.parts[j].p, ds.exps[i][j]});
      }
      ScalarValue v = eval_f(f, dfac);
      if (exact)
        vals_i.push_back(v.exact());
      else
        vals_d.push_back(v.approx());
    }
  }

  void add_value(uint64_t arg) {
    size_t idx = size_t(std::lower_bound(ds.values.begin(), ds.values.end(), arg) -
                        ds.values.begin());
    if (exact)
      acc_i = checked_add(acc_i, vals_i[idx]);
    else
      acc_d.add(vals_d[idx]);
  }

  ScalarValue result() const {
    return exact ? ScalarValue::from_int(acc_i) : ScalarValue::from_double(acc_d.value());
  }
};

}  // namespace

void ordered_factorizations(uint64_t n, int k, const PrimeTable& table,
                            const std::function<void(std::span<const uint64_t>)>& visit) {
  if (n == 0) throw domain_error("ordered_factorizations: n must be positive");
  if (k < 1) throw domain_error("ordered_factorizations: k must be >= 1");
  Factorization fac = factorize(n, table);
  DivisorSet ds = divisor_set(fac);
  std::vector<uint32_t> rem;
  for (const auto& pp : fac.parts) rem.push_back(pp.e);
  std::vector<uint64_t> tuple(k);
  enumerate_chains(ds, k, 0, rem, n, tuple,
                   [&](const std::vector<uint64_t>& t) { visit(std::span<const uint64_t>(t)); });
}

std::vector<TupleIndex> collect_ordered_factorizations(uint64_t n, int k, const PrimeTable& table) {
  std::vector<TupleIndex> out;
  ordered_factorizations(n, k, table, [&](std::span<const uint64_t> t) {
    out.emplace_back(t.begin(), t.end());
  });
  return out;
}

ScalarValue convolute_gcd(const FunctionId& f, int k, uint64_t n, const PrimeTable& table) {
  if (n == 0) throw domain_error("convolute_gcd: n must be positive");
  if (k < 1) throw domain_error("convolute_gcd: k must be >= 1");
  Factorization fac = factorize(n, table);
  DivisorSet ds = divisor_set(fac);
  std::vector<uint32_t> rem;
  for (const auto& pp : fac.parts) rem.push_back(pp.e);
  std::vector<uint64_t> tuple(k);
  ConvoluteAccumulator acc(f, ds, fac);
  enumerate_chains(ds, k, 0, rem, n, tuple, [&](const std::vector<uint64_t>& t) {
    uint64_t g = t[0];
    for (int i = 1; i < k && g > 1; ++i) g = std::gcd(g, t[i]);
    acc.add_value(g);
  });
  return acc.result();
}

ScalarValue convolute_lcm(const FunctionId& f, int k, uint64_t n, const PrimeTable& table) {
  if (n == 0) throw domain_error("convolute_lcm: n must be positive");
  if (k < 1) throw domain_error("convolute_lcm: k must be >= 1");
  Factorization fac = factorize(n, table);
  DivisorSet ds = divisor_set(fac);
  std::vector<uint32_t> rem;
  for (const auto& pp : fac.parts) rem.push_back(pp.e);
  std::vector<uint64_t> tuple(k);
  ConvoluteAccumulator acc(f, ds, fac);
  enumerate_chains(ds, k, 0, rem, n, tuple, [&](const std::vector<uint64_t>& t) {
    uint64_t l = t[0];
    for (int i = 1; i < k; ++i) l = lcm_u64(l, t[i]);
    acc.add_value(l);
  });
  return acc.result();
}

ScalarValue convolute_gcd_identity(const FunctionId& f, int k, uint64_t n, const PrimeTable& table) {
  if (n == 0) throw domain_error("convolute_gcd_identity: n must be positive");
  if (k < 1) throw domain_error("convolute_gcd_identity: k must be >= 1");
  Factorization fac = factorize(n, table);
  DivisorSet ds = divisor_set(fac);
  bool exact = f.integer_valued();
  int128 acc_i = 0;
  KahanSum acc_d;
  // d contributes when d^k | n; the cofactor n / d^k keeps exponent vector
  // E - k*D, evaluated as a Piltz product directly.
  for (size_t i = 0; i < ds.values.size(); ++i) {
    bool ok = true;
    int128 tk = 1;
    for (size_t j = 0; j < ds.exps[i].size() && ok; ++j) {
      uint64_t need = uint64_t(ds.exps[i][j]) * uint64_t(k);
      uint32_t have = fac.parts[j].e;
      if (need > have) {
        ok = false;
      } else {
        tk = checked_mul(tk, binomial(have - need + k - 1, k - 1));
      }
    }
    if (!ok) continue;
    ScalarValue mf = mobius_transform_point(f, ds.values[i], table);
    if (exact) {
      acc_i = checked_add(acc_i, checked_mul(mf.exact(), tk));
    } else {
      acc_d.add(mf.approx() * to_double(tk));
    }
  }
  return exact ? ScalarValue::from_int(acc_i) : ScalarValue::from_double(acc_d.value());
}

namespace {

// (mu * mu) on a prime power: 1, -2, 1, then 0.
int mu_star_mu_exp(uint32_t e) {
  if (e == 0) return 1;
  if (e == 1) return -2;
  if (e == 2) return 1;
  return 0;
}

// Local value at prime p with coordinate exponents nu[0..k-1].
detail::CoeffValue local_coeff(const LcmCoeffMode& mode, uint64_t p, const uint32_t* nu, int k) {
  detail::CoeffValue out;
  if (mode.kind == LcmCoeffMode::Kind::Tau) {
    out.exact = true;
    int128 sum = 0;
    std::array<uint32_t, 8> a{};
    while (true) {
      int term = 1;
      uint32_t mx = 0;
      for (int i = 0; i < k; ++i) {
        term *= mu_star_mu_exp(a[size_t(i)]);
        mx = std::max(mx, nu[i] - a[size_t(i)]);
      }
      if (term != 0) sum = checked_add(sum, int128(term) * int128(mx + 1));
      int i = 0;
      while (i < k) {
        if (a[size_t(i)] < std::min(nu[i], 2u)) {
          ++a[size_t(i)];
          break;
        }
        a[size_t(i)] = 0;
        ++i;
      }
      if (i == k) break;
    }
    out.i = sum;
    return out;
  }

  bool int_r = mode.r == std::floor(mode.r) && mode.r >= 0.0;
  out.exact = int_r && mode.f.integer_valued();
  int128 sum_i = 0;
  double sum_d = 0.0;
  for (uint32_t mask = 0; mask < (1u << k); ++mask) {
    int sign = 1;
    uint32_t bits = 0;
    uint32_t mx = 0;
    bool ok = true;
    for (int i = 0; i < k; ++i) {
      uint32_t e = nu[i];
      if (mask & (1u << i)) {
        if (e == 0) {
          ok = false;
          break;
        }
        sign = -sign;
        ++bits;
        --e;
      }
      mx = std::max(mx, e);
    }
    if (!ok) continue;
    ScalarValue fv = eval_f_prime_power(mode.f, p, mx);
    if (out.exact) {
      int128 term = checked_mul(checked_pow(int128(p), unsigned(mode.r) * bits), fv.exact());
      sum_i = checked_add(sum_i, sign > 0 ? term : checked_sub(0, term));
    } else {
      sum_d += sign * std::pow(double(p), mode.r * bits) * fv.approx();
    }
  }
  out.i = sum_i;
  out.d = sum_d;
  return out;
}

}  // namespace

namespace detail {

CoeffValue lcm_coeff_fast(const LcmCoeffMode& mode, int k, const uint64_t* tuple,
                          const PrimeTable& table) {
  if (k < 1 || k > 8) throw domain_error("lcm_remainder_coeff: k must be in 1..8");
  // Merged per-prime exponent vectors, kept on the stack.
  struct Entry {
    uint64_t p;
    uint32_t nu[8];
  };
  std::array<Entry, 128> entries;
  int n_entries = 0;
  auto bump = [&](uint64_t p, uint32_t e, int coord) {
    for (int j = 0; j < n_entries; ++j) {
      if (entries[size_t(j)].p == p) {
        entries[size_t(j)].nu[coord] = e;
        return;
      }
    }
    if (n_entries == int(entries.size())) throw domain_error("lcm_remainder_coeff: too many primes");
    Entry& ent = entries[size_t(n_entries++)];
    ent.p = p;
    std::fill(ent.nu, ent.nu + 8, 0u);
    ent.nu[coord] = e;
  };
  for (int i = 0; i < k; ++i) {
    uint64_t v = tuple[i];
    if (v == 0) throw domain_error("lcm_remainder_coeff: entries must be positive");
    if (v <= table.limit) {
      while (v > 1) {
        uint64_t p = table.spf[v];
        uint32_t e = 0;
        while (v % p == 0) {
          v /= p;
          ++e;
        }
        bump(p, e, i);
      }
    } else {
      Factorization fac = factorize(v, table);
      for (const auto& pp : fac.parts) bump(pp.p, pp.e, i);
    }
  }

  CoeffValue out;
  out.exact = true;
  out.i = 1;
  double prod_d = 1.0;
  for (int j = 0; j < n_entries; ++j) {
    CoeffValue lc = local_coeff(mode, entries[size_t(j)].p, entries[size_t(j)].nu, k);
    if (out.exact && lc.exact) {
      out.i = checked_mul(out.i, lc.i);
      if (out.i == 0) return out;  // coefficient vanished; no need to go on
    } else {
      if (out.exact) {
        prod_d = to_double(out.i);
        out.exact = false;
      }
      prod_d *= lc.exact ? to_double(lc.i) : lc.d;
    }
  }
  out.d = prod_d;
  return out;
}

}  // namespace detail

ScalarValue lcm_remainder_coeff(const LcmCoeffMode& mode, int k, std::span<const uint64_t> tuple,
                                const PrimeTable& table) {
  mode.validate();
  if (int(tuple.size()) != k) throw domain_error("lcm_remainder_coeff: tuple size != k");
  detail::CoeffValue v = detail::lcm_coeff_fast(mode, k, tuple.data(), table);
  return v.exact ? ScalarValue::from_int(v.i) : ScalarValue::from_double(v.d);
}

namespace {

std::vector<uint64_t> all_divisors(uint64_t n, const PrimeTable& table) {
  Factorization fac = factorize(n, table);
  std::vector<uint64_t> divs{1};
  for (const auto& pp : fac.parts) {
    size_t old = divs.size();
    uint64_t q = 1;
    for (uint32_t e = 1; e <= pp.e; ++e) {
      q *= pp.p;
      for (size_t j = 0; j < old; ++j) divs.push_back(divs[j] * q);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

}  // namespace

ScalarValue lcm_remainder_coeff_literal(const LcmCoeffMode& mode, int k,
                                        std::span<const uint64_t> tuple, const PrimeTable& table) {
  mode.validate();
  if (int(tuple.size()) != k) throw domain_error("lcm_remainder_coeff_literal: tuple size != k");
  std::vector<std::vector<uint64_t>> divs;
  for (uint64_t v : tuple) divs.push_back(all_divisors(v, table));

  bool int_r = mode.r == std::floor(mode.r) && mode.r >= 0.0;
  bool exact = mode.kind == LcmCoeffMode::Kind::Tau || (int_r && mode.f.integer_valued());
  int128 acc_i = 0;
  KahanSum acc_d;

  std::vector<size_t> idx(k, 0);
  while (true) {
    int128 weight_i = 1;
    double weight_d = 1.0;
    uint64_t l = 1;
    bool zero = false;
    for (int i = 0; i < k && !zero; ++i) {
      uint64_t d = divs[size_t(i)][idx[size_t(i)]];
      uint64_t quot = tuple[size_t(i)] / d;
      if (mode.kind == LcmCoeffMode::Kind::Tau) {
        Factorization dfac = factorize(d, table);
        int w = 1;
        for (const auto& pp : dfac.parts) w *= mu_star_mu_exp(pp.e);
        if (w == 0) {
          zero = true;
          break;
        }
        weight_i = checked_mul(weight_i, int128(w));
      } else {
        int mu = mobius_point(factorize(d, table));
        if (mu == 0) {
          zero = true;
          break;
        }
        if (exact) {
          int128 t = checked_mul(int128(mu), checked_pow(int128(d), unsigned(mode.r)));
          weight_i = checked_mul(weight_i, t);
        } else {
          weight_d *= mu * std::pow(double(d), mode.r);
        }
      }
      l = lcm_u64(l, quot);
    }
    if (!zero) {
      ScalarValue fv = mode.kind == LcmCoeffMode::Kind::Tau
                           ? eval_f(FunctionId::tau(), l, table)
                           : eval_f(mode.f, l, table);
      if (exact) {
        acc_i = checked_add(acc_i, checked_mul(weight_i, fv.exact()));
      } else {
        acc_d.add(weight_d * fv.approx());
      }
    }
    int i = 0;
    while (i < k) {
      if (++idx[size_t(i)] < divs[size_t(i)].size()) break;
      idx[size_t(i)] = 0;
      ++i;
    }
    if (i == k) break;
  }
  return exact ? ScalarValue::from_int(acc_i) : ScalarValue::from_double(acc_d.value());
}

std::pair<ScalarValue, ScalarValue> verify_lcm_reconstruction(const LcmCoeffMode& mode, int k,
                                                              std::span<const uint64_t> tuple,
                                                              const PrimeTable& table) {
  mode.validate();
  if (int(tuple.size()) != k) throw domain_error("verify_lcm_reconstruction: tuple size != k");
  uint64_t l = 1;
  for (uint64_t v : tuple) l = lcm_u64(l, v);
  ScalarValue lhs = mode.kind == LcmCoeffMode::Kind::Tau ? eval_f(FunctionId::tau(), l, table)
                                                         : eval_f(mode.f, l, table);

  bool int_r = mode.r == std::floor(mode.r) && mode.r >= 0.0;
  bool exact = mode.kind == LcmCoeffMode::Kind::Tau || (int_r && mode.f.integer_valued());

  // Per coordinate: divisor list plus the weight of the complementary part
  // j = n_i / d, precomputed per divisor.
  const size_t kk = static_cast<size_t>(k);
  std::vector<std::vector<uint64_t>> divs(kk);
  std::vector<std::vector<int128>> jw_i(kk);
  std::vector<std::vector<double>> jw_d(kk);
  for (int i = 0; i < k; ++i) {
    divs[size_t(i)] = all_divisors(tuple[size_t(i)], table);
    for (uint64_t d : divs[size_t(i)]) {
      uint64_t j = tuple[size_t(i)] / d;
      if (mode.kind == LcmCoeffMode::Kind::Tau) {
        jw_i[size_t(i)].push_back(eval_f(FunctionId::tau(), j, table).exact());
      } else if (exact) {
        jw_i[size_t(i)].push_back(checked_pow(int128(j), unsigned(mode.r)));
      } else {
        jw_d[size_t(i)].push_back(std::pow(double(j), mode.r));
      }
    }
  }

  int128 acc_i = 0;
  KahanSum acc_d;
  std::vector<uint64_t> dpart(kk);
  std::vector<size_t> idx(kk, 0);
  while (true) {
    int128 weight_i = 1;
    double weight_d = 1.0;
    for (int i = 0; i < k; ++i) {
      dpart[size_t(i)] = divs[size_t(i)][idx[size_t(i)]];
      if (exact)
        weight_i = checked_mul(weight_i, jw_i[size_t(i)][idx[size_t(i)]]);
      else
        weight_d *= jw_d[size_t(i)][idx[size_t(i)]];
    }
    detail::CoeffValue coeff = detail::lcm_coeff_fast(mode, k, dpart.data(), table);
    if (exact) {
      if (coeff.i != 0) acc_i = checked_add(acc_i, checked_mul(weight_i, coeff.i));
    } else {
      acc_d.add(weight_d * (coeff.exact ? to_double(coeff.i) : coeff.d));
    }
    int i = 0;
    while (i < k) {
      if (++idx[size_t(i)] < divs[size_t(i)].size()) break;
      idx[size_t(i)] = 0;
      ++i;
    }
    if (i == k) break;
  }
  ScalarValue rhs = exact ? ScalarValue::from_int(acc_i) : ScalarValue::from_double(acc_d.value());
  return {lhs, rhs};
}

}  // namespace hyperconv
