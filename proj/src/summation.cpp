#include "hyperconv/summation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <queue>
#include <vector>

namespace hyperconv {

std::string method_name(SumMethod m) {
  switch (m) {
    case SumMethod::Enumerate: return "enumerate";
    case SumMethod::Sieve: return "sieve";
    case SumMethod::Identity: return "identity";
    case SumMethod::Series: return "series";
  }
  return "?";
}

namespace {

uint64_t floor_region(double x) {
  if (x < 0.0) throw domain_error("summatory: x must be >= 0");
  if (x >= 1.9e18) throw domain_error("summatory: x too large");
  return x < 1.0 ? 0 : uint64_t(x);
}

uint64_t isqrt_u64(uint64_t n) {
  uint64_t r = uint64_t(std::sqrt(double(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

int128 piltz_t2(uint64_t X) {
  uint64_t s = isqrt_u64(X);
  int128 sum = 0;
  for (uint64_t d = 1; d <= s; ++d) sum += int128(X / d);
  return 2 * sum - int128(s) * int128(s);
}

// Divisor-summatory recursion evaluated over the distinct quotient values of
// X, level by level from tau_1 up to tau_k.
int128 piltz_tk(int k, uint64_t X) {
  if (X == 0) return 0;
  uint64_t s = isqrt_u64(X);
  size_t n_small = size_t(s);
  size_t n_large = size_t(X / (s + 1));

  auto value_count = n_small + n_large;
  std::vector<int128> prev(value_count), cur(value_count);
  // slot(v): small values 1..s sit at [v-1]; larger ones are X/i at
  // [n_small + n_large - i].
  auto slot = [&](uint64_t v) -> size_t {
    if (v <= s) return size_t(v) - 1;
    return n_small + n_large - size_t(X / v);
  };
  auto value_at = [&](size_t idx) -> uint64_t {
    if (idx < n_small) return uint64_t(idx) + 1;
    return X / uint64_t(value_count - idx);
  };

  for (size_t i = 0; i < value_count; ++i) prev[i] = int128(value_at(i));
  for (int level = 2; level <= k; ++level) {
    for (size_t i = 0; i < value_count; ++i) {
      uint64_t v = value_at(i);
      int128 total = 0;
      uint64_t d = 1;
      while (d <= v) {
        uint64_t q = v / d;
        uint64_t d_hi = v / q;
        total = checked_add(total, checked_mul(int128(d_hi - d + 1), prev[slot(q)]));
        d = d_hi + 1;
      }
      cur[i] = total;
    }
    std::swap(prev, cur);
  }
  return prev[slot(X)];
}

}  // namespace

ScalarValue piltz_summatory(int k, double x) {
  if (k < 1) throw domain_error("piltz_summatory: k must be >= 1");
  uint64_t X = floor_region(x);
  if (X == 0) return ScalarValue::from_int(0);
  if (k == 1) return ScalarValue::from_int(int128(X));
  if (k == 2) return ScalarValue::from_int(piltz_t2(X));
  return ScalarValue::from_int(piltz_tk(k, X));
}

ScalarValue weighted_piltz_summatory(int k, double r, double x) {
  if (k < 1) throw domain_error("weighted_piltz_summatory: k must be >= 1");
  if (r < 0.0) throw domain_error("weighted_piltz_summatory: r must be >= 0");
  uint64_t X = floor_region(x);
  if (X == 0) return ScalarValue::from_int(0);
  if (r == 0.0) return piltz_summatory(k, x);

  PrimeTable local = build_prime_table(std::max<uint64_t>(X, 2));
  FnTable tk = build_fn_table(FunctionId::tau_k(k), X, local);
  bool int_r = r == std::floor(r);
  if (int_r) {
    int128 acc = 0;
    for (uint64_t j = 1; j <= X; ++j) {
      int128 w = checked_mul(checked_pow(int128(j), unsigned(r)), int128(tk.ints[j]));
      acc = checked_add(acc, w);
    }
    return ScalarValue::from_int(acc);
  }
  KahanSum acc;
  for (uint64_t j = 1; j <= X; ++j) acc.add(std::pow(double(j), r) * double(tk.ints[j]));
  return ScalarValue::from_double(acc.value());
}

namespace {

ScalarValue zero_like(const ConvoluteKind& kind) {
  if (kind.form != ConvoluteForm::PlainTauK && !kind.f.integer_valued())
    return ScalarValue::from_double(0.0);
  return ScalarValue::from_int(0);
}

struct EnumerateState {
  uint64_t X;
  int k;
  const FnTable* f;
  bool exact;
  int128 acc_i = 0;
  KahanSum acc_d;
  std::vector<int128> prefix_i;  // LcmOf: prefix sums of f for the l == 1 runs
  std::vector<double> prefix_d;
  uint64_t tuples = 0;
};

void enumerate_gcd(EnumerateState& st, int level, uint64_t prod, uint64_t g) {
  uint64_t bound = st.X / prod;
  if (level == st.k - 1) {
    st.tuples += bound;
    if (g == 1) {
      // gcd(1, j) = 1 for the whole run.
      if (st.exact)
        st.acc_i = checked_add(st.acc_i, checked_mul(int128(bound), int128(st.f->ints[1])));
      else
        st.acc_d.add(double(bound) * st.f->floats[1]);
      return;
    }
    if (st.exact) {
      int128 run = 0;
      for (uint64_t j = 1; j <= bound; ++j) run += int128(st.f->ints[std::gcd(g, j)]);
      st.acc_i = checked_add(st.acc_i, run);
    } else {
      for (uint64_t j = 1; j <= bound; ++j) st.acc_d.add(st.f->floats[std::gcd(g, j)]);
    }
    return;
  }
  for (uint64_t v = 1; v <= bound; ++v) enumerate_gcd(st, level + 1, prod * v, std::gcd(g, v));
}

void enumerate_lcm(EnumerateState& st, int level, uint64_t prod, uint64_t l) {
  uint64_t bound = st.X / prod;
  if (level == st.k - 1) {
    st.tuples += bound;
    if (l == 1) {
      // lcm(1, j) = j: the run is a prefix sum of f.
      if (st.exact)
        st.acc_i = checked_add(st.acc_i, st.prefix_i[bound]);
      else
        st.acc_d.add(st.prefix_d[bound]);
      return;
    }
    if (st.exact) {
      int128 run = 0;
      for (uint64_t j = 1; j <= bound; ++j) run += int128(st.f->ints[l / std::gcd(l, j) * j]);
      st.acc_i = checked_add(st.acc_i, run);
    } else {
      for (uint64_t j = 1; j <= bound; ++j) st.acc_d.add(st.f->floats[l / std::gcd(l, j) * j]);
    }
    return;
  }
  for (uint64_t v = 1; v <= bound; ++v)
    enumerate_lcm(st, level + 1, prod * v, l / std::gcd(l, v) * v);
}

uint64_t count_region(int k, uint64_t X, uint64_t prod, uint64_t* tuples) {
  // Plain region count with the same recursion shape as above.
  uint64_t bound = X / prod;
  if (k == 1) {
    *tuples += bound;
    return bound;
  }
  uint64_t total = 0;
  for (uint64_t v = 1; v <= bound; ++v) total += count_region(k - 1, X, prod * v, tuples);
  return total;
}

}  // namespace

SummatoryResult hyper_sum_enumerate(const ConvoluteKind& kind, double x, const PrimeTable& table) {
  kind.validate();
  uint64_t X = floor_region(x);
  SummatoryResult res;
  res.x = x;
  res.kind = kind;
  res.method = SumMethod::Enumerate;
  if (X == 0) {
    res.value = zero_like(kind);
    return res;
  }

  if (kind.form == ConvoluteForm::PlainTauK) {
    uint64_t tuples = 0;
    uint64_t total = count_region(kind.k, X, 1, &tuples);
    res.value = ScalarValue::from_int(int128(total));
    res.terms_used = tuples;
    return res;
  }

  if (table.limit < X) throw domain_error("hyper_sum_enumerate: prime table smaller than x");
  FnTable f = build_fn_table(kind.f, X, table);
  EnumerateState st;
  st.X = X;
  st.k = kind.k;
  st.f = &f;
  st.exact = f.exact;

  if (kind.form == ConvoluteForm::GcdOf) {
    enumerate_gcd(st, 0, 1, 0);  // gcd identity: gcd(0, v) = v
  } else {
    check_allocation((X + 1) * sizeof(int128), "hyper_sum_enumerate");
    if (st.exact) {
      st.prefix_i.assign(X + 1, 0);
      for (uint64_t j = 1; j <= X; ++j)
        st.prefix_i[j] = checked_add(st.prefix_i[j - 1], int128(f.ints[j]));
    } else {
      st.prefix_d.assign(X + 1, 0.0);
      KahanSum run;
      for (uint64_t j = 1; j <= X; ++j) {
        run.add(f.floats[j]);
        st.prefix_d[j] = run.value();
      }
    }
    enumerate_lcm(st, 0, 1, 1);
  }
  res.value = st.exact ? ScalarValue::from_int(st.acc_i) : ScalarValue::from_double(st.acc_d.value());
  res.terms_used = st.tuples;
  return res;
}

namespace {

// Compositions of a into k nonnegative parts with min >= m:
// C(a - k m + k - 1, k - 1).
int128 comps_min_ge(uint32_t a, int k, uint32_t m) {
  uint64_t need = uint64_t(m) * uint64_t(k);
  if (need > a) return 0;
  return binomial(uint64_t(a) - need + uint64_t(k) - 1, uint64_t(k) - 1);
}

// Compositions of a into k nonnegative parts, all parts <= m (inclusion-
// exclusion over parts forced above m).
int128 comps_max_le(uint32_t a, int k, int64_t m) {
  if (m < 0) return 0;
  int128 total = 0;
  for (int j = 0; j <= k; ++j) {
    uint64_t used = uint64_t(j) * uint64_t(m + 1);
    if (used > a) break;
    int128 term = checked_mul(binomial(uint64_t(k), uint64_t(j)),
                              binomial(uint64_t(a) - used + uint64_t(k) - 1, uint64_t(k) - 1));
    total = (j % 2 == 0) ? checked_add(total, term) : checked_sub(total, term);
  }
  return total;
}

// Convolute value at a prime power, by the layered min/max decomposition.
ScalarValue convolute_local(const ConvoluteKind& kind, uint64_t p, uint32_t a) {
  if (a == 0) {
    return kind.form != ConvoluteForm::PlainTauK && !kind.f.integer_valued()
               ? ScalarValue::from_double(1.0)
               : ScalarValue::from_int(1);
  }
  int k = kind.k;
  if (kind.form == ConvoluteForm::PlainTauK)
    return ScalarValue::from_int(binomial(uint64_t(a) + k - 1, k - 1));

  bool exact = kind.f.integer_valued();
  int128 acc_i = 0;
  double acc_d = 0.0;
  if (kind.form == ConvoluteForm::GcdOf) {
    for (uint32_t m = 0; uint64_t(m) * k <= a; ++m) {
      int128 weight = checked_sub(comps_min_ge(a, k, m), comps_min_ge(a, k, m + 1));
      if (weight == 0) continue;
      ScalarValue fv = eval_f_prime_power(kind.f, p, m);
      if (exact)
        acc_i = checked_add(acc_i, checked_mul(weight, fv.exact()));
      else
        acc_d += to_double(weight) * fv.approx();
    }
  } else {
    for (uint32_t m = (a + k - 1) / k; m <= a; ++m) {
      int128 weight = checked_sub(comps_max_le(a, k, int64_t(m)), comps_max_le(a, k, int64_t(m) - 1));
      if (weight == 0) continue;
      ScalarValue fv = eval_f_prime_power(kind.f, p, m);
      if (exact)
        acc_i = checked_add(acc_i, checked_mul(weight, fv.exact()));
      else
        acc_d += to_double(weight) * fv.approx();
    }
  }
  return exact ? ScalarValue::from_int(acc_i) : ScalarValue::from_double(acc_d);
}

bool sieve_supported(const ConvoluteKind& kind) {
  if (kind.form == ConvoluteForm::PlainTauK) return true;
  if (kind.f.multiplicative()) return true;
  // The divisor identity has prime-power support for these two, which the
  // sieve can scan directly.
  return kind.form == ConvoluteForm::GcdOf &&
         (kind.f.tag == Fn::SmallOmega || kind.f.tag == Fn::BigOmega);
}

}  // namespace

SummatoryResult sieve_convolute_prefix(const ConvoluteKind& kind, double x, const PrimeTable& table) {
  kind.validate();
  if (!sieve_supported(kind))
    throw domain_error("sieve_convolute_prefix: no sieve for " + kind.name());
  uint64_t X = floor_region(x);
  SummatoryResult res;
  res.x = x;
  res.kind = kind;
  res.method = SumMethod::Sieve;
  if (X == 0) {
    res.value = zero_like(kind);
    return res;
  }
  if (table.limit < X) throw domain_error("sieve_convolute_prefix: prime table smaller than x");

  if (kind.form == ConvoluteForm::GcdOf &&
      (kind.f.tag == Fn::SmallOmega || kind.f.tag == Fn::BigOmega)) {
    FnTable tk = build_fn_table(FunctionId::tau_k(kind.k), X, table);
    check_allocation((X + 1) * sizeof(int64_t), "sieve_convolute_prefix");
    std::vector<int64_t> vals(X + 1, 0);
    bool all_powers = kind.f.tag == Fn::BigOmega;
    for (uint32_t p : table.primes) {
      uint128 base = 1;
      for (int i = 0; i < kind.k; ++i) base *= p;
      if (base > X) break;
      while (base <= X) {
        uint64_t b = uint64_t(base);
        for (uint64_t m = 1; m * b <= X; ++m) vals[m * b] += tk.ints[m];
        if (!all_powers) break;
        for (int i = 0; i < kind.k; ++i) {
          base *= p;
          if (base > X) break;
        }
      }
    }
    int128 acc = 0;
    for (uint64_t n = 1; n <= X; ++n) acc = checked_add(acc, int128(vals[n]));
    res.value = ScalarValue::from_int(acc);
    res.terms_used = X;
    return res;
  }

  // Multiplicative lift of the convolute itself.
  bool exact = kind.form == ConvoluteForm::PlainTauK || kind.f.integer_valued();
  check_allocation((X + 1) * (exact ? sizeof(int64_t) : sizeof(double)) +
                       (X + 1) * (sizeof(uint32_t) * 2 + 1),
                   "sieve_convolute_prefix");
  std::vector<uint32_t> cof(X + 1, 1), ppw(X + 1, 1);
  std::vector<uint8_t> pe(X + 1, 0);
  for (uint64_t i = 2; i <= X; ++i) {
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

  if (exact) {
    std::vector<int64_t> vals(X + 1, 0);
    vals[1] = 1;
    std::vector<int64_t> local(X + 1, INT64_MIN);
    for (uint64_t i = 2; i <= X; ++i) {
      uint32_t q = ppw[i];
      if (local[q] == INT64_MIN) {
        int128 v = convolute_local(kind, table.spf[i], pe[i]).exact();
        if (v > INT64_MAX || v < INT64_MIN + 1)
          throw overflow_error("sieve_convolute_prefix: local value exceeds 64 bits");
        local[q] = int64_t(v);
      }
      int128 v = checked_mul(int128(vals[cof[i]]), int128(local[q]));
      if (v > INT64_MAX || v < INT64_MIN + 1)
        throw overflow_error("sieve_convolute_prefix: value exceeds 64 bits");
      vals[i] = int64_t(v);
    }
    int128 acc = 0;
    for (uint64_t n = 1; n <= X; ++n) acc = checked_add(acc, int128(vals[n]));
    res.value = ScalarValue::from_int(acc);
  } else {
    std::vector<double> vals(X + 1, 0.0);
    vals[1] = 1.0;
    std::vector<double> local(X + 1, std::nan(""));
    for (uint64_t i = 2; i <= X; ++i) {
      uint32_t q = ppw[i];
      if (std::isnan(local[q])) local[q] = convolute_local(kind, table.spf[i], pe[i]).approx();
      vals[i] = vals[cof[i]] * local[q];
    }
    KahanSum acc;
    for (uint64_t n = 1; n <= X; ++n) acc.add(vals[n]);
    res.value = ScalarValue::from_double(acc.value());
  }
  res.terms_used = X;
  return res;
}

SummatoryResult hyper_sum_gcd_identity(const FunctionId& f, int k, double x,
                                       const PrimeTable& table) {
  if (k < 2) throw domain_error("hyper_sum_gcd_identity: k must be >= 2");
  uint64_t X = floor_region(x);
  SummatoryResult res;
  res.x = x;
  res.kind = ConvoluteKind::gcd_of(f, k);
  res.method = SumMethod::Identity;
  if (X == 0) {
    res.value = zero_like(res.kind);
    return res;
  }
  uint64_t root = integer_nth_root(X, k);
  auto dk_quotient = [&](uint64_t d) {
    uint128 dk = 1;
    for (int i = 0; i < k; ++i) dk *= d;
    return X / uint64_t(dk);
  };

  bool exact = f.integer_valued();
  int128 acc_i = 0;
  KahanSum acc_d;
  uint64_t terms = 0;

  switch (f.tag) {
    case Fn::Log: {
      // mu*log = Lambda: prime powers only.
      for (uint64_t d = 2; d <= root; ++d) {
        Factorization fac = factorize(d, table);
        if (fac.parts.size() != 1) continue;
        acc_d.add(std::log(double(fac.parts[0].p)) * to_double(piltz_summatory(k, double(dk_quotient(d))).exact()));
        ++terms;
      }
      break;
    }
    case Fn::SmallOmega: {
      for (uint64_t d = 2; d <= root; ++d) {
        if (!table.is_prime(d)) continue;
        acc_i = checked_add(acc_i, piltz_summatory(k, double(dk_quotient(d))).exact());
        ++terms;
      }
      break;
    }
    case Fn::BigOmega: {
      for (uint64_t d = 2; d <= root; ++d) {
        Factorization fac = factorize(d, table);
        if (fac.parts.size() != 1) continue;
        acc_i = checked_add(acc_i, piltz_summatory(k, double(dk_quotient(d))).exact());
        ++terms;
      }
      break;
    }
    default: {
      for (uint64_t d = 1; d <= root; ++d) {
        ScalarValue w = mobius_transform_point(f, d, table);
        int128 tk = piltz_summatory(k, double(dk_quotient(d))).exact();
        if (exact) {
          if (w.exact() == 0) continue;
          acc_i = checked_add(acc_i, checked_mul(w.exact(), tk));
        } else {
          if (w.approx() == 0.0) continue;
          acc_d.add(w.approx() * to_double(tk));
        }
        ++terms;
      }
      break;
    }
  }
  res.value = exact ? ScalarValue::from_int(acc_i) : ScalarValue::from_double(acc_d.value());
  res.terms_used = terms;
  return res;
}

namespace {

struct SeriesEntry {
  uint64_t prod;
  std::array<uint32_t, 8> d;

  bool operator>(const SeriesEntry& o) const {
    if (prod != o.prod) return prod > o.prod;
    return d > o.d;
  }
};

}  // namespace

SummatoryResult hyper_sum_lcm_series(const LcmCoeffMode& mode, int k, double x,
                                     const TruncationConfig& cfg, const PrimeTable& table) {
  mode.validate();
  if (k < 2 || k > 8) throw domain_error("hyper_sum_lcm_series: k must be in 2..8");
  if (cfg.coordinate_cap < 1) throw domain_error("hyper_sum_lcm_series: cap must be >= 1");
  uint64_t X = floor_region(x);
  ConvoluteKind kind = mode.kind == LcmCoeffMode::Kind::Tau
                           ? ConvoluteKind::lcm_of(FunctionId::tau(), k)
                           : ConvoluteKind::lcm_of(mode.f, k);
  SummatoryResult res;
  res.x = x;
  res.kind = kind;
  res.method = SumMethod::Series;
  res.truncation_bound = 0.0;
  if (X == 0) {
    res.value = zero_like(kind);
    return res;
  }
  if (X > UINT32_MAX) throw resource_error("hyper_sum_lcm_series: x beyond 32-bit coordinates");
  if (table.limit < X) throw domain_error("hyper_sum_lcm_series: prime table smaller than x");

  bool int_r = mode.r == std::floor(mode.r) && mode.r >= 0.0;
  bool exact = mode.kind == LcmCoeffMode::Kind::Tau || (int_r && mode.f.integer_valued());

  // Prefix table of the inner weights: j^r tau_k(j) (ArClass) or tau_2k(j).
  int weight_k = mode.kind == LcmCoeffMode::Kind::Tau ? 2 * k : k;
  FnTable tk = build_fn_table(FunctionId::tau_k(weight_k), X, table);
  std::vector<int128> wprefix_i;
  std::vector<double> wprefix_d;
  if (exact) {
    wprefix_i.assign(X + 1, 0);
    for (uint64_t j = 1; j <= X; ++j) {
      int128 w = int128(tk.ints[j]);
      if (mode.kind == LcmCoeffMode::Kind::ArClass && mode.r > 0.0)
        w = checked_mul(w, checked_pow(int128(j), unsigned(mode.r)));
      wprefix_i[j] = checked_add(wprefix_i[j - 1], w);
    }
  } else {
    wprefix_d.assign(X + 1, 0.0);
    KahanSum run;
    for (uint64_t j = 1; j <= X; ++j) {
      run.add(std::pow(double(j), mode.r) * double(tk.ints[j]));
      wprefix_d[j] = run.value();
    }
  }

  std::priority_queue<SeriesEntry, std::vector<SeriesEntry>, std::greater<SeriesEntry>> heap;
  SeriesEntry root;
  root.prod = 1;
  root.d.fill(1);
  heap.push(root);

  int128 acc_i = 0;
  KahanSum acc_d;
  uint64_t pops = 0;
  bool pruned = false;
  uint64_t pruned_min_prod = UINT64_MAX;
  std::array<uint64_t, 8> tuple{};

  while (!heap.empty()) {
    SeriesEntry e = heap.top();
    heap.pop();
    ++pops;
    for (int i = 0; i < k; ++i) tuple[size_t(i)] = e.d[size_t(i)];
    detail::CoeffValue coeff = detail::lcm_coeff_fast(mode, k, tuple.data(), table);
    uint64_t q = X / e.prod;
    if (exact) {
      if (coeff.i != 0) acc_i = checked_add(acc_i, checked_mul(coeff.i, wprefix_i[q]));
    } else {
      double cd = coeff.exact ? to_double(coeff.i) : coeff.d;
      if (cd != 0.0) acc_d.add(cd * wprefix_d[q]);
    }

    int last_above_one = -1;
    for (int i = k - 1; i >= 0; --i) {
      if (e.d[size_t(i)] > 1) {
        last_above_one = i;
        break;
      }
    }
    for (int i = std::max(last_above_one, 0); i < k; ++i) {
      uint64_t child_prod = e.prod / e.d[size_t(i)] * (e.d[size_t(i)] + 1);
      if (child_prod > X) continue;
      if (uint64_t(e.d[size_t(i)]) + 1 > cfg.coordinate_cap) {
        pruned = true;
        pruned_min_prod = std::min(pruned_min_prod, child_prod);
        continue;
      }
      SeriesEntry c = e;
      c.d[size_t(i)] += 1;
      c.prod = child_prod;
      heap.push(c);
    }
  }

  res.terms_used = pops;
  if (!pruned) {
    res.value = exact ? ScalarValue::from_int(acc_i) : ScalarValue::from_double(acc_d.value());
    res.truncation_bound = 0.0;
    return res;
  }

  // Skipped tuples all have product >= pruned_min_prod. Bound their mass by
  // the absolute-coefficient convolute a(n) = sum_{prod d = n} |coeff(d)|,
  // which is multiplicative and sieves like any convolute.
  std::vector<double> absconv(X + 1, 0.0);
  {
    std::vector<double> local(X + 1, std::nan(""));
    std::vector<uint32_t> cof(X + 1, 1), ppw(X + 1, 1);
    std::vector<uint8_t> pe(X + 1, 0);
    for (uint64_t i = 2; i <= X; ++i) {
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
    absconv[1] = 1.0;
    std::vector<uint32_t> comp(k, 0);
    for (uint64_t i = 2; i <= X; ++i) {
      uint32_t q = ppw[i];
      if (std::isnan(local[q])) {
        uint32_t a = pe[i];
        uint64_t p = table.spf[i];
        // Enumerate compositions of a into k parts; sum |local coefficient|.
        double sum = 0.0;
        std::fill(comp.begin(), comp.end(), 0u);
        comp[0] = a;
        std::array<uint64_t, 8> t{};
        while (true) {
          for (int j = 0; j < k; ++j) {
            uint64_t pw = 1;
            for (uint32_t c = 0; c < comp[size_t(j)]; ++c) pw *= p;
            t[size_t(j)] = pw;
          }
          detail::CoeffValue lv = detail::lcm_coeff_fast(mode, k, t.data(), table);
          sum += std::abs(lv.exact ? to_double(lv.i) : lv.d);
          // next composition of a into k parts
          int j = 0;
          while (j < k - 1 && comp[size_t(j)] == 0) ++j;
          if (j == k - 1) break;
          uint32_t first = comp[size_t(j)];
          comp[size_t(j)] = 0;
          comp[0] = first - 1;
          comp[size_t(j) + 1] += 1;
        }
        local[q] = sum;
      }
      absconv[i] = absconv[cof[i]] * local[q];
    }
  }
  double bound = 0.0;
  for (uint64_t n = pruned_min_prod; n <= X; ++n) {
    double w = exact ? to_double(wprefix_i[X / n]) : wprefix_d[X / n];
    bound += absconv[n] * std::abs(w);
  }
  res.value = ScalarValue::from_double(exact ? to_double(acc_i) : acc_d.value());
  res.truncation_bound = bound;
  return res;
}

}  // namespace hyperconv
