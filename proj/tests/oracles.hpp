#ifndef HYPERCONV_TEST_ORACLES_HPP
#define HYPERCONV_TEST_ORACLES_HPP

// Brute-force reference implementations for the test suites. Everything here
// is deliberately independent of the library's sieves and identities: plain
// trial division, literal tuple recursion, permutation counting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

inline std::vector<uint32_t> simple_primes(uint32_t limit) {
  std::vector<bool> is(limit + 1, true);
  std::vector<uint32_t> out;
  for (uint32_t i = 2; i <= limit; ++i) {
    if (!is[i]) continue;
    out.push_back(i);
    for (uint64_t j = uint64_t(i) * i; j <= limit; j += i) is[j] = false;
  }
  return out;
}

inline std::vector<uint64_t> divisors(uint64_t n) {
  std::vector<uint64_t> low, high;
  for (uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      low.push_back(d);
      if (d != n / d) high.push_back(n / d);
    }
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

inline int mobius(uint64_t n) {
  int count = 0;
  for (uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      ++count;
    }
  }
  if (n > 1) ++count;
  return count % 2 == 0 ? 1 : -1;
}

inline uint64_t phi(uint64_t n) {
  uint64_t result = n;
  for (uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

inline uint64_t sigma(uint64_t n) {
  uint64_t s = 0;
  for (uint64_t d : divisors(n)) s += d;
  return s;
}

inline int small_omega(uint64_t n) {
  int w = 0;
  for (uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      ++w;
      while (n % p == 0) n /= p;
    }
  }
  return w + (n > 1 ? 1 : 0);
}

inline int big_omega(uint64_t n) {
  int w = 0;
  for (uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      n /= p;
      ++w;
    }
  }
  return w + (n > 1 ? 1 : 0);
}

// Ordered k-tuples with product n, by literal recursion over divisors.
inline void tuples_with_product(uint64_t n, int k, std::vector<uint64_t>& cur,
                                std::vector<std::vector<uint64_t>>& out) {
  if (k == 1) {
    cur.push_back(n);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (uint64_t d : divisors(n)) {
    cur.push_back(d);
    tuples_with_product(n / d, k - 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<uint64_t>> tuples_with_product(uint64_t n, int k) {
  std::vector<std::vector<uint64_t>> out;
  std::vector<uint64_t> cur;
  tuples_with_product(n, k, cur, out);
  return out;
}

inline uint64_t tau_k(int k, uint64_t n) { return tuples_with_product(n, k).size(); }

inline uint64_t gcd_tuple(const std::vector<uint64_t>& t) {
  uint64_t g = 0;
  for (uint64_t v : t) g = std::gcd(g, v);
  return g;
}

inline uint64_t lcm_tuple(const std::vector<uint64_t>& t) {
  uint64_t l = 1;
  for (uint64_t v : t) l = l / std::gcd(l, v) * v;
  return l;
}

// Pascal-triangle binomials, independent of the multiplicative formula.
inline uint64_t pascal_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::vector<uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<uint64_t> next(i + 1, 1);
    for (int j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
    row = std::move(next);
  }
  return row[k];
}

// Eulerian numbers by descent counting over all permutations of t elements.
inline std::vector<uint64_t> eulerian_by_descents(int t) {
  std::vector<int> perm(t);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<uint64_t> counts(t, 0);
  do {
    int descents = 0;
    for (int i = 0; i + 1 < t; ++i) {
      if (perm[i] > perm[i + 1]) ++descents;
    }
    counts[descents] += 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return counts;
}

// Deterministic xorshift for hand-rolled property sampling.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  uint64_t below(uint64_t n) { return next() % n; }
};

}  // namespace oracle

#endif  // HYPERCONV_TEST_ORACLES_HPP
