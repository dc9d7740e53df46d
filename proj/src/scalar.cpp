#include "hyperconv/scalar.hpp"

#include <atomic>
#include <cmath>

namespace hyperconv {

int128 checked_add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw overflow_error("128-bit add overflow");
  return r;
}

int128 checked_sub(int128 a, int128 b) {
  int128 r;
  if (__builtin_sub_overflow(a, b, &r)) throw overflow_error("128-bit sub overflow");
  return r;
}

int128 checked_mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw overflow_error("128-bit mul overflow");
  return r;
}

int128 checked_pow(int128 base, unsigned exp) {
  int128 r = 1;
  while (exp > 0) {
    if (exp & 1u) r = checked_mul(r, base);
    exp >>= 1u;
    if (exp > 0) base = checked_mul(base, base);
  }
  return r;
}

std::string to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  uint128 u = neg ? uint128(0) - uint128(v) : uint128(v);
  std::string digits;
  while (u > 0) {
    digits.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) digits.push_back('-');
  return std::string(digits.rbegin(), digits.rend());
}

double to_double(int128 v) { return static_cast<double>(v); }

std::string ScalarValue::str() const {
  if (is_exact_) return to_string(exact_);
  return std::to_string(approx_);
}

namespace {
std::atomic<uint64_t> g_mem_cap_mb{4096};
}

void set_memory_cap_mb(uint64_t mb) { g_mem_cap_mb.store(mb); }

uint64_t memory_cap_mb() { return g_mem_cap_mb.load(); }

void check_allocation(uint64_t bytes, const char* what) {
  uint64_t cap = memory_cap_mb() * (uint64_t(1) << 20);
  if (bytes > cap) {
    throw resource_error(std::string(what) + ": needs " + std::to_string(bytes >> 20) +
                         " MiB, cap is " + std::to_string(memory_cap_mb()) + " MiB");
  }
}

}  // namespace hyperconv
